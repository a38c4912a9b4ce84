"""Synthetic dataset generator: schedules, injections, determinism."""

import numpy as np
import pytest

from modescope.model import ConfigError
from modescope.synth import SynthSpec, build_dataset, generate_synthetic

SMALL = dict(n_nodes=8, hours=6.0, dt=30.0)


class TestSynthSpec:
    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            SynthSpec(scenario="chaos")

    def test_zero_nodes(self):
        with pytest.raises(ConfigError):
            SynthSpec(n_nodes=0)

    def test_no_sensors(self):
        with pytest.raises(ConfigError):
            SynthSpec(n_temp=0, n_current=0)

    @pytest.mark.parametrize("kw", [{"hours": 0.0}, {"dt": -1.0}])
    def test_nonpositive_extent(self, kw):
        with pytest.raises(ConfigError):
            SynthSpec(**kw)

    def test_window_too_short_for_analysis(self):
        with pytest.raises(ConfigError, match="too short"):
            build_dataset(SynthSpec(scenario="clean", hours=0.01, dt=60.0))


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        spec = SynthSpec(scenario="drift", **SMALL)
        paths_a, truth_a = generate_synthetic(spec, 7, tmp_path / "a")
        paths_b, truth_b = generate_synthetic(spec, 7, tmp_path / "b")
        assert truth_a == truth_b
        assert set(paths_a) == {"env", "jobs", "hw", "truth"}
        for name in ("env", "jobs", "hw", "truth"):
            assert paths_a[name].read_bytes() == paths_b[name].read_bytes()

    def test_different_seed_different_values(self):
        spec = SynthSpec(scenario="clean", **SMALL)
        a = build_dataset(spec, 1)
        b = build_dataset(spec, 2)
        assert not np.array_equal(a.env.values, b.env.values)


class TestCleanScenario:
    def test_no_injections_and_all_jobs_pass(self):
        spec = SynthSpec(scenario="clean", **SMALL)
        ds = build_dataset(spec, 3)
        assert ds.injections == []
        assert all(j.exit_status == "pass" for j in ds.jobs)
        assert ds.truth_dict(spec, 3)["injected"] == []

    def test_series_layout(self):
        ds = build_dataset(SynthSpec(scenario="clean", **SMALL), 3)
        assert ds.env.values.shape == (8 * 8, 6 * 3600 / 30)
        nodes = {k.node_id for k in ds.env.series_ids}
        assert nodes == set(range(8))

    def test_background_events_are_informational(self):
        ds = build_dataset(SynthSpec(scenario="clean", **SMALL), 3)
        assert ds.events and all(e.severity == "informational" for e in ds.events)


@pytest.fixture(scope="module")
def pair():
    clean = build_dataset(SynthSpec(scenario="clean", **SMALL), 4)
    drift = build_dataset(SynthSpec(scenario="drift", drift_nodes=(2,), **SMALL), 4)
    return clean, drift


class TestDriftScenario:
    def test_truth_names_the_node(self, pair):
        _, drift = pair
        assert [inj.node_id for inj in drift.injections] == [2]
        assert drift.injections[0].kind == "drift"

    def test_only_injected_temp_rows_change(self, pair):
        clean, drift = pair
        diff = drift.env.values - clean.env.values
        for i, key in enumerate(drift.env.series_ids):
            if key.node_id == 2 and key.sensor_name.startswith("temp"):
                assert diff[i].max() > 0.5 * 12.0  # drift_delta default
                assert diff[i].min() >= -1e-9  # upward excursion only
            else:
                assert np.array_equal(diff[i], np.zeros_like(diff[i]))

    def test_fatal_events_cluster_on_injected_node(self, pair):
        _, drift = pair
        fatal = [e for e in drift.events if e.severity == "fatal"]
        assert 4 <= len(fatal) <= 8
        assert all(e.node_id == 2 for e in fatal)
        inj = drift.injections[0]
        assert all(inj.start <= e.timestamp <= inj.end for e in fatal)

    def test_job_hosting_the_drift_marked_failed(self, pair):
        clean, drift = pair
        inj = drift.injections[0]
        flagged = [
            j for j in drift.jobs
            if 2 in j.node_ids and j.overlaps(inj.start, inj.end)
        ]
        assert flagged and all(j.exit_status == "fail" for j in flagged)
        assert all(j.exit_status == "pass" for j in clean.jobs)


class TestStallScenario:
    def test_current_sags_on_injected_node(self):
        clean = build_dataset(SynthSpec(scenario="clean", **SMALL), 5)
        stall = build_dataset(
            SynthSpec(scenario="stall", stall_nodes=(1,), **SMALL), 5
        )
        diff = stall.env.values - clean.env.values
        for i, key in enumerate(stall.env.series_ids):
            if key.node_id == 1 and key.sensor_name.startswith("curr"):
                assert diff[i].min() < -0.5 * 4.0  # stall_drop default
                assert diff[i].max() <= 1e-9
            else:
                assert np.array_equal(diff[i], np.zeros_like(diff[i]))
        throttles = [e for e in stall.events if e.category == "throttle"]
        assert len(throttles) == 3
        assert all(e.node_id == 1 and e.severity == "warning" for e in throttles)


class TestMixedScenario:
    def test_drift_and_stall_nodes_disjoint(self):
        ds = build_dataset(SynthSpec(scenario="mixed", n_nodes=16, hours=6.0, dt=30.0), 6)
        drift_nodes = {i.node_id for i in ds.injections if i.kind == "drift"}
        stall_nodes = {i.node_id for i in ds.injections if i.kind == "stall"}
        assert len(drift_nodes) == 3 and len(stall_nodes) == 2
        assert drift_nodes.isdisjoint(stall_nodes)


@pytest.fixture(scope="module")
def ds():
    return build_dataset(
        SynthSpec(scenario="two-jobs", n_nodes=64, hours=24.0, dt=60.0), 3
    )


class TestTwoJobScenario:
    def test_twelve_jobs_in_pairs(self, ds):
        assert [j.job_id for j in ds.jobs] == [f"job_{i:04d}" for i in range(12)]
        for a, b in zip(ds.jobs[0::2], ds.jobs[1::2]):
            assert a.end == b.start  # back-to-back
            assert a.node_ids == b.node_ids == frozenset(range(64))

    def test_first_pair_failed_rest_pass(self, ds):
        statuses = [j.exit_status for j in ds.jobs]
        assert statuses[:2] == ["fail", "fail"]
        assert all(s == "pass" for s in statuses[2:])

    def test_pair_geometry_alternates(self, ds):
        t_root = 24 * 3600.0
        tile = t_root / 8.0
        long_run = tile / 2.0 + 1320.0
        firsts = [j.end - j.start for j in ds.jobs[0::2]]
        assert firsts[0] == pytest.approx(long_run)
        assert firsts[1] == pytest.approx(tile - long_run)
        assert firsts[2] == pytest.approx(long_run)

    def test_scored_pair_boundary_off_tile_midpoint(self, ds):
        a, b = ds.jobs[0], ds.jobs[1]
        midpoint = (a.start + b.end) / 2.0
        assert abs(a.end - midpoint) == pytest.approx(1320.0)

    def test_oscillation_spans_the_scored_pair(self, ds):
        assert len(ds.injections) == 1
        inj = ds.injections[0]
        assert inj.kind == "oscillation"
        assert inj.start == ds.jobs[0].start
        assert inj.end == ds.jobs[1].end
