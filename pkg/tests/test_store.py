"""File-backed run store: persistence, manifest commit point, queries."""

import json

import numpy as np
import pytest

from modescope.model import RunNotFoundError
from modescope.store import (
    config_hash,
    dataset_hash,
    list_runs,
    load_bands,
    load_events,
    load_jobs,
    load_manifest,
    load_reports,
    load_series,
    load_tree,
    query_report,
    run_id_for,
    write_run,
)


class TestHashes:
    def test_config_hash_deterministic_and_order_free(self):
        a = config_hash({"x": 1, "y": [2, 3]})
        b = config_hash({"y": [2, 3], "x": 1})
        assert a == b and len(a) == 12

    def test_config_hash_sensitive_to_values(self):
        assert config_hash({"x": 1}) != config_hash({"x": 2})

    def test_dataset_hash_path_order_free(self, tmp_path):
        p1 = tmp_path / "a.txt"
        p2 = tmp_path / "b.txt"
        p1.write_text("one")
        p2.write_text("two")
        assert dataset_hash([p1, p2]) == dataset_hash([p2, p1])

    def test_dataset_hash_tracks_content(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text("one")
        before = dataset_hash([p])
        p.write_text("two")
        assert dataset_hash([p]) != before

    def test_run_id_combines_config_and_data(self):
        base = run_id_for({"x": 1}, "abc")
        assert run_id_for({"x": 1}, "abc") == base
        assert run_id_for({"x": 2}, "abc") != base
        assert run_id_for({"x": 1}, "abd") != base


class TestRoundTrips:
    def test_series(self, sample_run):
        env = load_series(sample_run["root"], sample_run["run_id"])
        orig = sample_run["env"]
        assert np.array_equal(env.values, orig.values)
        assert env.dt == orig.dt and env.t0 == orig.t0
        assert env.series_ids == orig.series_ids
        assert env.gaps == orig.gaps

    def test_tree(self, sample_run):
        tree = load_tree(sample_run["root"], sample_run["run_id"])
        assert tree.to_dict() == sample_run["result"].tree.to_dict()

    def test_bands(self, sample_run):
        bands = load_bands(sample_run["root"], sample_run["run_id"])
        orig = sample_run["result"].main_magnitudes
        assert bands.bands == orig.bands
        assert np.allclose(bands.magnitudes, orig.magnitudes)
        assert bands.mode_counts == orig.mode_counts
        assert bands.series_ids == orig.series_ids

    def test_reports(self, sample_run):
        reports = load_reports(sample_run["root"], sample_run["run_id"])
        orig = sample_run["result"].reports
        assert [r.to_dict() for r in reports] == [r.to_dict() for r in orig]
        assert reports[0].job_id is None  # overall report leads

    def test_jobs_and_events(self, sample_run):
        assert load_jobs(sample_run["root"], sample_run["run_id"]) == sample_run["jobs"]
        events = load_events(sample_run["root"], sample_run["run_id"])
        assert [e.to_dict() for e in events] == [e.to_dict() for e in sample_run["events"]]


class TestManifest:
    def test_fields(self, sample_run):
        m = load_manifest(sample_run["root"], sample_run["run_id"])
        env = sample_run["env"]
        assert m["run_id"] == sample_run["run_id"]
        assert m["dataset_hash"] == sample_run["data_hash"]
        assert m["config_hash"] == config_hash(sample_run["config"].to_dict())
        assert m["band_hash"] == sample_run["result"].main_magnitudes.band_hash()
        assert m["window"]["n_series"] == env.n_series
        assert m["window"]["n_snapshots"] == env.n_snapshots
        assert m["window"]["dt"] == env.dt
        assert set(m["files"]) == {
            "series.npz", "tree.json", "bands.json",
            "zscores.jsonl", "jobs.jsonl", "hwevents.jsonl",
        }

    def test_manifest_is_the_commit_point(self, sample_run, tmp_path):
        # a run directory without a manifest is invisible: half-written runs
        # never surface
        stale = tmp_path / "deadbeefcafe"
        stale.mkdir()
        (stale / "tree.json").write_text("{}")
        assert list_runs(tmp_path) == []
        with pytest.raises(RunNotFoundError):
            load_manifest(tmp_path, "deadbeefcafe")

    def test_list_runs(self, sample_run):
        rows = list_runs(sample_run["root"])
        assert [r["run_id"] for r in rows] == [sample_run["run_id"]]
        assert "created" in rows[0]

    def test_unknown_run(self, sample_run):
        with pytest.raises(RunNotFoundError):
            load_series(sample_run["root"], "nope")


class TestWriteRun:
    def test_explicit_run_id_and_relisting(self, sample_run, tmp_path):
        run_id, run_dir = write_run(
            tmp_path,
            config=sample_run["config"].to_dict(),
            data_hash=sample_run["data_hash"],
            env=sample_run["env"],
            jobs=sample_run["jobs"],
            events=sample_run["events"],
            tree=sample_run["result"].tree,
            bands=sample_run["result"].main_magnitudes,
            reports=sample_run["result"].reports,
            summary=sample_run["result"].summary,
            run_id="customrun01",
        )
        assert run_id == "customrun01"
        assert (run_dir / "manifest.json").exists()
        assert [r["run_id"] for r in list_runs(tmp_path)] == ["customrun01"]

    def test_derived_run_id_matches_hashes(self, sample_run):
        expect = run_id_for(sample_run["config"].to_dict(), sample_run["data_hash"])
        assert sample_run["run_id"] == expect


class TestQueryReport:
    def test_no_filters_returns_everything(self, sample_run):
        got = query_report(sample_run["root"], sample_run["run_id"])
        assert [r.to_dict() for r in got] == [
            r.to_dict() for r in sample_run["result"].reports
        ]

    def test_job_id_selects_single_report(self, sample_run):
        target = sample_run["jobs"][0].job_id
        got = query_report(sample_run["root"], sample_run["run_id"], job_id=target)
        assert [r.job_id for r in got] == [target]

    def test_user_selects_their_jobs_only(self, sample_run):
        user = sample_run["jobs"][0].user
        their_jobs = {j.job_id for j in sample_run["jobs"] if j.user == user}
        got = query_report(sample_run["root"], sample_run["run_id"], user=user)
        assert got  # at least one report
        assert {r.job_id for r in got} <= their_jobs  # overall report excluded

    def test_node_range_filters_entries(self, sample_run):
        got = query_report(
            sample_run["root"], sample_run["run_id"], node_range=(0, 2)
        )
        assert got
        for report in got:
            assert report.entries
            assert all(0 <= e.series.node_id <= 2 for e in report.entries)

    def test_z_range_filters_entries(self, sample_run):
        got = query_report(
            sample_run["root"], sample_run["run_id"], z_range=(1.5, 10.0)
        )
        overall = got[0]
        assert all(1.5 <= e.z <= 10.0 for e in overall.entries)
        # the drift node must survive a high-z cut somewhere in the run
        assert any(e.series.node_id == 2 for r in got for e in r.entries)

    def test_time_range_excludes_disjoint_jobs(self, sample_run):
        jobs = sorted(sample_run["jobs"], key=lambda j: j.start)
        first = jobs[0]
        later = [j for j in jobs if j.start >= first.end]
        assert later, "fixture should have staggered jobs"
        got = query_report(
            sample_run["root"],
            sample_run["run_id"],
            time_range=(first.start, first.start + 60.0),
        )
        got_ids = {r.job_id for r in got}
        assert first.job_id in got_ids
        assert all(j.job_id not in got_ids for j in later)
        assert None in got_ids  # overall spans the whole window

    def test_filters_compose(self, sample_run):
        target = sample_run["jobs"][0].job_id
        got = query_report(
            sample_run["root"],
            sample_run["run_id"],
            job_id=target,
            node_range=(0, 1),
            z_range=(-0.5, 0.5),
        )
        assert len(got) == 1
        for e in got[0].entries:
            assert 0 <= e.series.node_id <= 1 and -0.5 <= e.z <= 0.5
