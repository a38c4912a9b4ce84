"""Shared fixtures: thread pinning and one fully analyzed sample run.

BLAS thread pools are pinned to one thread before numpy loads so linear
algebra results are stable and the parallel-vs-serial tree comparisons
measure our own scheduling, not the BLAS pool's.
"""

import os

for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import pytest

from modescope.baseline import BaselineSpec
from modescope.pipeline import PipelineConfig, analyze
from modescope.store import dataset_hash, write_run
from modescope.synth import SynthSpec, generate_synthetic

SYSTEM_RANGES = {"temp": (40.0, 60.0), "curr": (8.0, 12.0)}


@pytest.fixture(scope="session")
def sample_dataset(tmp_path_factory):
    """A small drift dataset on disk: 8 nodes, 6 h at 30 s, drift on node 2."""
    out = tmp_path_factory.mktemp("dataset")
    spec = SynthSpec(
        scenario="drift", n_nodes=8, hours=6.0, dt=30.0, drift_nodes=(2,)
    )
    paths, truth = generate_synthetic(spec, seed=11, out_dir=out)
    return {"spec": spec, "paths": paths, "truth": truth}


@pytest.fixture(scope="session")
def sample_run(sample_dataset, tmp_path_factory):
    """The sample dataset pushed through the full pipeline and stored."""
    from modescope.ingest import parse_env_log, parse_hw_log, parse_job_log

    paths = sample_dataset["paths"]
    env = parse_env_log(paths["env"])
    jobs = parse_job_log(paths["jobs"])
    events = parse_hw_log(paths["hw"])
    config = PipelineConfig(
        baseline=BaselineSpec(kind="system", ranges=SYSTEM_RANGES), seed=11
    )
    result = analyze(env, jobs, events, config)

    runs_root = tmp_path_factory.mktemp("runs")
    data_hash = dataset_hash([paths["env"], paths["jobs"], paths["hw"]])
    run_id, run_dir = write_run(
        runs_root,
        config=config.to_dict(),
        data_hash=data_hash,
        env=env,
        jobs=jobs,
        events=events,
        tree=result.tree,
        bands=result.main_magnitudes,
        reports=result.reports,
        summary=result.summary,
    )
    return {
        "root": runs_root,
        "run_id": run_id,
        "run_dir": run_dir,
        "env": env,
        "jobs": jobs,
        "events": events,
        "result": result,
        "data_hash": data_hash,
        "config": config,
    }
