"""Regenerate tests/fixtures/*.json from a real analysis run.

Builds a small synthetic dataset, runs the full pipeline, stores the run,
and dumps the HTTP responses the UI tests replay. Deterministic: same
inputs produce byte-identical fixtures.

Usage: python3 scripts/build_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from modescope.baseline import BaselineSpec
from modescope.ingest import format_timestamp
from modescope.pipeline import PipelineConfig, analyze
from modescope.service import create_app
from modescope.store import write_run
from modescope.synth import SynthSpec, build_dataset

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> int:
    spec = SynthSpec(
        scenario="drift", n_nodes=16, hours=8.0, dt=30.0, drift_nodes=(3, 9)
    )
    ds = build_dataset(spec, seed=5)
    config = PipelineConfig(
        baseline=BaselineSpec(
            kind="system", ranges={"temp": (40.0, 60.0), "curr": (8.0, 12.0)}
        ),
        n_resamples=300,
        seed=5,
    )
    result = analyze(ds.env, ds.jobs, ds.events, config)

    with tempfile.TemporaryDirectory() as tmp:
        run_id, _ = write_run(
            tmp,
            config=config.to_dict(),
            data_hash="fixture-dataset",
            env=ds.env,
            jobs=ds.jobs,
            events=ds.events,
            tree=result.tree,
            bands=result.main_magnitudes,
            reports=result.reports,
            summary=result.summary,
        )
        client = TestClient(create_app(tmp))

        failed_job = next(
            j.job_id for j in sorted(ds.jobs, key=lambda j: j.start)
            if j.exit_status != "pass"
        )
        window = ds.env.time_window()
        mid = (window[0] + window[1]) / 2
        pulls = {
            "runs.json": "/runs",
            "jobs.json": f"/runs/{run_id}/jobs",
            "glyph_overall.json": f"/runs/{run_id}/glyph",
            "glyph_job.json": f"/runs/{run_id}/glyph?job={failed_job}",
            "history_node3.json": f"/runs/{run_id}/nodes/3/history",
            "history_node9.json": f"/runs/{run_id}/nodes/9/history",
            "history_node0.json": f"/runs/{run_id}/nodes/0/history",
            "history_node1.json": f"/runs/{run_id}/nodes/1/history",
            "history_node3_narrow.json": (
                f"/runs/{run_id}/nodes/3/history"
                f"?from={format_timestamp(window[0])}&to={format_timestamp(mid)}"
            ),
            "timeline.json": f"/runs/{run_id}/timeline?series=3:temp0&max_points=80",
        }
        OUT.mkdir(parents=True, exist_ok=True)
        for name, url in pulls.items():
            res = client.get(url)
            res.raise_for_status()
            (OUT / name).write_text(json.dumps(res.json(), indent=1, sort_keys=True))
            print(f"wrote {name} ({len(res.content)} bytes) from GET {url}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
