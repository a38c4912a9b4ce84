"""Multiresolution mode decomposition and baseline scoring for HPC telemetry."""

from modescope.model import (
    AnalysisError,
    BandMagnitudes,
    ConfigError,
    DmdResult,
    HardwareEvent,
    InsufficientSnapshotsError,
    JobRecord,
    MrDmdConfig,
    MrDmdNode,
    MrDmdTree,
    NoBaselineError,
    ParseError,
    RunNotFoundError,
    SeriesKey,
    SnapshotMatrix,
    TimeSegment,
    ZeroDataError,
    ZScoreEntry,
    ZScoreReport,
    validate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "BandMagnitudes",
    "ConfigError",
    "DmdResult",
    "HardwareEvent",
    "InsufficientSnapshotsError",
    "JobRecord",
    "MrDmdConfig",
    "MrDmdNode",
    "MrDmdTree",
    "NoBaselineError",
    "ParseError",
    "RunNotFoundError",
    "SeriesKey",
    "SnapshotMatrix",
    "TimeSegment",
    "ZeroDataError",
    "ZScoreEntry",
    "ZScoreReport",
    "validate_dataset",
    "__version__",
]
