"""Two-stage curriculum learning for sequence tagging.

Thin Python surface over the C++ library: scheduler, difficulty metrics,
synthetic corpora, curriculum and baseline training, and span F1.
"""

from ._core import (
    CheckpointError,
    CheckpointVersionError,
    ConfigError,
    Dataset,
    Error,
    Model,
    NumericError,
    ParseError,
    RunConfig,
    RunResult,
    SchemeError,
    ShapeError,
    SynthConfig,
    bu_from_passes,
    decode_bmes,
    f1,
    generate_synthetic,
    lambda_at,
    lc_token,
    load_model,
    parse_column_file,
    parse_column_file_like,
    run_baseline,
    run_tcl,
    score_mnlp,
    score_model_free,
    score_tlc,
    target_size,
)

__all__ = [name for name in dir() if not name.startswith("_")]
