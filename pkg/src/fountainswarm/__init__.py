"""Fountain-coded swarm simulator: GF(2^8) random linear coding, a slotted
peer-to-peer exchange model, and the server policies that keep (or fail to
keep) the swarm stable."""

from .adaptive import ControllerState
from .cli import main
from .codec import (
    CodedChunk,
    CodePool,
    Decoder,
    SourceFile,
    build_pool,
    draw_coefficients,
    encode,
    encode_pool,
    grouped_coefficients,
    split_file,
)
from .experiments import (
    SCENARIOS,
    ExperimentSpec,
    csv_header,
    make_spec,
    render_csv,
    render_summary,
    replicate_seed,
    run_matrix,
    run_replicates,
    summary_row,
    sweep_boundary,
)
from .gf256 import GF2, GF256, Field, gf_add, gf_inv, gf_mul
from .metrics import (
    MetricsRecord,
    detect_one_club,
    empirical_drift,
    growth_slope,
    snapshot,
)
from .swarm import (
    POLICIES,
    PolicyConfig,
    RunResult,
    SimConfig,
    SwarmState,
    run,
    sample_arrivals,
)

__version__ = "0.1.0"

__all__ = [
    "ControllerState",
    "main",
    "SCENARIOS",
    "ExperimentSpec",
    "csv_header",
    "make_spec",
    "render_csv",
    "render_summary",
    "replicate_seed",
    "run_matrix",
    "run_replicates",
    "summary_row",
    "sweep_boundary",
    "CodedChunk",
    "CodePool",
    "Decoder",
    "SourceFile",
    "build_pool",
    "draw_coefficients",
    "encode",
    "encode_pool",
    "grouped_coefficients",
    "split_file",
    "GF2",
    "GF256",
    "Field",
    "gf_add",
    "gf_inv",
    "gf_mul",
    "MetricsRecord",
    "detect_one_club",
    "empirical_drift",
    "growth_slope",
    "snapshot",
    "POLICIES",
    "PolicyConfig",
    "RunResult",
    "SimConfig",
    "SwarmState",
    "run",
    "sample_arrivals",
    "__version__",
]
