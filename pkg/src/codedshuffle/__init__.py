"""Coded map-reduce shuffle schemes from star/integer coded arrays."""

from importlib import resources

from .arrays import (
    STAR,
    ArrayFormatError,
    ArrayStats,
    CodedArray,
    TruncationError,
    ValidationReport,
    Violation,
    compute_stats,
    parse_array,
    truncate_columns,
    validate_l_cyclic,
    validate_mra,
    validate_pda,
)
from .constructors import (
    ConstructionError,
    GcParameters,
    algorithm1,
    algorithm2,
    lex_rank,
    lex_unrank,
    nnc_pda,
    shift_symbols,
)
from .mapreduce import (
    DecodeReport,
    JobPreconditionError,
    JobSpec,
    MapReduceGraph,
    ShuffleTranscript,
    access_pattern,
    build_mrg,
    choose_iv_bits,
    computation_load,
    mrg_canonical,
    mrg_ct,
    mrg_gc,
    mrg_nnc,
    run_job,
)
from .metrics import (
    LoadCurve,
    be_corners,
    be_load,
    be_lower_bound,
    ct_load,
    format_rational,
    gc_load,
    gc_lower_bound,
    gc_lower_envelope,
    load_from_array,
    lower_convex_envelope,
    nnc_load,
)

__version__ = "0.1.0"


def load_fixture(name: str) -> CodedArray:
    """Load one of the packaged golden arrays by file stem."""
    text = (
        resources.files("codedshuffle.fixtures")
        .joinpath(f"{name}.txt")
        .read_text()
    )
    return parse_array(text)


def fixture_names() -> list[str]:
    """Stems of all packaged golden arrays."""
    root = resources.files("codedshuffle.fixtures")
    return sorted(
        p.name[:-4] for p in root.iterdir() if p.name.endswith(".txt")
    )
