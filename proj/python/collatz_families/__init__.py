"""Collatz step counts, odd-number families and range verification."""

from ._core import (
    DEFAULT_BUDGET,
    BudgetExhausted,
    CollatzError,
    ConventionMismatch,
    FormatError,
    InvalidArgument,
    MemoTable,
    NotFound,
    StepOverflowError,
    build_memo,
    check_partition,
    check_step_identities,
    collatz_step,
    decomposition_consistency,
    family_from_recurrence,
    family_root,
    family_term,
    general_term,
    load_memo,
    parametric_seed,
    parametric_term,
    predicted_steps,
    registry,
    seed_chain,
    seed_search,
    seed_witness,
    stopping_count,
    syracuse_decompose,
    theorem_steps,
    trajectory,
    verify_range,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
