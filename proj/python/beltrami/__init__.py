"""Python bindings for the beltrami C++ core.

Fields are complex128 arrays of shape (n_side, n_side); entry [row, col] is the
node x = -L + col*h, y = -L + row*h with h = 2L/n_side.
"""

from ._beltrami import (
    Dilatation,
    ExampleParams,
    GridSpec,
    HolderReport,
    LadderResult,
    Solution,
    beurling_transform,
    cauchy_transform,
    check_conditions,
    dilatation_report,
    divergence_integral,
    ex1_dilatation,
    ex1_f,
    ex1_fk,
    ex1_gk,
    ex1_mu,
    fmo_test,
    invert_mapping,
    load_bfld,
    log_holder_check,
    nodes,
    planar_beurling,
    planar_cauchy,
    run_ladder_example,
    save_bfld,
    solve_constant,
    solve_example,
)

__all__ = [name for name in dir() if not name.startswith("_")]
