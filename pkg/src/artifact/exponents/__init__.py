"""Error exponents of discrete memoryless channels and Slepian-Wolf binning.

Convex-program evaluations (:mod:`.primal`), exhaustive joint-type oracles
(:mod:`.grid`), the Lagrange-dual lower bound (:mod:`.dual`), BSC closed
forms (:mod:`.closed_form`) and an exact finite-``n`` ensemble oracle
(:mod:`.ensemble`).
"""
from ._common import DecoderScore, DualParams, ExponentResult, ExponentSolverError
from .closed_form import correct_decoding_bsc, gv_distance
from .dual import dual_rc_bound, dual_rc_optimize
from .ensemble import (
    ensemble_error_probability_exact,
    ensemble_error_probability_mc,
    log_ensemble_error_probability_exact,
)
from .grid import (
    cd_grid_curve,
    ex_grid_curve,
    mmi_grid_curve,
    rc_exponent_grid,
    rc_grid_curve,
    round_composition,
    sp_grid_curve,
    sw_grid_curve,
)
from .primal import (
    bhattacharyya_distance,
    bhattacharyya_matrix,
    correct_decoding_exponent,
    critical_rate,
    expurgated_exponent,
    rc_continuity_gap,
    rc_exponent,
    rc_exponent_mmi,
    sp_exponent,
    sw_binning_exponent,
)

__all__ = [
    "DecoderScore",
    "DualParams",
    "ExponentResult",
    "ExponentSolverError",
    "rc_exponent",
    "rc_exponent_mmi",
    "rc_exponent_grid",
    "rc_grid_curve",
    "mmi_grid_curve",
    "sp_grid_curve",
    "cd_grid_curve",
    "ex_grid_curve",
    "sw_grid_curve",
    "round_composition",
    "sp_exponent",
    "bhattacharyya_distance",
    "bhattacharyya_matrix",
    "expurgated_exponent",
    "correct_decoding_exponent",
    "correct_decoding_bsc",
    "gv_distance",
    "dual_rc_bound",
    "dual_rc_optimize",
    "sw_binning_exponent",
    "critical_rate",
    "rc_continuity_gap",
    "ensemble_error_probability_exact",
    "log_ensemble_error_probability_exact",
    "ensemble_error_probability_mc",
]
