"""Arbitrary-precision fixed points of the 2-cycle iterated exponential.

Roots of T2(w; z) = w - z^(z^w) are computed as fixed points of the
composite logarithm pLog(w, n, m; z), each labelled by its sheet {n, m}
(and p when several roots share a sheet).
"""

from .errors import (ConfigurationError, ConvergenceError, DomainError, ExpOverflowError,
                     InadmissibleZError, MultiplicityError, SeedError)
from .mpcx import PrecComplex, RationalComplex, cx_exp, cx_log_principal, reprecision
from .normal_form import BranchFrame, branch_f, branch_frame, leaf_f, rotate, seed, sub_seeds
from .plog import (OVERFLOW, SheetIndex, ZContext, context, plog, plog_deriv, t1_plog,
                   t2_exp_residual)
from .regions import RegionTag, branch_cut_f, classify, secondary_cut
from .solver import (IterationConfig, RootId, RootRecord, basin_scan, newton_step, solve_root,
                     solve_sweep, verify_root)
from .stacks import CutSide, StackId, select_stack, stack_eval
from .zspec import ZSpec

__all__ = [
    "ConfigurationError", "ConvergenceError", "DomainError", "ExpOverflowError",
    "InadmissibleZError", "MultiplicityError", "SeedError",
    "PrecComplex", "RationalComplex", "cx_exp", "cx_log_principal", "reprecision",
    "BranchFrame", "branch_f", "branch_frame", "leaf_f", "rotate", "seed", "sub_seeds",
    "OVERFLOW", "SheetIndex", "ZContext", "context", "plog", "plog_deriv", "t1_plog",
    "t2_exp_residual",
    "RegionTag", "branch_cut_f", "classify", "secondary_cut",
    "IterationConfig", "RootId", "RootRecord", "basin_scan", "newton_step", "solve_root",
    "solve_sweep", "verify_root",
    "CutSide", "StackId", "select_stack", "stack_eval",
    "ZSpec",
]

__version__ = "0.1.0"
