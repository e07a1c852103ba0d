"""aimkit: the asymptotic iteration method for y'' = lambda0 y' + s0 y."""

from aimkit.chain import ChainLink, chain_link, hermite_chain, residual
from aimkit.const_coeff import classify
from aimkit.eigen import EigenProblem, EigenResult, reduce_schrodinger, solve_level, solve_spectrum
from aimkit.engine import AimProblem, AimState, aim_step, climb, run_ladder
from aimkit.numcore import ParamRatFun, parse_expr
from aimkit.settings import get_settings

__all__ = [
    "AimProblem",
    "AimState",
    "ChainLink",
    "EigenProblem",
    "EigenResult",
    "ParamRatFun",
    "aim_step",
    "chain_link",
    "classify",
    "climb",
    "get_settings",
    "hermite_chain",
    "parse_expr",
    "reduce_schrodinger",
    "residual",
    "run_ladder",
    "solve_level",
    "solve_spectrum",
]
