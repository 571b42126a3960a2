"""Quasiconformal extensions of univalent disk maps from Loewner chains.

Modules: ``drivers`` (Herglotz drivers), ``loewner`` (ODE, limit map, coefficients),
``extension`` (Becker extensions and Beltrami coefficients), ``extremal`` (sharp bound,
optimal control, comparison bounds), ``criteria`` (sufficient conditions), ``cli``.
"""

from ._core import BACKEND
from .drivers import (
    CayleyData,
    Family,
    HerglotzDriver,
    becker_sup,
    blaschke,
    constant_power,
    custom,
    eval_driver,
    extremal_a3,
    kappa,
    normalize_driver,
)
from .errors import *  # noqa: F401,F403
from .extension import (
    BeltramiField,
    QCReport,
    becker_extend,
    beltrami_of_driver,
    extremal_beltrami,
    numeric_dilatation,
    spiral_samples,
    teichmuller_check,
)
from .extremal import (
    BoundRow,
    ControlSynthesis,
    fekete_szego_bound,
    figure1_table,
    hk_lambda,
    krushkal_bound,
    sharp_a3_bound,
    synthesize_control,
    verify_max_principle,
)
from .criteria import (
    AnalyticSample,
    PDEExtensionSpec,
    aw_becker_extend,
    check_aw_becker,
    check_pde_conditions,
    check_pre_schwarzian,
    pde_extend,
    threshold_k_star,
)
from .loewner import (
    LoewnerSolution,
    a2_a3_flow,
    chain_at,
    coefficient_flow,
    map_limit,
    solve_trajectory,
)
from .series import TruncatedSeries

__version__ = "0.1.0"
