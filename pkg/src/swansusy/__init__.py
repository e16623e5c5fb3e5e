"""Swanson oscillator, its su(1,1) metric family and osp(2|2) supersymmetric extension,
built and verified in truncated graded Fock spaces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    FactorizationUndefined,
    MetricUndefined,
    SwansusyError,
)
from .fockspace import Boson, Fermion, ModeLayout, Spin, TruncatedOperator  # noqa: E402
from .metric import (  # noqa: E402
    MetricParams,
    SwansonParams,
    build_H,
    build_h,
    build_metric,
    build_rho,
    epsilon_of,
    mu_nu,
)
from .superalgebra import GeneratorSet, standard_relation_table, su11_single_mode  # noqa: E402

__all__ = [
    "__version__",
    "SwansusyError",
    "ConfigError",
    "MetricUndefined",
    "FactorizationUndefined",
    "Boson",
    "Fermion",
    "Spin",
    "ModeLayout",
    "TruncatedOperator",
    "SwansonParams",
    "MetricParams",
    "GeneratorSet",
    "su11_single_mode",
    "standard_relation_table",
    "epsilon_of",
    "mu_nu",
    "build_H",
    "build_h",
    "build_metric",
    "build_rho",
]
