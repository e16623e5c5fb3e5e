"""The Swanson Hamiltonian, its positive-definite metric family and Hermitian partner.

For ``H = 2 omega K0 + 2 alpha K- + 2 beta K+`` the metric ``zeta_+ = rho**2``
with ``rho = exp(eps * O)``, ``O = 2K0 + z (K+ + K-)``, makes ``H``
quasi-Hermitian for every ``z`` in ``[-1, 1]`` (where the scalar formulas are
defined). :func:`build_h` gives the Hermitian partner ``h = rho H rho^-1``.

Identities that involve ``rho`` are verified in multiplied-through form using
only the bounded one of ``rho`` and ``rho^-1`` (see :class:`Metric`): on the
truncated Fock space the unbounded power can exceed 1e40 and the literal
``rho X rho^-1`` is then meaningless, while e.g. ``rho X = T rho`` states the
same identity with bounded factors only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fockspace as fs
from . import numkernel as nk
from .errors import (
    FactorizationUndefined,
    MetricUndefined,
    NonPositive,
    ParameterError,
)
from .fockspace import TruncatedOperator
from .report import CheckResult, relative_residual
from .superalgebra import GeneratorSet

__all__ = [
    "SwansonParams",
    "MetricParams",
    "EquivParams",
    "FactorizationParams",
    "Metric",
    "CompressedMetric",
    "METRIC_KINDS",
    "sinhc",
    "epsilon_of",
    "mu_nu",
    "mu_nu_printed",
    "mu_nu_richardson",
    "factorization_params",
    "build_H",
    "observable_O",
    "build_metric",
    "build_rho",
    "rho_power_form",
    "build_h",
    "similarity_residual",
    "verify_quasi_hermiticity",
    "verify_h_similarity",
    "verify_bogoliubov",
    "verify_factorization",
]

SERIES_Z_GAP = 1e-8
RICHARDSON_STEPS = (1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class SwansonParams:
    omega: float
    alpha: float
    beta: float
    Omega: float = field(init=False)

    def __post_init__(self):
        w, a, b = float(self.omega), float(self.alpha), float(self.beta)
        for name, v in (("omega", w), ("alpha", a), ("beta", b)):
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite")
        if not w > 0:
            raise ParameterError(f"omega must be positive, got {w}")
        if abs(a - b) <= 1e-12 * (abs(a) + abs(b) + 1.0):
            raise ParameterError("alpha != beta is required (H would be Hermitian)")
        omega2 = w * w - 4.0 * a * b
        if not omega2 > 0:
            raise ParameterError(
                f"Omega^2 = omega^2 - 4 alpha beta must be positive, got {omega2}"
            )
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "Omega", math.sqrt(omega2))


def _one_minus_z2(z: float) -> float:
    return (1.0 - z) * (1.0 + z)


@dataclass(frozen=True)
class MetricParams:
    z: float
    epsilon: float
    theta: float = field(init=False)

    def __post_init__(self):
        if not -1.0 <= self.z <= 1.0:
            raise ValueError(f"z must lie in [-1, 1], got {self.z}")
        object.__setattr__(self, "theta", abs(self.epsilon) * math.sqrt(_one_minus_z2(self.z)))


@dataclass(frozen=True)
class EquivParams:
    mu: float
    nu: float

    def __post_init__(self):
        if not (self.mu > 0 and self.nu > 0):
            raise NonPositive(f"mu and nu must be positive, got mu={self.mu}, nu={self.nu}")


@dataclass(frozen=True)
class FactorizationParams:
    p: float
    q: float
    pprime: float
    qprime: float


def sinhc(theta: float) -> float:
    """``sinh(theta)/theta`` with the removable singularity handled by series."""
    if abs(theta) < 1e-4:
        t2 = theta * theta
        return 1.0 + t2 / 6.0 + t2 * t2 / 120.0 + t2 * t2 * t2 / 5040.0
    return math.sinh(theta) / theta


def _atanhc(y: float) -> float:
    # arctanh(y)/y
    if abs(y) < 1e-3:
        y2 = y * y
        return 1.0 + y2 / 3.0 + y2 ** 2 / 5.0 + y2 ** 3 / 7.0 + y2 ** 4 / 9.0
    return math.atanh(y) / y


def _check_z(z: float):
    if not -1.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [-1, 1], got {z}")


def _denominator(params: SwansonParams, z: float) -> float:
    d = params.alpha + params.beta - z * params.omega
    if abs(d) <= 1e-12 * (abs(params.alpha) + abs(params.beta) + abs(params.omega)):
        raise MetricUndefined(f"alpha + beta - z omega vanishes at z={z}")
    return d


def _arctanh_argument(params: SwansonParams, z: float) -> float:
    d = _denominator(params, z)
    y = (params.alpha - params.beta) * math.sqrt(_one_minus_z2(z)) / d
    if not -1.0 < y < 1.0:
        raise MetricUndefined(f"arctanh argument {y} leaves (-1, 1) at z={z}")
    return y


def epsilon_of(params: SwansonParams, z: float) -> MetricParams:
    """Metric strength ``eps(z)`` and ``theta = |eps| sqrt(1 - z^2)``.

    Raises
    ------
    MetricUndefined
        If ``alpha + beta - z omega`` vanishes or the arctanh argument leaves
        ``(-1, 1)``.
    """
    _check_z(z)
    y = _arctanh_argument(params, z)
    w, a, b = params.omega, params.alpha, params.beta
    if z == 1.0:
        eps = -(a - b) / (2.0 * (w - a - b))
    elif z == -1.0:
        eps = (a - b) / (2.0 * (w + a + b))
    else:
        c = (a - b) / (a + b - z * w)
        # arctanh(c s)/(2 s) = (c/2) * arctanh(y)/y; series branch for small y
        eps = 0.5 * c * _atanhc(y)
    return MetricParams(z, eps)


def mu_nu_printed(params: SwansonParams, z: float) -> EquivParams:
    """mu and nu transcribed literally; undefined (0/0) at ``z = -1`` and ``z = 1``."""
    _check_z(z)
    if z in (-1.0, 1.0):
        raise ValueError("the literal mu, nu formulas are 0/0 at z = +-1")
    w, a, b = params.omega, params.alpha, params.beta
    d = _denominator(params, z)
    inner = 1.0 - (a - b) ** 2 * (1.0 - z * z) / d ** 2
    if inner < 0:
        raise MetricUndefined(f"square-root argument negative at z={z}")
    root = math.sqrt(inner)
    mu = (w - (a + b) * z - d * root) / ((1.0 + z) * w)
    nu = w * (w - (a + b) * z + d * root) / (1.0 - z)
    return EquivParams(mu, nu)


def mu_nu(params: SwansonParams, z: float) -> EquivParams:
    """mu and nu of the Hermitian partner, valid on the closed interval.

    With ``X = omega - (alpha+beta) z``, ``D = alpha + beta - omega z`` and
    ``r`` the square root in the defining formulas, ``mu`` is proportional to
    ``X - D r`` and ``nu`` to ``X + D r``, and
    ``(X + D r)(X - D r) = (1 - z^2) Omega^2``. Whichever factor has no
    cancellation is computed directly and the other from the product, which
    also removes the 0/0 at the endpoints.
    """
    _check_z(z)
    y = _arctanh_argument(params, z)
    w, a, b = params.omega, params.alpha, params.beta
    d = a + b - z * w
    x = w - (a + b) * z
    root = math.sqrt((1.0 - y) * (1.0 + y))
    u, v = x + d * root, x - d * root
    omega2 = params.Omega ** 2
    if u == 0.0 and v == 0.0:
        raise MetricUndefined(f"mu and nu degenerate at z={z}")
    if abs(u) >= abs(v):
        nu = w * u / (1.0 - z)
        mu = (1.0 - z) * omega2 / (w * u)
    else:
        mu = v / ((1.0 + z) * w)
        nu = w * (1.0 + z) * omega2 / v
    return EquivParams(mu, nu)


def _richardson(values, ratio: float):
    """Richardson tableau for samples at steps ``h, h/ratio, h/ratio**2, ...``."""
    table = [[float(v)] for v in values]
    for i in range(1, len(values)):
        for j in range(1, i + 1):
            f = ratio ** j
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1.0))
    return table


def mu_nu_richardson(params: SwansonParams, endpoint: int, steps=RICHARDSON_STEPS):
    """Endpoint limits of the literal mu, nu formulas by Richardson extrapolation.

    Samples at ``z = endpoint * (1 - h)`` for each ``h`` in ``steps`` (equal
    ratios) and eliminates the leading powers of ``h``.

    Returns
    -------
    limit : EquivParams
    spread : dict
        Relative spread of the extrapolation stages for ``mu`` and ``nu``.
    """
    if endpoint not in (-1, 1):
        raise ValueError("endpoint must be -1 or +1")
    ratio = steps[0] / steps[1]
    samples = [mu_nu_printed(params, endpoint * (1.0 - h)) for h in steps]
    limits, spread = {}, {}
    for name in ("mu", "nu"):
        table = _richardson([getattr(s, name) for s in samples], ratio)
        last = table[-1][-1]
        stages = [table[i][i] for i in range(1, len(table))] + [table[-1][-2]]
        limits[name] = last
        spread[name] = (max(stages) - min(stages)) / abs(last)
    return EquivParams(limits["mu"], limits["nu"]), spread


def factorization_params(mp: MetricParams) -> FactorizationParams:
    """Parameters of ``rho = e^{p K+} e^{q K0} e^{p K-} = e^{p' K-} e^{q' K0} e^{p' K+}``.

    Raises
    ------
    FactorizationUndefined
        If ``cosh(theta) -+ eps sinh(theta)/theta`` is not positive.
    """
    c = math.cosh(mp.theta)
    es = mp.epsilon * sinhc(mp.theta)
    minus, plus = c - es, c + es
    if not (minus > 0 and plus > 0):
        raise FactorizationUndefined(
            f"cosh(theta) -+ eps sinhc(theta) = ({minus}, {plus}) must both be positive"
        )
    fp = FactorizationParams(
        p=mp.z * es / minus,
        q=-2.0 * math.log(minus),
        pprime=mp.z * es / plus,
        qprime=2.0 * math.log(plus),
    )
    if (abs(math.exp(-fp.q / 2) - minus) > 1e-13 * minus
            or abs(math.exp(fp.qprime / 2) - plus) > 1e-13 * plus):
        raise FactorizationUndefined("exponential parameters do not reproduce")
    return fp


# -- operators ----------------------------------------------------------------

def build_H(gens: GeneratorSet, params: SwansonParams) -> TruncatedOperator:
    return 2.0 * params.omega * gens.K0 + 2.0 * params.alpha * gens.Kminus \
        + 2.0 * params.beta * gens.Kplus


def observable_O(gens: GeneratorSet, z: float) -> TruncatedOperator:
    return 2.0 * gens.K0 + z * (gens.Kplus + gens.Kminus)


class Metric:
    """``rho = exp(A)`` for a Hermitian exponent ``A``, with cached powers.

    Every power ``rho**t`` comes from one eigendecomposition of ``A``, so
    ``rho**-1`` and ``zeta**-1`` are as accurate as ``rho`` itself.
    :attr:`bounded_sign` is ``+1`` when ``rho`` is the power with the smaller
    largest eigenvalue and ``-1`` when ``rho**-1`` is.
    """

    def __init__(self, exponent: TruncatedOperator, epsilon: float = float("nan"),
                 params: MetricParams | None = None):
        self.exponent = exponent
        self.layout = exponent.layout
        self.epsilon = epsilon
        self.params = params
        self._blocks = nk.spectral_blocks(exponent.matrix)
        lam = np.concatenate([w for _, w, _ in self._blocks])
        self.exponent_min = float(lam.min())
        self.exponent_max = float(lam.max())
        self._powers = {}

    @classmethod
    def identity(cls, layout: fs.ModeLayout) -> "Metric":
        return cls(fs.zero(layout), 0.0)

    def power(self, t: float) -> TruncatedOperator:
        """``rho**t``."""
        if t not in self._powers:
            m = nk.from_spectral_blocks(self._blocks, lambda w: np.exp(t * w), self.layout.total_dim)
            self._powers[t] = TruncatedOperator(self.layout, 0.5 * (m + m.conj().T))
        return self._powers[t]

    @property
    def rho(self) -> TruncatedOperator:
        return self.power(1.0)

    @property
    def rho_inv(self) -> TruncatedOperator:
        return self.power(-1.0)

    @property
    def zeta(self) -> TruncatedOperator:
        return self.power(2.0)

    @property
    def zeta_inv(self) -> TruncatedOperator:
        return self.power(-2.0)

    @property
    def bounded_sign(self) -> int:
        return 1 if self.exponent_max <= -self.exponent_min else -1

    @property
    def min_zeta_eigenvalue(self) -> float:
        """Smallest eigenvalue of ``zeta = rho**2``, ``exp(2 min(A))``; positive by construction."""
        return math.exp(2.0 * self.exponent_min)


AUX_EXTRA_LEVELS = 96


def _single_mode_O(cutoff: int, z: float) -> np.ndarray:
    a = fs.ladder_matrix(cutoff)
    ad = a.T
    return (ad @ a + 0.5 * np.eye(cutoff)) + 0.5 * z * (ad @ ad + a @ a)


class CompressedMetric(Metric):
    """Matrix elements of the exact ``rho**t`` between truncated basis states.

    ``exp(eps O)`` factorizes over the boson modes, so each mode's factor is
    computed at an auxiliary cutoff well above the working one and then
    restricted; the Kronecker product of the restrictions is ``P rho**t P``.
    On a small per-mode cutoff this removes the error that exponentiating the
    truncated exponent would introduce. Requires ``K0, K+-`` to be the plain
    sums over the boson modes, which :func:`build_metric` checks.
    """

    def __init__(self, layout: fs.ModeLayout, mp: MetricParams, aux_cutoff: int | None = None):
        self.layout = layout
        self.epsilon = mp.epsilon
        self.params = mp
        self.exponent = None
        cutoffs = {i: layout.factors[i].cutoff for i in layout.boson_indices}
        if not cutoffs:
            raise ValueError("a compressed metric needs at least one boson mode")
        top = max(cutoffs.values())
        self.aux_cutoff = top + AUX_EXTRA_LEVELS if aux_cutoff is None else int(aux_cutoff)
        if self.aux_cutoff < top:
            raise ValueError("aux_cutoff must be at least the largest boson cutoff")
        self._cutoffs = cutoffs
        self._blocks = nk.spectral_blocks(mp.epsilon * _single_mode_O(self.aux_cutoff, mp.z))
        lam = np.concatenate([w for _, w, _ in self._blocks])
        n_modes = len(cutoffs)
        self.exponent_min = n_modes * float(lam.min())
        self.exponent_max = n_modes * float(lam.max())
        self._powers = {}

    def _mode_power(self, t: float, cutoff: int) -> np.ndarray:
        full = nk.from_spectral_blocks(self._blocks, lambda w: np.exp(t * w), self.aux_cutoff)
        block = full[:cutoff, :cutoff]
        return 0.5 * (block + block.conj().T)

    def power(self, t: float) -> TruncatedOperator:
        if t not in self._powers:
            locals_ = {i: self._mode_power(t, n) for i, n in self._cutoffs.items()}
            self._powers[t] = TruncatedOperator(self.layout, self.layout.embed(locals_))
        return self._powers[t]

    @property
    def bounded_sign(self) -> int:
        return 1 if self.epsilon <= 0 else -1

    # min_zeta_eigenvalue (inherited) is exp(2 * exponent_min) with the exponent
    # taken on the auxiliary space: a lower bound for the compressed zeta, whose
    # own smallest eigenvalue can sit below rounding noise.


METRIC_KINDS = ("truncated", "compressed")


def build_metric(gens: GeneratorSet, params: SwansonParams, z: float,
                 kind: str = "truncated", aux_cutoff: int | None = None) -> Metric:
    """The metric ``rho`` at ``z``.

    ``kind="truncated"`` exponentiates the truncated exponent (Eq. (7) taken
    literally in the working space); ``kind="compressed"`` uses
    :class:`CompressedMetric`.
    """
    mp = epsilon_of(params, z)
    exponent = mp.epsilon * observable_O(gens, z)
    if kind == "truncated":
        return Metric(exponent, mp.epsilon, mp)
    if kind != "compressed":
        raise ValueError(f"metric kind must be one of {METRIC_KINDS}, got {kind!r}")
    metric = CompressedMetric(gens.layout, mp, aux_cutoff)
    locals_ = {i: mp.epsilon * _single_mode_O(n, z) for i, n in metric._cutoffs.items()}
    expected = np.zeros((gens.layout.total_dim,) * 2, dtype=np.complex128)
    for i, m in locals_.items():
        expected += gens.layout.embed({i: m})
    if nk.fro_norm(expected - exponent.matrix) > 1e-12 * max(nk.fro_norm(expected), 1.0):
        raise ValueError("compressed metric needs K0, K+- summed over the boson modes")
    return metric


def build_rho(gens: GeneratorSet, params: SwansonParams, z: float) -> TruncatedOperator:
    """``rho = exp(eps [2K0 + z (K+ + K-)])`` as a Hermitian positive-definite operator."""
    return build_metric(gens, params, z).rho


def rho_power_form(gens: GeneratorSet, params: SwansonParams, z: float) -> TruncatedOperator:
    """``rho`` as a real power of a scalar ratio, evaluated by spectral calculus on ``O``.

    Independent cross-check of :func:`build_rho`; singular at ``|z| = 1``.
    """
    _check_z(z)
    s = math.sqrt(_one_minus_z2(z))
    if s == 0.0:
        raise MetricUndefined("the power form is singular at |z| = 1")
    _arctanh_argument(params, z)
    d = params.alpha + params.beta - z * params.omega
    k = (params.alpha - params.beta) * s
    base = (d + k) / (d - k)
    m = nk.hermitian_function(observable_O(gens, z).matrix, lambda w: base ** (w / (4.0 * s)))
    return TruncatedOperator(gens.layout, 0.5 * (m + m.conj().T))


def build_h(gens: GeneratorSet, params: SwansonParams, z: float) -> TruncatedOperator:
    """Hermitian partner ``[nu (2K0 + K+ + K-) + mu omega^2 (2K0 - K+ - K-)] / (2 omega)``."""
    ep = mu_nu(params, z)
    w = params.omega
    plus = 2.0 * gens.K0 + gens.Kplus + gens.Kminus
    minus = 2.0 * gens.K0 - gens.Kplus - gens.Kminus
    return (ep.nu * plus + ep.mu * w * w * minus) / (2.0 * w)


# -- verification ---------------------------------------------------------------

def similarity_residual(metric: Metric, x: TruncatedOperator, target: TruncatedOperator,
                        power: int, projector: TruncatedOperator):
    """Residual of ``rho**power x rho**-power = target`` on the projector range.

    The identity is multiplied through so that only the bounded power
    ``rho**(k * bounded_sign)`` appears: either ``R x = target R`` with
    ``R = rho**power`` or ``x R = R target`` with ``R = rho**-power``.
    Returns the relative residual and a short description of the form used.
    """
    s = metric.bounded_sign
    if power * s > 0:
        r = metric.power(float(power))
        lhs = fs.sandwich(projector, r, x)
        rhs = fs.sandwich(projector, target, r)
        form = f"rho^{power} X = T rho^{power}"
    else:
        r = metric.power(float(-power))
        lhs = fs.sandwich(projector, x, r)
        rhs = fs.sandwich(projector, r, target)
        form = f"X rho^{-power} = rho^{-power} T"
    return relative_residual(lhs, rhs), form


def verify_quasi_hermiticity(H: TruncatedOperator, metric: Metric, projector, tol: float,
                             z=None):
    """``zeta H zeta^-1 = H^dag`` on the projector, plus positivity of ``zeta``."""
    residual, form = similarity_residual(metric, H, H.dag, 2, projector)
    min_eig = metric.min_zeta_eigenvalue
    ok = residual <= tol and math.isfinite(metric.exponent_min)
    return [CheckResult("quasi_hermiticity", residual, tol, z=z,
                        detail={"form": form, "zeta_min_eigenvalue": min_eig,
                                "zeta_min_log_eigenvalue": 2.0 * metric.exponent_min},
                        status="pass" if ok else "fail")]


def verify_h_similarity(h: TruncatedOperator, H: TruncatedOperator, metric: Metric,
                        projector, tol: float, z=None):
    """``h = rho H rho^-1`` on the projector."""
    residual, form = similarity_residual(metric, H, h, 1, projector)
    return [CheckResult("h_similarity", residual, tol, z=z, detail={"form": form})]


def bogoliubov_images(a: TruncatedOperator, a_dagger: TruncatedOperator, mp: MetricParams):
    """Right-hand sides of ``rho^-1 a rho`` and ``rho^-1 a^dag rho``."""
    c = math.cosh(mp.theta)
    es = mp.epsilon * sinhc(mp.theta)
    zes = mp.z * es
    return (c + es) * a + zes * a_dagger, (c - es) * a_dagger - zes * a


def verify_bogoliubov(metric: Metric, a: TruncatedOperator, a_dagger: TruncatedOperator,
                      mp: MetricParams, projector, tol: float, label: str = ""):
    """Both inverse Bogoliubov relations as matrix identities on the projector."""
    img_a, img_ad = bogoliubov_images(a, a_dagger, mp)
    out = []
    for name, x, target in (("a", a, img_a), ("a^dag", a_dagger, img_ad)):
        residual, form = similarity_residual(metric, x, target, -1, projector)
        out.append(CheckResult(f"bogoliubov rho^-1 {name}{label} rho", residual, tol,
                               z=mp.z, detail={"form": form}))
    return out


def factorized_rho_block(gens: GeneratorSet, fp: FactorizationParams, projector) -> np.ndarray:
    """Projected block of ``exp(p K+) exp(q K0) exp(p K-)``.

    Only the kept columns of ``exp(p K-)`` and kept rows of ``exp(p K+)`` are
    formed.
    """
    idx = projector.support
    n = gens.layout.total_dim
    if idx is None:
        full = (nk.expm_general(fp.p * gens.Kplus.matrix)
                @ nk.expm_hermitian(fp.q * gens.K0.matrix)
                @ nk.expm_general(fp.p * gens.Kminus.matrix))
        return projector.matrix @ full @ projector.matrix
    cols = np.eye(n, dtype=np.complex128)[:, idx]
    right = nk.expm_apply(fp.p * gens.Kminus.matrix, cols)
    middle = nk.expm_hermitian(fp.q * gens.K0.matrix) @ right
    left_rows = nk.expm_apply(fp.p * gens.Kplus.matrix.T, cols).T
    return left_rows @ middle


def verify_factorization(metric: Metric, gens: GeneratorSet, fp: FactorizationParams,
                         projector, tol: float, z=None):
    """``rho = exp(p K+) exp(q K0) exp(p K-)`` on the projector."""
    residual = relative_residual(factorized_rho_block(gens, fp, projector),
                                 fs.sandwich(projector, metric.rho))
    return [CheckResult("factorization", residual, tol, z=z,
                        detail={"p": fp.p, "q": fp.q})]
