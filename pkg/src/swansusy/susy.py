"""Supersymmetric extension: H_S, Q, the pseudo-supercharges and Eq. (1).

``H_S = H + 2 Omega Y`` is quasi-Hermitian with the metric ``rho**2`` extended
trivially to the fermionic factor (``rho`` is built from ``K0, K+-`` only, so
it already acts as the identity there). Its Hermitian partner is
``h_S = h + 2 Omega Y`` with Hermitian supercharge ``Q = sqrt(2 Omega) a~^dag b``,
and ``Qcal = rho^-1 Q rho = sigma W+ + tau W-``, ``Qcal# = phi V- + chi V+``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fockspace as fs
from . import numkernel as nk
from .errors import IdentityViolation, LayoutError, NonPositive, ParameterError
from .fockspace import ODD, TruncatedOperator
from .metric import (
    EquivParams,
    FactorizationParams,
    Metric,
    MetricParams,
    SwansonParams,
    similarity_residual,
    sinhc,
)
from .report import CheckResult, relative_residual
from .superalgebra import GeneratorSet

__all__ = [
    "SuperchargeCoeffs",
    "SpecialCaseCoeffs",
    "CLOSURE_RTOL",
    "build_HS",
    "build_hS",
    "tilde_mode",
    "hermitian_supercharges",
    "evaluate_coeffs",
    "supercharge_coeffs",
    "predicted_levels",
    "special_case_coeffs",
    "pseudo_supercharges",
    "pseudo_supercharges_xp",
    "verify_pseudo_susy",
    "verify_bch_relations",
    "verify_intertwining",
    "cluster_eigenvalues",
]

CLOSURE_RTOL = 1e-10


@dataclass(frozen=True)
class SuperchargeCoeffs:
    sigma: float
    tau: float
    varphi: float
    chi: float

    def closure_residuals(self, params: SwansonParams) -> dict:
        """Relative misses of ``sigma phi +- tau chi = 4 omega, 4 Omega``, ``sigma chi = 4 beta``,
        ``tau phi = 4 alpha``.

        The products ``sigma chi`` and ``tau phi`` are compared relative to
        ``4 omega``, the scale of the terms being combined, so that a vanishing
        coupling does not turn rounding noise into an infinite relative error.
        """
        s, t, f, c = self.sigma, self.tau, self.varphi, self.chi
        w = params.omega
        return {
            "sigma*varphi+tau*chi=4omega": abs(s * f + t * c - 4 * w) / (4 * w),
            "sigma*varphi-tau*chi=4Omega": abs(s * f - t * c - 4 * params.Omega) / (4 * params.Omega),
            "sigma*chi=4beta": abs(s * c - 4 * params.beta) / max(4 * abs(params.beta), 4 * w),
            "tau*varphi=4alpha": abs(t * f - 4 * params.alpha) / max(4 * abs(params.alpha), 4 * w),
        }

    def as_tuple(self) -> tuple:
        return (self.sigma, self.tau, self.varphi, self.chi)


@dataclass(frozen=True)
class SpecialCaseCoeffs:
    case_z: int
    sigma: float
    tau: float
    varphi: float
    chi: float
    gamma_plus: Optional[float] = None
    gamma_minus: Optional[float] = None

    def coeffs(self) -> SuperchargeCoeffs:
        return SuperchargeCoeffs(self.sigma, self.tau, self.varphi, self.chi)


def _require_odd(gens: GeneratorSet):
    if not gens.has_odd or gens.Y is None:
        raise LayoutError("the generator set has no odd sector")


def build_HS(gens: GeneratorSet, params: SwansonParams) -> TruncatedOperator:
    """``H_S = 2 omega K0 + 2 alpha K- + 2 beta K+ + 2 Omega Y``."""
    _require_odd(gens)
    return (2.0 * params.omega * gens.K0 + 2.0 * params.alpha * gens.Kminus
            + 2.0 * params.beta * gens.Kplus + 2.0 * params.Omega * gens.Y)


def build_hS(h: TruncatedOperator, gens: GeneratorSet, params: SwansonParams) -> TruncatedOperator:
    """Hermitian partner ``h_S = h + 2 Omega Y``."""
    _require_odd(gens)
    return h + 2.0 * params.Omega * gens.Y


def tilde_mode(a: TruncatedOperator, a_dagger: TruncatedOperator, ep: EquivParams, omega: float):
    """Bogoliubov-rotated mode ``(a~, a~^dag)`` of Eq. (14)."""
    if not (ep.mu > 0 and ep.nu > 0):
        raise NonPositive("mu and nu must be positive")
    r = (ep.nu / ep.mu) ** 0.25
    pref = 1.0 / (2.0 * math.sqrt(omega))
    tad = pref * ((r - omega / r) * a + (r + omega / r) * a_dagger)
    return tad.dag, tad


def hermitian_supercharges(tilde_a_dagger: TruncatedOperator, b: TruncatedOperator, Omega: float):
    """``Q = sqrt(2 Omega) a~^dag b`` and its adjoint."""
    q = math.sqrt(2.0 * Omega) * (tilde_a_dagger @ b)
    return q, q.dag


def evaluate_coeffs(params: SwansonParams, mp: MetricParams, ep: EquivParams) -> SuperchargeCoeffs:
    """The four expressions of Eq. (19), without checking the closure identities."""
    w, z = params.omega, mp.z
    a1 = w * math.sqrt(ep.mu) + math.sqrt(ep.nu)
    a2 = w * math.sqrt(ep.mu) - math.sqrt(ep.nu)
    c = math.cosh(mp.theta)
    es = mp.epsilon * sinhc(mp.theta)
    rw = math.sqrt(w)
    coeffs = SuperchargeCoeffs(
        sigma=(a1 * c - (a1 + z * a2) * es) / rw,
        tau=(-a2 * c - (a2 + z * a1) * es) / rw,
        varphi=(a1 * c + (a1 + z * a2) * es) / rw,
        chi=(-a2 * c + (a2 + z * a1) * es) / rw,
    )
    return coeffs


def supercharge_coeffs(params: SwansonParams, mp: MetricParams, ep: EquivParams) -> SuperchargeCoeffs:
    """The four coefficients of Eq. (19).

    Raises
    ------
    IdentityViolation
        If any closure identity misses by more than ``CLOSURE_RTOL``.
    """
    coeffs = evaluate_coeffs(params, mp, ep)
    bad = {k: v for k, v in coeffs.closure_residuals(params).items() if not v <= CLOSURE_RTOL}
    if bad:
        raise IdentityViolation(f"closure identities violated at z={mp.z}: {bad}")
    return coeffs


def special_case_coeffs(params: SwansonParams, case_z: int) -> SpecialCaseCoeffs:
    """Closed forms of sigma, tau, phi, chi printed for ``z = 0, 1, -1``."""
    w, a, b, big = params.omega, params.alpha, params.beta, params.Omega
    if case_z == 0:
        if not a * b > 0:
            raise ParameterError("the z=0 closed forms need alpha*beta > 0")
        g = math.sqrt(a * b)
        if w - 2 * g < 0:
            raise ParameterError("the z=0 closed forms need omega >= 2 sqrt(alpha beta)")
        sp, sm = math.sqrt(w + 2 * g), math.sqrt(w - 2 * g)
        ab, ba = (a / b) ** 0.25, (b / a) ** 0.25
        return SpecialCaseCoeffs(0, ba * (sp + sm), ab * (sp - sm), ab * (sp + sm), ba * (sp - sm),
                                 gamma_plus=0.5 * (ab + ba), gamma_minus=0.5 * (ab - ba))
    if case_z == 1:
        d = w - a - b
        if not d > 0:
            raise ParameterError("the z=1 closed forms need omega - alpha - beta > 0")
        r = math.sqrt(d)
        return SpecialCaseCoeffs(1, (big + w - 2 * b) / r, (big - w + 2 * a) / r,
                                 (big + w - 2 * a) / r, (big - w + 2 * b) / r)
    if case_z == -1:
        d = w + a + b
        if not d > 0:
            raise ParameterError("the z=-1 closed forms need omega + alpha + beta > 0")
        r = math.sqrt(d)
        return SpecialCaseCoeffs(-1, (big + w + 2 * b) / r, -(big - w - 2 * a) / r,
                                 (big + w + 2 * a) / r, -(big - w - 2 * b) / r)
    raise ValueError(f"case_z must be -1, 0 or 1, got {case_z!r}")


def pseudo_supercharges(gens: GeneratorSet, coeffs: SuperchargeCoeffs):
    """``Qcal = sigma W+ + tau W-`` and ``Qcal# = phi V- + chi V+`` (Eq. (17))."""
    _require_odd(gens)
    q = coeffs.sigma * gens.Wplus + coeffs.tau * gens.Wminus
    qs = coeffs.varphi * gens.Vminus + coeffs.chi * gens.Vplus
    return q, qs


def pseudo_supercharges_xp(coeffs: SuperchargeCoeffs, omega: float, layout: fs.ModeLayout):
    """Eq. (20) in terms of the quadratures, with the fermionic ``b`` / ``b^dag`` restored."""
    bos, fer = layout.boson_indices, layout.fermion_indices
    if len(bos) != 1 or len(fer) != 1 or len(layout.factors) != 2:
        raise LayoutError("the x-p form needs exactly one boson and one fermion")
    x, p = fs.quadratures(layout, bos[0], omega)
    b, bd = fs.fermion_ops(layout, fer[0])
    s, t, f, c = coeffs.as_tuple()
    pref = 1.0 / (2.0 * math.sqrt(omega))
    q = pref * ((s + t) * omega * x - 1j * (s - t) * p) @ b
    qs = pref * ((f + c) * omega * x + 1j * (f - c) * p) @ bd
    return q, qs


def _nilpotency(op: TruncatedOperator, projector) -> float:
    scale = float(np.linalg.norm(fs.sandwich(projector, op))) ** 2
    sq = float(np.linalg.norm(fs.sandwich(projector, op, op)))
    return sq if scale == 0.0 else sq / scale


def verify_pseudo_susy(Qcal: TruncatedOperator, Qcal_sharp: TruncatedOperator,
                       HS: TruncatedOperator, metric: Metric, projector, tol: float,
                       gens: Optional[GeneratorSet] = None,
                       coeffs: Optional[SuperchargeCoeffs] = None,
                       nilpotency_tol: float = 1e-13, z=None):
    """The pseudo-SUSY contract of Eq. (1) and the condition that ties it to ``rho``.

    Entries: ``Qcal**2`` and ``Qcal#**2`` (relative to ``|P Qcal P|**2``),
    ``{Qcal, Qcal#} = 2 H_S``, ``Qcal# = zeta^-1 Qcal^dag zeta`` and, when
    ``gens`` and ``coeffs`` are given,
    ``rho (phi V- + chi V+) rho^-1 = rho^-1 (sigma V- + tau V+) rho``.
    """
    out = [
        CheckResult("pseudo_susy Qcal^2=0", _nilpotency(Qcal, projector), nilpotency_tol, z=z),
        CheckResult("pseudo_susy Qcal#^2=0", _nilpotency(Qcal_sharp, projector), nilpotency_tol, z=z),
    ]
    anti = fs.sandwich(projector, Qcal, Qcal_sharp) + fs.sandwich(projector, Qcal_sharp, Qcal)
    out.append(CheckResult("pseudo_susy {Qcal,Qcal#}=2H_S",
                           relative_residual(anti, 2.0 * fs.sandwich(projector, HS)), tol, z=z))
    residual, form = similarity_residual(metric, Qcal.dag, Qcal_sharp, -2, projector)
    out.append(CheckResult("pseudo_susy Qcal#=zeta^-1 Qcal^dag zeta", residual, tol, z=z,
                           detail={"form": form}))
    if gens is not None and coeffs is not None:
        x = coeffs.varphi * gens.Vminus + coeffs.chi * gens.Vplus
        t = coeffs.sigma * gens.Vminus + coeffs.tau * gens.Vplus
        residual, form = similarity_residual(metric, x, t, 2, projector)
        out.append(CheckResult("pseudo_susy condition", residual, tol, z=z, detail={"form": form}))
    return out


def verify_bch_relations(metric: Metric, gens: GeneratorSet, fp: FactorizationParams,
                         projector, tol: float, z=None):
    """The four conjugations of ``V+-`` by ``rho`` (eq:BCH)."""
    _require_odd(gens)
    vp, vm = gens.Vplus, gens.Vminus
    eq2, emq2 = math.exp(fp.qprime / 2.0), math.exp(-fp.q / 2.0)
    cases = (
        ("rho V+ rho^-1", vp, eq2 * (vp + fp.pprime * vm), 1),
        ("rho V- rho^-1", vm, emq2 * (vm - fp.p * vp), 1),
        ("rho^-1 V+ rho", vp, emq2 * (vp - fp.p * vm), -1),
        ("rho^-1 V- rho", vm, eq2 * (vm + fp.pprime * vp), -1),
    )
    out = []
    for name, x, target, power in cases:
        residual, form = similarity_residual(metric, x, target, power, projector)
        out.append(CheckResult(f"bch {name}", residual, tol, z=z, detail={"form": form}))
    return out


def verify_intertwining(metric: Metric, Qcal: TruncatedOperator, Qcal_sharp: TruncatedOperator,
                        Q: TruncatedOperator, Q_dagger: TruncatedOperator, projector, tol: float,
                        z=None):
    """``rho Qcal rho^-1 = Q`` and ``rho Qcal# rho^-1 = Q^dag`` (Eq. (16))."""
    out = []
    for name, x, target in (("rho Qcal rho^-1=Q", Qcal, Q),
                            ("rho Qcal# rho^-1=Q^dag", Qcal_sharp, Q_dagger)):
        residual, form = similarity_residual(metric, x, target, 1, projector)
        out.append(CheckResult(f"intertwining {name}", residual, tol, z=z, detail={"form": form}))
    return out


def cluster_eigenvalues(values, tol: float):
    """Group ascending eigenvalues into clusters whose neighbours differ by at most ``tol``.

    Returns a list of ``(mean, multiplicity)`` pairs.
    """
    vals = np.sort(np.asarray(values, dtype=float))
    clusters = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            chunk = vals[start:i]
            clusters.append((float(chunk.mean()), len(chunk)))
            start = i
    return clusters


def predicted_levels(gens: GeneratorSet, Omega: float, supersymmetric: bool) -> np.ndarray:
    """Exact spectrum of ``h`` (``2 Omega K0``) or ``h_S`` (``2 Omega (K0 + Y)``).

    ``h`` and ``h_S`` are unitarily equivalent to these in any realization
    (Bogoliubov rotation of the bosons); ``K0`` and ``Y`` conserve total quanta,
    so the low part of the truncated spectrum is exact.
    """
    op = gens.K0 + gens.Y if supersymmetric else gens.K0
    return nk.eigvals_hermitian((2.0 * Omega * op).matrix)
