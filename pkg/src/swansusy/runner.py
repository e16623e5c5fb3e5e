"""Orchestration of the verification suite, spectrum tables and parameter sweeps.

Grid points are independent: each is evaluated by :func:`_run_point` on a
shared, read-only :class:`Workspace`, optionally in a thread pool, and the
results are assembled in grid order so the output never depends on
scheduling.
"""

from __future__ import annotations

import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property

import numpy as np
import scipy

from . import __version__
from . import fockspace as fs
from . import metric as mt
from . import numkernel as nk
from . import susy
from .config import RunConfig
from .errors import (
    ConvergenceError,
    ExpmOverflowError,
    FactorizationUndefined,
    IdentityViolation,
    MetricUndefined,
    NonPositive,
    NotHermitianError,
    ParameterError,
    SingularMatrixError,
)
from .realizations import generators_for
from .report import CheckResult, TableReport, VerificationReport
from .superalgebra import check_hermiticity, check_relations, standard_relation_table

__all__ = ["Workspace", "run_verify", "run_spectrum", "run_sweep", "NUMERICAL_ERRORS"]

NUMERICAL_ERRORS = (ConvergenceError, ExpmOverflowError, SingularMatrixError,
                    NotHermitianError, IdentityViolation)
_UNDEFINED = (MetricUndefined, NonPositive)
_GLOBAL_CHECKS = ("relations", "hermiticity")


class Workspace:
    """z-independent objects of one run: generators, projectors, H and H_S."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.params = config.params
        self.gens = generators_for(config.realization)
        self.layout = self.gens.layout
        self.interior = fs.interior_projector(self.layout, config.margin)
        self.low = fs.low_lying_projector(self.layout, config.low_lying_quanta)
        self.H = mt.build_H(self.gens, self.params)
        self.HS = susy.build_HS(self.gens, self.params)
        self.ladders = [fs.boson_ops(self.layout, i) for i in self.layout.boson_indices]

    def metadata(self) -> dict:
        return {
            "package": "swansusy",
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "basis_ordering": self.layout.tag,
            "realization": self.gens.name,
            "dimension": self.layout.total_dim,
        }


class _Point:
    """Lazily built z-dependent objects."""

    def __init__(self, ws: Workspace, z: float):
        self.ws = ws
        self.z = z

    @cached_property
    def mp(self):
        return mt.epsilon_of(self.ws.params, self.z)

    @cached_property
    def ep(self):
        return mt.mu_nu(self.ws.params, self.z)

    @cached_property
    def metric(self):
        cfg = self.ws.config
        return mt.build_metric(self.ws.gens, self.ws.params, self.z, cfg.metric, cfg.aux_cutoff)

    @cached_property
    def h(self):
        return mt.build_h(self.ws.gens, self.ws.params, self.z)

    @cached_property
    def coeffs(self):
        return susy.supercharge_coeffs(self.ws.params, self.mp, self.ep)

    @cached_property
    def fp(self):
        return mt.factorization_params(self.mp)

    @cached_property
    def supercharges(self):
        return susy.pseudo_supercharges(self.ws.gens, self.coeffs)


# -- individual checks ---------------------------------------------------------

def _coeff_identities(pt: _Point, tol: float):
    ws = pt.ws
    coeffs = susy.evaluate_coeffs(ws.params, pt.mp, pt.ep)
    closure = coeffs.closure_residuals(ws.params)
    residual = max(closure.values())
    detail = {"closure": closure, "coefficients": dict(zip(
        ("sigma", "tau", "varphi", "chi"), coeffs.as_tuple()))}
    ok = residual <= tol
    if pt.z in (-1.0, 0.0, 1.0):
        special_tol = ws.config.tolerances["special_cases"]
        try:
            sc = susy.special_case_coeffs(ws.params, int(pt.z))
        except ParameterError as exc:
            detail["special_case"] = f"not applicable: {exc}"
        else:
            general = np.array(coeffs.as_tuple())
            closed = np.array(sc.coeffs().as_tuple())
            dev = float(np.max(np.abs(general - closed)) / np.max(np.abs(closed)))
            detail["special_case_deviation"] = dev
            detail["special_case_tolerance"] = special_tol
            if sc.gamma_plus is not None:
                detail["gamma_plus"] = sc.gamma_plus
                detail["gamma_minus"] = sc.gamma_minus
            ok = ok and dev <= special_tol
    return [CheckResult("coeff_identities", residual, tol, z=pt.z, detail=detail,
                        status="pass" if ok else "fail")]


def _h_spectrum(pt: _Point, tol: float):
    """Lowest distinct levels of ``h`` against ``(n + 1/2) Omega`` (realization-exact values).

    Levels are compared as eigenvalue clusters: ``h`` acts trivially on the
    fermions, so every level appears once per fermionic configuration.
    """
    ws = pt.ws
    got, want = _spectrum_clusters(ws, pt.h, False, ws.config.spectrum_levels)
    residual = max(abs(g[0] - w[0]) / w[0] for g, w in zip(got, want))
    mult = [g[1] for g in got]
    expected = [w[1] for w in want]
    ok = residual <= tol and mult == expected and len(got) == len(want)
    return [CheckResult("h_spectrum", residual, tol, z=pt.z,
                        detail={"levels": len(got), "multiplicities": mult,
                                "expected_multiplicities": expected},
                        status="pass" if ok else "fail")]


def _h_hermitian(pt: _Point, tol: float):
    return [CheckResult("h_hermitian", nk.hermiticity_defect(pt.h.matrix), tol, z=pt.z)]


def _quasi_hermiticity(pt: _Point, tol: float):
    return mt.verify_quasi_hermiticity(pt.ws.H, pt.metric, pt.ws.low, tol, z=pt.z)


def _h_intertwining(pt: _Point, tol: float):
    return mt.verify_h_similarity(pt.h, pt.ws.H, pt.metric, pt.ws.low, tol, z=pt.z)


def _pseudo_susy(pt: _Point, tol: float):
    ws = pt.ws
    q, qs = pt.supercharges
    return susy.verify_pseudo_susy(q, qs, ws.HS, pt.metric, ws.low, tol, ws.gens, pt.coeffs,
                                   nilpotency_tol=ws.config.tolerances["nilpotency"], z=pt.z)


def _factorization(pt: _Point, tol: float):
    return mt.verify_factorization(pt.metric, pt.ws.gens, pt.fp, pt.ws.low, tol, z=pt.z)


def _bch(pt: _Point, tol: float):
    return susy.verify_bch_relations(pt.metric, pt.ws.gens, pt.fp, pt.ws.low, tol, z=pt.z)


def _bogoliubov(pt: _Point, tol: float):
    ladders = pt.ws.ladders
    out = []
    for i, (a, ad) in enumerate(ladders):
        label = f"_{i}" if len(ladders) > 1 else ""
        out += mt.verify_bogoliubov(pt.metric, a, ad, pt.mp, pt.ws.low, tol, label=label)
    return out


def _intertwining(pt: _Point, tol: float):
    ws = pt.ws
    a, ad = ws.ladders[0]
    b, _ = fs.fermion_ops(ws.layout, ws.layout.fermion_indices[0])
    _, tad = susy.tilde_mode(a, ad, pt.ep, ws.params.omega)
    Q, Qd = susy.hermitian_supercharges(tad, b, ws.params.Omega)
    q, qs = pt.supercharges
    return susy.verify_intertwining(pt.metric, q, qs, Q, Qd, ws.low, tol, z=pt.z)


def _spectrum_clusters(ws: Workspace, h_op, supersymmetric: bool, count: int):
    omega = ws.params.Omega
    ctol = 1e-8 * omega
    got = susy.cluster_eigenvalues(nk.eigvals_hermitian(h_op.matrix), ctol)[:count]
    want = susy.cluster_eigenvalues(susy.predicted_levels(ws.gens, omega, supersymmetric), ctol)[:count]
    return got, want


def _susy_spectrum(pt: _Point, tol: float):
    ws = pt.ws
    hs = susy.build_hS(pt.h, ws.gens, ws.params)
    got, want = _spectrum_clusters(ws, hs, True, ws.config.spectrum_levels)
    residual = max(abs(g[0] - w[0]) for g, w in zip(got, want)) / ws.params.Omega
    mult = [g[1] for g in got]
    expected = [w[1] for w in want]
    ok = residual <= tol and mult == expected and len(got) == len(want)
    return [CheckResult("susy_spectrum", residual, tol, z=pt.z,
                        detail={"multiplicities": mult, "expected_multiplicities": expected,
                                "cluster_tolerance": 1e-8 * ws.params.Omega},
                        status="pass" if ok else "fail")]


_POINT_CHECKS = {
    "coeff_identities": _coeff_identities,
    "h_spectrum": _h_spectrum,
    "h_hermitian": _h_hermitian,
    "quasi_hermiticity": _quasi_hermiticity,
    "h_intertwining": _h_intertwining,
    "pseudo_susy": _pseudo_susy,
    "factorization": _factorization,
    "bch": _bch,
    "bogoliubov": _bogoliubov,
    "intertwining": _intertwining,
    "susy_spectrum": _susy_spectrum,
}


def _timed(fn, *args):
    start = time.perf_counter()
    results = fn(*args)
    elapsed = time.perf_counter() - start
    for r in results:
        r.wall_time = elapsed / len(results)
    return results


def _global_checks(ws: Workspace):
    cfg = ws.config
    out = []
    if "relations" in cfg.checks:
        table = standard_relation_table().restricted_to(ws.gens.symbols())
        out += _timed(check_relations, ws.gens, table, ws.interior, cfg.tolerances["relations"])
    if "hermiticity" in cfg.checks:
        out += _timed(check_hermiticity, ws.gens, ws.interior, cfg.tolerances["hermiticity"])
    return out


def _run_point(ws: Workspace, z: float):
    """All z-dependent checks at one grid point.

    Returns ``(entries, undefined, abort)`` where ``abort`` is the numerical
    exception that stopped the point, if any.
    """
    cfg = ws.config
    pt = _Point(ws, z)
    entries = []
    undefined = False
    for name in cfg.checks:
        if name in _GLOBAL_CHECKS:
            continue
        tol = cfg.tolerances[name]
        try:
            entries += _timed(_POINT_CHECKS[name], pt, tol)
        except _UNDEFINED + (FactorizationUndefined,) as exc:
            undefined = undefined or not isinstance(exc, FactorizationUndefined)
            entries.append(CheckResult(name, math.nan, tol, z=z, status="metric_undefined",
                                       detail={"reason": str(exc)}))
        except NUMERICAL_ERRORS as exc:
            return entries, undefined, exc
    return entries, undefined, None


def _map_points(ws: Workspace, fn):
    cfg = ws.config
    if cfg.workers > 1 and len(cfg.z_grid) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(lambda z: fn(ws, z), cfg.z_grid))
    return [fn(ws, z) for z in cfg.z_grid]


def run_verify(config: RunConfig) -> VerificationReport:
    """Run every configured check at every grid point.

    A ``MetricUndefined`` grid point produces ``metric_undefined`` entries and
    does not affect other points. A numerical failure (non-convergence,
    overflow, singular matrix, violated closure identity) stops the run: the
    report keeps the entries computed before it and is marked incomplete.
    """
    ws = Workspace(config)
    metadata = ws.metadata()
    entries = _global_checks(ws)
    undefined_z = []
    complete = True
    for z, (point_entries, undefined, abort) in zip(config.z_grid, _map_points(ws, _run_point)):
        entries += point_entries
        if undefined:
            undefined_z.append(z)
        if abort is not None:
            complete = False
            metadata["abort"] = {"z": z, "error": type(abort).__name__, "message": str(abort)}
            break
    return VerificationReport(config.echo(), entries, metadata, undefined_z, complete,
                              config.record_timing)


SPECTRUM_COLUMNS = ["z", "operator", "level", "eigenvalue", "predicted", "abs_deviation",
                    "multiplicity", "predicted_multiplicity", "warning", "status"]


def _spectrum_point(ws: Workspace, z: float, n_levels: int):
    safe = ws.config.cutoff / 4
    try:
        h = mt.build_h(ws.gens, ws.params, z)
    except _UNDEFINED as exc:
        return [{"z": z, "operator": "h", "level": None, "eigenvalue": None, "predicted": None,
                 "abs_deviation": None, "multiplicity": None, "predicted_multiplicity": None,
                 "warning": None, "status": f"metric_undefined: {exc}"}]
    rows = []
    for name, op, sym in (("h", h, False), ("h_S", susy.build_hS(h, ws.gens, ws.params), True)):
        got, want = _spectrum_clusters(ws, op, sym, n_levels)
        for n, ((val, mult), (pred, pmult)) in enumerate(zip(got, want)):
            rows.append({
                "z": z, "operator": name, "level": n, "eigenvalue": val, "predicted": pred,
                "abs_deviation": abs(val - pred), "multiplicity": mult,
                "predicted_multiplicity": pmult,
                "warning": "beyond_safe_levels" if n > safe else None, "status": "ok",
            })
    return rows


def run_spectrum(config: RunConfig, n_levels: int | None = None) -> TableReport:
    """Lowest eigenvalue clusters of ``h`` and ``h_S`` against their exact values.

    Levels above ``cutoff / 4`` carry a ``beyond_safe_levels`` warning: they
    are close enough to the cutoff for truncation to matter.
    """
    n_levels = config.spectrum_levels if n_levels is None else int(n_levels)
    if n_levels < 1:
        raise ValueError("n_levels must be positive")
    ws = Workspace(config)
    rows = []
    for point_rows in _map_points(ws, lambda w, z: _spectrum_point(w, z, n_levels)):
        rows += point_rows
    echo = config.echo()
    echo["spectrum_levels"] = n_levels
    return TableReport("spectrum", echo, ws.metadata(), SPECTRUM_COLUMNS, rows)


SWEEP_COLUMNS = ["z", "status", "epsilon", "theta", "mu", "nu", "sigma", "tau", "varphi", "chi",
                 "p", "q", "pprime", "qprime", "closed_form_deviation"]


def sweep_row(params: mt.SwansonParams, z: float) -> dict:
    """All scalar symbols at one z, with validity flags."""
    row = dict.fromkeys(SWEEP_COLUMNS)
    row["z"] = z
    try:
        mp = mt.epsilon_of(params, z)
        ep = mt.mu_nu(params, z)
    except _UNDEFINED as exc:
        row["status"] = f"metric_undefined: {exc}"
        return row
    coeffs = susy.evaluate_coeffs(params, mp, ep)
    row.update(epsilon=mp.epsilon, theta=mp.theta, mu=ep.mu, nu=ep.nu, sigma=coeffs.sigma,
               tau=coeffs.tau, varphi=coeffs.varphi, chi=coeffs.chi, status="ok")
    try:
        fp = mt.factorization_params(mp)
    except FactorizationUndefined as exc:
        row["status"] = f"factorization_undefined: {exc}"
    else:
        row.update(p=fp.p, q=fp.q, pprime=fp.pprime, qprime=fp.qprime)
    if z in (-1.0, 0.0, 1.0):
        try:
            sc = susy.special_case_coeffs(params, int(z))
        except ParameterError:
            pass
        else:
            general = np.array(coeffs.as_tuple())
            closed = np.array(sc.coeffs().as_tuple())
            row["closed_form_deviation"] = float(np.max(np.abs(general - closed))
                                                 / np.max(np.abs(closed)))
    return row


def run_sweep(config: RunConfig) -> TableReport:
    """One row of scalar quantities per grid point, in grid order."""
    params = config.params
    rows = [sweep_row(params, z) for z in config.z_grid]
    metadata = {k: v for k, v in {
        "package": "swansusy", "version": __version__, "python": platform.python_version(),
        "numpy": np.__version__, "scipy": scipy.__version__}.items()}
    return TableReport("sweep", config.echo(), metadata, SWEEP_COLUMNS, rows)
