"""Run configuration: TOML parsing, defaults and validation.

A config is a flat TOML document plus an optional ``[tolerances]`` table::

    omega = 2.0
    alpha = 0.5
    beta = 0.3
    z_grid = [-1.0, -0.5, 0.0, 0.5, 1.0]
    realization = "single_mode"   # or "n_mode", "spin_orbit"
    n_modes = 2                    # n_mode only
    cutoff = 80
    margin = 16
    low_lying_quanta = 20          # default cutoff // 4
    metric = "auto"                # "truncated", "compressed" or "auto"
    checks = ["quasi_hermiticity", "relations"]
    workers = 1
    record_timing = false
    output = "report.json"
    format = "json"

    [tolerances]
    quasi_hermiticity = 1e-8

Everything except ``omega``, ``alpha``, ``beta`` and ``z_grid`` has a
default. See the README for the full schema.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .errors import ConfigError, ParameterError
from .metric import METRIC_KINDS, SwansonParams
from .realizations import KINDS, RealizationSpec, default_cutoff, default_margin

__all__ = [
    "CHECKS",
    "RHO_TOL",
    "POLY_TOL",
    "SCALAR_TOL",
    "DEFAULT_TOLERANCES",
    "RunConfig",
    "parse_config",
    "load_config",
    "default_checks",
]

RHO_TOL = 1e-8
POLY_TOL = 1e-10
SCALAR_TOL = 1e-12
SPECTRAL_TOL = 1e-6
NILPOTENCY_TOL = 1e-13
SPECIAL_CASE_TOL = 1e-10

# name -> (default tolerance, realizations it applies to)
_ALL = KINDS
CHECKS = {
    "coeff_identities": (SCALAR_TOL, _ALL),
    "h_spectrum": (SPECTRAL_TOL, _ALL),
    "h_hermitian": (SCALAR_TOL, _ALL),
    "quasi_hermiticity": (RHO_TOL, _ALL),
    "h_intertwining": (RHO_TOL, _ALL),
    "relations": (POLY_TOL, _ALL),
    "hermiticity": (POLY_TOL, _ALL),
    "pseudo_susy": (RHO_TOL, _ALL),
    "factorization": (RHO_TOL, _ALL),
    "bch": (RHO_TOL, _ALL),
    "bogoliubov": (RHO_TOL, _ALL),
    "intertwining": (RHO_TOL, ("single_mode",)),
    "susy_spectrum": (SPECTRAL_TOL, _ALL),
}
# tolerances that are not check names but are used inside checks
_EXTRA_TOLERANCES = {
    "nilpotency": NILPOTENCY_TOL,
    "special_cases": SPECIAL_CASE_TOL,
}
DEFAULT_TOLERANCES = {**{k: v[0] for k, v in CHECKS.items()}, **_EXTRA_TOLERANCES}

# The spectral checks compare eigenvalues of the truncated h and h_S with the
# exact levels; with a few levels per mode they measure the cutoff, not the
# paper, so multimode runs leave them out unless asked for.
_MULTIMODE_SKIP = ("h_spectrum", "susy_spectrum")

_KEYS = {
    "omega", "alpha", "beta", "z_grid", "realization", "n_modes", "cutoff", "margin",
    "low_lying_quanta", "metric", "aux_cutoff", "checks", "workers", "record_timing",
    "output", "format", "tolerances", "spectrum_levels",
}


def default_checks(kind: str) -> list:
    return [c for c, (_, kinds) in CHECKS.items()
            if kind in kinds and (kind == "single_mode" or c not in _MULTIMODE_SKIP)]


@dataclass(frozen=True)
class RunConfig:
    omega: float
    alpha: float
    beta: float
    z_grid: tuple
    realization: RealizationSpec = field(default_factory=RealizationSpec)
    margin: int = 16
    low_lying_quanta: int = 20
    metric: str = "truncated"
    aux_cutoff: int | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    checks: tuple = ()
    workers: int = 1
    record_timing: bool = False
    spectrum_levels: int = 6
    output_path: str | None = None
    output_format: str = "json"

    @property
    def params(self) -> SwansonParams:
        return SwansonParams(self.omega, self.alpha, self.beta)

    @property
    def cutoff(self) -> int:
        return self.realization.boson_cutoff

    def echo(self) -> dict:
        """Resolved settings for the report (the output path is left out so
        reports written to different files stay byte-identical)."""
        return {
            "omega": self.omega,
            "alpha": self.alpha,
            "beta": self.beta,
            "z_grid": list(self.z_grid),
            "realization": self.realization.kind,
            "n_modes": self.realization.n_modes,
            "cutoff": self.cutoff,
            "margin": self.margin,
            "low_lying_quanta": self.low_lying_quanta,
            "metric": self.metric,
            "aux_cutoff": self.aux_cutoff,
            "checks": list(self.checks),
            "tolerances": dict(self.tolerances),
            "workers": self.workers,
            "spectrum_levels": self.spectrum_levels,
        }


def _fail(field_name: str, message: str):
    raise ConfigError(f"{field_name}: {message}", field=field_name)


def _number(doc, key, required=False, default=None):
    if key not in doc:
        if required:
            _fail(key, "missing required field")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(key, f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        _fail(key, "must be finite")
    return v


def _integer(doc, key, default, minimum=0):
    v = doc.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(key, f"expected an integer, got {v!r}")
    if v < minimum:
        _fail(key, f"must be at least {minimum}, got {v}")
    return v


def _choice(doc, key, default, choices):
    v = doc.get(key, default)
    if v not in choices:
        _fail(key, f"must be one of {list(choices)}, got {v!r}")
    return v


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration.

    Raises
    ------
    ConfigError
        On malformed TOML (message carries line and column) or on any
        violated invariant (message names the field).
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}", field=None) from exc
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        _fail(unknown[0], "unknown field")

    omega = _number(doc, "omega", required=True)
    alpha = _number(doc, "alpha", required=True)
    beta = _number(doc, "beta", required=True)
    try:
        SwansonParams(omega, alpha, beta)
    except ParameterError as exc:
        field_name = "alpha/beta" if "alpha != beta" in str(exc) else "omega/alpha/beta"
        _fail(field_name, str(exc))

    if "z_grid" not in doc:
        _fail("z_grid", "missing required field")
    grid = doc["z_grid"]
    if not isinstance(grid, list) or not grid:
        _fail("z_grid", "must be a non-empty list")
    zs = []
    for v in grid:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            _fail("z_grid", f"entries must be numbers, got {v!r}")
        v = float(v)
        if not -1.0 <= v <= 1.0:
            _fail("z_grid", f"value {v} outside [-1, 1]")
        zs.append(v)
    if any(b <= a for a, b in zip(zs, zs[1:])):
        _fail("z_grid", "must be strictly increasing")

    kind = _choice(doc, "realization", "single_mode", KINDS)
    n_modes = _integer(doc, "n_modes", {"n_mode": 2}.get(kind, 1 if kind == "single_mode" else 3), 1)
    cutoff = _integer(doc, "cutoff", default_cutoff(kind), 4)
    try:
        spec = RealizationSpec(kind, cutoff, n_modes)
    except ValueError as exc:
        _fail("realization", str(exc))
    margin = _integer(doc, "margin", default_margin(kind), 0)
    if margin >= cutoff:
        _fail("margin", f"must be smaller than the cutoff {cutoff}")
    low = _integer(doc, "low_lying_quanta", cutoff // 4, 0)
    if low > cutoff - 1:
        _fail("low_lying_quanta", f"must be below the cutoff {cutoff}")

    metric = _choice(doc, "metric", "auto", ("auto",) + METRIC_KINDS)
    if metric == "auto":
        metric = "truncated" if kind == "single_mode" else "compressed"
    aux = _integer(doc, "aux_cutoff", None, cutoff)

    checks = doc.get("checks", default_checks(kind))
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        _fail("checks", "must be a list of check names")
    for c in checks:
        if c not in CHECKS:
            _fail("checks", f"unknown check {c!r}; registered: {list(CHECKS)}")
        if kind not in CHECKS[c][1]:
            _fail("checks", f"check {c!r} does not apply to realization {kind!r}")
    if len(set(checks)) != len(checks):
        _fail("checks", "duplicate check names")

    tolerances = dict(DEFAULT_TOLERANCES)
    given = doc.get("tolerances", {})
    if not isinstance(given, dict):
        _fail("tolerances", "must be a table")
    for k, v in given.items():
        if k not in tolerances:
            _fail(f"tolerances.{k}", "unknown tolerance name")
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            _fail(f"tolerances.{k}", f"must be a positive number, got {v!r}")
        tolerances[k] = float(v)

    workers = _integer(doc, "workers", 1, 1)
    timing = doc.get("record_timing", False)
    if not isinstance(timing, bool):
        _fail("record_timing", "must be true or false")
    levels = _integer(doc, "spectrum_levels", 6, 1)
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        _fail("output", "must be a string")
    fmt = _choice(doc, "format", "json", ("json", "csv"))

    return RunConfig(
        omega=omega, alpha=alpha, beta=beta, z_grid=tuple(zs), realization=spec,
        margin=margin, low_lying_quanta=low, metric=metric, aux_cutoff=aux,
        tolerances=tolerances, checks=tuple(checks), workers=workers,
        record_timing=timing, spectrum_levels=levels, output_path=output, output_format=fmt,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", field=None) from exc
    return parse_config(text)
