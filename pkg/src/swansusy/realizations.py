"""Alternative su(1,1|1) realizations: n boson-fermion pairs and the spin-orbit model.

Every constructor returns a :class:`~swansusy.superalgebra.GeneratorSet`, so
the metric and supersymmetry pipelines run on them unchanged.

Layouts:

* ``single_mode``: ``[Boson(N), Fermion]``
* ``n_mode``: ``[Boson(N)] * n + [Fermion] * n`` (pair ``i`` = boson ``i``,
  fermion ``n + i``)
* ``spin_orbit``: ``[Boson(N)] * 3 + [Spin(2), Fermion]``; the fermion plays
  the role of the 2x2 grading blocks, so the printed ``(0, X; 0, 0)`` is
  ``X b`` and ``diag(1, -1)`` is the fermion parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fockspace as fs
from .errors import LayoutError
from .fockspace import EVEN, ODD, TruncatedOperator
from .superalgebra import GeneratorSet, su11_single_mode

__all__ = [
    "KINDS",
    "RealizationSpec",
    "layout_for",
    "single_mode_generators",
    "n_mode_generators",
    "spin_orbit_generators",
    "angular_momentum",
    "generators_for",
    "default_cutoff",
    "default_margin",
]

KINDS = ("single_mode", "n_mode", "spin_orbit")
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class RealizationSpec:
    kind: str = "single_mode"
    boson_cutoff: int = 80
    n_modes: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown realization kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "n_mode" and self.n_modes < 2:
            raise ValueError("n_mode needs n_modes >= 2")
        if self.kind == "single_mode" and self.n_modes != 1:
            raise ValueError("single_mode has exactly one mode")
        if self.kind == "spin_orbit" and self.n_modes not in (1, 3):
            raise ValueError("spin_orbit fixes three bosonic modes")

    @property
    def bosonic_modes(self) -> int:
        return {"single_mode": 1, "n_mode": self.n_modes, "spin_orbit": 3}[self.kind]


def default_cutoff(kind: str) -> int:
    return 80 if kind == "single_mode" else 8


def default_margin(kind: str) -> int:
    """Interior margin: 16 for one mode, 4 (total quanta <= cutoff - 5) for several."""
    return 16 if kind == "single_mode" else 4


def layout_for(spec: RealizationSpec, max_dim: int = fs.DEFAULT_MAX_DIM) -> fs.ModeLayout:
    n = spec.boson_cutoff
    if spec.kind == "single_mode":
        factors = [fs.Boson(n), fs.Fermion()]
    elif spec.kind == "n_mode":
        factors = [fs.Boson(n)] * spec.n_modes + [fs.Fermion()] * spec.n_modes
    else:
        factors = [fs.Boson(n)] * 3 + [fs.Spin(2), fs.Fermion()]
    return fs.ModeLayout(tuple(factors), max_dim=max_dim)


def single_mode_generators(spec: RealizationSpec) -> GeneratorSet:
    if spec.kind != "single_mode":
        raise LayoutError(f"spec kind is {spec.kind!r}, not single_mode")
    return su11_single_mode(layout_for(spec))


def _dense(layout, m, grade=EVEN) -> TruncatedOperator:
    return TruncatedOperator(layout, m.toarray(), grade)


def _even_part(layout, modes):
    """Sparse ``K0, K+, K-`` summed over the given boson modes, plus the ladders."""
    n = layout.total_dim
    k0 = 0.25 * len(modes) * sp.identity(n, dtype=np.complex128, format="csr")
    kp = sp.csr_matrix((n, n), dtype=np.complex128)
    km = sp.csr_matrix((n, n), dtype=np.complex128)
    ladders = []
    for i in modes:
        a, ad = fs.boson_ops_sparse(layout, i)
        ladders.append((a, ad))
        k0 = k0 + 0.5 * (ad @ a)
        kp = kp + 0.5 * (ad @ ad)
        km = km + 0.5 * (a @ a)
    return k0, kp, km, ladders


def _check_n_mode_layout(layout: fs.ModeLayout) -> int:
    n = len(layout.boson_indices)
    expected = tuple(range(n)), tuple(range(n, 2 * n))
    if (n < 2 or (layout.boson_indices, layout.fermion_indices) != expected
            or len(layout.factors) != 2 * n
            or len({layout.factors[i].cutoff for i in range(n)}) != 1):
        raise LayoutError("n-mode realization needs n >= 2 equal-cutoff bosons followed by n fermions")
    return n


def _assemble(layout, name, k0, kp, km, y, vp, vm, wp, wm) -> GeneratorSet:
    r = 1.0 / math.sqrt(2.0)
    return GeneratorSet(
        layout, _dense(layout, k0), _dense(layout, kp), _dense(layout, km),
        Y=_dense(layout, y),
        Vplus=_dense(layout, r * vp, ODD), Vminus=_dense(layout, r * vm, ODD),
        Wplus=_dense(layout, r * wp, ODD), Wminus=_dense(layout, r * wm, ODD),
        name=name,
    )


def n_mode_generators(spec_or_layout) -> GeneratorSet:
    """Eq. (22) and neighbours: ``n`` boson-fermion pairs with summed generators."""
    layout = spec_or_layout if isinstance(spec_or_layout, fs.ModeLayout) else layout_for(spec_or_layout)
    n = _check_n_mode_layout(layout)
    k0, kp, km, ladders = _even_part(layout, range(n))
    dim = layout.total_dim
    y = -0.25 * n * sp.identity(dim, dtype=np.complex128, format="csr")
    odd = [sp.csr_matrix((dim, dim), dtype=np.complex128) for _ in range(4)]
    for i, (a, ad) in enumerate(ladders):
        b, bd = fs.fermion_ops_sparse(layout, n + i)
        y = y + 0.5 * (bd @ b)
        for k, term in enumerate((ad @ bd, a @ bd, ad @ b, a @ b)):
            odd[k] = odd[k] + term
    return _assemble(layout, f"n_mode({n})", k0, kp, km, y, *odd)


def _angular_momentum_sparse(layout, modes):
    ladders = [fs.boson_ops_sparse(layout, m) for m in modes]
    out = []
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        ai, adi = ladders[i]
        aj, adj = ladders[j]
        out.append(-1j * (adi @ aj - adj @ ai))
    return out


def angular_momentum(layout: fs.ModeLayout, modes=(0, 1, 2)):
    """``L_k = -i eps_kij a_i^dag a_j`` over three boson modes."""
    return tuple(_dense(layout, m) for m in _angular_momentum_sparse(layout, modes))


def _check_spin_orbit_layout(layout: fs.ModeLayout):
    f = layout.factors
    if (len(f) != 5 or layout.boson_indices != (0, 1, 2) or layout.spin_indices != (3,)
            or layout.fermion_indices != (4,) or f[3].dim != 2
            or len({f[i].cutoff for i in range(3)}) != 1):
        raise LayoutError("spin-orbit realization needs layout [B, B, B, Spin(2), Fermion]")


def spin_orbit_generators(spec_or_layout) -> GeneratorSet:
    """Ui-Takeda realization: ``n = 3`` even part, spin-orbit ``Y`` and block odd generators."""
    layout = spec_or_layout if isinstance(spec_or_layout, fs.ModeLayout) else layout_for(spec_or_layout)
    _check_spin_orbit_layout(layout)
    k0, kp, km, ladders = _even_part(layout, range(3))
    sig = [layout.embed_sparse({3: s}) for s in _PAULI]
    ls = _angular_momentum_sparse(layout, (0, 1, 2))
    one = sp.identity(layout.total_dim, dtype=np.complex128, format="csr")
    grading = layout.embed_sparse({4: np.diag([1.0, -1.0])})
    y = 0.5 * ((sig[0] @ ls[0] + sig[1] @ ls[1] + sig[2] @ ls[2] + 1.5 * one) @ grading)
    sa = sig[0] @ ladders[0][0] + sig[1] @ ladders[1][0] + sig[2] @ ladders[2][0]
    sad = sig[0] @ ladders[0][1] + sig[1] @ ladders[1][1] + sig[2] @ ladders[2][1]
    b, bd = fs.fermion_ops_sparse(layout, 4)
    return _assemble(layout, "spin_orbit", k0, kp, km, y, sad @ b, sa @ b, sad @ bd, sa @ bd)


def generators_for(spec: RealizationSpec) -> GeneratorSet:
    if spec.kind == "single_mode":
        return single_mode_generators(spec)
    if spec.kind == "n_mode":
        return n_mode_generators(spec)
    return spin_orbit_generators(spec)
