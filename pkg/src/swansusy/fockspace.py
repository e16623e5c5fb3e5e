"""Graded multi-mode Fock spaces and the operators that act on them.

A :class:`ModeLayout` is an ordered tuple of factors (bosons with a level
cutoff, fermionic modes, plain spin factors). The basis of the full space is
the Kronecker product of the factor bases with the leftmost factor varying
slowest; this ordering is fixed and reported in every output file as
:attr:`ModeLayout.tag`.

Operators are :class:`TruncatedOperator` values: a dense matrix, the layout
it acts on, and its Z2 grade under total fermion parity.
"""

from __future__ import annotations

import functools
import numbers
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp

from . import numkernel as nk
from .errors import DimensionError, GradeError, LayoutError

__all__ = [
    "Boson",
    "Fermion",
    "Spin",
    "ModeLayout",
    "TruncatedOperator",
    "EVEN",
    "ODD",
    "ladder_matrix",
    "quadrature_matrices",
    "identity",
    "zero",
    "boson_ops",
    "fermion_ops",
    "boson_ops_sparse",
    "fermion_ops_sparse",
    "quadratures",
    "fermion_parity",
    "boson_quanta",
    "quanta_projector",
    "interior_projector",
    "low_lying_projector",
    "graded_bracket",
    "commutator",
    "anticommutator",
    "grade_defect",
    "sandwich",
    "DEFAULT_MAX_DIM",
    "MIN_BOSON_CUTOFF",
]

EVEN = 0
ODD = 1
DEFAULT_MAX_DIM = 16384
MIN_BOSON_CUTOFF = 4


@dataclass(frozen=True)
class Boson:
    cutoff: int

    @property
    def dim(self) -> int:
        return self.cutoff

    def label(self) -> str:
        return f"B{self.cutoff}"


@dataclass(frozen=True)
class Fermion:
    @property
    def dim(self) -> int:
        return 2

    def label(self) -> str:
        return "F"


@dataclass(frozen=True)
class Spin:
    dim: int = 2

    def label(self) -> str:
        return f"S{self.dim}"


Factor = Union[Boson, Fermion, Spin]


@dataclass(frozen=True)
class ModeLayout:
    """Ordered tensor factors of a truncated graded Hilbert space."""

    factors: tuple
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise LayoutError("a layout needs at least one factor")
        for f in self.factors:
            if isinstance(f, Boson):
                if f.cutoff < MIN_BOSON_CUTOFF:
                    raise LayoutError(
                        f"boson cutoff {f.cutoff} is below the minimum {MIN_BOSON_CUTOFF}"
                    )
            elif isinstance(f, Spin):
                if f.dim < 1:
                    raise LayoutError(f"spin factor dimension {f.dim} must be positive")
            elif not isinstance(f, Fermion):
                raise LayoutError(f"unknown factor {f!r}")
        if self.total_dim > self.max_dim:
            raise LayoutError(
                f"total dimension {self.total_dim} exceeds the maximum {self.max_dim}"
            )

    @classmethod
    def of(cls, *factors, max_dim: int = DEFAULT_MAX_DIM) -> "ModeLayout":
        return cls(tuple(factors), max_dim=max_dim)

    @property
    def dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def boson_indices(self) -> tuple:
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Boson))

    @property
    def fermion_indices(self) -> tuple:
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Fermion))

    @property
    def spin_indices(self) -> tuple:
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Spin))

    @property
    def min_boson_cutoff(self) -> int:
        cutoffs = [self.factors[i].cutoff for i in self.boson_indices]
        if not cutoffs:
            raise LayoutError("layout has no boson factor")
        return min(cutoffs)

    @property
    def tag(self) -> str:
        """Basis-ordering tag, e.g. ``kron-left-slowest:B80,F``."""
        return "kron-left-slowest:" + ",".join(f.label() for f in self.factors)

    def local_indices(self) -> np.ndarray:
        """Array of shape (total_dim, n_factors) with each basis state's local labels."""
        grids = np.indices(self.dims).reshape(len(self.factors), -1)
        return grids.T.copy()

    def embed_sparse(self, locals_: dict):
        """Kronecker product of per-factor matrices as CSR, identity where not given."""
        out = sp.identity(1, dtype=np.complex128, format="csr")
        for i, f in enumerate(self.factors):
            m = locals_.get(i)
            block = sp.identity(f.dim, dtype=np.complex128, format="csr") if m is None \
                else sp.csr_matrix(np.asarray(m, dtype=np.complex128))
            out = sp.kron(out, block, format="csr")
        return out

    def embed(self, locals_: dict) -> np.ndarray:
        """Kronecker product of per-factor matrices, identity where not given."""
        return self.embed_sparse(locals_).toarray()


def _check_grade_value(grade):
    if grade not in (EVEN, ODD):
        raise GradeError(f"grade must be 0 (even) or 1 (odd), got {grade!r}")


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Dense matrix tagged with its layout and Z2 grade."""

    layout: ModeLayout
    matrix: np.ndarray = field(repr=False)
    grade: int = EVEN

    def __post_init__(self):
        _check_grade_value(self.grade)
        m = np.asarray(self.matrix, dtype=np.complex128)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise DimensionError(
                f"matrix shape {m.shape} does not match layout dimension {n}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @property
    def dag(self) -> "TruncatedOperator":
        return TruncatedOperator(self.layout, self.matrix.conj().T, self.grade)

    def _coerce(self, other) -> "TruncatedOperator":
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        if other.layout != self.layout:
            raise LayoutError("operators act on different layouts")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.grade != self.grade:
            raise GradeError("cannot add operators of different grade")
        return TruncatedOperator(self.layout, self.matrix + other.matrix, self.grade)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.grade != self.grade:
            raise GradeError("cannot subtract operators of different grade")
        return TruncatedOperator(self.layout, self.matrix - other.matrix, self.grade)

    def __neg__(self):
        return TruncatedOperator(self.layout, -self.matrix, self.grade)

    def __mul__(self, scalar):
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return TruncatedOperator(self.layout, scalar * self.matrix, self.grade)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return TruncatedOperator(self.layout, self.matrix / scalar, self.grade)

    def __matmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedOperator(
            self.layout, self.matrix @ other.matrix, (self.grade + other.grade) % 2
        )

    @functools.cached_property
    def support(self):
        """Kept basis indices if this is a diagonal 0/1 projector, else ``None``."""
        m = self.matrix
        d = np.diag(m)
        if np.count_nonzero(m) != np.count_nonzero(d):
            return None
        if not np.all((d == 0) | (d == 1)):
            return None
        return np.flatnonzero(d)


# -- single-factor primitives -------------------------------------------------

def ladder_matrix(n: int) -> np.ndarray:
    """Truncated annihilator on ``n`` levels: ``a[k-1, k] = sqrt(k)``."""
    if n < 1:
        raise LayoutError("need at least one level")
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(np.complex128)


def quadrature_matrices(n: int, omega: float):
    """Position and momentum on ``n`` levels for frequency ``omega``."""
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    a = ladder_matrix(n)
    ad = a.conj().T
    x = (a + ad) / np.sqrt(2.0 * omega)
    p = 1j * np.sqrt(omega / 2.0) * (ad - a)
    return x, p


_FERMION_B = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
_FERMION_PARITY = np.diag([1.0, -1.0]).astype(np.complex128)


# -- layout-level constructors ------------------------------------------------

def identity(layout: ModeLayout) -> TruncatedOperator:
    return TruncatedOperator(layout, np.eye(layout.total_dim, dtype=np.complex128), EVEN)


def zero(layout: ModeLayout, grade: int = EVEN) -> TruncatedOperator:
    n = layout.total_dim
    return TruncatedOperator(layout, np.zeros((n, n), dtype=np.complex128), grade)


def _factor(layout: ModeLayout, mode_index: int, kind):
    if not 0 <= mode_index < len(layout.factors):
        raise LayoutError(f"mode index {mode_index} out of range")
    f = layout.factors[mode_index]
    if not isinstance(f, kind):
        raise LayoutError(f"factor {mode_index} is {f!r}, not a {kind.__name__}")
    return f


def boson_ops_sparse(layout: ModeLayout, mode_index: int):
    """CSR annihilator and creator of boson ``mode_index`` (for building many-mode operators)."""
    f = _factor(layout, mode_index, Boson)
    a = layout.embed_sparse({mode_index: ladder_matrix(f.cutoff)})
    return a, a.conj().T.tocsr()


def fermion_ops_sparse(layout: ModeLayout, mode_index: int):
    """CSR annihilator and creator of fermion ``mode_index``, with parity strings."""
    _factor(layout, mode_index, Fermion)
    locals_ = {j: _FERMION_PARITY for j in layout.fermion_indices if j < mode_index}
    locals_[mode_index] = _FERMION_B
    b = layout.embed_sparse(locals_)
    return b, b.conj().T.tocsr()


def boson_ops(layout: ModeLayout, mode_index: int):
    """Annihilator and creator of the boson factor ``mode_index``."""
    f = _factor(layout, mode_index, Boson)
    a = TruncatedOperator(layout, layout.embed({mode_index: ladder_matrix(f.cutoff)}), EVEN)
    return a, a.dag


def fermion_ops(layout: ModeLayout, mode_index: int):
    """Annihilator and creator of the fermionic factor ``mode_index``.

    Fermionic factors to the left carry a parity string so that distinct
    modes anticommute.
    """
    b, _ = fermion_ops_sparse(layout, mode_index)
    b = TruncatedOperator(layout, b.toarray(), ODD)
    return b, b.dag


def quadratures(layout: ModeLayout, mode_index: int, omega: float):
    """Hermitian ``x = (a + a^dag)/sqrt(2 omega)`` and ``p = i sqrt(omega/2)(a^dag - a)``."""
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    a, ad = boson_ops(layout, mode_index)
    x = (a + ad) * (1.0 / np.sqrt(2.0 * omega))
    p = (ad - a) * (1j * np.sqrt(omega / 2.0))
    return x, p


def _parity_vector(layout: ModeLayout) -> np.ndarray:
    labels = layout.local_indices()
    fi = list(layout.fermion_indices)
    if not fi:
        return np.ones(layout.total_dim)
    occupied = labels[:, fi].sum(axis=1)
    return np.where(occupied % 2 == 0, 1.0, -1.0)


def fermion_parity(layout: ModeLayout) -> TruncatedOperator:
    """Diagonal ``(-1)**(total fermion number)``."""
    return TruncatedOperator(layout, np.diag(_parity_vector(layout)).astype(np.complex128), EVEN)


def boson_quanta(layout: ModeLayout) -> np.ndarray:
    """Total boson occupation of every basis state."""
    labels = layout.local_indices()
    bi = list(layout.boson_indices)
    if not bi:
        return np.zeros(layout.total_dim, dtype=int)
    return labels[:, bi].sum(axis=1)


def quanta_projector(layout: ModeLayout, max_quanta: int) -> TruncatedOperator:
    """Projector onto basis states whose total boson quanta are at most ``max_quanta``."""
    keep = (boson_quanta(layout) <= max_quanta).astype(np.complex128)
    return TruncatedOperator(layout, np.diag(keep), EVEN)


def interior_projector(layout: ModeLayout, margin: int) -> TruncatedOperator:
    """Projector onto total boson quanta at most ``min_cutoff - 1 - margin``."""
    top = layout.min_boson_cutoff
    if margin < 0 or margin >= top:
        raise LayoutError(f"margin {margin} must lie in [0, {top})")
    return quanta_projector(layout, top - 1 - margin)


def low_lying_projector(layout: ModeLayout, max_quanta=None) -> TruncatedOperator:
    """Projector used for identities that involve the metric (default: cutoff // 4 quanta)."""
    if max_quanta is None:
        max_quanta = layout.min_boson_cutoff // 4
    return quanta_projector(layout, max_quanta)


# -- brackets and grading -----------------------------------------------------

def commutator(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    return x @ y - y @ x


def anticommutator(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    return x @ y + y @ x


def graded_bracket(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    """Anticommutator when both operands are odd, commutator otherwise."""
    if x.grade == ODD and y.grade == ODD:
        return anticommutator(x, y)
    return commutator(x, y)


def grade_defect(op: TruncatedOperator) -> float:
    """Relative weight of the part of ``op`` with the wrong grade.

    Zero means ``op`` commutes (even) or anticommutes (odd) with the fermion
    parity exactly.
    """
    s = _parity_vector(op.layout)
    flip = op.matrix * np.outer(s, s)
    wrong = 0.5 * (op.matrix + flip) if op.grade == ODD else 0.5 * (op.matrix - flip)
    scale = nk.fro_norm(op.matrix)
    return 0.0 if scale == 0.0 else nk.fro_norm(wrong) / scale


# -- projected products --------------------------------------------------------

def _as_array(x) -> np.ndarray:
    return x.matrix if isinstance(x, TruncatedOperator) else np.asarray(x)


def sandwich(projector: TruncatedOperator, *factors) -> np.ndarray:
    """The block of ``P F1 F2 ... Fk P`` on the projector's range.

    For a diagonal 0/1 projector the product is evaluated right to left on
    the kept columns only, skipping rows that are exactly zero; the result is
    exact and the cost scales with the projector rank. Other projectors fall
    back to the full dense product and return the whole matrix.
    """
    if not factors:
        raise ValueError("need at least one factor")
    mats = [_as_array(f) for f in factors]
    idx = projector.support
    if idx is None:
        p = projector.matrix
        out = p
        for m in mats:
            out = out @ m
        return out @ p
    if len(mats) == 1:
        return mats[0][np.ix_(idx, idx)]
    x = mats[-1][:, idx]
    for m in reversed(mats[1:-1]):
        rows = np.flatnonzero(np.any(x != 0, axis=1))
        x = m[:, rows] @ x[rows, :]
    rows = np.flatnonzero(np.any(x != 0, axis=1))
    return mats[0][np.ix_(idx, rows)] @ x[rows, :]
