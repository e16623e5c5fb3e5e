"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` ``complex128`` arrays. All routines are pure:
inputs are never modified and results are fresh arrays.

The Hermitian routines split the input into the connected components of its
sparsity pattern before diagonalizing. Truncated Fock-space operators are
usually block diagonal under a permutation (parity sectors, fermion number,
spin), so this is exact and turns a 2048-dimensional problem into a few small
ones. A diagonal input therefore gets an exact elementwise exponential.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    ConvergenceError,
    DimensionError,
    ExpmOverflowError,
    NotHermitianError,
    SingularMatrixError,
)

__all__ = [
    "EigenDecomposition",
    "as_matrix",
    "matmul",
    "adjoint",
    "eig_hermitian",
    "eig_general",
    "eigvals_hermitian",
    "spectral_blocks",
    "from_spectral_blocks",
    "expm_apply",
    "hermitian_function",
    "expm_hermitian",
    "expm_general",
    "inverse",
    "fro_norm",
    "hermiticity_defect",
    "HERMITIAN_RTOL",
    "EXPM_MAX_NORM",
]

HERMITIAN_RTOL = 1e-10
EXPM_MAX_NORM = 700.0
PIVOT_RTOL = 1e-13


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a validated 2-D complex128 array.

    Raises
    ------
    DimensionError
        If ``a`` is not two-dimensional or has an empty axis.
    ValueError
        If any entry is NaN or infinite.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def fro_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.complex128), "fro"))


def hermiticity_defect(a) -> float:
    """Relative Frobenius distance between ``a`` and its adjoint."""
    a = np.asarray(a)
    scale = fro_norm(a)
    if scale == 0.0:
        return 0.0
    return fro_norm(a - a.conj().T) / scale


def _hermitian_part(a) -> np.ndarray:
    m = _square(a)
    scale = fro_norm(m)
    if fro_norm(m - m.conj().T) > HERMITIAN_RTOL * scale:
        raise NotHermitianError(
            f"matrix is not Hermitian: |A - A^H|_F = {fro_norm(m - m.conj().T):.3e}, "
            f"|A|_F = {scale:.3e}"
        )
    return 0.5 * (m + m.conj().T)


def _blocks(m: np.ndarray) -> list[np.ndarray]:
    """Index sets of the decoupled diagonal blocks of a Hermitian matrix."""
    n = m.shape[0]
    if n == 1:
        return [np.arange(1)]
    pattern = csr_matrix(m != 0)
    count, labels = connected_components(pattern, directed=False)
    if count == 1:
        return [np.arange(n)]
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    return np.split(order, bounds)


def spectral_blocks(a) -> list:
    """Eigendecompose each decoupled block of a Hermitian matrix.

    Returns a list of ``(indices, eigenvalues, eigenvectors)`` triples. One-by-one
    blocks are grouped into a single entry with an identity eigenvector matrix.
    """
    m = _hermitian_part(a)
    out = []
    singles = []
    for idx in _blocks(m):
        if len(idx) == 1:
            singles.append(idx[0])
            continue
        w, v = np.linalg.eigh(m[np.ix_(idx, idx)])
        out.append((idx, w, v))
    if singles:
        idx = np.array(singles)
        out.append((idx, m[idx, idx].real.copy(), None))
    return out


def from_spectral_blocks(blocks, f: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """Assemble ``V f(Lambda) V^H`` from :func:`spectral_blocks` output."""
    out = np.zeros((n, n), dtype=np.complex128)
    for idx, w, v in blocks:
        if v is None:
            out[idx, idx] = f(w)
        else:
            out[np.ix_(idx, idx)] = (v * f(w)) @ v.conj().T
    return out


def eig_hermitian(a) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are real and ascending; eigenvectors are the orthonormal
    columns of the returned matrix.
    """
    m = np.asarray(a)
    n = _square(m).shape[0]
    values = np.empty(n)
    vectors = np.zeros((n, n), dtype=np.complex128)
    col = 0
    for idx, w, v in spectral_blocks(m):
        k = len(idx)
        values[col:col + k] = w
        if v is None:
            vectors[idx, np.arange(col, col + k)] = 1.0
        else:
            vectors[idx, col:col + k] = v
        col += k
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], vectors[:, order])


def eigvals_hermitian(a) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    vals = [w for _, w, _ in spectral_blocks(a)]
    return np.sort(np.concatenate(vals), kind="stable")


def hermitian_function(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral calculus: ``V f(Lambda) V^H`` for Hermitian ``a``.

    ``f`` receives a real eigenvalue array and returns the same-length array
    of (possibly complex) function values.
    """
    m = _square(a)
    return from_spectral_blocks(spectral_blocks(m), f, m.shape[0])


def expm_hermitian(a) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix via its eigendecomposition."""
    out = hermitian_function(a, np.exp)
    return 0.5 * (out + out.conj().T)


def _taylor_degree(theta: float, tail: float = 1e-16) -> int:
    # smallest m with theta^(m+1)/(m+1)! * 1/(1 - theta/(m+2)) < tail
    m = 1
    term = theta
    while True:
        term *= theta / (m + 1)
        if term / (1.0 - theta / (m + 2)) < tail:
            return m
        m += 1


def expm_general(a, max_norm: float = EXPM_MAX_NORM) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 1/2, the
    Taylor polynomial is summed to a degree whose tail bound is below 1e-16,
    and the result is squared ``s`` times.

    Raises
    ------
    ExpmOverflowError
        If the 1-norm of ``a`` exceeds ``max_norm``.
    """
    m = _square(a)
    norm = float(np.linalg.norm(m, 1))
    if norm > max_norm:
        raise ExpmOverflowError(f"|A|_1 = {norm:.3e} exceeds the bound {max_norm:.3e}")
    s = 0
    if norm > 0.5:
        s = int(math.ceil(math.log2(norm / 0.5)))
    scaled = m / (2.0 ** s)
    degree = _taylor_degree(min(norm / (2.0 ** s), 0.5))
    n = m.shape[0]
    result = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, degree + 1):
        term = term @ scaled / k
        if not term.any():
            break
        result = result + term
    for _ in range(s):
        result = result @ result
    return result


def eig_general(a) -> EigenDecomposition:
    """Eigendecomposition of a general square matrix.

    Eigenvalues are sorted by ascending real part, ties broken by imaginary
    part, so reports built from them are deterministic.
    """
    m = _square(a)
    try:
        w, v = scipy.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"general eigensolver failed: {exc}") from exc
    order = np.lexsort((w.imag, w.real))
    return EigenDecomposition(w[order], v[:, order])


def inverse(a) -> np.ndarray:
    """Inverse via LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot falls below ``1e-13 * |a|_F``; the offending pivot index is
        attached as ``pivot_index``.
    """
    m = _square(a)
    threshold = PIVOT_RTOL * fro_norm(m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    bad = np.flatnonzero(pivots <= threshold)
    if bad.size:
        raise SingularMatrixError(
            f"matrix is singular: pivot {bad[0]} has magnitude {pivots[bad[0]]:.3e}",
            pivot_index=int(bad[0]),
        )
    return scipy.linalg.lu_solve((lu, piv), np.eye(m.shape[0], dtype=np.complex128))


def expm_apply(a, b) -> np.ndarray:
    """``exp(a) @ b`` without forming ``exp(a)``.

    ``a`` is split into ``s`` steps of 1-norm at most 1/2 and each step applies
    a Taylor series to the running block until the next term is negligible.
    Cheap when ``b`` has few columns.
    """
    m = _square(a)
    x = np.array(b, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] != m.shape[0]:
        raise DimensionError(f"cannot apply {m.shape} to block of shape {x.shape}")
    norm = float(np.linalg.norm(m, 1))
    if norm > EXPM_MAX_NORM:
        raise ExpmOverflowError(f"|A|_1 = {norm:.3e} exceeds the bound {EXPM_MAX_NORM:.3e}")
    steps = max(1, int(math.ceil(norm / 0.5)))
    step = m / steps
    for _ in range(steps):
        term = x
        acc = x.copy()
        k = 1
        while True:
            term = step @ term / k
            acc += term
            if not term.any() or np.linalg.norm(term) <= 1e-17 * np.linalg.norm(acc):
                break
            k += 1
        x = acc
    return x
