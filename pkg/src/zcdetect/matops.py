"""Small dense complex-matrix kernel.

Matrices are plain ``numpy`` complex128 arrays. Dimensions in this package
never exceed 8, so everything is dense and nothing is cached.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NoConvergence, NonHermitian, NotPSD

HERM_TOL = 1e-9
PSD_TOL = 1e-9


def as_cmatrix(x) -> np.ndarray:
    a = np.array(x, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def allclose_abs(a, b, tol: float) -> bool:
    """Entrywise equality within an absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= tol))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def jmat(m: int) -> np.ndarray:
    """J_{2m}: identity in the upper-right block, minus identity lower-left."""
    if m < 1:
        raise ValueError("half dimension must be positive")
    eye = np.eye(m)
    zero = np.zeros((m, m))
    return np.block([[zero, eye], [-eye, zero]]).astype(np.complex128)


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - dagger(h)))) if h.size else 0.0


def _check_hermitian(h: np.ndarray, tol: float) -> np.ndarray:
    h = as_cmatrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"matrix is not square: {h.shape}")
    err = hermiticity_error(h)
    if err > tol:
        raise NonHermitian(f"|H - H^dag|_max = {err:.3e} exceeds {tol:.1e}")
    return h


def herm_eig(h, tol: float = HERM_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, v)`` with ``h @ v[:, k] == w[k] * v[:, k]``.
    """
    h = _check_hermitian(h, tol)
    # symmetrize so LAPACK sees an exactly Hermitian input
    hs = 0.5 * (h + dagger(h))
    try:
        w, v = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Hermitian eigensolver failed: {exc}") from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvalsh_desc(h, tol: float = HERM_TOL) -> np.ndarray:
    h = _check_hermitian(h, tol)
    try:
        w = np.linalg.eigvalsh(0.5 * (h + dagger(h)))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Hermitian eigensolver failed: {exc}") from exc
    return w[::-1].copy()


def psd_sqrt(h, tol: float = PSD_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as roundoff and clamped to zero.
    """
    w, v = herm_eig(h)
    if w.size and w[-1] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[-1]:.3e} below -{tol:.1e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ dagger(v)


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def partial_transpose_A(rho, n_a: int, n_b: int) -> np.ndarray:
    """Transpose the first tensor factor: block (i, j) <-> block (j, i)."""
    rho = as_cmatrix(rho)
    n = n_a * n_b
    if rho.shape != (n, n):
        raise DimensionMismatch(f"expected {n}x{n} matrix for {n_a}x{n_b} system, got {rho.shape}")
    t = rho.reshape(n_a, n_b, n_a, n_b).transpose(2, 1, 0, 3)
    return t.reshape(n, n).copy()


def principal_minor(h, index_set: Sequence[int], imag_tol: float = 1e-9) -> float:
    """Determinant of the principal sub-matrix on ``index_set`` (0-based).

    The imaginary part of the determinant of a Hermitian sub-matrix is pure
    roundoff; it must stay below ``imag_tol`` and is then dropped.
    """
    h = as_cmatrix(h)
    idx = list(index_set)
    n = h.shape[0]
    if not idx:
        raise IndexOutOfRange("index set is empty")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise IndexOutOfRange(f"index set {idx} is not strictly increasing")
    if idx[0] < 0 or idx[-1] >= n:
        raise IndexOutOfRange(f"index set {idx} out of range for dimension {n}")
    d = np.linalg.det(h[np.ix_(idx, idx)])
    if abs(d.imag) > imag_tol * max(1.0, abs(d.real)):
        raise NonHermitian(f"principal minor {idx} has imaginary part {d.imag:.3e}")
    return float(d.real)


def all_index_sets(n: int) -> Iterable[tuple[int, ...]]:
    for k in range(1, n + 1):
        yield from combinations(range(n), k)


def is_unitary(u, tol: float) -> bool:
    u = np.asarray(u)
    return u.shape[0] == u.shape[1] and allclose_abs(u @ dagger(u), np.eye(u.shape[0]), tol)


# -- JSON matrix format -------------------------------------------------------

def matrix_to_json(a) -> dict:
    a = as_cmatrix(a)
    rows, cols = a.shape
    return {
        "rows": rows,
        "cols": cols,
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatch(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise DimensionMismatch(f"matrix declares {rows}x{cols} but holds {len(data)} entries")
    vals = np.array([complex(float(re), float(im)) for re, im in data], dtype=np.complex128)
    if not np.all(np.isfinite(vals)):
        raise DimensionMismatch("matrix contains non-finite entries")
    return vals.reshape(rows, cols)


def vector_to_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=np.complex128).ravel()]


def vector_from_json(data) -> np.ndarray:
    try:
        vals = np.array([complex(float(re), float(im)) for re, im in data], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"malformed vector: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise DimensionMismatch("vector contains non-finite entries")
    return vals
