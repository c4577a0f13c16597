"""Antiunitary conjugations ``psi -> M conj(psi)`` built from SU(4) data.

Every conjugation that is a tensor product of two skew-conjugations on a
2 x 4 system has ``M = J2 (x) T J4 T^T`` with ``T`` in SU(4). Writing
``T = exp(G t) K`` with ``K`` symplectic reduces ``M`` to the closed form in
:func:`conjugation_from_params`, parametrized by :class:`CartanParams`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotSpecialUnitary
from .matops import allclose_abs, as_cmatrix, dagger, jmat, matrix_from_json, matrix_to_json

J2 = jmat(1)
J4 = jmat(2)
ETA_ZERO = 1e-12
CONJ_TOL = 1e-9


@dataclass(frozen=True)
class Conjugation:
    """Symmetric unitary ``M`` defining ``Theta(psi) = M conj(psi)``."""

    M: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = as_cmatrix(self.M)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"conjugation matrix must be square, got {m.shape}")
        object.__setattr__(self, "M", m)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def check(self, tol: float = CONJ_TOL) -> bool:
        m = self.M
        eye = np.eye(self.dim)
        return allclose_abs(m @ dagger(m), eye, tol) and allclose_abs(m, m.T, tol)

    def tensor_factor(self) -> np.ndarray:
        """Return ``W`` with ``M = J2 (x) W`` (2 x 4 family only)."""
        if self.dim != 8:
            raise DimensionMismatch("tensor form is defined for the 8 x 8 family")
        # M = [[0, W], [-W, 0]]
        return self.M[:4, 4:].copy()

    def has_tensor_form(self, tol: float = CONJ_TOL) -> bool:
        if self.dim != 8:
            return False
        w = self.tensor_factor()
        return (
            allclose_abs(self.M, np.kron(J2, w), tol)
            and allclose_abs(w, -w.T, tol)
            and allclose_abs(w @ dagger(w), np.eye(4), tol)
        )


@dataclass(frozen=True)
class SkewConjugation:
    """``S = T J T^T``; antisymmetric and unitary, so ``S conj(S) = -1``."""

    S: np.ndarray = field(repr=False)

    @classmethod
    def from_special_unitary(cls, t) -> "SkewConjugation":
        t = as_cmatrix(t)
        n = t.shape[0]
        if n % 2:
            raise DimensionMismatch("skew-conjugations need even dimension")
        return cls(t @ jmat(n // 2) @ t.T)

    def check(self, tol: float = CONJ_TOL) -> bool:
        s = self.S
        return allclose_abs(s, -s.T, tol) and allclose_abs(s @ dagger(s), np.eye(s.shape[0]), tol)


def _g_block(a: np.ndarray, b: complex) -> np.ndarray:
    return np.block([[a, b * J2], [np.conj(b) * J2, a.T]])


@dataclass(frozen=True)
class CartanParams:
    """Reduced parameters ``(A, b, t)`` of the conjugation family.

    ``A`` is 2 x 2 skew-Hermitian, ``b`` complex, ``t`` real. They generate
    ``G = [[A, b J2], [conj(b) J2, A^T]]`` in the orthogonal complement of
    sp(2) and ``M = J2 (x) exp(G t) J4 exp(G^T t)``.
    """

    A: np.ndarray = field(repr=False)
    b: complex = 0j
    t: float = 0.0

    def __post_init__(self):
        a = as_cmatrix(self.A)
        if a.shape != (2, 2):
            raise DimensionMismatch(f"A must be 2x2, got {a.shape}")
        if not allclose_abs(a + dagger(a), np.zeros((2, 2)), 1e-12):
            raise ValueError("A must be skew-Hermitian")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "t", float(self.t))

    # 7 real coordinates: A = [[i x0, x1 + i x2], [-x1 + i x2, i x3]], b = x4 + i x5, t = x6
    @classmethod
    def from_vector(cls, x) -> "CartanParams":
        x = np.asarray(x, dtype=float)
        if x.shape != (7,):
            raise DimensionMismatch(f"expected 7 parameters, got {x.shape}")
        a = np.array([[1j * x[0], x[1] + 1j * x[2]], [-x[1] + 1j * x[2], 1j * x[3]]])
        return cls(a, complex(x[4], x[5]), x[6])

    def to_vector(self) -> np.ndarray:
        a = self.A
        return np.array([
            a[0, 0].imag, a[0, 1].real, a[0, 1].imag, a[1, 1].imag,
            self.b.real, self.b.imag, self.t,
        ])

    @property
    def G(self) -> np.ndarray:
        return _g_block(self.A, self.b)

    @property
    def trace_phase(self) -> complex:
        """Global phase ``exp(t Tr A)`` contributed by the trace part of ``A``."""
        return complex(np.exp(self.t * np.trace(self.A)))

    @property
    def A0(self) -> np.ndarray:
        return self.A - 0.5 * np.trace(self.A) * np.eye(2)

    @property
    def G0(self) -> np.ndarray:
        return _g_block(self.A0, self.b)

    @property
    def H(self) -> np.ndarray:
        return 2.0 * self.G0 @ J4

    @property
    def eta(self) -> float:
        h = self.H
        return 0.5 * float(np.sqrt(np.trace(h @ dagger(h)).real))

    def to_json(self) -> dict:
        return {"A": matrix_to_json(self.A), "b": [self.b.real, self.b.imag], "t": self.t}

    @classmethod
    def from_json(cls, obj: dict) -> "CartanParams":
        re, im = obj["b"]
        return cls(matrix_from_json(obj["A"]), complex(float(re), float(im)), float(obj["t"]))


def rotation_factor(p: CartanParams) -> np.ndarray:
    """``cos(eta t) J4 + sin(eta t)/eta H`` for the traceless part of ``A``."""
    eta = p.eta
    if eta <= ETA_ZERO:
        return J4.copy()
    et = eta * p.t
    return np.cos(et) * J4 + (np.sin(et) / eta) * p.H


def conjugation_from_params(p: CartanParams) -> Conjugation:
    """Closed form of ``J2 (x) exp(G t) J4 exp(G^T t)``.

    The traceless part of ``G`` obeys ``G0 H + H G0^T = -eta^2 J4``, which
    turns the exponential into a rotation between ``J4`` and ``H/eta``; the
    trace of ``A`` only contributes a global phase. At ``eta = 0`` this is
    ``J2 (x) J4``.
    """
    return Conjugation(np.kron(J2, p.trace_phase * rotation_factor(p)))


def conjugation_from_su4(t) -> Conjugation:
    t = as_cmatrix(t)
    if t.shape != (4, 4):
        raise DimensionMismatch(f"T must be 4x4, got {t.shape}")
    if not allclose_abs(t @ dagger(t), np.eye(4), 1e-9):
        raise NotSpecialUnitary("T is not unitary")
    if abs(np.linalg.det(t) - 1.0) > 1e-9:
        raise NotSpecialUnitary(f"det T = {np.linalg.det(t):.6g}, expected 1")
    return Conjugation(np.kron(J2, t @ J4 @ t.T))


def random_special_unitary(n: int, seed) -> np.ndarray:
    """Seeded SU(n) sample: QR of a complex Gaussian with phase fixing.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if n not in (2, 4):
        raise ValueError(f"n must be 2 or 4, got {n}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    det = np.linalg.det(q)
    return q / det ** (1.0 / n)


def random_cartan_params(rng: np.random.Generator, scale: float = 1.0, t_scale: float = 2.0) -> CartanParams:
    x = rng.normal(scale=scale, size=7)
    x[6] = rng.uniform(-t_scale, t_scale)
    return CartanParams.from_vector(x)


def apply_conjugation(conj: Conjugation, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (conj.dim,):
        raise DimensionMismatch(f"vector of length {psi.shape} does not match {conj.dim}")
    return conj.M @ psi.conj()


def superoperator_apply(conj: Conjugation, rho) -> np.ndarray:
    """``theta(rho) = Theta rho Theta^{-1} = M conj(rho) M^dag``."""
    rho = as_cmatrix(rho)
    if rho.shape != (conj.dim, conj.dim):
        raise DimensionMismatch(f"rho of shape {rho.shape} does not match {conj.dim}")
    return conj.M @ rho.conj() @ dagger(conj.M)
