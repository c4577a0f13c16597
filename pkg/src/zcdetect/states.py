"""Bipartite states: containers, generators and the 2 x 4 rank-two canonical form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DecompositionMismatch,
    DimensionMismatch,
    InvalidInput,
    OutOfRange,
    RankDeficient,
    WeightError,
)
from .matops import (
    allclose_abs,
    as_cmatrix,
    dagger,
    eigvalsh_desc,
    herm_eig,
    hermiticity_error,
    matrix_from_json,
    matrix_to_json,
    vector_from_json,
    vector_to_json,
)
from .symmetries import random_special_unitary

STATE_TOL = 1e-9
PRODUCT_TOL = 1e-9
RANK_TOL = 1e-9

# rows/cols of the 2 x 4 space carrying the two-qubit block of a PPT canonical form
PPT_SLOTS = (0, 1, 4, 5)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    return v / np.linalg.norm(v)


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class DensityMatrix:
    n_a: int
    n_b: int
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = as_cmatrix(self.mat)
        n = self.n_a * self.n_b
        if m.shape != (n, n):
            raise DimensionMismatch(f"{self.n_a}x{self.n_b} state needs a {n}x{n} matrix, got {m.shape}")
        if hermiticity_error(m) > STATE_TOL:
            raise InvalidInput("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > STATE_TOL:
            raise InvalidInput(f"trace is {np.trace(m).real:.12g}, expected 1")
        w = eigvalsh_desc(m)
        if w[-1] < -STATE_TOL:
            raise InvalidInput(f"density matrix has eigenvalue {w[-1]:.3e}")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.n_a * self.n_b

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh_desc(self.mat)

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.eigenvalues() > tol))

    def transformed(self, x1, x2) -> "DensityMatrix":
        """Apply the local unitary ``x1 (x) x2``."""
        u = np.kron(as_cmatrix(x1), as_cmatrix(x2))
        return DensityMatrix(self.n_a, self.n_b, u @ self.mat @ dagger(u))


@dataclass(frozen=True)
class RankTwoState:
    """``rho = lam |psi1><psi1| + (1 - lam) |psi2><psi2|`` with orthonormal psi."""

    lam: float
    psi1: np.ndarray = field(repr=False)
    psi2: np.ndarray = field(repr=False)
    n_a: int = 2
    n_b: int = 4

    def __post_init__(self):
        p1 = np.asarray(self.psi1, dtype=np.complex128).ravel()
        p2 = np.asarray(self.psi2, dtype=np.complex128).ravel()
        n = self.n_a * self.n_b
        if p1.shape != (n,) or p2.shape != (n,):
            raise DimensionMismatch(f"eigenvectors must have length {n}")
        if not 0.0 < self.lam < 1.0:
            raise OutOfRange(f"lambda must lie in (0, 1), got {self.lam}")
        if abs(np.linalg.norm(p1) - 1) > 1e-10 or abs(np.linalg.norm(p2) - 1) > 1e-10:
            raise InvalidInput("eigenvectors must be unit vectors")
        if abs(np.vdot(p1, p2)) > STATE_TOL:
            raise RankDeficient(f"|<psi1|psi2>| = {abs(np.vdot(p1, p2)):.3e}; eigenvectors not orthogonal")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "psi1", p1)
        object.__setattr__(self, "psi2", p2)

    def matrix(self) -> np.ndarray:
        return self.lam * projector(self.psi1) + (1.0 - self.lam) * projector(self.psi2)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.n_a, self.n_b, self.matrix())

    def transformed(self, x1, x2) -> "RankTwoState":
        u = np.kron(as_cmatrix(x1), as_cmatrix(x2))
        return RankTwoState(self.lam, u @ self.psi1, u @ self.psi2, self.n_a, self.n_b)

    def to_json(self) -> dict:
        return {"lambda": self.lam, "psi1": vector_to_json(self.psi1), "psi2": vector_to_json(self.psi2)}

    @classmethod
    def from_json(cls, obj: dict, n_a: int = 2, n_b: int = 4) -> "RankTwoState":
        return cls(float(obj["lambda"]), vector_from_json(obj["psi1"]), vector_from_json(obj["psi2"]), n_a, n_b)


def rank_two_from_density(rho: DensityMatrix, tol: float = RANK_TOL) -> RankTwoState:
    """Spectral decomposition of a rank-two density matrix."""
    w, v = herm_eig(rho.mat)
    rank = int(np.sum(w > tol))
    if rank != 2:
        raise RankDeficient(f"state has rank {rank}, expected 2")
    lam = float(w[0] / (w[0] + w[1]))
    return RankTwoState(lam, v[:, 0], v[:, 1], rho.n_a, rho.n_b)


# -- Schmidt decomposition -----------------------------------------------------

def schmidt_decompose(psi, n_a: int = 2, n_b: int = 4) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``psi = sum_k c[k] a_k (x) b_k`` with ``a_k = basis_a[:, k]``, ``b_k = basis_b[:, k]``.

    Coefficients are descending; both bases are full unitaries. The phase of
    each ``a_k`` is chosen so its first non-negligible entry is real positive.
    """
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.shape != (n_a * n_b,):
        raise DimensionMismatch(f"vector length {psi.size} does not match {n_a}x{n_b}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise InvalidInput("Schmidt decomposition needs a unit vector")
    u, s, vh = np.linalg.svd(psi.reshape(n_a, n_b), full_matrices=True)
    basis_a = u.copy()
    basis_b = vh.T.copy()
    for k in range(n_a):
        col = basis_a[:, k]
        j = int(np.argmax(np.abs(col) > 1e-12))
        phase = col[j] / abs(col[j])
        basis_a[:, k] = col / phase
        if k < n_b:
            basis_b[:, k] = basis_b[:, k] * phase
    return s, basis_a, basis_b


def is_product(psi, n_a: int = 2, n_b: int = 4, tol: float = PRODUCT_TOL) -> bool:
    s = np.linalg.svd(np.asarray(psi, dtype=np.complex128).reshape(n_a, n_b), compute_uv=False)
    return bool(s[1] < tol)


# -- canonical form ------------------------------------------------------------

class BothSeparable:
    """Both eigenvectors of a rank-two state are product vectors."""

    def __repr__(self):
        return "BothSeparable()"


BOTH_SEPARABLE = BothSeparable()


@dataclass(frozen=True)
class CanonicalForm:
    """Local-unitary normal form of a 2 x 4 rank-two state.

    ``psi1 = (q1, 0, 0, 0, 0, q6, 0, 0)``, ``psi2 = p`` with ``p[3] = 0``,
    ``p[0] >= 0`` real and ``p[5] <= 0`` real. ``(x1 (x) x2) rho (x1 (x) x2)^dag``
    is the canonical density matrix.
    """

    lam: float
    q1: float
    q6: float
    p: np.ndarray = field(repr=False)
    X1: np.ndarray = field(repr=False)
    X2: np.ndarray = field(repr=False)
    swapped: bool = False

    @property
    def psi1(self) -> np.ndarray:
        v = np.zeros(8, dtype=np.complex128)
        v[0], v[5] = self.q1, self.q6
        return v

    @property
    def psi2(self) -> np.ndarray:
        return self.p.copy()

    @property
    def w(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Consecutive pairs ``(p1, p2), (p3, p4), (p5, p6), (p7, p8)``."""
        return tuple(self.p.reshape(4, 2))

    def state(self) -> RankTwoState:
        return RankTwoState(self.lam, self.psi1, self.psi2)

    def matrix(self) -> np.ndarray:
        return self.lam * projector(self.psi1) + (1.0 - self.lam) * projector(self.p)

    def local_unitary(self) -> np.ndarray:
        return np.kron(self.X1, self.X2)

    def residual(self, rho) -> float:
        """Max-entry error of undoing the local rotation on the canonical matrix."""
        u = self.local_unitary()
        return float(np.max(np.abs(dagger(u) @ self.matrix() @ u - as_cmatrix(rho))))

    def invariant_errors(self) -> dict[str, float]:
        p = self.p
        return {
            "p4": abs(p[3]),
            "im_p1": abs(p[0].imag),
            "neg_p1": max(0.0, -p[0].real),
            "im_p6": abs(p[5].imag),
            "pos_p6": max(0.0, p[5].real),
            "orth": abs(p[0] * self.q1 + p[5] * self.q6),
            "norm_p": abs(np.linalg.norm(p) - 1.0),
            "norm_q": abs(self.q1**2 + self.q6**2 - 1.0),
        }

    def check(self, tol: float = 1e-9) -> bool:
        return self.q1 > 0 and self.q6 > 0 and all(v <= tol for v in self.invariant_errors().values())

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "q1": self.q1,
            "q6": self.q6,
            "p": vector_to_json(self.p),
            "X1": matrix_to_json(self.X1),
            "X2": matrix_to_json(self.X2),
            "swapped": self.swapped,
        }


def _complement_basis(cols: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns to a basis by greedy Gram-Schmidt on e_k."""
    basis = [c for c in cols.T]
    while len(basis) < n:
        q = np.array(basis).T
        resid = np.eye(n) - q @ dagger(q)
        k = int(np.argmax(np.linalg.norm(resid, axis=0)))
        basis.append(resid[:, k] / np.linalg.norm(resid[:, k]))
    return np.array(basis).T


def _to_special(u: np.ndarray) -> np.ndarray:
    return u / np.linalg.det(u) ** (1.0 / u.shape[0])


def canonicalize(s: RankTwoState) -> CanonicalForm | BothSeparable:
    if (s.n_a, s.n_b) != (2, 4):
        raise DimensionMismatch("canonical form is defined for 2 x 4 states")
    if abs(np.vdot(s.psi1, s.psi2)) > STATE_TOL:
        raise RankDeficient("eigenvectors are not orthogonal")
    prod1 = is_product(s.psi1)
    prod2 = is_product(s.psi2)
    if prod1 and prod2:
        return BOTH_SEPARABLE
    lam, psi1, psi2, swapped = s.lam, s.psi1, s.psi2, False
    if prod1:
        lam, psi1, psi2, swapped = 1.0 - lam, psi2, psi1, True

    coeffs, basis_a, basis_b = schmidt_decompose(psi1)
    # keep the Schmidt pair that overlaps e1 most in first place: canonical inputs stay fixed
    if abs(basis_a[0, 1]) > abs(basis_a[0, 0]):
        order = [1, 0]
        coeffs = coeffs[order]
        basis_a = basis_a[:, order]
        basis_b = np.column_stack([basis_b[:, 1], basis_b[:, 0]])
    basis_b = _complement_basis(basis_b[:, :2], 4)
    x1 = dagger(basis_a)
    x2 = dagger(basis_b)

    r = x1 @ psi2.reshape(2, 4) @ x2.T
    # zero r14 with an SU(2) rotation of span{b3, b4}; psi1 is untouched
    c1, c2 = r[0, 2], r[0, 3]
    nrm = np.hypot(abs(c1), abs(c2))
    if nrm > 0.0:
        rot = np.array([[np.conj(c1), np.conj(c2)], [-c2, c1]]) / nrm
        y = np.eye(4, dtype=np.complex128)
        y[2:, 2:] = rot
        r = r @ y.T
        x2 = y @ x2
    p = r.ravel().copy()
    p[3] = 0.0
    if abs(p[0]) > 0.0:
        p *= np.conj(p[0]) / abs(p[0])
        p[0] = abs(p[0])
    q1, q6 = float(coeffs[0]), float(coeffs[1])
    return CanonicalForm(lam, q1, q6, p, _to_special(x1), _to_special(x2), swapped)


# -- generators ----------------------------------------------------------------

def make_zce(q1: float, phi: float, x1=None, x2=None) -> RankTwoState:
    """Entangled zero-concurrence state.

    ``lam = 1/2``, ``psi1 = q1 |a1 b1> + q6 |a2 b2>``,
    ``psi2 = q1 |a1 b3> + q6 exp(i phi) |a2 b4>`` in the computational basis,
    optionally rotated by the local unitary ``x1 (x) x2``.
    """
    if not 0.0 < q1 < 1.0:
        raise OutOfRange(f"q1 must lie in (0, 1), got {q1}")
    q6 = np.sqrt(1.0 - q1 * q1)
    psi1 = np.zeros(8, dtype=np.complex128)
    psi2 = np.zeros(8, dtype=np.complex128)
    psi1[0], psi1[5] = q1, q6
    psi2[2], psi2[7] = q1, q6 * np.exp(1j * phi)
    s = RankTwoState(0.5, psi1, psi2)
    if x1 is not None or x2 is not None:
        s = s.transformed(np.eye(2) if x1 is None else x1, np.eye(4) if x2 is None else x2)
    return s


@dataclass(frozen=True)
class PptBlockForm:
    """2 x 2 blocks of a canonical PPT state: ``[[r11, 0, r12, 0], 0, [r12^dag, 0, r22, 0], 0]``."""

    rho11: np.ndarray = field(repr=False)
    rho12: np.ndarray = field(repr=False)
    rho22: np.ndarray = field(repr=False)

    @classmethod
    def from_tilde(cls, rho_tilde) -> "PptBlockForm":
        t = as_cmatrix(rho_tilde)
        return cls(t[:2, :2].copy(), t[:2, 2:].copy(), t[2:, 2:].copy())

    def tilde(self) -> np.ndarray:
        return np.block([[self.rho11, self.rho12], [dagger(self.rho12), self.rho22]])

    def assemble(self) -> np.ndarray:
        out = np.zeros((8, 8), dtype=np.complex128)
        out[np.ix_(PPT_SLOTS, PPT_SLOTS)] = self.tilde()
        return out


def make_ppt_form(rho_tilde) -> DensityMatrix:
    """Embed a two-qubit state on ``a (x) span{b1, b2}`` of the 2 x 4 space."""
    t = as_cmatrix(rho_tilde)
    if t.shape != (4, 4):
        raise InvalidInput(f"two-qubit state must be 4x4, got {t.shape}")
    try:
        DensityMatrix(2, 2, t)
    except InvalidInput as exc:
        raise InvalidInput(f"not a two-qubit density matrix: {exc}") from exc
    return DensityMatrix(2, 4, PptBlockForm.from_tilde(t).assemble())


def make_separable(terms: Sequence[tuple[float, Sequence[complex], Sequence[complex]]]) -> DensityMatrix:
    """Mixture of product projectors ``sum_j mu_j |a_j><a_j| (x) |b_j><b_j|``."""
    if not terms:
        raise WeightError("need at least one term")
    mus = np.array([t[0] for t in terms], dtype=float)
    if np.any(mus <= 0) or abs(mus.sum() - 1.0) > 1e-12:
        raise WeightError(f"weights must be positive and sum to 1, got {mus.tolist()}")
    n_a = len(terms[0][1])
    n_b = len(terms[0][2])
    rho = np.zeros((n_a * n_b, n_a * n_b), dtype=np.complex128)
    for mu, a, b in terms:
        a = np.asarray(a, dtype=np.complex128)
        b = np.asarray(b, dtype=np.complex128)
        if a.shape != (n_a,) or b.shape != (n_b,):
            raise DimensionMismatch("all terms must share the local dimensions")
        if abs(np.linalg.norm(a) - 1) > 1e-10 or abs(np.linalg.norm(b) - 1) > 1e-10:
            raise InvalidInput("local states must be unit vectors")
        rho += mu * np.kron(projector(a), projector(b))
    return DensityMatrix(n_a, n_b, rho)


@dataclass(frozen=True)
class Decomposition:
    """Pure-state ensemble ``sum_j mu_j |psi_j><psi_j|``."""

    weights: np.ndarray
    vectors: tuple

    def matrix(self) -> np.ndarray:
        return sum(mu * projector(v) for mu, v in zip(self.weights, self.vectors))

    def reproduces(self, rho, tol: float = 1e-9) -> bool:
        return allclose_abs(self.matrix(), rho, tol)


@dataclass(frozen=True)
class ProductDecomposition:
    """``sum_j mu_j rho_a[j] (x) rho_b[j]`` with local density matrices."""

    weights: np.ndarray
    factors_a: tuple
    factors_b: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.factors_a) or len(w) != len(self.factors_b):
            raise DecompositionMismatch("weights and factors differ in length")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
            raise WeightError("weights must be positive and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_pure(cls, weights, vecs_a, vecs_b) -> "ProductDecomposition":
        return cls(weights, tuple(projector(a) for a in vecs_a), tuple(projector(b) for b in vecs_b))

    def matrix(self) -> np.ndarray:
        return sum(mu * np.kron(a, b) for mu, a, b in zip(self.weights, self.factors_a, self.factors_b))


def lift_separable_decomposition(blocks: PptBlockForm, tilde_decomp: ProductDecomposition,
                                 tol: float = 1e-9) -> ProductDecomposition:
    """Turn a product decomposition of the two-qubit block into one of the 2 x 4 state.

    Each B factor ``rho_b`` becomes ``diag(1, 0) (x) rho_b`` on the four-level side.
    """
    if not allclose_abs(tilde_decomp.matrix(), blocks.tilde(), tol):
        raise DecompositionMismatch("decomposition does not reproduce the two-qubit block")
    sel = np.diag([1.0, 0.0]).astype(np.complex128)
    lifted_b = []
    for a, b in zip(tilde_decomp.factors_a, tilde_decomp.factors_b):
        DensityMatrix(1, 2, a)
        DensityMatrix(1, 2, b)
        lifted_b.append(np.kron(sel, b))
    return ProductDecomposition(tilde_decomp.weights, tuple(tilde_decomp.factors_a), tuple(lifted_b))


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return _unit(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def random_rank_two(seed, n_a: int = 2, n_b: int = 4) -> RankTwoState:
    rng = np.random.default_rng(seed)
    n = n_a * n_b
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    q, _ = np.linalg.qr(z)
    lam = rng.uniform(0.05, 0.95)
    return RankTwoState(lam, q[:, 0], q[:, 1], n_a, n_b)


def random_locals(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return random_special_unitary(2, rng), random_special_unitary(4, rng)


def random_separable(rng: np.random.Generator, n_terms: int, n_a: int = 2, n_b: int = 4) -> DensityMatrix:
    mus = rng.dirichlet(np.ones(n_terms))
    mus = mus / mus.sum()
    terms = [(mu, random_unit_vector(rng, n_a), random_unit_vector(rng, n_b)) for mu in mus]
    # renormalize the float sum exactly onto 1 for the weight check
    total = sum(t[0] for t in terms)
    terms = [(t[0] / total, t[1], t[2]) for t in terms]
    return make_separable(terms)


# -- state file format ---------------------------------------------------------

def state_to_json(rho: DensityMatrix, rank_two: RankTwoState | None = None) -> dict:
    out = {"n_a": rho.n_a, "n_b": rho.n_b, "matrix": matrix_to_json(rho.mat)}
    if rank_two is not None:
        out["rank_two"] = rank_two.to_json()
    return out


def state_from_json(obj: dict) -> tuple[DensityMatrix, RankTwoState | None]:
    if not isinstance(obj, dict):
        raise InvalidInput("state file must hold a JSON object")
    n_a = int(obj.get("n_a", 2))
    n_b = int(obj.get("n_b", 4))
    rank_two = None
    if "rank_two" in obj:
        rank_two = RankTwoState.from_json(obj["rank_two"], n_a, n_b)
    if "matrix" in obj:
        rho = DensityMatrix(n_a, n_b, matrix_from_json(obj["matrix"]))
    elif rank_two is not None:
        rho = rank_two.density()
    else:
        raise InvalidInput("state file needs a 'matrix' or a 'rank_two' entry")
    return rho, rank_two
