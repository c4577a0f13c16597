"""Entanglement detection: PPT, generalized concurrences and the ZCS/ZCE classifier."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotCanonical, NotPSD, UnsupportedShape
from .matops import (
    all_index_sets,
    as_cmatrix,
    dagger,
    eigvalsh_desc,
    herm_eig,
    partial_transpose_A,
    psd_sqrt,
)
from .search import (
    ConcurrenceObjective,
    deterministic_start,
    nelder_mead_batch,
    pick_best,
    random_starts,
)
from .states import (
    BothSeparable,
    CanonicalForm,
    DensityMatrix,
    RankTwoState,
    canonicalize,
    rank_two_from_density,
)
from .symmetries import J2, CartanParams, Conjugation, conjugation_from_params

log = logging.getLogger(__name__)

PPT_TOL = 1e-9
SYLVESTER_TOL = 1e-8
ZERO_TOL = 1e-8
WITNESS_TOL = 1e-6
PATTERN_TOL = 1e-8
DEGENERACY_TOL = 1e-9
GAP_TOL = 1e-8
DEFAULT_SEED = 0xC0FFEE

WOOTTERS = Conjugation(np.kron(J2, J2))


def _as_matrix(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else as_cmatrix(rho)


# -- PPT -----------------------------------------------------------------------

def ppt_test(rho: DensityMatrix, tol: float = PPT_TOL) -> tuple[bool, float]:
    pt = partial_transpose_A(rho.mat, rho.n_a, rho.n_b)
    min_eig = float(eigvalsh_desc(pt)[-1])
    return min_eig >= -tol, min_eig


def sylvester_psd(h, tol: float = SYLVESTER_TOL) -> bool:
    """PSD test through the signs of all ``2^n - 1`` principal minors."""
    h = as_cmatrix(h)
    n = h.shape[0]
    by_size: dict[int, list] = {}
    for idx in all_index_sets(n):
        by_size.setdefault(len(idx), []).append(idx)
    for k, sets in by_size.items():
        sub = np.array([h[np.ix_(s, s)] for s in sets])
        dets = np.linalg.det(sub)
        if np.any(dets.real < -tol):
            return False
    return True


def eigen_psd(h, tol: float = PPT_TOL) -> bool:
    return bool(eigvalsh_desc(h)[-1] >= -tol)


# -- concurrences --------------------------------------------------------------

def pure_concurrence(psi, conj: Conjugation) -> float:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (conj.dim,):
        raise DimensionMismatch(f"vector of length {psi.size} does not match {conj.dim}")
    return float(abs(np.vdot(psi, conj.M @ psi.conj())))


def mixed_concurrence_full(rho, conj: Conjugation) -> tuple[float, np.ndarray]:
    """Closed-form convex-roof concurrence ``max(0, sqrt(l_max) - sum sqrt(l_j))``.

    The ``l`` are the eigenvalues of ``rho^1/2 theta(rho) rho^1/2 = Z Z^dag``
    with ``Z = rho^1/2 M conj(rho^1/2)``; their square roots are taken as the
    singular values of ``Z``. Returns the value and the eigenvalues
    (descending).
    """
    m = _as_matrix(rho)
    if m.shape != (conj.dim, conj.dim):
        raise DimensionMismatch(f"rho of shape {m.shape} does not match conjugation of size {conj.dim}")
    w, v = herm_eig(m)
    root = psd_sqrt(m)
    z = root @ conj.M @ root.conj()
    k = z @ dagger(z)
    kw = eigvalsh_desc(k)
    if kw[-1] < -PPT_TOL:
        raise NotPSD(f"rho^1/2 theta(rho) rho^1/2 has eigenvalue {kw[-1]:.3e}")
    if len(w) > 1 and w[1] < 1e-9:
        # numerically pure: the closed form degenerates to |<psi|Theta psi>|
        return pure_concurrence(v[:, 0], conj), np.clip(kw, 0.0, None)
    sv = np.linalg.svd(z, compute_uv=False)
    value = max(0.0, float(sv[0] - sv[1:].sum()))
    return value, sv**2


@dataclass(frozen=True)
class ReducedConcurrenceData:
    """``C = [[alpha, beta], [beta, gamma]]`` and ``Lambda = diag(lam, 1 - lam)``."""

    alpha: complex
    beta: complex
    gamma: complex
    lam: float

    @property
    def C(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.beta, self.gamma]], dtype=np.complex128)

    @property
    def Lambda(self) -> np.ndarray:
        return np.diag([self.lam, 1.0 - self.lam]).astype(np.complex128)

    def K(self) -> np.ndarray:
        r = np.sqrt(self.Lambda)
        return r @ self.C @ r

    def B(self) -> np.ndarray:
        """``sqrt(Lambda) C Lambda C^dag sqrt(Lambda)``."""
        r = np.sqrt(self.Lambda)
        return r @ self.C @ self.Lambda @ dagger(self.C) @ r

    def gap(self) -> float:
        """``(Tr B)^2 - 4 det B``, the squared eigenvalue gap of ``B``."""
        lam, mu = self.lam, 1.0 - self.lam
        a2, b2, g2 = abs(self.alpha) ** 2, abs(self.beta) ** 2, abs(self.gamma) ** 2
        tr = lam * lam * a2 + 2 * lam * mu * b2 + mu * mu * g2
        det = (lam * mu) ** 2 * abs(self.alpha * self.gamma - self.beta**2) ** 2
        return tr * tr - 4.0 * det

    def concurrence(self) -> float:
        sv = np.linalg.svd(self.K(), compute_uv=False)
        return max(0.0, float(sv[0] - sv[1]))


def mixed_concurrence_reduced(s: RankTwoState, conj: Conjugation) -> tuple[float, ReducedConcurrenceData]:
    m = conj.M
    a = complex(np.vdot(s.psi1, m @ s.psi1.conj()))
    b = complex(np.vdot(s.psi1, m @ s.psi2.conj()))
    g = complex(np.vdot(s.psi2, m @ s.psi2.conj()))
    d = ReducedConcurrenceData(a, b, g, s.lam)
    return d.concurrence(), d


def wootters_concurrence(rho) -> float:
    m = _as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionMismatch("Wootters concurrence needs a two-qubit state")
    return mixed_concurrence_full(m, WOOTTERS)[0]


def degeneracy_conditions(d: ReducedConcurrenceData, tol: float = DEGENERACY_TOL) -> tuple[bool, bool]:
    """(i) ``lam |alpha| = (1 - lam) |gamma|``; (ii) ``alpha gamma conj(beta)^2`` real and <= 0."""
    if not 0.0 < d.lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    cond_i = abs(d.lam * abs(d.alpha) - (1.0 - d.lam) * abs(d.gamma)) <= tol
    prod = d.alpha * d.gamma * np.conj(d.beta) ** 2
    cond_ii = prod.real <= tol and abs(prod.imag) <= tol
    return bool(cond_i), bool(cond_ii)


# -- closed forms on the canonical form ---------------------------------------

def _canonical_or_raise(cf: CanonicalForm) -> None:
    if not isinstance(cf, CanonicalForm) or not cf.check(1e-9):
        raise NotCanonical("state is not in canonical form")


def canonical_abg(cf: CanonicalForm, p: CartanParams, form_tol: float = 1e-10) -> ReducedConcurrenceData:
    """``alpha``, ``beta``, ``gamma`` from their closed forms on a canonical state.

    ``beta`` uses the short forms when ``psi2`` has ``w2 = w4 = 0`` or
    ``w1 = w3 = 0`` and the plain inner product otherwise.
    """
    _canonical_or_raise(cf)
    eta = p.eta
    s = p.t if eta <= 1e-12 else np.sin(eta * p.t) / eta
    c = np.cos(eta * p.t)
    a0 = p.A0
    b = p.b
    phase = p.trace_phase
    q1, q6 = cf.q1, cf.q6
    w1, w2, w3, w4 = cf.w
    cw1, cw2, cw3, cw4 = (np.conj(w) for w in (w1, w2, w3, w4))
    rot = c * np.eye(2) + 2.0 * s * a0

    alpha = -4.0 * b * s * q1 * q6
    gamma = 4.0 * s * (np.conj(b) * (cw2 @ J2 @ cw4) - b * (cw1 @ J2 @ cw3)) + 2.0 * np.trace(
        rot @ (np.outer(cw4, cw1) - np.outer(cw2, cw3))
    )
    v1 = np.array([q1, 0.0])
    v2 = np.array([0.0, q6])
    if max(np.abs(w2).max(), np.abs(w4).max()) <= form_tol:
        beta = phase * 2.0 * b * s * (-(v1 @ J2 @ cw3) + v2 @ J2 @ cw1)
    elif max(np.abs(w1).max(), np.abs(w3).max()) <= form_tol:
        beta = phase * (v1 @ rot @ cw4 - v2 @ rot @ cw2)
    else:
        m = conjugation_from_params(p).M
        beta = complex(np.vdot(cf.psi1, m @ cf.psi2.conj()))
    return ReducedConcurrenceData(complex(phase * alpha), complex(beta), complex(phase * gamma), cf.lam)


# -- search --------------------------------------------------------------------

class SearchResult(NamedTuple):
    value: float
    params: CartanParams


def max_concurrence_search(s: RankTwoState, restarts: int = 64, seed=DEFAULT_SEED,
                           maxiter: int = 500) -> SearchResult:
    """Largest concurrence found over the conjugation family.

    Nelder-Mead ascent from the start ``A = 0, b = 1, t = pi/4`` plus
    ``restarts`` seeded random points, all run together.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    obj = ConcurrenceObjective(s)
    rng = np.random.default_rng(seed)
    x0 = np.vstack([deterministic_start(), random_starts(rng, restarts)])
    res = nelder_mead_batch(lambda x: -obj(x), x0, maxiter=maxiter)
    values = -res.fun
    i = pick_best(values, res.x)
    return SearchResult(float(values[i]), CartanParams.from_vector(res.x[i]))


def probe_witness(s: RankTwoState, rng: np.random.Generator, count: int = 256) -> SearchResult:
    """Best concurrence over ``count`` random parameter points (no local ascent)."""
    obj = ConcurrenceObjective(s)
    x = np.vstack([deterministic_start(), random_starts(rng, count)])
    vals = obj(x)
    i = pick_best(vals, x)
    return SearchResult(float(vals[i]), CartanParams.from_vector(x[i]))


def find_witness(s: RankTwoState, restarts: int = 64, seed=DEFAULT_SEED,
                 threshold: float = WITNESS_TOL) -> SearchResult | None:
    rng = np.random.default_rng(seed)
    hit = probe_witness(s, rng)
    if hit.value > threshold:
        return hit
    hit = max_concurrence_search(s, restarts, rng)
    if hit.value > threshold:
        return hit
    return None


# -- zero-concurrence classifier ------------------------------------------------------

ZCS_SEPARABLE = "ZCS_separable"
ZCE_ENTANGLED = "ZCE_entangled"
NOT_ZC = "NotZC"


@dataclass(frozen=True)
class ZCClassification:
    kind: str
    canonical: CanonicalForm | None = field(default=None, repr=False)
    ppt_min_eig: float | None = None
    witness: SearchResult | None = None


def zce_pattern(cf: CanonicalForm, tol: float = PATTERN_TOL) -> bool:
    p = cf.p
    w1, _, w3, _ = cf.w
    return (
        abs(cf.lam - 0.5) <= tol
        and np.abs(w1).max() <= tol
        and np.abs(w3).max() <= tol
        and abs(abs(p[2]) - cf.q1) <= tol
        and abs(abs(p[7]) - cf.q6) <= tol
        and abs(p[6]) <= tol
    )


def zcs_pattern(cf: CanonicalForm, tol: float = PATTERN_TOL) -> bool:
    """Structural ZCS conditions: ``w2 = w4 = 0``, the weight relation and the sign condition."""
    p = cf.p
    w1, w2, w3, w4 = cf.w
    if max(np.abs(w2).max(), np.abs(w4).max()) > tol:
        return False
    target = cf.lam / (1.0 - cf.lam) * cf.q1 * cf.q6
    if abs(abs(w1 @ J2 @ w3) - target) > tol:
        return False
    sign = (-np.conj(p[1] * p[4]) + np.conj(p[0] * p[5])) * (-cf.q1 * p[5] - cf.q6 * p[0]) ** 2
    return bool(sign.real <= tol and abs(sign.imag) <= tol)


def w_relation_error(cf: CanonicalForm) -> float:
    """``|| w4 w1^T - w2 w3^T ||_max``, zero on every ZC state."""
    w1, w2, w3, w4 = cf.w
    return float(np.abs(np.outer(w4, w1) - np.outer(w2, w3)).max())


def classify_zero_concurrence(s: RankTwoState, restarts: int = 64, seed=DEFAULT_SEED,
                      tol: float = PATTERN_TOL, search: bool = True) -> ZCClassification:
    rho = s.density()
    _, min_eig = ppt_test(rho)
    cf = canonicalize(s)
    if isinstance(cf, BothSeparable):
        return ZCClassification(ZCS_SEPARABLE, None, min_eig)
    if zce_pattern(cf, tol):
        return ZCClassification(ZCE_ENTANGLED, cf, min_eig)
    if zcs_pattern(cf, tol) and min_eig >= -PPT_TOL:
        return ZCClassification(ZCS_SEPARABLE, cf, min_eig)
    witness = find_witness(s, restarts, seed) if search else None
    if search and witness is None:
        log.info("no concurrence witness found for a state outside both ZC patterns")
    return ZCClassification(NOT_ZC, cf, min_eig, witness)


# -- pipeline ------------------------------------------------------------------

SEPARABLE_CERTIFIED = "SeparableCertified"
ENTANGLED_BY_PPT = "EntangledByPPT"
ENTANGLED_BY_CONCURRENCE = "EntangledByConcurrence"
ZCE_UNDETECTED = "ZCEUndetectedByConcurrence"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DetectionVerdict:
    tag: str
    ppt_min_eig: float
    concurrence: float | None = None
    witness_params: CartanParams | None = None
    notes: str = ""
    zero_tol: float = ZERO_TOL
    witness_tol: float = WITNESS_TOL

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "ppt_min_eig": self.ppt_min_eig,
            "concurrence": self.concurrence,
            "witness_params": None if self.witness_params is None else self.witness_params.to_json(),
            "thresholds": {"zero": self.zero_tol, "witness": self.witness_tol},
            "notes": self.notes,
        }


def detect(rho: DensityMatrix, restarts: int = 64, seed=DEFAULT_SEED, zero_tol: float = ZERO_TOL,
           witness_tol: float = WITNESS_TOL, rank_two: RankTwoState | None = None) -> DetectionVerdict:
    if rho.n_a != 2 or rho.n_b not in (2, 4):
        raise UnsupportedShape(f"detection supports 2x2 and 2x4 states, got {rho.n_a}x{rho.n_b}")
    is_ppt, min_eig = ppt_test(rho)
    verdict = lambda tag, **kw: DetectionVerdict(tag, min_eig, zero_tol=zero_tol, witness_tol=witness_tol, **kw)

    if rho.n_b == 2:
        c = wootters_concurrence(rho)
        if c <= zero_tol:
            return verdict(SEPARABLE_CERTIFIED, concurrence=c, notes="two-qubit concurrence vanishes")
        if c > witness_tol:
            return verdict(ENTANGLED_BY_CONCURRENCE, concurrence=c, notes="two-qubit concurrence with M = J2 x J2")
        return verdict(INCONCLUSIVE, concurrence=c, notes="two-qubit concurrence between thresholds")

    rank = rho.rank()
    if rank != 2:
        if not is_ppt:
            return verdict(ENTANGLED_BY_PPT, notes=f"rank {rank}")
        if rank < 4:
            return verdict(SEPARABLE_CERTIFIED, notes=f"PPT with rank {rank} < 4")
        return verdict(INCONCLUSIVE, notes=f"PPT with rank {rank}; PPT is not decisive here")

    if is_ppt:
        return verdict(SEPARABLE_CERTIFIED, notes="rank-2 2x4 PPT state")
    s = rank_two if rank_two is not None else rank_two_from_density(rho)
    res = classify_zero_concurrence(s, restarts, seed)
    if res.kind == ZCE_ENTANGLED:
        return verdict(ZCE_UNDETECTED, concurrence=0.0, notes="entangled zero-concurrence state")
    if res.kind == NOT_ZC and res.witness is not None:
        return verdict(ENTANGLED_BY_CONCURRENCE, concurrence=res.witness.value,
                       witness_params=res.witness.params, notes="PPT fails; concurrence witness found")
    return verdict(ENTANGLED_BY_PPT, notes=f"classifier result {res.kind}; no concurrence witness")
