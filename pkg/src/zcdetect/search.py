"""Multi-start Nelder-Mead over the reduced conjugation parameters.

All restarts advance in lockstep so the objective is always evaluated on a
stack of points; the concurrence objective below is written to take such
stacks directly.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .matops import dagger
from .symmetries import J2, J4, CartanParams, _g_block
from .states import RankTwoState


class SimplexResult(NamedTuple):
    x: np.ndarray          # (R, n) best vertex per restart
    fun: np.ndarray        # (R,) objective at x (minimized)
    nit: int
    best_trace: np.ndarray  # (nit + 1, R) best value after each iteration


def nelder_mead_batch(fun: Callable[[np.ndarray], np.ndarray], x0: np.ndarray, step: float = 0.5,
                      maxiter: int = 800, xatol: float = 1e-7, fatol: float = 1e-12) -> SimplexResult:
    """Minimize ``fun`` from each row of ``x0`` with an independent simplex.

    ``fun`` maps an ``(m, n)`` array of points to ``(m,)`` values. Standard
    coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2). The best
    vertex of a simplex is only ever replaced by a strictly better point.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    r, n = x0.shape
    sim = np.repeat(x0[:, None, :], n + 1, axis=1)
    sim[:, 1:, :] += step * np.eye(n)[None]
    fs = fun(sim.reshape(-1, n)).reshape(r, n + 1)
    active = np.ones(r, dtype=bool)
    trace = [fs.min(axis=1)]
    nit = 0
    for nit in range(1, maxiter + 1):
        order = np.argsort(fs, axis=1, kind="stable")
        sim = np.take_along_axis(sim, order[:, :, None], axis=1)
        fs = np.take_along_axis(fs, order, axis=1)
        xspread = np.max(np.abs(sim[:, 1:] - sim[:, :1]), axis=(1, 2))
        fspread = np.max(np.abs(fs[:, 1:] - fs[:, :1]), axis=1)
        active &= ~((xspread <= xatol) | (fspread <= fatol))
        if not active.any():
            trace.append(fs[:, 0].copy())
            break
        idx = np.flatnonzero(active)
        s = sim[idx]
        f = fs[idx]
        cen = s[:, :-1].mean(axis=1)
        xw = s[:, -1]
        d = cen - xw
        xr, xe, xoc, xic = cen + d, cen + 2.0 * d, cen + 0.5 * d, cen - 0.5 * d
        m = len(idx)
        vals = fun(np.concatenate([xr, xe, xoc, xic])).reshape(4, m)
        fr, fe, foc, fic = vals
        f1, fn, fw = f[:, 0], f[:, -2], f[:, -1]

        new_x = xw.copy()
        new_f = fw.copy()

        expand = fr < f1
        use_e = expand & (fe < fr)
        use_r = (expand & ~use_e) | ((fr >= f1) & (fr < fn))
        outside = (fr >= fn) & (fr < fw)
        inside = fr >= fw
        use_oc = outside & (foc <= fr)
        use_ic = inside & (fic < fw)
        shrink = (outside & ~use_oc) | (inside & ~use_ic)

        for mask, xs, fv in ((use_e, xe, fe), (use_r, xr, fr), (use_oc, xoc, foc), (use_ic, xic, fic)):
            new_x[mask] = xs[mask]
            new_f[mask] = fv[mask]
        s[:, -1] = new_x
        f[:, -1] = new_f
        if shrink.any():
            k = np.flatnonzero(shrink)
            s[k, 1:] = s[k, :1] + 0.5 * (s[k, 1:] - s[k, :1])
            f[k, 1:] = fun(s[k, 1:].reshape(-1, n)).reshape(len(k), n)
        sim[idx] = s
        fs[idx] = f
        trace.append(fs.min(axis=1))
    best = np.argmin(fs, axis=1)
    return SimplexResult(
        sim[np.arange(r), best].copy(), fs[np.arange(r), best].copy(), nit, np.array(trace)
    )


# -- concurrence objective -----------------------------------------------------

def _basis_generators() -> list[np.ndarray]:
    """``G0`` for each of the first six coordinates (traceless part of A, b)."""
    gens = []
    for k in range(6):
        e = np.zeros(7)
        e[k] = 1.0
        p = CartanParams.from_vector(e)
        gens.append(_g_block(p.A0, p.b))
    return gens


_GENS = _basis_generators()
_H_BASIS = np.array([2.0 * g @ J4 for g in _GENS])
_ETA_QUAD = np.array([[np.real(np.trace(gk @ dagger(gl))) for gl in _GENS] for gk in _GENS])


class ConcurrenceObjective:
    """Concurrence of a fixed rank-two 2 x 4 state as a function of the 7 parameters.

    ``alpha``, ``beta``, ``gamma`` are linear in ``cos(eta t) J4`` and
    ``sin(eta t)/eta H``, and ``H`` is linear in the parameters, so the
    per-point work is a handful of small products and a 2 x 2 SVD. The trace
    of ``A`` only changes an overall phase and drops out.
    """

    def __init__(self, s: RankTwoState):
        if (s.n_a, s.n_b) != (2, 4):
            raise ValueError("objective is defined for 2 x 4 states")
        self.state = s
        p1 = s.psi1.reshape(2, 4)
        p2 = s.psi2.reshape(2, 4)
        pairs = [(p1, p1), (p1, p2), (p2, p2)]
        ns = np.array([pi.conj().T @ J2 @ pj.conj() for pi, pj in pairs])  # (3, 4, 4)
        self._c0 = np.einsum("kl,ikl->i", J4, ns)
        self._lin = np.einsum("jkl,ikl->ij", _H_BASIS, ns)  # (3, 6)
        lam = s.lam
        self._scale = np.array([lam, np.sqrt(lam * (1.0 - lam)), 1.0 - lam])

    def abg(self, x: np.ndarray) -> np.ndarray:
        """``(alpha, beta, gamma)`` up to the trace phase, for points ``x`` of shape (m, 7)."""
        x = np.atleast_2d(x)
        y = x[:, :6]
        eta = np.sqrt(np.maximum(np.einsum("mi,ij,mj->m", y, _ETA_QUAD, y), 0.0))
        t = x[:, 6]
        cos = np.cos(eta * t)
        sinc = t * np.sinc(eta * t / np.pi)
        return cos[:, None] * self._c0[None, :] + sinc[:, None] * (y @ self._lin.T)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        v = self.abg(x) * self._scale
        k = np.empty((v.shape[0], 2, 2), dtype=np.complex128)
        k[:, 0, 0] = v[:, 0]
        k[:, 0, 1] = k[:, 1, 0] = v[:, 1]
        k[:, 1, 1] = v[:, 2]
        sv = np.linalg.svd(k, compute_uv=False)
        return np.maximum(sv[:, 0] - sv[:, 1], 0.0)


def deterministic_start() -> np.ndarray:
    """``A = 0``, ``b = 1``, ``t = pi / (2 eta)`` with ``eta = 2``."""
    return np.array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, np.pi / 4.0])


def random_starts(rng: np.random.Generator, count: int) -> np.ndarray:
    x = rng.standard_normal((count, 7))
    x[:, 6] = rng.uniform(-np.pi, np.pi, size=count)
    return x


def pick_best(values: np.ndarray, points: np.ndarray) -> int:
    """Index of the largest value; ties go to the lexicographically smallest point."""
    top = values.max()
    ties = np.flatnonzero(values == top)
    return int(min(ties, key=lambda i: tuple(points[i])))
