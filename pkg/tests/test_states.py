import numpy as np
import pytest

from zcdetect.errors import (
    DecompositionMismatch,
    DimensionMismatch,
    InvalidInput,
    OutOfRange,
    RankDeficient,
    WeightError,
)
from zcdetect.states import (
    BOTH_SEPARABLE,
    CanonicalForm,
    DensityMatrix,
    PptBlockForm,
    ProductDecomposition,
    RankTwoState,
    canonicalize,
    is_product,
    lift_separable_decomposition,
    make_ppt_form,
    make_separable,
    make_zce,
    random_locals,
    random_rank_two,
    random_separable,
    rank_two_from_density,
    schmidt_decompose,
    state_from_json,
    state_to_json,
)

from oracles import schmidt_coeffs_via_reduced


def basis(k, n=8):
    e = np.zeros(n, dtype=complex)
    e[k] = 1
    return e


def test_density_matrix_validation():
    with pytest.raises(InvalidInput):
        DensityMatrix(2, 2, np.eye(4))
    with pytest.raises(InvalidInput):
        DensityMatrix(1, 2, np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(InvalidInput):
        DensityMatrix(1, 2, np.diag([1.5, -0.5]))
    with pytest.raises(DimensionMismatch):
        DensityMatrix(2, 4, np.eye(4) / 4)


def test_density_rank():
    assert DensityMatrix(2, 4, np.eye(8) / 8).rank() == 8
    assert DensityMatrix(2, 4, np.diag([0.5, 0.5, 0, 0, 0, 0, 0, 0])).rank() == 2


def test_rank_two_validation():
    with pytest.raises(RankDeficient):
        RankTwoState(0.5, basis(0), (basis(0) + basis(1)) / np.sqrt(2))
    with pytest.raises(OutOfRange):
        RankTwoState(1.0, basis(0), basis(1))
    with pytest.raises(InvalidInput):
        RankTwoState(0.5, 2 * basis(0), basis(1))


def test_rank_two_from_density_recovers_spectrum(rng):
    s = random_rank_two(rng)
    back = rank_two_from_density(s.density())
    assert abs(back.lam - max(s.lam, 1 - s.lam)) < 1e-12
    assert np.abs(back.matrix() - s.matrix()).max() < 1e-12
    with pytest.raises(RankDeficient):
        rank_two_from_density(DensityMatrix(2, 4, np.eye(8) / 8))


def test_schmidt_decompose_reconstructs(rng):
    for _ in range(100):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        c, a, b = schmidt_decompose(psi)
        assert np.allclose(c, schmidt_coeffs_via_reduced(psi, 2, 4)[:2], atol=1e-12)
        rebuilt = sum(c[k] * np.kron(a[:, k], b[:, k]) for k in range(2))
        assert np.abs(rebuilt - psi).max() < 1e-12
        assert np.abs(a.conj().T @ a - np.eye(2)).max() < 1e-12
        assert np.abs(b.conj().T @ b - np.eye(4)).max() < 1e-12


def test_is_product():
    assert is_product(np.kron([1, 0], [0, 1, 0, 0]))
    assert not is_product((basis(0) + basis(5)) / np.sqrt(2))


def test_make_zce_layout():
    s = make_zce(0.6, 0.3)
    assert s.lam == 0.5
    assert np.allclose(s.psi1, 0.6 * basis(0) + 0.8 * basis(5))
    assert np.allclose(s.psi2, 0.6 * basis(2) + 0.8 * np.exp(0.3j) * basis(7))
    with pytest.raises(OutOfRange):
        make_zce(1.0, 0.0)


def test_canonical_input_is_fixed():
    s = make_zce(0.6, 0.3)
    cf = canonicalize(s)
    assert isinstance(cf, CanonicalForm)
    assert cf.residual(s.matrix()) <= 1e-10
    assert np.abs(np.abs(cf.X1) - np.eye(2)).max() < 1e-12
    assert cf.check()
    assert cf.q1 == pytest.approx(0.6, abs=1e-12) and cf.q6 == pytest.approx(0.8, abs=1e-12)
    assert np.abs(cf.p - s.psi2).max() < 1e-12


def test_canonicalize_round_trip(rng):
    for _ in range(100):
        s = random_rank_two(rng)
        cf = canonicalize(s)
        assert cf.check()
        assert cf.residual(s.matrix()) <= 1e-8
        assert abs(np.linalg.det(cf.X1) - 1) < 1e-10
        assert abs(np.linalg.det(cf.X2) - 1) < 1e-10


def test_canonicalize_swaps_when_first_vector_is_product(rng):
    prod = np.kron([1, 0], [1, 0, 0, 0]).astype(complex)
    ent = (basis(1) + basis(6)) / np.sqrt(2)
    s = RankTwoState(0.3, prod, ent)
    cf = canonicalize(s)
    assert cf.swapped
    assert cf.lam == pytest.approx(0.7)
    assert cf.residual(s.matrix()) < 1e-10


def test_canonicalize_both_product():
    s = RankTwoState(0.5, basis(0), basis(7))
    assert canonicalize(s) is BOTH_SEPARABLE


def test_canonicalize_recovers_rotated_zce(rng):
    x1, x2 = random_locals(rng)
    s = make_zce(0.35, 1.1, x1, x2)
    cf = canonicalize(s)
    w1, _, w3, _ = cf.w
    assert cf.residual(s.matrix()) < 1e-9
    assert np.abs(w1).max() < 1e-9 and np.abs(w3).max() < 1e-9
    assert abs(abs(cf.p[2]) - cf.q1) < 1e-9 and abs(abs(cf.p[7]) - cf.q6) < 1e-9


def test_ppt_form_slots():
    tilde = np.diag([0.1, 0.2, 0.3, 0.4])
    rho = make_ppt_form(tilde).mat
    assert np.allclose(np.diag(rho).real, [0.1, 0.2, 0, 0, 0.3, 0.4, 0, 0])
    assert np.array_equal(PptBlockForm.from_tilde(tilde).tilde(), tilde)
    with pytest.raises(InvalidInput):
        make_ppt_form(np.eye(4))


def test_make_separable_weights():
    with pytest.raises(WeightError):
        make_separable([(0.5, [1, 0], [1, 0, 0, 0])])
    with pytest.raises(WeightError):
        make_separable([])
    rho = make_separable([(1.0, [1, 0], [0, 1, 0, 0])])
    assert rho.mat[1, 1] == 1


def test_random_separable_is_state(rng):
    rho = random_separable(rng, 4)
    assert abs(np.trace(rho.mat) - 1) < 1e-12


def test_lift_reproduces_embedded_state(rng):
    vecs_a = [np.array([1, 0]), np.array([1, 1]) / np.sqrt(2)]
    vecs_b = [np.array([0, 1]), np.array([1, 1j]) / np.sqrt(2)]
    dec = ProductDecomposition.from_pure([0.25, 0.75], vecs_a, vecs_b)
    blocks = PptBlockForm.from_tilde(dec.matrix())
    lifted = lift_separable_decomposition(blocks, dec)
    assert np.abs(lifted.matrix() - blocks.assemble()).max() < 1e-12
    bad = ProductDecomposition.from_pure([1.0], vecs_a[:1], vecs_b[:1])
    with pytest.raises(DecompositionMismatch):
        lift_separable_decomposition(blocks, bad)


def test_state_json_round_trip(rng):
    s = random_rank_two(rng)
    rho, r2 = state_from_json(state_to_json(s.density(), s))
    assert np.array_equal(rho.mat, s.density().mat)
    assert np.array_equal(r2.psi1, s.psi1) and r2.lam == s.lam
    with pytest.raises(InvalidInput):
        state_from_json({"n_a": 2, "n_b": 4})
