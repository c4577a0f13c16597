import numpy as np
import pytest

from zcdetect.detect import (
    ENTANGLED_BY_CONCURRENCE,
    ENTANGLED_BY_PPT,
    INCONCLUSIVE,
    NOT_ZC,
    SEPARABLE_CERTIFIED,
    WOOTTERS,
    ZCE_ENTANGLED,
    ZCE_UNDETECTED,
    ZCS_SEPARABLE,
    ReducedConcurrenceData,
    canonical_abg,
    classify_zero_concurrence,
    detect,
    eigen_psd,
    degeneracy_conditions,
    mixed_concurrence_full,
    mixed_concurrence_reduced,
    ppt_test,
    pure_concurrence,
    sylvester_psd,
    w_relation_error,
    wootters_concurrence,
)
from zcdetect.errors import NotCanonical, UnsupportedShape
from zcdetect.states import (
    DensityMatrix,
    ProductDecomposition,
    RankTwoState,
    canonicalize,
    make_ppt_form,
    make_zce,
    random_locals,
    random_rank_two,
)
from zcdetect.symmetries import J2, J4, CartanParams, Conjugation, conjugation_from_params, random_cartan_params

from oracles import minors_brute, random_hermitian, random_psd, uhlmann_naive

STANDARD = Conjugation(np.kron(J2, J4))


def bell_like():
    psi = np.zeros(8, dtype=complex)
    psi[0] = psi[5] = 1 / np.sqrt(2)
    return psi


def bell_2q():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def embedded_separable():
    # two non-orthogonal product terms: rank two with entangled eigenvectors
    tilde = ProductDecomposition.from_pure(
        [0.6, 0.4], [np.array([1, 0]), np.array([1, 1j]) / np.sqrt(2)], [np.array([1, 1]) / np.sqrt(2), np.array([0, 1])]
    ).matrix()
    w, v = np.linalg.eigh(make_ppt_form(tilde).mat)
    return RankTwoState(w[-1] / (w[-1] + w[-2]), v[:, -1], v[:, -2])


def test_ppt_bell_like_fails():
    ok, m = ppt_test(DensityMatrix(2, 4, np.outer(bell_like(), bell_like().conj())))
    assert not ok
    assert abs(m + 0.5) < 1e-12


def test_ppt_product_passes():
    v = np.kron([1, 1j], [1, 0, 1, 0]) / 2
    ok, m = ppt_test(DensityMatrix(2, 4, np.outer(v, v.conj())))
    assert ok and m > -1e-12


def test_sylvester_hand_example():
    h = np.array([[2, 1j], [-1j, 2]])
    assert minors_brute(h)[(0, 1)] == pytest.approx(3.0)
    assert sylvester_psd(h)
    assert not sylvester_psd(np.diag([1.0, -1.0]))
    # leading minors alone would accept this one
    assert not sylvester_psd(np.diag([0.0, -1.0]))


def test_sylvester_agrees_with_eigenvalues(rng):
    for _ in range(300):
        n = rng.integers(1, 5)
        h = random_hermitian(rng, n) if rng.random() < 0.5 else random_psd(rng, n)
        w = np.linalg.eigvalsh(h)
        if abs(w[0]) < 1e-6:
            continue
        assert sylvester_psd(h) == eigen_psd(h) == (w[0] > 0)


def test_pure_concurrence_hand_values():
    psi = bell_like()
    assert abs(pure_concurrence(psi, STANDARD)) < 1e-15
    p = CartanParams.from_vector([0, 0, 0, 0, 1, 0, np.pi / 4])
    assert pure_concurrence(psi, conjugation_from_params(p)) == pytest.approx(1.0, abs=1e-14)


def test_wootters_values():
    assert wootters_concurrence(bell_2q()) == pytest.approx(1.0, abs=1e-12)
    assert wootters_concurrence(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-12)
    for p in (0.2, 0.5, 0.9):
        werner = p * bell_2q() + (1 - p) * np.eye(4) / 4
        assert wootters_concurrence(werner) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_full_concurrence_matches_naive(rng):
    for _ in range(100):
        rank = rng.integers(2, 9)
        rho = random_psd(rng, 8, rank)
        rho /= np.trace(rho).real
        c = conjugation_from_params(random_cartan_params(rng))
        value, eigs = mixed_concurrence_full(rho, c)
        assert abs(value - uhlmann_naive(rho, c.M)) < 1e-7
        assert np.all(np.diff(eigs) <= 1e-15)


def test_full_concurrence_pure_fallback(rng):
    psi = bell_like()
    p = CartanParams.from_vector([0, 0, 0, 0, 1, 0, np.pi / 4])
    value, _ = mixed_concurrence_full(np.outer(psi, psi.conj()), conjugation_from_params(p))
    assert value == pytest.approx(1.0, abs=1e-12)


def test_reduced_matches_full(rng):
    for _ in range(200):
        s = random_rank_two(rng)
        c = conjugation_from_params(random_cartan_params(rng))
        red, d = mixed_concurrence_reduced(s, c)
        assert abs(red - mixed_concurrence_full(s.matrix(), c)[0]) < 1e-10
        b = d.B()
        w = np.sort(np.linalg.eigvalsh(b))[::-1]
        assert abs(red - (np.sqrt(max(w[0], 0)) - np.sqrt(max(w[1], 0)))) < 1e-7


def test_degenerate_example_gives_zero():
    d = ReducedConcurrenceData(1, 1j, 1, 0.5)
    assert np.abs(d.B() - np.eye(2) / 2).max() < 1e-15
    assert abs(d.gap()) < 1e-15
    assert d.concurrence() < 1e-15
    assert degeneracy_conditions(d) == (True, True)


def test_degeneracy_conditions_fail_individually():
    assert degeneracy_conditions(ReducedConcurrenceData(1, 1j, 2, 0.5)) == (False, True)
    assert degeneracy_conditions(ReducedConcurrenceData(1, 1, 1, 0.5)) == (True, False)


def test_closed_forms_match_direct_products(rng):
    states = [random_rank_two(rng), make_zce(0.4, 0.7, *random_locals(rng))]
    states.append(embedded_separable())
    for s in states:
        cf = canonicalize(s)
        for _ in range(20):
            p = random_cartan_params(rng)
            _, direct = mixed_concurrence_reduced(cf.state(), conjugation_from_params(p))
            closed = canonical_abg(cf, p)
            for a, b in zip((closed.alpha, closed.beta, closed.gamma), (direct.alpha, direct.beta, direct.gamma)):
                assert abs(a - b) < 1e-10


def test_closed_forms_need_canonical_input(rng):
    cf = canonicalize(random_rank_two(rng))
    with pytest.raises(NotCanonical):
        canonical_abg(cf.__class__(cf.lam, cf.q1, cf.q6, cf.p + 0.1, cf.X1, cf.X2), CartanParams.from_vector(np.zeros(7)))


def test_classify_zce(rng):
    res = classify_zero_concurrence(make_zce(0.3, 2.0, *random_locals(rng)), restarts=4)
    assert res.kind == ZCE_ENTANGLED
    assert res.ppt_min_eig < -1e-4
    assert w_relation_error(res.canonical) < 1e-9


def test_classify_generic_has_witness(rng):
    res = classify_zero_concurrence(random_rank_two(rng), restarts=8)
    assert res.kind == NOT_ZC
    assert res.witness is not None and res.witness.value > 1e-6


def test_classify_embedded_separable():
    res = classify_zero_concurrence(embedded_separable(), restarts=4)
    assert res.kind == ZCS_SEPARABLE


def test_detect_tags(rng):
    assert detect(make_zce(0.7071, 0.0).density()).tag == ZCE_UNDETECTED
    v = detect(random_rank_two(rng).density(), restarts=8)
    assert v.tag == ENTANGLED_BY_CONCURRENCE and v.concurrence > 1e-6 and v.witness_params is not None
    prod = np.kron([1, 0], [0, 0, 1, 0])
    assert detect(DensityMatrix(2, 4, np.outer(prod, prod))).tag == SEPARABLE_CERTIFIED
    assert detect(DensityMatrix(2, 4, np.eye(8) / 8)).tag == INCONCLUSIVE
    mixed = 0.8 * np.outer(bell_like(), bell_like().conj()) + 0.1 * np.diag([0, 0, 0, 1, 0, 0, 1, 0])
    assert detect(DensityMatrix(2, 4, mixed)).tag == ENTANGLED_BY_PPT


def test_detect_two_qubit():
    assert detect(DensityMatrix(2, 2, bell_2q())).tag == ENTANGLED_BY_CONCURRENCE
    assert detect(DensityMatrix(2, 2, np.eye(4) / 4)).tag == SEPARABLE_CERTIFIED
    assert WOOTTERS.check()


def test_detect_rejects_other_shapes():
    with pytest.raises(UnsupportedShape):
        detect(DensityMatrix(3, 2, np.eye(6) / 6))


def test_detect_is_deterministic(rng):
    rho = random_rank_two(rng).density()
    assert detect(rho, restarts=8, seed=5).to_json() == detect(rho, restarts=8, seed=5).to_json()


def test_verdict_json_layout():
    out = detect(make_zce(0.5, 0.1).density()).to_json()
    assert list(out) == ["tag", "ppt_min_eig", "concurrence", "witness_params", "thresholds", "notes"]
    assert list(out["thresholds"]) == ["zero", "witness"]
