import math

import numpy as np
import pytest

from sectorbounds.errors import BlockNotPsd, CounterexampleAlarm, InvalidScale, NotInSector, PreconditionFailed
from sectorbounds.inequalities import (
    bourin_uchiyama_consequence,
    fan_hoffman_check,
    fan_hoffman_margins,
    im_part_bound,
    lemma21_check,
    lemma21_congruence,
    modulus_bound,
    re_modulus_dominance,
    thompson_consequence,
    triangle_modulus_chain,
    weyl_norm_monotone,
)
from sectorbounds.matrix import apply_function, op_norm, random_matrix
from sectorbounds.norms import IDENTITY, make_concave

DIAG = np.diag([1 + 1j, 1 - 1j])
SQRT = make_concave("power", 0.5)


def _psd_block(n, seed):
    """A random psd 2n x 2n matrix split into its blocks."""
    M = random_matrix("psd", 2 * n, seed)
    return M[:n, :n], M[:n, n:], M[n:, n:]


def _unitary_err(U):
    return op_norm(U.conj().T @ U - np.eye(U.shape[0]))


# lemma21_check


def test_lemma21_scalar_tight():
    mr, swap = lemma21_check([[1]], [[1]], [[1]], 1.0)
    assert mr.residual_min_eig == pytest.approx(0.0, abs=1e-15)
    assert swap.residual_min_eig == pytest.approx(0.0, abs=1e-15)
    assert mr.holds and swap.holds


def test_lemma21_scalar_margin():
    mr, _ = lemma21_check([[1]], [[1]], [[1]], 2.0)
    assert mr.residual_min_eig == pytest.approx(0.25, abs=1e-15)


def test_lemma21_zero_offdiagonal():
    A = random_matrix("psd", 4, 1)
    B = random_matrix("psd", 4, 2)
    mr, swap = lemma21_check(A, np.zeros((4, 4)), B, 3.0)
    expected = np.linalg.eigvalsh(1.5 * A + B / 6)[0]
    assert mr.holds and swap.holds
    assert mr.residual_min_eig == pytest.approx(expected, abs=1e-12)
    assert expected >= 0


def test_lemma21_errors():
    with pytest.raises(BlockNotPsd):
        lemma21_check([[1]], [[2]], [[1]], 1.0)
    with pytest.raises(InvalidScale):
        lemma21_check([[1]], [[1]], [[1]], 0.0)
    with pytest.raises(InvalidScale):
        lemma21_check([[1]], [[1]], [[1]], -1.0)


def test_lemma21_tight_block():
    for seed in range(20):
        P = random_matrix("psd", 1 + seed % 6, seed) + 0.1 * np.eye(1 + seed % 6)
        mr, swap = lemma21_check(P, P, P, 1.0)
        assert abs(mr.residual_min_eig) <= 1e-10
        assert abs(swap.residual_min_eig) <= 1e-10


def test_lemma21_campaign():
    for i in range(150):
        s = 10 ** ((i % 9) / 4 - 1)
        A, X, B = _psd_block(1 + i % 8, i)
        for rep in lemma21_check(A, X, B, s):
            assert rep.holds, (i, rep.label, rep.residual_min_eig)
            for _, U in rep.witness_unitaries:
                assert _unitary_err(U) <= 1e-11
        assert lemma21_congruence(A, X, B, s) >= -1e-9


# lemma consequences


def test_thompson_examples():
    A = random_matrix("ginibre", 4, 3)
    assert thompson_consequence(A, np.zeros((4, 4)))
    assert thompson_consequence(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    for seed in range(200):
        assert thompson_consequence(random_matrix("ginibre", 8, 2 * seed), random_matrix("ginibre", 8, 2 * seed + 1))


def test_thompson_alarm_is_raised_on_fake_input(monkeypatch):
    import sectorbounds.inequalities as ineq

    monkeypatch.setattr(ineq, "weak_majorize", lambda *a, **k: False)
    with pytest.raises(CounterexampleAlarm):
        ineq.thompson_consequence(np.eye(2), np.eye(2))


def test_bourin_uchiyama():
    A = random_matrix("psd", 5, 4)
    assert bourin_uchiyama_consequence(IDENTITY, A, random_matrix("psd", 5, 5))
    assert bourin_uchiyama_consequence(SQRT, A, np.zeros((5, 5)))
    for seed in range(200):
        n = 1 + seed % 10
        assert bourin_uchiyama_consequence(SQRT, random_matrix("psd", n, 2 * seed), random_matrix("psd", n, 2 * seed + 1))


def test_fan_hoffman():
    assert fan_hoffman_check(np.array([[0, 2], [0, 0]]))
    np.testing.assert_allclose(fan_hoffman_margins(np.array([[0, 2], [0, 0]])), [1.0, 1.0], atol=1e-15)
    H = random_matrix("hermitian", 5, 2)
    assert fan_hoffman_check(H)
    for seed in range(500):
        assert fan_hoffman_check(random_matrix("ginibre", 1 + seed % 12, seed))


def test_weyl_monotone():
    B = np.diag([1.0, 2.0])
    assert weyl_norm_monotone(SQRT, 2 * B, B)
    assert weyl_norm_monotone(SQRT, B, B)
    f = make_concave("log1p", 1.0)
    for seed in range(200):
        n = 1 + seed % 9
        Bm = random_matrix("psd", n, 2 * seed)
        assert weyl_norm_monotone(f, Bm + random_matrix("psd", n, 2 * seed + 1), Bm)
    with pytest.raises(PreconditionFailed):
        weyl_norm_monotone(f, B, 2 * B)
    with pytest.raises(PreconditionFailed):
        weyl_norm_monotone(f, np.eye(2), -np.eye(2))


def test_re_modulus_dominance():
    P = random_matrix("psd", 4, 6)
    assert re_modulus_dominance(SQRT, P)
    assert re_modulus_dominance(IDENTITY, DIAG)
    for seed in range(300):
        alpha = 0.01 + 1.39 * ((seed * 0.618) % 1)
        assert re_modulus_dominance(SQRT, random_matrix("sectorial", 2 + seed % 10, seed, alpha))
    with pytest.raises(PreconditionFailed):
        re_modulus_dominance(IDENTITY, np.diag([1.0, -1.0]))


# proof steps


def test_im_part_bound_examples():
    P = random_matrix("psd", 4, 9)
    rep = im_part_bound(P, 0.0, 1.0)
    assert rep.residual_min_eig == pytest.approx(0.0, abs=1e-15)
    # Im A = 0 completes to U = I
    np.testing.assert_array_equal(rep.witness_unitaries[0][1], np.eye(4))
    rep = im_part_bound(DIAG, math.pi / 4, 1.0)
    assert rep.holds and rep.residual_min_eig == pytest.approx(0.0, abs=1e-15)


def test_modulus_bound_examples():
    P = random_matrix("psd", 4, 9) + 0.5 * np.eye(4)
    rep = modulus_bound(P, 0.0, 1.0)
    assert abs(rep.residual_min_eig) <= 1e-12
    rep = modulus_bound(DIAG, math.pi / 4, 1.0)
    assert rep.holds and rep.residual_min_eig == pytest.approx(0.0, abs=1e-14)


def test_proof_step_errors():
    with pytest.raises(NotInSector):
        im_part_bound(DIAG, 0.5, 1.0)
    with pytest.raises(NotInSector):
        modulus_bound(np.array([[1, 2], [0, 1]]), 1.0, 1.0)
    with pytest.raises(InvalidScale):
        modulus_bound(DIAG, math.pi / 4, 0.0)


@pytest.mark.parametrize("alpha,s_values", [(0.8, (0.5, 1.0, 2.0)), (1.0, (0.25, 1.0, 4.0))])
def test_proof_step_campaign(alpha, s_values):
    for seed in range(60):
        A = random_matrix("sectorial", 2 + seed % 10, seed, alpha)
        for s in s_values:
            for rep in (im_part_bound(A, alpha, s), modulus_bound(A, alpha, s)):
                assert rep.holds, (seed, s, rep.label, rep.residual_min_eig)
                for _, U in rep.witness_unitaries:
                    assert _unitary_err(U) <= 1e-11
            assert triangle_modulus_chain(A, alpha, s)


def test_im_part_scaling_coherence():
    # Im A Hermitian makes its polar factor a Hermitian involution, so the
    # two Re A terms swap under U and the residual is symmetric in s <-> 1/s
    for seed in range(50):
        A = random_matrix("sectorial", 2 + seed % 9, seed, 0.9)
        for s in (0.3, 2.0, 7.0):
            r1 = im_part_bound(A, 0.9, s).residual_min_eig
            r2 = im_part_bound(A, 0.9, 1 / s).residual_min_eig
            assert r1 == pytest.approx(r2, abs=1e-9)


def test_triangle_chain_examples():
    assert triangle_modulus_chain(random_matrix("psd", 4, 1), 0.0, 1.0)
    assert triangle_modulus_chain(DIAG, math.pi / 4, 1.0)


def test_concave_variants_keep_dominance():
    f = make_concave("cap", 0.7)
    A = random_matrix("sectorial", 6, 33, 1.2)
    H = (A + A.conj().T) / 2
    assert re_modulus_dominance(f, A)
    assert np.all(np.linalg.eigvalsh(apply_function(f, H)) <= 0.7 + 1e-12)
