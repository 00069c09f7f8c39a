import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_matrix, rng_for
from shiftlab.dynamics import drop_signs, phi, phi_star, sign_conjugate, step, step_inverse
from shiftlab.errors import Singular
from shiftlab.factor import qr_star
from shiftlab.oracle import dense_eig_oracle
from shiftlab.tridiag import SignMatrix, SymTridiag


def test_singular_shift_plants_corner():
    # shift at an eigenvalue deflates in one step and plants the shift
    res = phi_star(SymTridiag([1.0, 1.0], [1.0]), 0.0)
    assert res.det_sign == 0
    assert np.allclose(res.next.diag, [2.0, 0.0], atol=1e-14)
    assert abs(res.next.b1) <= 1e-14


def test_diagonal_fixed_point():
    T = SymTridiag.diagonal([1.0, 2.0, 4.0])
    res = phi_star(T, 3.0)
    assert res.next.distance(T) == 0.0


def test_det_sign_values():
    T = SymTridiag.diagonal([1.0, 2.0, 4.0])
    assert phi_star(T, 0.0).det_sign == 1
    assert phi_star(T, 1.5).det_sign == -1
    assert phi_star(T, 3.0).det_sign == 1


def test_isospectral_random():
    rng = rng_for(30)
    for _ in range(30):
        T = random_matrix(rng)
        s = float(rng.normal())
        lam0 = dense_eig_oracle(T.dense())[0]
        lam1 = dense_eig_oracle(step(T, s).dense())[0]
        assert np.max(np.abs(lam0 - lam1)) <= 1e-10 * T.norm()


def test_ratio_law_and_result_fields():
    rng = rng_for(31)
    T = random_matrix(rng, 6)
    s = 0.1
    _, R = qr_star(T, s)
    res = phi_star(T, s)
    for i in range(5):
        expected = float(R.main[i + 1] / R.main[i]) * float(T.sub[i])
        assert res.next.sub[i] == pytest.approx(expected, abs=1e-11)
    assert res.next.b1 == pytest.approx(res.ratio_last * T.b1, abs=1e-12 * (1 + T.norm()))
    # top n-2 subdiagonal signs preserved
    assert np.all(np.sign(res.next.sub[:-1]) == np.sign(np.asarray(T.sub[:-1])))


def test_phi_equals_phi_star_when_det_positive():
    T = SymTridiag([0.0, 0.0], [1.0])
    s = -2.0  # det = 3 > 0
    assert phi(T, s).distance(phi_star(T, s).next) == 0.0


def test_phi_flips_corner_when_det_negative():
    T = SymTridiag([0.0, 0.0], [1.0])
    s = 0.5  # det = -0.75
    res = phi_star(T, s)
    expected = sign_conjugate(res.next, SignMatrix.corner_flip(2))
    assert phi(T, s).distance(expected) == 0.0
    # sign of the bottom entry is preserved by the plain step
    assert np.sign(phi(T, s).b1) == np.sign(T.b1)


def test_phi_raises_on_eigenvalue():
    with pytest.raises(Singular):
        phi(SymTridiag([1.0, 1.0], [1.0]), 0.0)


def test_step_inverse_fixed_point_and_round_trip():
    T = SymTridiag.diagonal([1.0, 5.0])
    assert step_inverse(T, 0.3).distance(T) == 0.0
    rng = rng_for(32)
    T = random_matrix(rng, 6)
    s = 0.9
    assert step(step_inverse(T, s), s).distance(T) <= 1e-10 * T.norm()
    assert step_inverse(step(T, s), s).distance(T) <= 1e-10 * T.norm()


def test_steps_commute_with_inverse_mixed():
    rng = rng_for(33)
    T = random_matrix(rng, 5)
    s0, s1 = 0.3, -1.1
    lhs = step_inverse(step(T, s1), s0)
    rhs = step(step_inverse(T, s0), s1)
    assert lhs.distance(rhs) <= 1e-9 * T.norm()


def test_steps_commute():
    rng = rng_for(34)
    for _ in range(10):
        T = random_matrix(rng)
        s0, s1 = float(rng.normal()), float(rng.normal())
        ab = step(step(T, s0), s1)
        ba = step(step(T, s1), s0)
        assert ab.distance(ba) <= 1e-9 * T.norm()


def test_sign_conjugation_rules():
    T = SymTridiag([1.0, 2.0, 3.0], [0.5, -0.7])
    assert sign_conjugate(T, SignMatrix.identity(3)).distance(T) == 0.0
    En = SignMatrix.corner_flip(3)
    out = sign_conjugate(T, En)
    assert out.b1 == 0.7 and out.b2 == 0.5


@given(pattern=st.lists(st.sampled_from([1, -1]), min_size=4, max_size=4), shift=st.floats(-3, 3))
def test_equivariance_property(pattern, shift):
    rng = rng_for(35)
    T = random_matrix(rng, 4)
    E = SignMatrix(np.array(pattern))
    lhs = step(sign_conjugate(T, E), shift)
    rhs = sign_conjugate(step(T, shift), E)
    assert lhs.distance(rhs) <= 1e-12


def test_drop_signs():
    T = SymTridiag([0.0, 0.0, 0.0], [-1.0, 2.0])
    out = drop_signs(T)
    assert np.allclose(out.sub, [1.0, 2.0])
    assert drop_signs(out).distance(out) == 0.0


def test_gradient_vanishes_at_deflation_points():
    # at (T, s) with b = 0 and s = corner, the bottom entry of the step has
    # zero gradient: central differences along random directions stay tiny
    rng = rng_for(36)
    base = SymTridiag([1.7, 0.8, -0.4], [0.9, 0.0])
    s0 = base.corner
    h = 1e-5
    for _ in range(10):
        dd = rng.normal(size=3)
        de = rng.normal(size=2)
        ds = float(rng.normal())
        scale = np.sqrt(np.sum(dd**2) + np.sum(de**2) + ds**2)
        dd, de, ds = dd / scale, de / scale, ds / scale
        plus = phi_star(SymTridiag(base.diag + h * dd, base.sub + h * de), s0 + h * ds)
        minus = phi_star(SymTridiag(base.diag - h * dd, base.sub - h * de), s0 - h * ds)
        deriv = (plus.next.b1 - minus.next.b1) / (2 * h)
        assert abs(deriv) <= 1e-6
