import math

import numpy as np
import pytest

from conftest import rng_for
from shiftlab.dynamics import step
from shiftlab.errors import CalibrationFailed, DuplicateEigenvalue
from shiftlab.geometry import (
    calibrate_neighborhoods,
    classify_spectrum,
    deflation_component,
    double_deflation_gap,
    project,
    random_base,
    tubular_coords,
    tubular_inverse,
)
from shiftlab.strategies import Strategy
from shiftlab.tridiag import SignMatrix, SymTridiag

SQRT2 = math.sqrt(2.0)


def test_classification():
    assert classify_spectrum([1.0, 2.0, 4.0]).ap_class == "ap_free"
    assert classify_spectrum([-1.0, 0.0, 1.0]).ap_class == "strong_ap"
    assert classify_spectrum([-1.0, 0.0, 0.3, 1.0]).ap_class == "weak_ap"
    info = classify_spectrum([4.0, 1.0, 2.0])  # sorts
    assert np.allclose(info.lam, [1.0, 2.0, 4.0])
    assert info.gap == 1.0
    assert info.nearest == (1, 0, 1)


def test_duplicate_raises():
    with pytest.raises(DuplicateEigenvalue):
        classify_spectrum([1.0, 1.0, 2.0])


def test_nearest_map_weak_ap():
    info = classify_spectrum([-1.0, 0.0, 0.3, 1.0])
    assert info.nearest == (1, 2, 1, 2)


def test_deflation_component():
    info = classify_spectrum([1.0, 2.0, 4.0])
    eps = 0.05
    base = SymTridiag([1.0, 4.0, 2.0], [0.5, 0.0])
    assert deflation_component(base, info, eps) == 1
    far = SymTridiag([1.0, 4.0, 2.0], [0.5, 0.3])
    assert deflation_component(far, info, eps) is None
    near = SymTridiag([1.0, 4.0, 2.0 + eps], [0.5, eps / 2])
    assert deflation_component(near, info, eps) == 1
    with pytest.raises(ValueError):
        deflation_component(base, info, info.gap)  # eps too large


def test_project_fixes_component_points(info_124):
    rng = rng_for(50)
    for i in range(3):
        base = random_base(info_124, i, rng)
        assert project(base, i, info_124).distance(base) <= 1e-12


def test_project_idempotent_and_commutes(info_124):
    rng = rng_for(51)
    for i in range(3):
        base = random_base(info_124, i, rng)
        T = tubular_inverse(base, 0.02, i, info_124)
        P = project(T, i, info_124)
        assert project(P, i, info_124).distance(P) <= 1e-9
        s = 5.3  # not an eigenvalue
        lhs = project(step(T, s), i, info_124)
        rhs = step(P, s)
        assert lhs.distance(rhs) <= 1e-9
        # also commutes with the deflating shift itself
        lhs2 = project(step(T, float(info_124.lam[i])), i, info_124)
        rhs2 = step(P, float(info_124.lam[i]))
        assert lhs2.distance(rhs2) <= 1e-9


def test_projection_sandwich(info_124):
    rng = rng_for(52)
    for i in range(3):
        base = random_base(info_124, i, rng)
        for b in (0.02, -0.005):
            T = tubular_inverse(base, b, i, info_124)
            d = T.distance(project(T, i, info_124))
            assert abs(T.b1) <= d + 1e-14
            assert d <= 10.0 * abs(b)  # finite fiber Lipschitz constant


def test_tubular_round_trip(info_124):
    rng = rng_for(53)
    base = random_base(info_124, 1, rng)
    for b in (1e-2, 1e-4, -1e-2):
        T = tubular_inverse(base, b, 1, info_124)
        tp = tubular_coords(T, 1, info_124)
        assert tp.fiber == pytest.approx(b, abs=1e-8)
        assert tp.base.distance(base) <= 1e-8
        assert tp.component == 1


def test_tubular_inverse_zero_fiber_returns_base(info_124):
    rng = rng_for(54)
    base = random_base(info_124, 2, rng)
    assert tubular_inverse(base, 0.0, 2, info_124) is base


def test_fiber_sign_flip_keeps_base(info_124):
    rng = rng_for(55)
    base = random_base(info_124, 0, rng)
    T = tubular_inverse(base, 0.01, 0, info_124)
    flipped = SignMatrix.corner_flip(3).conjugate(T)
    tp = tubular_coords(flipped, 0, info_124)
    assert tp.fiber == pytest.approx(-T.b1)
    assert tp.base.distance(base) <= 1e-8


def test_tubular_inverse_validates_base(info_124):
    bad = SymTridiag([1.0, 2.0, 4.0], [0.5, 0.3])  # nonzero bottom entry
    with pytest.raises(ValueError):
        tubular_inverse(bad, 0.01, 2, info_124)


def test_double_deflation_gap():
    T = SymTridiag([1.0, 2.0, 3.0], [0.0, 0.0])
    assert double_deflation_gap(T) == (0.0, 0.0)
    T2 = SymTridiag([1.0, 2.0, 3.0], [0.4, 0.2])
    assert double_deflation_gap(T2) == (0.2, 0.4)
    with pytest.raises(ValueError):
        double_deflation_gap(SymTridiag([1.0, 2.0], [0.5]))


def test_calibration_ap_free(info_124):
    params = calibrate_neighborhoods(info_124, Strategy("wilkinson"), samples=120, seed=3)
    assert params.eps_tub < info_124.gap / (2 * SQRT2)
    assert params.eps_inv <= params.eps_tub
    assert params.eps_ap is not None and params.eps_ap <= params.eps_inv
    assert params.eps_sigma == pytest.approx(params.eps_ap / (1 + params.c_sigma_used))
    assert params.c_b > 0
    d = params.to_dict()
    assert set(d) == {"eps_tub", "eps_inv", "eps_ap", "eps_sigma", "c_b", "c_sigma_used"}


def test_calibration_strong_ap(info_sym3):
    params = calibrate_neighborhoods(info_sym3, Strategy("wilkinson"), samples=120, seed=3)
    assert params.eps_ap is None and params.eps_sigma is None
    assert params.eps_inv > 0


def test_calibration_rayleigh(info_124):
    params = calibrate_neighborhoods(info_124, Strategy("rayleigh"), samples=120, seed=3)
    assert params.eps_inv > 0
    assert params.c_sigma_used <= SQRT2 + 1e-6  # empirical constant


def test_calibration_requires_samples(info_124):
    with pytest.raises(ValueError):
        calibrate_neighborhoods(info_124, Strategy("wilkinson"), samples=10)


class _ConstantShift:
    """Violates the eigenvalue-proximity axiom: the halving check must fail."""

    kind = "constant"
    c_sigma = 0.0

    def __init__(self, value):
        self.value = value

    def shift(self, T):
        return self.value

    def singular_support_distance(self, T):
        return math.inf

    def label(self):
        return f"constant:{self.value}"


def test_calibration_fails_for_constant_shift(info_124):
    with pytest.raises(CalibrationFailed):
        calibrate_neighborhoods(info_124, _ConstantShift(50.0), samples=100, seed=1)
