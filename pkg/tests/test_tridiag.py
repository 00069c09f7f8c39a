import numpy as np
import pytest

from shiftlab.tridiag import OrthogonalFactor, SignMatrix, SymTridiag, UpperTriangularBand


def test_construction_and_views():
    T = SymTridiag([1.0, 2.0, 4.0], [0.5, -0.25])
    assert T.n == 3
    assert T.b1 == -0.25
    assert T.b2 == 0.5
    assert T.corner == 4.0
    assert T.subcorner == 2.0
    A = T.dense()
    assert A[0, 1] == A[1, 0] == 0.5
    assert np.max(np.abs(A - A.T)) == 0.0


def test_invariants_rejected():
    with pytest.raises(ValueError):
        SymTridiag([1.0], [])
    with pytest.raises(ValueError):
        SymTridiag([1.0, 2.0], [0.1, 0.2])
    with pytest.raises(ValueError):
        SymTridiag([1.0, np.inf], [0.0])


def test_immutability():
    T = SymTridiag([1.0, 2.0], [0.5])
    with pytest.raises(ValueError):
        T.diag[0] = 7.0


def test_norms_match_dense():
    T = SymTridiag([1.0, -2.0, 0.5], [0.3, 1.5])
    assert T.norm() == pytest.approx(np.linalg.norm(T.dense()))
    assert T.max_abs() == 2.0
    assert T.offdiag_mass() == pytest.approx(2 * (0.3**2 + 1.5**2))


def test_trailing_minor_and_leading_block():
    T = SymTridiag([1.0, 2.0, 4.0], [0.5, -0.25])
    assert T.trailing_minor() == (2.0, -0.25, 4.0)
    B = T.leading_block()
    assert B.n == 2 and B.corner == 2.0 and B.b1 == 0.5
    with pytest.raises(ValueError):
        SymTridiag([1.0, 2.0], [0.5]).leading_block()


def test_sign_matrix_action():
    T = SymTridiag([1.0, 2.0, 4.0], [0.5, -0.25])
    E = SignMatrix.identity(3)
    assert E.conjugate(T).distance(T) == 0.0
    En = SignMatrix.corner_flip(3)
    flipped = En.conjugate(T)
    assert flipped.b1 == 0.25
    assert flipped.b2 == 0.5
    assert np.array_equal(flipped.diag, T.diag)
    patterns = list(SignMatrix.all_patterns(4))
    assert len(patterns) == 8
    # dense conjugation agrees with the subdiagonal flip rule
    for E in SignMatrix.all_patterns(3):
        A = E.dense() @ T.dense() @ E.dense()
        assert np.max(np.abs(A - E.conjugate(T).dense())) == 0.0


def test_band_dense_and_conventions():
    R = UpperTriangularBand([2.0, 3.0, -1.0], [0.1, 0.2], [0.7])
    D = R.dense()
    assert D[0, 2] == 0.7 and D[2, 2] == -1.0 and D[1, 0] == 0.0
    assert R.star_convention_ok()
    assert not R.plain_convention_ok()


def test_orthogonal_factor_dense():
    c, s = np.cos(0.3), np.sin(0.3)
    Q = OrthogonalFactor(((0, c, s),), n=3)
    D = Q.dense()
    assert np.allclose(D.T @ D, np.eye(3), atol=1e-15)
    assert np.linalg.det(D) == pytest.approx(1.0)
    assert Q.rotation_residual() < 1e-15
    flip = np.array([1.0, 1.0, -1.0])
    Qf = OrthogonalFactor(((0, c, s),), post_signs=flip, n=3)
    assert Qf.det() == -1.0
    assert np.allclose(Qf.dense(), D * flip[None, :])
