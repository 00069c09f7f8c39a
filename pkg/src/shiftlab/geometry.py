"""Deflation-set geometry: components, canonical projection, tube coordinates.

For a fixed simple spectrum, the matrices with vanishing bottom
subdiagonal split into components indexed by the eigenvalue sitting in
the corner.  Near each component the pair (projection, bottom entry)
forms tube coordinates: the projection is computed by taking one
deflating step at the corner eigenvalue and inverting its restriction to
the component, which acts on the decoupled leading block.  The numerical
inverse of the tube chart runs Gauss-Newton over spectral weight
vectors.  ``calibrate_neighborhoods`` searches for radii at which one
step provably (empirically) halves the bottom entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shiftlab.dynamics import step, step_inverse
from shiftlab.errors import Breakdown, CalibrationFailed, DuplicateEigenvalue, NoConvergence
from shiftlab.lanczos import lanczos_from_spectrum, random_jacobi
from shiftlab.oracle import dense_eig_oracle
from shiftlab.strategies import Strategy
from shiftlab.tridiag import SignMatrix, SymTridiag, _frozen_array

AP_DEFAULT_TOL = 1e-12
NEWTON_MAX_ITER = 50
NEWTON_FD_STEP = 1e-7
CALIBRATION_FLOOR_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectrumInfo:
    """Sorted simple spectrum with gap, progression class, nearest-neighbor map.

    ``ap_class`` is one of ``ap_free`` (no three eigenvalues in arithmetic
    progression), ``strong_ap`` (three consecutive ones are), or
    ``weak_ap`` (some triple is, but no consecutive triple).
    """

    lam: np.ndarray
    gap: float
    ap_class: str
    nearest: tuple
    ap_tol: float

    def __post_init__(self):
        object.__setattr__(self, "lam", _frozen_array(self.lam))

    @property
    def n(self) -> int:
        return self.lam.size

    def removed(self, i: int) -> np.ndarray:
        """Spectrum with the i-th eigenvalue deleted."""
        return np.delete(np.asarray(self.lam), i)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.tolist(),
            "gap": self.gap,
            "ap_class": self.ap_class,
            "nearest": list(self.nearest),
            "ap_tol": self.ap_tol,
        }


def classify_spectrum(lam, tol: float = AP_DEFAULT_TOL) -> SpectrumInfo:
    """Sort and classify a simple spectrum.

    Raises DuplicateEigenvalue when two entries are closer than
    ``tol * ||lambda||``.  The same scaled tolerance decides whether a
    triple counts as an arithmetic progression.
    """
    lam = np.sort(np.asarray(lam, dtype=np.float64))
    n = lam.size
    if n < 2:
        raise ValueError("need at least two eigenvalues")
    scale = max(float(np.linalg.norm(lam)), 1e-300)
    gaps = np.diff(lam)
    if np.min(gaps) <= tol * scale:
        raise DuplicateEigenvalue(f"minimum gap {np.min(gaps):.3e} below tolerance")
    any_prog = False
    consec_prog = False
    for j in range(1, n - 1):
        for i in range(j):
            for k in range(j + 1, n):
                if abs(lam[i] + lam[k] - 2.0 * lam[j]) <= tol * scale:
                    any_prog = True
                    if i == j - 1 and k == j + 1:
                        consec_prog = True
    if consec_prog:
        ap_class = "strong_ap"
    elif any_prog:
        ap_class = "weak_ap"
    else:
        ap_class = "ap_free"
    nearest = []
    for i in range(n):
        d = np.abs(lam - lam[i])
        d[i] = np.inf
        nearest.append(int(np.argmin(d)))
    return SpectrumInfo(lam, float(np.min(gaps)), ap_class, tuple(nearest), tol)


def spectrum_of(T: SymTridiag, tol: float = AP_DEFAULT_TOL) -> SpectrumInfo:
    """Classify the oracle spectrum of a matrix."""
    lam, _ = dense_eig_oracle(T.dense())
    return classify_spectrum(lam, tol)


def deflation_component(T: SymTridiag, info: SpectrumInfo, eps: float):
    """Component index of the deflation neighborhood containing T, or None.

    Requires ``eps < gap / (2*sqrt(2))`` so the corner criterion
    ``|corner - lam_i| < sqrt(2)*eps`` identifies at most one component.
    """
    if not eps < info.gap / (2.0 * math.sqrt(2.0)):
        raise ValueError("eps must be below gap / (2*sqrt(2))")
    if abs(T.b1) > eps:
        return None
    dist = np.abs(np.asarray(info.lam) - T.corner)
    i = int(np.argmin(dist))
    if dist[i] < math.sqrt(2.0) * eps:
        return i
    return None


def _assemble_base(block: SymTridiag | None, first_diag, lam_i: float) -> SymTridiag:
    if block is None:
        return SymTridiag([float(first_diag), lam_i], [0.0])
    return SymTridiag(
        np.append(np.asarray(block.diag), lam_i),
        np.append(np.asarray(block.sub), 0.0),
    )


def _block_inverse_restricted(block: SymTridiag, lam_i: float) -> SymTridiag:
    """Invert the full-size step's action on a decoupled leading block.

    The full-matrix sign convention constrains all block pivots, so the
    restricted map is the block's plain step: when det(block - lam_i*I)
    is negative, the signed inverse must be preceded by a corner flip.
    """
    from shiftlab.factor import qr_star

    _, R = qr_star(block, lam_i)
    if float(R.main[-1]) < 0.0:
        block = SignMatrix.corner_flip(block.n).conjugate(block)
    return step_inverse(block, lam_i)


def _project_known(T: SymTridiag, lam_i: float) -> SymTridiag:
    """Projection given the corner eigenvalue; no oracle call."""
    S = step(T, lam_i)
    if T.n == 2:
        return _assemble_base(None, S.diag[0], lam_i)
    block = _block_inverse_restricted(S.leading_block(), lam_i)
    return _assemble_base(block, None, lam_i)


def project(T: SymTridiag, i: int, info: SpectrumInfo | None = None) -> SymTridiag:
    """Canonical projection onto the i-th deflation component.

    One deflating step at the corner eigenvalue followed by the inverse
    of its restriction to the component (an inverse step on the decoupled
    leading block).  Fixes the component pointwise, is idempotent, and
    commutes with steps.  Raises AlmostSingular when T is outside the
    i-th deflation domain.
    """
    if info is None:
        info = spectrum_of(T)
    return _project_known(T, float(info.lam[i]))


@dataclass(frozen=True, eq=False)
class TubularPoint:
    """Tube coordinates of a near-deflation matrix: (base point, fiber value)."""

    base: SymTridiag
    fiber: float
    component: int

    def base_residual(self) -> float:
        """How far the base is from the exact component (should be ~roundoff)."""
        return abs(self.base.b1)


def tubular_coords(T: SymTridiag, i: int, info: SpectrumInfo | None = None) -> TubularPoint:
    """The pair (projection, bottom subdiagonal entry)."""
    return TubularPoint(project(T, i, info), T.b1, i)


def _leading_sign_pattern(base: SymTridiag) -> SignMatrix:
    """Sign pattern making the leading-block subdiagonals positive.

    The last two signs are equal, so conjugation leaves the fiber slot
    untouched.
    """
    n = base.n
    signs = np.ones(n, dtype=np.int8)
    for j in range(n - 2):
        sj = 1 if base.sub[j] >= 0 else -1
        signs[j + 1] = signs[j] * sj
    signs[n - 1] = signs[n - 2]
    return SignMatrix(signs)


def tubular_inverse(
    base: SymTridiag,
    b: float,
    i: int,
    info: SpectrumInfo | None = None,
) -> SymTridiag:
    """Numerical inverse of the tube chart: the matrix over ``base`` at fiber ``b``.

    Gauss-Newton over spectral weight vectors (forward-difference
    Jacobian, damped line search): the unknown weight vector must
    reproduce the base through the projection and hit the requested
    fiber value.  Negative fibers and sign-carrying bases are reached by
    sign conjugation of the positive-weight solution.  Raises
    NoConvergence after the iteration budget, which usually means ``|b|``
    is too large for the tube or the base is too close to the component
    boundary.
    """
    if info is None:
        info = spectrum_of(base)
    lam = np.asarray(info.lam)
    lam_i = float(lam[i])
    if abs(base.b1) > 1e-10 * (1.0 + base.norm()):
        raise ValueError("base must have vanishing bottom subdiagonal")
    if b == 0.0:
        return base
    if base.n >= 3 and not base.leading_block().is_unreduced():
        raise ValueError("base must be unreduced in its leading block")

    E = _leading_sign_pattern(base)
    base_pos = E.conjugate(base)
    target = abs(float(b))
    scale = max(1.0, base.norm())

    # first-order seed: weights of the base nudged along the fiber direction
    seed = SymTridiag(base_pos.diag, np.append(base_pos.sub[:-1], target))
    _, V = dense_eig_oracle(seed.dense())
    w = np.abs(V[0, :])
    w = np.maximum(w, 1e-12)
    w /= np.linalg.norm(w)

    def residual(wv):
        wn = wv / np.linalg.norm(wv)
        T = lanczos_from_spectrum(lam, wn)
        P = _project_known(T, lam_i)
        return np.concatenate(
            [
                P.diag[:-1] - base_pos.diag[:-1],
                P.sub[:-1] - base_pos.sub[:-1],
                [T.b1 - target, np.linalg.norm(wv) - 1.0],
            ]
        )

    tol = 1e-10 * scale
    try:
        r = residual(w)
    except Breakdown as exc:
        raise NoConvergence("tube inversion seed hit a reconstruction breakdown") from exc
    best = float(np.max(np.abs(r)))
    for _ in range(NEWTON_MAX_ITER):
        if best <= tol:
            break
        try:
            J = np.empty((r.size, w.size))
            for j in range(w.size):
                wp = w.copy()
                wp[j] += NEWTON_FD_STEP
                J[:, j] = (residual(wp) - r) / NEWTON_FD_STEP
        except Breakdown:
            break
        dw, *_ = np.linalg.lstsq(J, -r, rcond=None)
        t = 1.0
        improved = False
        for _damp in range(12):
            wn = w + t * dw
            if np.min(wn) > 1e-12:
                try:
                    rn = residual(wn)
                except Breakdown:
                    rn = None
                if rn is not None and np.max(np.abs(rn)) < best:
                    w, r, best = wn, rn, float(np.max(np.abs(rn)))
                    improved = True
                    break
            t *= 0.5
        if not improved:
            break
    if best > tol:
        raise NoConvergence(f"tube inversion stalled at residual {best:.3e}")

    T = lanczos_from_spectrum(lam, w / np.linalg.norm(w))
    T = E.conjugate(T)
    if b < 0:
        T = SignMatrix.corner_flip(T.n).conjugate(T)
    return T


def double_deflation_gap(T: SymTridiag):
    """Distances (|b1|, |b2|) to single and double deflation; needs n >= 3."""
    if T.n < 3:
        raise ValueError("double deflation needs n >= 3")
    return abs(T.b1), abs(T.b2)


def random_base(info: SpectrumInfo, i: int, rng) -> SymTridiag:
    """Random point of the i-th deflation component (positive leading block)."""
    if info.n == 2:
        j = 1 - i
        return SymTridiag([float(info.lam[j]), float(info.lam[i])], [0.0])
    block = random_jacobi(info.removed(i), rng)
    return _assemble_base(block, None, float(info.lam[i]))


@dataclass(frozen=True)
class NeighborhoodParams:
    """Calibrated tube radii and constants for one (spectrum, strategy) pair.

    ``eps_tub`` bounds where the tube chart inverts, ``eps_inv`` where one
    step halves the bottom entry, ``eps_ap``/``eps_sigma`` the shift
    windows for height functions (None unless the spectrum is free of
    arithmetic progressions).  ``c_b`` is the observed fiber Lipschitz
    constant and ``c_sigma_used`` the proximity constant that sized
    ``eps_sigma``.
    """

    eps_tub: float
    eps_inv: float
    eps_ap: float | None
    eps_sigma: float | None
    c_b: float
    c_sigma_used: float

    def __post_init__(self):
        chain = [self.eps_sigma, self.eps_ap, self.eps_inv, self.eps_tub]
        present = [x for x in chain if x is not None]
        if any(x <= 0 for x in present):
            raise ValueError("radii must be positive")
        for lo, hi in zip(present, present[1:]):
            if lo > hi * (1 + 1e-12):
                raise ValueError("radius chain must be nondecreasing")

    def to_dict(self) -> dict:
        return {
            "eps_tub": self.eps_tub,
            "eps_inv": self.eps_inv,
            "eps_ap": self.eps_ap,
            "eps_sigma": self.eps_sigma,
            "c_b": self.c_b,
            "c_sigma_used": self.c_sigma_used,
        }


def _ordering_constant(lam: np.ndarray, i: int, radius: float, grid: int = 33) -> bool:
    """Whether |lam_j - s| stays distinct with fixed order over the window."""
    ref = None
    for s in np.linspace(lam[i] - radius, lam[i] + radius, grid):
        d = np.abs(lam - s)
        order = tuple(np.argsort(d, kind="stable"))
        if np.any(np.diff(d[list(order)]) <= 0):
            return False
        if ref is None:
            ref = order
        elif order != ref:
            return False
    return True


def calibrate_neighborhoods(
    info: SpectrumInfo,
    strategy: Strategy,
    samples: int = 200,
    seed: int = 0,
) -> NeighborhoodParams:
    """Bisect tube radii until one strategy step halves the bottom entry.

    Starting from ``gap / (4*sqrt(2))``, each candidate radius is tested
    on ``samples`` tube points spread over all components (random bases,
    fibers at the shell and half-shell, both signs, realized through the
    tube-chart inverse).  A candidate fails when any step leaves
    ``|b|`` above half its previous value or exits the half-radius
    component.  Raises CalibrationFailed when no radius above
    ``1e-8 * gap`` passes.

    Requires ``samples >= 100``.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    rng = np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), 0], dtype=np.uint64)))
    lam = np.asarray(info.lam)
    n_comp = info.n
    fibers_per_base = 4
    n_bases = max(3, samples // (n_comp * fibers_per_base))
    bases = {i: [random_base(info, i, rng) for _ in range(n_bases)] for i in range(n_comp)}

    sqrt2 = math.sqrt(2.0)
    floor = CALIBRATION_FLOOR_RTOL * info.gap

    def shell_points(eps):
        for i in range(n_comp):
            for base in bases[i]:
                for b in (eps, -eps, 0.5 * eps, -0.5 * eps):
                    yield i, base, b

    def candidate_passes(eps, collect=None):
        for i, base, b in shell_points(eps):
            try:
                T = tubular_inverse(base, b, i, info)
            except (NoConvergence, Breakdown):
                return False
            F = step(T, strategy.shift(T))
            if abs(F.b1) > 0.5 * abs(b):
                return False
            if abs(F.corner - lam[i]) >= sqrt2 * (0.5 * eps):
                return False
            if collect is not None:
                collect.append((i, base, b, T, F))
        return True

    eps_tub = info.gap / (4.0 * sqrt2)
    while True:
        ok = True
        for i in range(n_comp):
            for base in bases[i][: min(3, n_bases)]:
                try:
                    tubular_inverse(base, eps_tub, i, info)
                    tubular_inverse(base, -eps_tub, i, info)
                except (NoConvergence, Breakdown):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            break
        eps_tub *= 0.5
        if eps_tub < floor:
            raise CalibrationFailed("tube chart inversion failed at every radius")

    eps = eps_tub
    while not candidate_passes(eps):
        eps *= 0.5
        if eps < floor:
            raise CalibrationFailed(
                f"no radius above {floor:.3e} satisfies the halving property"
            )
    eps_inv = eps

    # constants observed on the accepted radius
    accepted = []
    candidate_passes(eps_inv, collect=accepted)
    c_b = 0.0
    c_sigma_obs = 0.0
    for i, base, b, T, _F in accepted:
        c_b = max(c_b, T.distance(base) / abs(b))
        c_sigma_obs = max(c_sigma_obs, abs(strategy.shift(T) - lam[i]) / abs(b))

    eps_ap = None
    eps_sigma = None
    if info.ap_class == "ap_free":
        cand = eps_inv
        while not all(_ordering_constant(lam, i, cand) for i in range(n_comp)):
            cand *= 0.5
            if cand < floor:
                raise CalibrationFailed("no shift window with constant ordering")
        eps_ap = cand
        c_sigma_used = max(strategy.c_sigma, c_sigma_obs)
        eps_sigma = eps_ap / (1.0 + c_sigma_used)
    else:
        c_sigma_used = max(strategy.c_sigma, c_sigma_obs)

    return NeighborhoodParams(
        eps_tub=float(eps_tub),
        eps_inv=float(eps_inv),
        eps_ap=None if eps_ap is None else float(eps_ap),
        eps_sigma=None if eps_sigma is None else float(eps_sigma),
        c_b=float(c_b),
        c_sigma_used=float(c_sigma_used),
    )
