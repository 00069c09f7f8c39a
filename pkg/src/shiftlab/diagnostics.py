"""Iteration driver, convergence-rate estimation, and height functions.

``iterate`` runs a shift strategy from a starting matrix and records the
full per-step story: bottom entries, corner entries, shifts, one-step
rate ratios, distance to the strategy's singular support, and optionally
a height value.  The recorded trace feeds the rate estimators, the
uniform-deflation bound check, and the exception counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from shiftlab.dynamics import step
from shiftlab.errors import (
    AlmostSingular,
    InsufficientData,
    StepFailure,
    WrongStrategy,
)
from shiftlab.geometry import SpectrumInfo, spectrum_of
from shiftlab.oracle import matrix_function
from shiftlab.strategies import Strategy
from shiftlab.tridiag import SymTridiag

RATIO_FLOOR = 1e-150
USABLE_LOW = 1e-140
USABLE_HIGH = 0.1
DEFAULT_WINDOW = 4


@dataclass(frozen=True)
class StepRecord:
    """One row of an iteration trace.

    ``ratio2``/``ratio3`` compare this step's bottom entry with the next
    one (NaN when either is below the underflow floor or the trace ends
    here).  ``height`` is NaN when no height spec was supplied.
    """

    k: int
    b1: float
    b2: float
    corner: float
    subcorner: float
    shift: float
    height: float
    ratio2: float
    ratio3: float
    ss_dist: float


@dataclass(frozen=True, eq=False)
class IterationTrace:
    """Per-step records plus terminal summary of one strategy run."""

    records: tuple
    strategy: Strategy
    spectrum: SpectrumInfo
    deflated_at: int | None
    component: int | None
    matrices: tuple = field(repr=False, default=())

    def __len__(self):
        return len(self.records)

    @property
    def b1_series(self) -> np.ndarray:
        return np.array([r.b1 for r in self.records])

    @property
    def heights(self) -> np.ndarray:
        return np.array([r.height for r in self.records])


@dataclass(frozen=True, eq=False)
class HeightSpec:
    """Weights and regularization for the spectral height function.

    ``weights`` must be strictly decreasing; ``delta_h`` is the
    log-regularization floor; ``component`` selects the eigenvalue the
    height is anchored at.
    """

    weights: np.ndarray
    delta_h: float
    component: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if np.any(np.diff(w) >= 0):
            raise ValueError("weights must be strictly decreasing")
        if self.delta_h <= 0:
            raise ValueError("delta_h must be positive")

    @classmethod
    def default(cls, n: int, component: int, delta_h: float) -> "HeightSpec":
        return cls(np.arange(n, 0, -1, dtype=np.float64), delta_h, component)


def height(T: SymTridiag, spec: HeightSpec, info: SpectrumInfo) -> float:
    """Weighted trace of the regularized log-distance matrix function.

    Evaluates ``log((x - lam_i)^2 + delta_h)`` on the oracle spectrum,
    assembles the corresponding matrix function of T, and returns the
    trace against the weight matrix.  Strictly increases along in-tube
    steps until the iterate is diagonal.
    """
    lam = np.asarray(info.lam)
    lam_i = lam[spec.component]
    values = np.log((lam - lam_i) ** 2 + spec.delta_h)
    M = matrix_function(T, values)
    return float(np.sum(spec.weights * np.diag(M)))


def iterate(
    T0: SymTridiag,
    strategy: Strategy,
    max_steps: int = 60,
    deflate_tol: float | None = None,
    height_spec: HeightSpec | None = None,
    info: SpectrumInfo | None = None,
    keep_matrices: bool = False,
    track_double: bool = False,
) -> IterationTrace:
    """Run the strategy from T0, recording a full trace.

    Stops at ``max_steps`` or once the bottom entry is at or below
    ``deflate_tol`` (default ``1e-14 * ||T0||``).  With ``track_double``
    the run continues past single deflation until the second subdiagonal
    entry also falls below tolerance, tracking the approach of the
    subcorner to the next eigenvalue; note the bottom-entry ratios below
    the shift-accuracy floor are then machine artifacts.  ``deflated_at``
    records the first crossing either way.  Raises StepFailure wrapping
    the offending step index if the strategy leaves its domain.
    """
    if deflate_tol is None:
        deflate_tol = 1e-14 * T0.norm()
    if info is None:
        info = spectrum_of(T0)
    lam = np.asarray(info.lam)

    rows = []
    mats = [T0] if keep_matrices else []
    T = T0
    deflated_at = None
    b1s = []

    def flush(k, T, shift_val, height_val):
        rows.append(
            dict(
                k=k,
                b1=T.b1,
                b2=T.b2,
                corner=T.corner,
                subcorner=T.subcorner,
                shift=shift_val,
                height=height_val,
                ss_dist=strategy.singular_support_distance(T),
            )
        )

    k = 0
    while True:
        h = height(T, height_spec, info) if height_spec is not None else math.nan
        s = strategy.shift(T)
        flush(k, T, s, h)
        b1s.append(abs(T.b1))
        if deflated_at is None and abs(T.b1) <= deflate_tol:
            deflated_at = k
        done = abs(T.b1) <= deflate_tol
        if done and track_double and T.n >= 3:
            done = abs(T.b2) <= deflate_tol
        if done or k >= max_steps:
            break
        try:
            T = step(T, s)
        except AlmostSingular as exc:
            raise StepFailure(k, exc) from exc
        if keep_matrices:
            mats.append(T)
        k += 1

    component = None
    if deflated_at is not None:
        final_corner = rows[-1]["corner"]
        component = int(np.argmin(np.abs(lam - final_corner)))

    records = []
    for j, row in enumerate(rows):
        b_here = b1s[j]
        ratio2 = math.nan
        ratio3 = math.nan
        if j + 1 < len(rows) and b_here > RATIO_FLOOR and b1s[j + 1] > RATIO_FLOOR:
            # b^2 stays normal above the floor; divide twice so b^3 cannot flush
            ratio2 = b1s[j + 1] / (b_here * b_here)
            ratio3 = ratio2 / b_here
        records.append(StepRecord(ratio2=ratio2, ratio3=ratio3, **row))

    return IterationTrace(
        records=tuple(records),
        strategy=strategy,
        spectrum=info,
        deflated_at=deflated_at,
        component=component,
        matrices=tuple(mats),
    )


def usable_pairs(trace: IterationTrace):
    """Indices k where both b1_k and b1_{k+1} lie in the usable window."""
    b = np.abs(trace.b1_series)
    out = []
    for k in range(len(b) - 1):
        if USABLE_LOW < b[k] < USABLE_HIGH and USABLE_LOW < b[k + 1] < USABLE_HIGH:
            out.append(k)
    return out


@dataclass(frozen=True)
class RateEstimate:
    """Per-step log-log exponents and the trailing-window least squares slope."""

    points: tuple
    tail_slope: float


def rate_exponents(trace: IterationTrace, window: int = DEFAULT_WINDOW) -> RateEstimate:
    """Convergence-order estimates from consecutive bottom entries.

    Per usable step, the exponent ``log|b_{k+1}| / log|b_k|``; the tail
    slope is the least-squares fit of ``log|b_{k+1}|`` against
    ``log|b_k|`` over the last ``window`` usable steps.  Raises
    InsufficientData with fewer than three usable steps.
    """
    ks = usable_pairs(trace)
    if len(ks) < 3:
        raise InsufficientData(f"only {len(ks)} usable steps")
    b = np.abs(trace.b1_series)
    points = tuple((k, math.log(b[k + 1]) / math.log(b[k])) for k in ks)
    tail = ks[-window:]
    xs = np.array([math.log(b[k]) for k in tail])
    ys = np.array([math.log(b[k + 1]) for k in tail])
    if len(tail) >= 2:
        slope = float(np.polyfit(xs, ys, 1)[0])
    else:
        slope = points[-1][1]
    return RateEstimate(points=points, tail_slope=slope)


def parlett_check(trace: IterationTrace, T0: SymTridiag) -> float:
    """Worst slack of the uniform-deflation bound along a Wilkinson trace.

    The k-th iterate must satisfy
    ``|b1_k|^3 <= |b1_0^2 * b2_0| / sqrt(2)^(k-1)``; returns the largest
    value of ``|b1_k|^3 - bound_k`` (nonpositive when the bound holds
    everywhere).  Raises WrongStrategy for non-Wilkinson traces and
    ValueError for matrices without a second subdiagonal.
    """
    if trace.strategy.kind != "wilkinson":
        raise WrongStrategy(f"trace used {trace.strategy.kind!r}, bound needs wilkinson")
    if T0.n < 3:
        raise ValueError("bound needs n >= 3")
    M = abs(T0.b1**2 * T0.b2)
    worst = -math.inf
    for rec in trace.records[1:]:
        bound = M / math.sqrt(2.0) ** (rec.k - 1)
        worst = max(worst, abs(rec.b1) ** 3 - bound)
    return worst


def uniform_deflation_steps(T0: SymTridiag, eps: float) -> int:
    """Step budget implied by the uniform bound: first k with |b1_k| <= eps."""
    M = abs(T0.b1**2 * T0.b2)
    if M == 0.0 or eps <= 0:
        return 1
    return 1 + max(0, math.ceil(2.0 * math.log(M / eps**3) / math.log(2.0)))


def exception_count(trace: IterationTrace, C: float) -> int:
    """Number of recorded steps violating the cubic bound with constant C."""
    count = 0
    for k in usable_pairs(trace):
        b = abs(trace.records[k].b1)
        b_next = abs(trace.records[k + 1].b1)
        if b_next > C * b**3:
            count += 1
    return count


def calibrate_delta_h(
    info: SpectrumInfo,
    component: int,
    eps_ap: float,
    bases,
    candidates=(1e-2, 1e-4, 1e-6),
) -> float:
    """Pick the largest regularization separating each fiber shell from its base.

    Candidates are scaled by the squared spectral gap.  For each sampled
    base, the heights at the two shell points (fiber +-eps_ap) must fall
    strictly below the height of the base itself, so moving outward along
    any sampled fiber descends.  (A single global shell-vs-set threshold
    is not representable in doubles here: heights vary across the
    component by an amount that dwarfs the per-fiber drop at any
    floating-point regularization, so the fiberwise form is the
    meaningful one.)  Raises ValueError if no candidate separates.
    """
    from shiftlab.geometry import tubular_inverse

    for cand in sorted(candidates, reverse=True):
        delta = cand * info.gap**2
        spec = HeightSpec.default(info.n, component, delta)
        ok = True
        for base in bases:
            try:
                up = height(tubular_inverse(base, eps_ap, component, info), spec, info)
                down = height(tubular_inverse(base, -eps_ap, component, info), spec, info)
            except Exception:
                ok = False
                break
            floor = height(base, spec, info)
            if not (up < floor and down < floor):
                ok = False
                break
        if ok:
            return delta
    raise ValueError("no candidate regularization separates shell from base")
