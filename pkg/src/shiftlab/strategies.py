"""Shift strategies: Rayleigh, Wilkinson, and the mixed rule.

A shift strategy maps a matrix to the shift used by the next step.  The
strategies here share two structural properties: invariance under the
corner sign flip, and proximity of the shift to some eigenvalue bounded
by a multiple of the bottom subdiagonal entry.  Wilkinson's strategy
carries the explicit constant 2*sqrt(2); Rayleigh's constant is not
pinned here and is only reported empirically (``axiom_check``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shiftlab.tridiag import SignMatrix, SymTridiag

WILKINSON_AXIOM_CONSTANT = 2.0 * math.sqrt(2.0)
TIE_RTOL = 1e-14


def trailing_eigenvalues(T: SymTridiag):
    """Eigenvalue pair (ascending) of the trailing 2x2 minor, stable form."""
    a, b, c = T.trailing_minor()
    m = 0.5 * (a + c)
    r = math.hypot(0.5 * (a - c), b)
    return m - r, m + r


def rayleigh(T: SymTridiag) -> float:
    """Corner entry (n, n)."""
    return T.corner


def wilkinson(T: SymTridiag) -> float:
    """Eigenvalue of the trailing 2x2 minor nearer the corner; smaller on a draw.

    Uses the cancellation-free closed form, which automatically returns
    the smaller eigenvalue when the two are equidistant from the corner
    (that happens exactly when the last two diagonal entries agree).
    """
    a, b, c = T.trailing_minor()
    if b == 0.0:
        return c
    d = 0.5 * (a - c)
    r = math.hypot(d, b)
    # distance difference between the two candidates is 2|d|; a draw takes
    # the smaller eigenvalue, which the d >= 0 branch already yields
    tie = 0.5 * TIE_RTOL * math.sqrt(a * a + 2.0 * b * b + c * c)
    if d >= -tie:
        return c - b * b / (d + r)
    return c - b * b / (d - r)


@dataclass(frozen=True)
class Strategy:
    """A named shift rule plus its proximity constant.

    ``c_sigma`` is the eigenvalue-proximity constant when known;
    Rayleigh's is recorded as 0.0 (unknown, validated empirically only).
    ``epsilon`` is the switching shell of the mixed rule and unused
    otherwise.
    """

    kind: str
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("rayleigh", "wilkinson", "mixed"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "mixed" and self.epsilon <= 0:
            raise ValueError("mixed strategy requires a positive switching shell")

    @property
    def c_sigma(self) -> float:
        if self.kind == "rayleigh":
            return 0.0
        return WILKINSON_AXIOM_CONSTANT

    def shift(self, T: SymTridiag) -> float:
        if self.kind == "rayleigh":
            return rayleigh(T)
        if self.kind == "wilkinson":
            return wilkinson(T)
        if abs(T.b1) < self.epsilon:
            return rayleigh(T)
        return wilkinson(T)

    def singular_support_distance(self, T: SymTridiag) -> float:
        """Distance to the locus where the rule is not smooth.

        For Wilkinson (and the mixed rule away from its switching shell)
        that locus is where the last two diagonal entries agree; for
        Rayleigh it is empty and the sentinel +inf is returned.
        """
        if self.kind == "rayleigh":
            return math.inf
        return abs(T.corner - T.subcorner)

    def label(self) -> str:
        if self.kind == "mixed":
            return f"mixed:{self.epsilon:g}"
        return self.kind


def parse_strategy(name: str) -> Strategy:
    """Parse 'rayleigh' | 'wilkinson' | 'mixed:<eps>'."""
    name = name.strip()
    if name in ("rayleigh", "wilkinson"):
        return Strategy(name)
    if name.startswith("mixed:"):
        try:
            eps = float(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad mixed strategy spec {name!r}") from None
        return Strategy("mixed", epsilon=eps)
    raise ValueError(f"unknown strategy {name!r}")


def mixed(T: SymTridiag, epsilon: float) -> float:
    """Rayleigh inside the switching shell |b1| < epsilon, Wilkinson outside."""
    return Strategy("mixed", epsilon=epsilon).shift(T)


def singular_support_distance(T: SymTridiag, kind: str, epsilon: float = 1.0) -> float:
    strat = Strategy(kind, epsilon=epsilon) if kind == "mixed" else Strategy(kind)
    return strat.singular_support_distance(T)


def axiom_check(T: SymTridiag, strategy: Strategy, eigenvalues):
    """Residual of the sign-flip axiom and margin of the proximity axiom.

    Returns (axiom1_residual, axiom2_margin) where the margin is
    ``min_i |shift - lam_i| - c_sigma * |b1|``; nonpositive margins mean
    the proximity axiom holds with the declared constant.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    s = strategy.shift(T)
    s_flip = strategy.shift(SignMatrix.corner_flip(T.n).conjugate(T))
    residual = abs(s - s_flip)
    margin = float(np.min(np.abs(eigenvalues - s))) - strategy.c_sigma * abs(T.b1)
    return residual, margin
