"""Core data types: symmetric tridiagonal matrices and factorization factors.

All types are immutable after construction (arrays are copied and marked
read-only), so every operation in the package is a pure function and safe
to call concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SymTridiag:
    """Real symmetric tridiagonal matrix stored as diagonal + subdiagonal.

    ``diag`` holds the n diagonal entries, ``sub`` the n-1 subdiagonal
    entries; the superdiagonal is structurally equal to ``sub``.  ``b1``
    is the bottom subdiagonal entry (the quantity deflation drives to
    zero) and ``b2`` the one above it.
    """

    diag: np.ndarray
    sub: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", _frozen_array(self.diag))
        object.__setattr__(self, "sub", _frozen_array(self.sub))
        if self.diag.size < 2:
            raise ValueError("matrix size must be at least 2")
        if self.sub.size != self.diag.size - 1:
            raise ValueError("sub must have length n-1")
        if not (np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.sub))):
            raise ValueError("entries must be finite")

    @classmethod
    def diagonal(cls, values) -> "SymTridiag":
        values = np.asarray(values, dtype=np.float64)
        return cls(values, np.zeros(values.size - 1))

    @classmethod
    def from_dense(cls, A) -> "SymTridiag":
        A = np.asarray(A, dtype=np.float64)
        return cls(np.diag(A).copy(), np.diag(A, -1).copy())

    @property
    def n(self) -> int:
        return self.diag.size

    @property
    def b1(self) -> float:
        """Bottom subdiagonal entry, the (n, n-1) element."""
        return float(self.sub[-1])

    @property
    def b2(self) -> float:
        """Second-lowest subdiagonal entry; 0 for 2x2 matrices."""
        return float(self.sub[-2]) if self.n >= 3 else 0.0

    @property
    def corner(self) -> float:
        return float(self.diag[-1])

    @property
    def subcorner(self) -> float:
        return float(self.diag[-2])

    def trailing_minor(self):
        """Entries (a, b, c) of the trailing 2x2 principal minor [[a, b], [b, c]]."""
        return self.subcorner, self.b1, self.corner

    def leading_block(self) -> "SymTridiag":
        """Leading (n-1) x (n-1) principal minor; requires n >= 3."""
        if self.n < 3:
            raise ValueError("leading block of a 2x2 matrix is scalar")
        return SymTridiag(self.diag[:-1], self.sub[:-1])

    def dense(self) -> np.ndarray:
        A = np.diag(self.diag)
        idx = np.arange(self.n - 1)
        A[idx + 1, idx] = self.sub
        A[idx, idx + 1] = self.sub
        return A

    def norm(self) -> float:
        """Frobenius norm (off-diagonal entries counted twice)."""
        return float(np.sqrt(np.sum(self.diag**2) + 2.0 * np.sum(self.sub**2)))

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.diag)), np.max(np.abs(self.sub), initial=0.0)))

    def offdiag_mass(self) -> float:
        """Squared Frobenius norm of the off-diagonal part."""
        return float(2.0 * np.sum(self.sub**2))

    def is_unreduced(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.sub) > tol))

    def with_sub(self, sub) -> "SymTridiag":
        return SymTridiag(self.diag, sub)

    def distance(self, other: "SymTridiag") -> float:
        """Frobenius distance to another matrix of the same size."""
        dd = self.diag - other.diag
        ds = self.sub - other.sub
        return float(np.sqrt(np.sum(dd**2) + 2.0 * np.sum(ds**2)))

    def __repr__(self):
        return f"SymTridiag(diag={self.diag.tolist()}, sub={self.sub.tolist()})"


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """Diagonal matrix with +-1 entries, used for subdiagonal sign flips."""

    signs: np.ndarray

    def __post_init__(self):
        signs = np.array(self.signs, dtype=np.int8, copy=True).reshape(-1)
        if not np.all(np.abs(signs) == 1):
            raise ValueError("signs must be +-1")
        signs.flags.writeable = False
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, n: int) -> "SignMatrix":
        return cls(np.ones(n, dtype=np.int8))

    @classmethod
    def corner_flip(cls, n: int) -> "SignMatrix":
        """The matrix diag(1, ..., 1, -1) that flips only the bottom subdiagonal."""
        signs = np.ones(n, dtype=np.int8)
        signs[-1] = -1
        return cls(signs)

    @classmethod
    def all_patterns(cls, n: int):
        """All 2^(n-1) patterns with leading +1 (distinct conjugation actions)."""
        for tail in itertools.product((1, -1), repeat=n - 1):
            yield cls(np.array((1,) + tail, dtype=np.int8))

    def conjugate(self, T: SymTridiag) -> SymTridiag:
        """E T E: flips sub[i] wherever adjacent signs differ."""
        flips = (self.signs[:-1] * self.signs[1:]).astype(np.float64)
        return SymTridiag(T.diag, T.sub * flips)

    def dense(self) -> np.ndarray:
        return np.diag(self.signs.astype(np.float64))


@dataclass(frozen=True, eq=False)
class UpperTriangularBand:
    """Upper triangular matrix with bandwidth 2 (all a tridiagonal shift fills)."""

    main: np.ndarray
    super1: np.ndarray
    super2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "main", _frozen_array(self.main))
        object.__setattr__(self, "super1", _frozen_array(self.super1))
        object.__setattr__(self, "super2", _frozen_array(self.super2))
        n = self.main.size
        if self.super1.size != n - 1 or self.super2.size != max(n - 2, 0):
            raise ValueError("band lengths must be n, n-1, n-2")

    @property
    def n(self) -> int:
        return self.main.size

    def dense(self) -> np.ndarray:
        n = self.n
        R = np.diag(self.main)
        idx = np.arange(n - 1)
        R[idx, idx + 1] = self.super1
        if n >= 3:
            idx2 = np.arange(n - 2)
            R[idx2, idx2 + 2] = self.super2
        return R

    def star_convention_ok(self) -> bool:
        """First n-1 diagonal entries positive (signed factorization)."""
        return bool(np.all(self.main[:-1] > 0.0))

    def plain_convention_ok(self) -> bool:
        return bool(np.all(self.main > 0.0))


@dataclass(frozen=True, eq=False)
class OrthogonalFactor:
    """Orthogonal matrix as a Givens chain, with optional diagonal sign factors.

    The dense form is ``diag(pre) @ G_0 @ G_1 @ ... @ diag(post)`` where
    ``G_k`` is the rotation [[c, -s], [s, c]] embedded at plane
    (i_k, i_k + 1).  A chain of rotations with pre/post sign determinants
    +1 has determinant +1 structurally.
    """

    rotations: tuple
    pre_signs: np.ndarray | None = None
    post_signs: np.ndarray | None = None
    n: int = field(default=0)

    def __post_init__(self):
        rots = tuple((int(i), float(c), float(s)) for i, c, s in self.rotations)
        object.__setattr__(self, "rotations", rots)
        if self.pre_signs is not None:
            object.__setattr__(self, "pre_signs", _frozen_array(self.pre_signs))
        if self.post_signs is not None:
            object.__setattr__(self, "post_signs", _frozen_array(self.post_signs))
        if self.n <= 0:
            raise ValueError("n must be given")

    def dense(self) -> np.ndarray:
        Q = np.eye(self.n)
        if self.pre_signs is not None:
            Q = Q * self.pre_signs[None, :]  # rows of the final product
        for i, c, s in self.rotations:
            # right-multiply by the rotation at plane (i, i+1)
            qi = Q[:, i].copy()
            qj = Q[:, i + 1].copy()
            Q[:, i] = c * qi + s * qj
            Q[:, i + 1] = -s * qi + c * qj
        if self.post_signs is not None:
            Q = Q * self.post_signs[None, :]
        return Q

    def det(self) -> float:
        d = 1.0
        if self.pre_signs is not None:
            d *= float(np.prod(self.pre_signs))
        if self.post_signs is not None:
            d *= float(np.prod(self.post_signs))
        return d

    def rotation_residual(self) -> float:
        """Worst deviation of c^2 + s^2 from 1 over the chain."""
        if not self.rotations:
            return 0.0
        return max(abs(c * c + s * s - 1.0) for _, c, s in self.rotations)
