"""Index-set operators and restricted least squares used by every pursuit routine.

All indexing is 0-based.  Magnitude selections break ties deterministically:
larger magnitude first, then lower index.  Restricted least-squares problems
are solved through an orthogonal (SVD) factorization and refuse to return an
answer when the selected columns are numerically rank deficient.
"""
from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

# Singular values below RANK_RCOND * sigma_max are treated as zero when
# deciding whether a restricted system is solvable.
RANK_RCOND = 1e-10


class SingularSystemError(RuntimeError):
    """Raised when the columns selected for a least-squares fit are rank deficient."""

    def __init__(self, support: "SupportSet", step: str = ""):
        self.support = support
        self.step = step
        where = f" during {step}" if step else ""
        super().__init__(
            f"rank-deficient least-squares system on support {tuple(support)}{where}"
        )


class SupportSet:
    """Immutable, strictly increasing set of 0-based column indices."""

    __slots__ = ("_indices",)

    def __init__(self, indices: Iterable[int] = ()):
        idx = sorted(int(i) for i in indices)
        for a, b in zip(idx, idx[1:]):
            if a == b:
                raise ValueError(f"duplicate index {a} in support set")
        if idx and idx[0] < 0:
            raise ValueError(f"negative index {idx[0]} in support set")
        self._indices = tuple(idx)

    @property
    def indices(self) -> tuple[int, ...]:
        return self._indices

    def to_array(self) -> np.ndarray:
        return np.array(self._indices, dtype=np.intp)

    def union(self, other: "SupportSet") -> "SupportSet":
        return SupportSet(set(self._indices) | set(other._indices))

    def intersection(self, other: "SupportSet") -> "SupportSet":
        return SupportSet(set(self._indices) & set(other._indices))

    def difference(self, other: "SupportSet") -> "SupportSet":
        return SupportSet(set(self._indices) - set(other._indices))

    def complement(self, n: int) -> "SupportSet":
        return SupportSet(set(range(n)) - set(self._indices))

    def issubset(self, other: "SupportSet") -> bool:
        return set(self._indices) <= set(other._indices)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __len__(self) -> int:
        return len(self._indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self._indices)

    def __contains__(self, i: object) -> bool:
        return i in self._indices

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SupportSet):
            return self._indices == other._indices
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._indices)

    def __repr__(self) -> str:
        return f"SupportSet({list(self._indices)})"


def supp_select(x: np.ndarray, k: int) -> SupportSet:
    """Indices of the k largest-magnitude entries of x.

    Always returns exactly k indices: zero entries rank below every nonzero
    one but can still be selected (ties broken by lowest index), so callers
    get fixed-cardinality sets even from vectors with fewer than k nonzeros.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D vector")
    if not 0 <= k <= x.size:
        raise ValueError(f"k={k} out of range for vector of length {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector contains non-finite entries")
    if k == 0:
        return SupportSet()
    # Stable sort keeps the lowest index first among equal magnitudes.
    order = np.argsort(-np.abs(x), kind="stable")
    return SupportSet(order[:k].tolist())


def vote_accumulate(z: np.ndarray, support: SupportSet) -> np.ndarray:
    """Return a copy of the vote vector with one vote added for each index in support."""
    z = np.asarray(z)
    if z.ndim != 1:
        raise ValueError("expected a 1-D vote vector")
    if np.any(z < 0):
        raise ValueError("vote counts must be non-negative")
    out = z.astype(np.int64, copy=True)
    if len(support) == 0:
        return out
    idx = support.to_array()
    if idx[-1] >= z.size:
        raise ValueError(f"index {idx[-1]} out of range for {z.size} candidates")
    out[idx] += 1
    return out


def least_squares_on_support(
    A: np.ndarray, y: np.ndarray, support: SupportSet, step: str = ""
) -> np.ndarray:
    """Least-squares fit of y on the columns of A named by support, zero-padded to length N.

    Solves min_u ||y - A_S u|| with an SVD-based solver and places u at the
    support positions of an otherwise-zero length-N vector.  Raises
    SingularSystemError when the selected columns are rank deficient at
    relative tolerance RANK_RCOND.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if y.shape != (A.shape[0],):
        raise ValueError("measurement length does not match matrix rows")
    n = A.shape[1]
    x = np.zeros(n)
    if len(support) == 0:
        return x
    cols = support.to_array()
    if cols[-1] >= n:
        raise ValueError(f"support index {cols[-1]} out of range for {n} columns")
    sol, _, rank, _ = np.linalg.lstsq(A[:, cols], y, rcond=RANK_RCOND)
    if rank < len(support):
        raise SingularSystemError(support, step)
    x[cols] = sol
    return x


def residual_projection(y: np.ndarray, A_sub: np.ndarray, step: str = "") -> np.ndarray:
    """Component of y orthogonal to the column span of A_sub (y minus its projection)."""
    A_sub = np.asarray(A_sub, dtype=float)
    y = np.asarray(y, dtype=float)
    if A_sub.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if A_sub.shape[1] == 0:
        return y.copy()
    sol, _, rank, _ = np.linalg.lstsq(A_sub, y, rcond=RANK_RCOND)
    if rank < A_sub.shape[1]:
        raise SingularSystemError(SupportSet(range(A_sub.shape[1])), step)
    return y - A_sub @ sol
