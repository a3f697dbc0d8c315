"""Support-set fusion: democratic voting plus expansion to a size-T side-information set."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SupportSet, vote_accumulate
from .signals import SparseSignal

TRUNCATION_RULES = ("lexicographic", "by_votes")


@dataclass(frozen=True)
class FusionOutput:
    j_hat: SupportSet   # voted estimate of the common support part
    i_hat: SupportSet   # individual part kept from the previous estimate
    t_si: SupportSet    # side information, always of size T

    def __post_init__(self):
        if self.j_hat.intersection(self.i_hat):
            raise ValueError("common and individual fusion parts must be disjoint")
        if self.t_si != self.j_hat.union(self.i_hat):
            raise ValueError("side information must be the union of its parts")


def consensus(
    neighbor_supports: Sequence[SupportSet],
    own_support: SupportSet,
    sparsity: int,
    truncation: str = "lexicographic",
) -> SupportSet:
    """Indices appearing in at least two of the available support estimates.

    The own estimate and each neighbor estimate contribute one vote per
    index; an index qualifies with two or more votes.  If more than
    ``sparsity`` indices qualify, the set is truncated: "lexicographic" keeps
    the lowest indices, "by_votes" keeps the highest vote counts (ties to the
    lower index).  With no neighbors the result is always empty, because the
    own estimate alone holds a single vote per index.
    """
    if truncation not in TRUNCATION_RULES:
        raise ValueError(f"unknown truncation rule {truncation!r}")
    top = max((max(s.indices, default=-1) for s in (own_support, *neighbor_supports)),
              default=-1)
    votes = np.zeros(top + 1, dtype=np.int64)
    votes = vote_accumulate(votes, own_support)
    for support in neighbor_supports:
        votes = vote_accumulate(votes, support)
    qualified = np.flatnonzero(votes >= 2).tolist()
    if len(qualified) <= sparsity:
        return SupportSet(qualified)
    if truncation == "lexicographic":
        return SupportSet(qualified[:sparsity])
    by_votes = sorted(qualified, key=lambda i: (-votes[i], i))
    return SupportSet(by_votes[:sparsity])


def expansion(j_hat: SupportSet, x_prev: np.ndarray, sparsity: int) -> FusionOutput:
    """Expand a voted common-part estimate to a full size-T side-information set.

    The voted indices are kept unconditionally; the remaining T - |j_hat|
    slots are filled with the largest-magnitude entries of the previous signal
    estimate outside j_hat (zeros rank by index, so the output always has
    exactly T indices).
    """
    if len(j_hat) > sparsity:
        raise ValueError(f"voted set of size {len(j_hat)} exceeds sparsity {sparsity}")
    x = np.asarray(x_prev, dtype=float)
    if x.ndim != 1 or x.size < sparsity:
        raise ValueError("previous estimate must be a vector of length >= sparsity")
    if j_hat and j_hat.to_array()[-1] >= x.size:
        raise ValueError("voted index out of range")
    need = sparsity - len(j_hat)
    voted = set(j_hat)
    picked: list[int] = []
    if need > 0:
        order = np.argsort(-np.abs(x), kind="stable")
        for i in order:
            if int(i) not in voted:
                picked.append(int(i))
                if len(picked) == need:
                    break
    i_hat = SupportSet(picked)
    return FusionOutput(j_hat, i_hat, j_hat.union(i_hat))


@dataclass(frozen=True)
class AssumptionReport:
    """Measured fusion quality for one node against the true signal."""

    common_energy: float       # ||x||^2 on the voted part
    discarded_energy: float    # ||x||^2 on the estimate indices the expansion dropped
    expansion_energy_ok: bool  # voted part holds at least the discarded energy
    j_precision: float         # fraction of voted indices in the true support (nan if none)
    support_precision: float   # fraction of estimate indices in the true support
    voting_reliable: bool      # voted precision at least the estimate precision


def _energy(values: np.ndarray, subset: SupportSet) -> float:
    if len(subset) == 0:
        return 0.0
    return float(np.sum(values[subset.to_array()] ** 2))


def _precision(subset: SupportSet, truth: SupportSet) -> float:
    if len(subset) == 0:
        return math.nan
    return len(subset.intersection(truth)) / len(subset)


def assumption_checks(
    x_true: SparseSignal,
    support_estimate: SupportSet,
    i_hat: SupportSet,
    j_hat: SupportSet,
) -> AssumptionReport:
    """Measure whether one fusion step met the conditions the expansion bound relies on."""
    values = x_true.values
    common_energy = _energy(values, j_hat)
    discarded = support_estimate.difference(i_hat)
    discarded_energy = _energy(values, discarded)
    j_prec = _precision(j_hat, x_true.support)
    s_prec = _precision(support_estimate, x_true.support)
    reliable = True if math.isnan(j_prec) else (math.isnan(s_prec) or j_prec >= s_prec)
    return AssumptionReport(
        common_energy=common_energy,
        discarded_energy=discarded_energy,
        expansion_energy_ok=common_energy >= discarded_energy,
        j_precision=j_prec,
        support_precision=s_prec,
        voting_reliable=reliable,
    )
