"""Greedy parallel pursuit with optional side information.

Each iteration refines a size-T support estimate: matched-filter the residual,
merge with the previous support, least-squares fit and prune to T, merge with
the side-information set, fit and prune again, then refit on the final support
and update the residual.  With an empty side-information set the loop reduces
to plain subspace pursuit.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import SupportSet, least_squares_on_support, supp_select

log = logging.getLogger(__name__)

STOP_RESIDUAL_INCREASE = "residual_increase"
STOP_MAX_ITERATIONS = "max_iterations"
STOP_FIXED_POINT = "fixed_point"


@dataclass(frozen=True)
class SippOptions:
    max_inner: int = 50
    keep_trace: bool = False


@dataclass(frozen=True)
class SippIterate:
    """Intermediate sets and fits of one pursuit iteration (for instrumentation)."""

    matched: SupportSet       # top-T matched-filter picks from the residual
    merged: SupportSet        # matched plus previous support
    merged_x: np.ndarray      # LS fit on the merged set
    pruned: SupportSet        # top-T of the merged fit
    informed: SupportSet      # pruned set plus side information
    informed_x: np.ndarray    # LS fit on the informed set
    support: SupportSet       # top-T of the informed fit
    x_hat: np.ndarray         # LS refit on the final support
    residual: np.ndarray


@dataclass(frozen=True)
class SippResult:
    x_hat: np.ndarray
    support: SupportSet
    residual: np.ndarray
    iterations_used: int
    stop_reason: str
    trace: tuple[SippIterate, ...] = field(default=())

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


def _truncate_to_measurements(
    candidate: SupportSet, scores: np.ndarray, m: int
) -> SupportSet:
    """Keep the m candidate indices with the largest matched-filter magnitudes."""
    idx = candidate.to_array()
    order = np.argsort(-np.abs(scores[idx]), kind="stable")
    return SupportSet(idx[order[:m]].tolist())


def sipp_run(
    y: np.ndarray,
    A: np.ndarray,
    sparsity: int,
    side_info: SupportSet | None = None,
    opts: SippOptions | None = None,
) -> SippResult:
    """Run the pursuit until the residual norm stops decreasing or max_inner is hit.

    ``side_info`` must be empty or contain exactly ``sparsity`` indices.  On a
    residual increase the previous (better) iterate is returned;
    ``iterations_used`` counts iterations actually computed, including a
    rejected final one.  An iteration that reproduces the previous support
    exactly is a fixed point of the update and terminates the loop early with
    stop reason "fixed_point"; the output equals what further iterations would
    produce.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or y.shape != (A.shape[0],):
        raise ValueError("measurement vector does not match the matrix")
    m, n = A.shape
    if sparsity < 1 or sparsity > n:
        raise ValueError(f"sparsity {sparsity} out of range for {n} columns")
    side_info = SupportSet() if side_info is None else side_info
    if len(side_info) not in (0, sparsity):
        raise ValueError(
            f"side information must be empty or of size {sparsity}, got {len(side_info)}"
        )
    if side_info and side_info.to_array()[-1] >= n:
        raise ValueError("side-information index out of range")
    opts = opts or SippOptions()

    prev_support = SupportSet()
    prev_x = np.zeros(n)
    prev_residual = y.copy()
    prev_norm = float(np.linalg.norm(y))
    trace: list[SippIterate] = []

    iterations = 0
    stop_reason = STOP_MAX_ITERATIONS
    for _ in range(opts.max_inner):
        iterations += 1
        scores = A.T @ prev_residual
        matched = supp_select(scores, sparsity)
        merged = matched.union(prev_support)
        if len(merged) > m:
            log.warning("merged candidate set (%d) exceeds %d rows; truncating", len(merged), m)
            merged = _truncate_to_measurements(merged, scores, m)
        merged_x = least_squares_on_support(A, y, merged, step="merge fit")
        pruned = supp_select(merged_x, sparsity)
        informed = pruned.union(side_info)
        if len(informed) > m:
            log.warning("informed candidate set (%d) exceeds %d rows; truncating", len(informed), m)
            informed = _truncate_to_measurements(informed, scores, m)
        informed_x = least_squares_on_support(A, y, informed, step="side-information fit")
        support = supp_select(informed_x, sparsity)
        # Refit only when pruning actually dropped indices.
        x_hat = informed_x if support == informed else least_squares_on_support(
            A, y, support, step="final fit"
        )
        residual = y - A @ x_hat
        norm = float(np.linalg.norm(residual))
        if opts.keep_trace:
            trace.append(
                SippIterate(matched, merged, merged_x, pruned, informed, informed_x,
                            support, x_hat, residual)
            )
        if norm > prev_norm:
            stop_reason = STOP_RESIDUAL_INCREASE
            break
        if support == prev_support:
            prev_x, prev_residual, prev_norm = x_hat, residual, norm
            stop_reason = STOP_FIXED_POINT
            break
        prev_support, prev_x, prev_residual, prev_norm = support, x_hat, residual, norm

    return SippResult(prev_x, prev_support, prev_residual, iterations, stop_reason, tuple(trace))


def sp_run(
    y: np.ndarray, A: np.ndarray, sparsity: int, opts: SippOptions | None = None
) -> SippResult:
    """Plain subspace pursuit: the same loop with no side information."""
    return sipp_run(y, A, sparsity, SupportSet(), opts)
