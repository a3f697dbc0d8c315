"""Theoretical toolkit: bound constants, performance bounds, exact restricted
isometry constants, and numerical checkers for the inequalities the bounds
rest on.

All bound formulas are driven by the order-3T restricted isometry constant
delta.  Two variants of the noise constant c are in circulation; both are
implemented and selected through ``c_variant``:

    squared: c = 4 (1 + delta^2) / (1 - delta)^3
    linear:  c = 4 (1 + delta)   / (1 - delta)^3

The squared variant reproduces the published single-node example
coefficients, the linear one the networked examples.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import SupportSet
from .fusion import FusionOutput, assumption_checks
from .pursuit import SippOptions, SippResult, sipp_run
from .signals import SparseSignal

C_VARIANTS = ("squared", "linear")

# Exhaustive RIC enumeration refuses to walk more than this many subsets.
RIC_SUBSET_GUARD = 1_000_000


class RicEnumerationError(ValueError):
    """Raised when exact RIC enumeration would exceed the combinatorial guard."""


@dataclass(frozen=True)
class BoundConstants:
    """Contraction, side-information and noise constants at a given delta."""

    delta: float
    c_variant: str
    a: float
    b: float
    c: float


def bound_constants(delta: float, c_variant: str = "squared") -> BoundConstants:
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    if c_variant not in C_VARIANTS:
        raise ValueError(f"unknown c variant {c_variant!r}")
    one = 1.0 - delta
    a = delta * (1.0 + delta) ** 2 / one**4
    b = (1.0 + delta) / (2.0 * one)
    if c_variant == "squared":
        c = 4.0 * (1.0 + delta**2) / one**3
    else:
        c = 4.0 * (1.0 + delta) / one**3
    return BoundConstants(delta=delta, c_variant=c_variant, a=a, b=b, c=c)


def convergence_root(tol: float = 1e-12) -> float:
    """The delta at which the contraction constant a reaches 1.

    Equivalently the unique root of 1 - 5r + 4r^2 - 5r^3 + r^4 in (0, 1),
    located by bisection (a is strictly increasing on [0, 1)).
    """
    lo, hi = 0.0, 0.9
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bound_constants(mid).a < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _iterations_to_noise_floor(ratio: float | None, rate: float) -> tuple[int | None, bool]:
    """ceil(log(ratio) / log(rate)) clamped to >= 1, with the feasibility of ratio < rate."""
    if ratio is None:
        return None, True
    if not 0.0 < ratio:
        raise ValueError("noise-to-signal ratio must be positive")
    if not ratio < rate < 1.0:
        return None, False
    return max(1, math.ceil(math.log(ratio) / math.log(rate))), True


@dataclass(frozen=True)
class SippBound:
    """Worst-case coefficients for the single-run pursuit with side information."""

    constants: BoundConstants
    feasible: bool                 # a < 1
    l_star_mode: str               # "finite" or "infinite"
    support_si_coeff: float        # multiplies the off-side-information energy
    support_noise_coeff: float     # multiplies the noise norm
    signal_si_coeff: float
    signal_noise_coeff: float
    l_star: int | None = None
    l_star_feasible: bool = True


def sipp_bound(
    constants: BoundConstants,
    l_star_mode: str = "finite",
    noise_to_signal: float | None = None,
) -> SippBound:
    if l_star_mode not in ("finite", "infinite"):
        raise ValueError(f"unknown l_star mode {l_star_mode!r}")
    a, b, c, delta = constants.a, constants.b, constants.c, constants.delta
    if a >= 1.0:
        return SippBound(constants, False, l_star_mode,
                         math.inf, math.inf, math.inf, math.inf)
    support_si = b / (1.0 - a)
    support_noise = (1.0 - a + c) / (1.0 - a) if l_star_mode == "finite" else c / (1.0 - a)
    signal_si = support_si / (1.0 - delta)
    signal_noise = support_noise / (1.0 - delta) + 1.0 / math.sqrt(1.0 - delta)
    l_star, ok = _iterations_to_noise_floor(noise_to_signal, a)
    return SippBound(constants, True, l_star_mode,
                     support_si, support_noise, signal_si, signal_noise, l_star, ok)


@dataclass(frozen=True)
class DippBound:
    """Worst-case noise coefficients for the networked pursuit at convergence."""

    constants: BoundConstants
    a_co: float                    # measured fusion-quality ratio, <= 1
    feasible: bool                 # a < 1 and a_co * b / (1 - a) < 1
    rate: float                    # outer-loop contraction a_co * b / (1 - a)
    support_noise_coeff: float
    signal_noise_coeff: float
    k_star: int | None = None
    k_star_feasible: bool = True


def dipp_bound(
    constants: BoundConstants,
    a_co: float,
    noise_to_signal: float | None = None,
) -> DippBound:
    if a_co < 0.0:
        raise ValueError("a_co must be non-negative")
    a, b, c, delta = constants.a, constants.b, constants.c, constants.delta
    if a >= 1.0:
        return DippBound(constants, a_co, False, math.inf, math.inf, math.inf)
    rate = a_co * b / (1.0 - a)
    if rate >= 1.0:
        return DippBound(constants, a_co, False, rate, math.inf, math.inf)
    gap = 1.0 - a - a_co * b
    support_noise = 1.0 + (1.0 - a + c) / gap
    signal_noise = (1.0 - a + c) / ((1.0 - delta) * gap) + 2.0 / (1.0 - delta)
    k_star, ok = _iterations_to_noise_floor(noise_to_signal, rate)
    return DippBound(constants, a_co, True, rate, support_noise, signal_noise, k_star, ok)


# ---------------------------------------------------------------------------
# Restricted isometry constants
# ---------------------------------------------------------------------------

def _max_spectral_deviation(gram: np.ndarray, subsets: np.ndarray) -> float:
    sub = gram[subsets[:, :, None], subsets[:, None, :]]
    w = np.linalg.eigvalsh(sub)
    return float(np.max(np.maximum(w[:, -1] - 1.0, 1.0 - w[:, 0])))


def ric_exact(A: np.ndarray, s: int, chunk: int = 4096) -> float:
    """Order-s restricted isometry constant by exhaustive subset enumeration.

    delta_s = max over all size-s column subsets S of
    max(lambda_max(G_S) - 1, 1 - lambda_min(G_S)) with G_S the Gram matrix of
    the selected columns.  Guarded: refuses when C(N, s) exceeds
    RIC_SUBSET_GUARD (use ric_sample for a lower bound instead).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"order {s} out of range for {n} columns")
    total = math.comb(n, s)
    if total > RIC_SUBSET_GUARD:
        raise RicEnumerationError(
            f"C({n}, {s}) = {total} subsets exceed the {RIC_SUBSET_GUARD} guard; "
            "use ric_sample for a Monte-Carlo lower bound"
        )
    gram = A.T @ A
    best = 0.0
    block: list[tuple[int, ...]] = []
    for combo in itertools.combinations(range(n), s):
        block.append(combo)
        if len(block) == chunk:
            best = max(best, _max_spectral_deviation(gram, np.array(block, dtype=np.intp)))
            block.clear()
    if block:
        best = max(best, _max_spectral_deviation(gram, np.array(block, dtype=np.intp)))
    return best


def ric_sample(
    A: np.ndarray, s: int, draws: int, rng: np.random.Generator, chunk: int = 4096
) -> float:
    """Monte-Carlo LOWER bound on delta_s from random size-s subsets."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"order {s} out of range for {n} columns")
    if draws < 1:
        raise ValueError("need at least one draw")
    gram = A.T @ A
    best = 0.0
    remaining = draws
    while remaining > 0:
        take = min(chunk, remaining)
        subsets = np.array([rng.permutation(n)[:s] for _ in range(take)], dtype=np.intp)
        best = max(best, _max_spectral_deviation(gram, subsets))
        remaining -= take
    return best


# ---------------------------------------------------------------------------
# Fusion-quality ratio
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ACoRatio:
    value: float
    exact_recovery: bool  # the previous estimate already held the whole support


def _off_support_norm(values: np.ndarray, subset: SupportSet) -> float:
    masked = values.copy()
    if len(subset) > 0:
        masked[subset.to_array()] = 0.0
    return float(np.linalg.norm(masked))


def a_co_measure(
    x_true: SparseSignal, support_estimate: SupportSet, t_si: SupportSet
) -> ACoRatio:
    """Ratio of signal energy missed by the side information to energy missed
    by the estimate it was built from; smaller means fusion helped more."""
    denom = _off_support_norm(x_true.values, support_estimate)
    if denom == 0.0:
        return ACoRatio(0.0, True)
    return ACoRatio(_off_support_norm(x_true.values, t_si) / denom, False)


# ---------------------------------------------------------------------------
# Numerical inequality suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalityCheck:
    name: str
    lhs: float
    rhs: float

    # Inequalities are exact in real arithmetic; allow only rounding slack.
    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-9) + 1e-12

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class LemmaInstance:
    """A pursuit problem with known ground truth, for instrumented bound checks."""

    A: np.ndarray
    y: np.ndarray
    e: np.ndarray
    signal: SparseSignal
    sparsity: int
    side_info: SupportSet
    # Optional fusion context: the estimate the side information was expanded
    # from, and the fusion output itself.
    fusion_prev_support: SupportSet | None = None
    fusion: FusionOutput | None = None


def _gram_checks(
    checks: list[InequalityCheck],
    tag: str,
    A: np.ndarray,
    y: np.ndarray,
    subset: SupportSet,
    x_true: np.ndarray,
    delta: float,
) -> None:
    if len(subset) == 0:
        return
    cols = subset.to_array()
    As = A[:, cols]
    y_norm = float(np.linalg.norm(y))
    checks.append(InequalityCheck(
        f"correlation_energy:{tag}",
        float(np.linalg.norm(As.T @ y)),
        math.sqrt(1.0 + delta) * y_norm,
    ))
    gram = As.T @ As
    coeffs = np.linalg.solve(gram, As.T @ y)
    checks.append(InequalityCheck(
        f"pinv_energy:{tag}",
        float(np.linalg.norm(coeffs)),
        y_norm / math.sqrt(1.0 - delta),
    ))
    u = x_true[cols]
    if np.linalg.norm(u) == 0.0:
        u = np.ones(len(subset))
    u_norm = float(np.linalg.norm(u))
    gu = float(np.linalg.norm(gram @ u))
    checks.append(InequalityCheck(f"gram_lower:{tag}", (1.0 - delta) * u_norm, gu))
    checks.append(InequalityCheck(f"gram_upper:{tag}", gu, (1.0 + delta) * u_norm))
    giu = float(np.linalg.norm(np.linalg.solve(gram, u)))
    checks.append(InequalityCheck(f"gram_inverse_lower:{tag}", u_norm / (1.0 + delta), giu))
    checks.append(InequalityCheck(f"gram_inverse_upper:{tag}", giu, u_norm / (1.0 - delta)))
    # Correlation between the selected columns and the signal living off them.
    x_off = x_true.copy()
    x_off[cols] = 0.0
    checks.append(InequalityCheck(
        f"offsupport_correlation:{tag}",
        float(np.linalg.norm(As.T @ (A @ x_off))),
        delta * float(np.linalg.norm(x_off)),
    ))


def lemma_suite(
    instance: LemmaInstance,
    delta_3t: float,
    result: SippResult | None = None,
) -> list[InequalityCheck]:
    """Evaluate every bound inequality on the iterates of one instrumented run.

    ``delta_3t`` must be the exact order-3T restricted isometry constant of
    the instance matrix and must be below 1 for the bound formulas to apply;
    the checks then hold in exact arithmetic and are verified here with only
    rounding slack.
    """
    if not 0.0 <= delta_3t < 1.0:
        raise ValueError("the bound formulas require delta_3T < 1")
    A = np.asarray(instance.A, dtype=float)
    y = np.asarray(instance.y, dtype=float)
    x = instance.signal.values
    e_norm = float(np.linalg.norm(instance.e))
    delta = delta_3t
    if result is None:
        result = sipp_run(y, A, instance.sparsity, instance.side_info,
                          SippOptions(keep_trace=True))
    if not result.trace:
        raise ValueError("instrumented run recorded no iterations")

    def off(subset: SupportSet) -> float:
        return _off_support_norm(x, subset)

    consts = bound_constants(delta, "squared")
    ratio = (1.0 + delta) / (1.0 - delta)
    noise_ls = 2.0 * e_norm / math.sqrt(1.0 - delta)
    checks: list[InequalityCheck] = []
    prev_support = SupportSet()
    for l, it in enumerate(result.trace, start=1):
        for tag, subset, fit in (
            ("merged", it.merged, it.merged_x),
            ("informed", it.informed, it.informed_x),
            ("support", it.support, it.x_hat),
        ):
            err = float(np.linalg.norm(x - fit))
            checks.append(InequalityCheck(
                f"ls_error:{tag}:{l}",
                err,
                off(subset) / (1.0 - delta) + e_norm / math.sqrt(1.0 - delta),
            ))
            checks.append(InequalityCheck(f"complement_bound:{tag}:{l}", off(subset), err))
            _gram_checks(checks, f"{tag}:{l}", A, y, subset, x, delta)
        checks.append(InequalityCheck(
            f"prune_after_merge:{l}", off(it.pruned), ratio * off(it.merged) + noise_ls
        ))
        checks.append(InequalityCheck(
            f"prune_after_sideinfo:{l}", off(it.support), ratio * off(it.informed) + noise_ls
        ))
        checks.append(InequalityCheck(
            f"matched_filter_merge:{l}",
            off(it.merged),
            2.0 * delta / (1.0 - delta) ** 2 * off(prev_support)
            + 2.0 * math.sqrt(1.0 + delta) / (1.0 - delta) * e_norm,
        ))
        checks.append(InequalityCheck(
            f"support_error_recurrence:{l}",
            off(it.support),
            consts.a * off(prev_support) + consts.b * off(instance.side_info)
            + consts.c * e_norm,
        ))
        prev_support = it.support

    if instance.fusion is not None and instance.fusion_prev_support is not None:
        report = assumption_checks(
            instance.signal,
            instance.fusion_prev_support,
            instance.fusion.i_hat,
            instance.fusion.j_hat,
        )
        if report.expansion_energy_ok:
            checks.append(InequalityCheck(
                "expansion_ratio",
                off(instance.fusion.t_si),
                off(instance.fusion_prev_support),
            ))
    return checks
