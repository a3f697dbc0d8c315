"""Correlated sparse-signal ensemble: supports, signals, sensing matrices, noise.

Every random quantity is drawn from a PCG64 stream keyed by an entropy tuple
``(master_seed, tag, node, ...)`` through ``numpy.random.SeedSequence``, so a
scenario is a pure function of its configuration and per-node generation is
order independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SupportSet

# Stream tags (second entropy word) for the per-purpose RNG streams.
_TAG_COMMON = 0
_TAG_INDIV = 1
_TAG_VALUES = 2
_TAG_MATRIX = 3
_TAG_NOISE = 4

SIGNAL_KINDS = ("gaussian", "binary")


def stream(*path: int) -> np.random.Generator:
    """PCG64 generator keyed by an integer entropy path."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=tuple(path))))


@dataclass(frozen=True)
class ScenarioConfig:
    """Dimensions, noise level and seed for one simulated sensor network."""

    N: int
    M: int
    J: int
    I: int
    L: int
    smnr_db: float | None = None  # None means noise-free measurements
    signal_kind: str = "gaussian"
    master_seed: int = 0

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ValueError("dimensions must be positive")
        if self.M >= self.N:
            raise ValueError(f"M={self.M} must be smaller than N={self.N}")
        if self.J < 0 or self.I < 0 or self.J + self.I > self.N:
            raise ValueError("support sizes must be non-negative with J + I <= N")
        if self.L < 1:
            raise ValueError("need at least one node")
        if self.M < self.J + self.I:
            raise ValueError("M must be at least T = J + I")
        if self.signal_kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.signal_kind!r}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    @property
    def T(self) -> int:
        return self.J + self.I

    @property
    def alpha(self) -> float:
        return self.M / self.N


@dataclass(frozen=True)
class SparseSignal:
    """Length-N vector whose nonzeros sit on a common part plus an individual part."""

    values: np.ndarray
    support: SupportSet
    common_part: SupportSet
    individual_part: SupportSet

    def __post_init__(self):
        if self.common_part.intersection(self.individual_part):
            raise ValueError("common and individual support parts must be disjoint")
        if self.support != self.common_part.union(self.individual_part):
            raise ValueError("support must be the union of its parts")
        off = np.ones(self.values.size, dtype=bool)
        if len(self.support) > 0:
            idx = self.support.to_array()
            if idx[-1] >= self.values.size:
                raise ValueError("support index out of range")
            off[idx] = False
        if np.any(self.values[off] != 0.0):
            raise ValueError("values must be zero off the support")


@dataclass(frozen=True)
class Scenario:
    """Per-node signals, matrices, noise and measurements sharing one common support."""

    config: ScenarioConfig
    common_support: SupportSet
    signals: tuple[SparseSignal, ...]
    matrices: tuple[np.ndarray, ...]
    noises: tuple[np.ndarray, ...]
    measurements: tuple[np.ndarray, ...] = field(default=())

    @property
    def node_count(self) -> int:
        return len(self.signals)

    @property
    def sparsity(self) -> int:
        return self.config.T


def _draw_subset(rng: np.random.Generator, candidates: np.ndarray, k: int) -> SupportSet:
    # Fisher-Yates shuffle of the candidate pool, first k entries kept.
    return SupportSet(rng.permutation(candidates)[:k].tolist())


def gen_supports(
    cfg: ScenarioConfig, rng: np.random.Generator
) -> tuple[SupportSet, list[SupportSet]]:
    """Common support J plus one individual part per node, all uniform without replacement."""
    if cfg.J + cfg.I > cfg.N:
        raise ValueError("J + I exceeds the signal dimension")
    common = _draw_subset(rng, np.arange(cfg.N), cfg.J)
    pool = np.setdiff1d(np.arange(cfg.N), common.to_array())
    individuals = [_draw_subset(rng, pool, cfg.I) for _ in range(cfg.L)]
    return common, individuals


def gen_signal(
    common: SupportSet,
    individual: SupportSet,
    kind: str,
    rng: np.random.Generator,
    n: int,
) -> SparseSignal:
    """Sparse signal with i.i.d. N(0,1) nonzeros (gaussian) or all-ones nonzeros (binary)."""
    if kind not in SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}")
    support = common.union(individual)
    values = np.zeros(n)
    if len(support) > 0:
        idx = support.to_array()
        values[idx] = rng.standard_normal(len(support)) if kind == "gaussian" else 1.0
    return SparseSignal(values, support, common, individual)


def gen_matrix(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """m-by-n matrix with N(0, 1/m) entries rescaled to exactly unit-norm columns."""
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    A = rng.standard_normal((m, n)) / math.sqrt(m)
    norms = np.linalg.norm(A, axis=0)
    while np.any(norms == 0.0):  # zero column: probability-zero event, redraw
        dead = np.flatnonzero(norms == 0.0)
        A[:, dead] = rng.standard_normal((m, dead.size)) / math.sqrt(m)
        norms = np.linalg.norm(A, axis=0)
    return A / norms


def gen_noise(
    x: SparseSignal, m: int, smnr_db: float | None, rng: np.random.Generator
) -> np.ndarray:
    """Measurement noise calibrated so E||e||^2 = E||x||^2 / 10^(smnr_db/10).

    The signal power uses the ensemble expectation E||x||^2 = T (unit-power
    nonzeros for both signal kinds), not the realized norm.  ``None`` means
    noise-free and returns exact zeros.
    """
    if smnr_db is None:
        return np.zeros(m)
    sparsity = len(x.support)
    sigma = math.sqrt(sparsity / (10.0 ** (smnr_db / 10.0) * m)) if sparsity else 0.0
    return sigma * rng.standard_normal(m)


def gen_matrix_set(cfg: ScenarioConfig, entropy: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    """One sensing matrix per node, from streams (entropy..., matrix-tag, node)."""
    return tuple(
        gen_matrix(cfg.M, cfg.N, stream(*entropy, _TAG_MATRIX, p)) for p in range(cfg.L)
    )


def gen_data_set(
    cfg: ScenarioConfig,
    matrices: tuple[np.ndarray, ...],
    entropy: tuple[int, ...],
) -> Scenario:
    """Supports, signals, noise and measurements for one data realization."""
    common = _draw_subset(stream(*entropy, _TAG_COMMON), np.arange(cfg.N), cfg.J)
    pool = np.setdiff1d(np.arange(cfg.N), common.to_array())
    signals = []
    noises = []
    measurements = []
    for p in range(cfg.L):
        indiv = _draw_subset(stream(*entropy, _TAG_INDIV, p), pool, cfg.I)
        x = gen_signal(common, indiv, cfg.signal_kind, stream(*entropy, _TAG_VALUES, p), cfg.N)
        e = gen_noise(x, cfg.M, cfg.smnr_db, stream(*entropy, _TAG_NOISE, p))
        signals.append(x)
        noises.append(e)
        measurements.append(matrices[p] @ x.values + e)
    return Scenario(cfg, common, tuple(signals), matrices, tuple(noises), tuple(measurements))


def gen_scenario(cfg: ScenarioConfig, entropy: tuple[int, ...] | None = None) -> Scenario:
    """Full scenario as a pure function of the configuration (or an explicit entropy path)."""
    path = (cfg.master_seed,) if entropy is None else tuple(entropy)
    return gen_data_set(cfg, gen_matrix_set(cfg, path), path)


# ---------------------------------------------------------------------------
# Text dump/load, for debugging.  Line-oriented: one header line, then one
# labelled line of whitespace-separated numbers per array (floats via repr,
# which round-trips float64 exactly).
# ---------------------------------------------------------------------------

_HEADER = "dipp-scenario 1"


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(values, dtype=float).ravel())


def dump_scenario(scenario: Scenario, path: str) -> None:
    cfg = scenario.config
    smnr = "clean" if cfg.smnr_db is None else repr(float(cfg.smnr_db))
    lines = [
        f"{_HEADER} N={cfg.N} M={cfg.M} J={cfg.J} I={cfg.I} L={cfg.L} "
        f"smnr_db={smnr} kind={cfg.signal_kind} seed={cfg.master_seed}",
        "common " + " ".join(str(i) for i in scenario.common_support),
    ]
    for p in range(scenario.node_count):
        sig = scenario.signals[p]
        lines.append(f"node {p}")
        lines.append("indiv " + " ".join(str(i) for i in sig.individual_part))
        lines.append("x " + _fmt(sig.values))
        lines.append("A " + _fmt(scenario.matrices[p]))
        lines.append("e " + _fmt(scenario.noises[p]))
        lines.append("y " + _fmt(scenario.measurements[p]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _expect(label: str, line: str) -> list[str]:
    tokens = line.split()
    if not tokens or tokens[0] != label:
        raise ValueError(f"expected a {label!r} line, got {line[:40]!r}")
    return tokens[1:]


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    head = lines[0].split()
    if head[:2] != _HEADER.split():
        raise ValueError(f"not a scenario file: bad header {lines[0][:40]!r}")
    fields = dict(tok.split("=", 1) for tok in head[2:])
    smnr = None if fields["smnr_db"] == "clean" else float(fields["smnr_db"])
    cfg = ScenarioConfig(
        N=int(fields["N"]),
        M=int(fields["M"]),
        J=int(fields["J"]),
        I=int(fields["I"]),
        L=int(fields["L"]),
        smnr_db=smnr,
        signal_kind=fields["kind"],
        master_seed=int(fields["seed"]),
    )
    common = SupportSet(int(t) for t in _expect("common", lines[1]))
    signals, matrices, noises, measurements = [], [], [], []
    pos = 2
    for p in range(cfg.L):
        if lines[pos].split() != ["node", str(p)]:
            raise ValueError(f"expected node {p} marker, got {lines[pos][:40]!r}")
        indiv = SupportSet(int(t) for t in _expect("indiv", lines[pos + 1]))
        x = np.array([float(t) for t in _expect("x", lines[pos + 2])])
        A = np.array([float(t) for t in _expect("A", lines[pos + 3])]).reshape(cfg.M, cfg.N)
        e = np.array([float(t) for t in _expect("e", lines[pos + 4])])
        y = np.array([float(t) for t in _expect("y", lines[pos + 5])])
        signals.append(SparseSignal(x, common.union(indiv), common, indiv))
        matrices.append(A)
        noises.append(e)
        measurements.append(y)
        pos += 6
    return Scenario(cfg, common, tuple(signals), tuple(matrices), tuple(noises), tuple(measurements))
