"""Synchronous distributed pursuit: support exchange, fusion, local re-run.

Round 0 runs the local pursuit at every node with empty side information.
Each later round is a lockstep exchange: every node sends its latest support
estimate to its out-neighbors, votes over the estimates it received plus its
own, expands the vote to a size-T side-information set, and re-runs the local
pursuit.  A node whose residual norm would increase freezes at its previous
(better) estimate but keeps transmitting it so neighbors still benefit.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from .core import SupportSet
from .fusion import FusionOutput, consensus, expansion
from .metrics import support_distortion
from .network import NetworkTopology, is_connected
from .pursuit import SippOptions, SippResult, sipp_run
from .signals import Scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DippOptions:
    max_outer: int = 20
    sipp: SippOptions = field(default_factory=SippOptions)
    consensus_truncation: str = "lexicographic"
    # Compatibility switch: vote with the own estimate from one round earlier
    # instead of the latest one.
    lag_own_estimate: bool = False


@dataclass(frozen=True)
class NodeState:
    result: SippResult          # last accepted pursuit output
    residual_norm: float
    prev_support: SupportSet    # support from one round earlier
    t_si: SupportSet
    j_hat: SupportSet
    frozen: bool
    stop_round: int


@dataclass(frozen=True)
class RoundRecord:
    round_index: int
    node: int
    residual_norm: float
    support_distortion: float
    j_precision: float
    tsi_true_overlap: int
    frozen: bool


@dataclass
class RunTrace:
    records: list[RoundRecord] = field(default_factory=list)
    stop_rounds: tuple[int, ...] = ()

    CSV_HEADER = "round,node,residual_norm,support_distortion,j_precision,tsi_true_overlap,frozen"

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.CSV_HEADER + "\n")
            for r in self.records:
                fh.write(
                    f"{r.round_index},{r.node},{r.residual_norm:.12g},"
                    f"{r.support_distortion:.12g},{r.j_precision:.12g},"
                    f"{r.tsi_true_overlap},{int(r.frozen)}\n"
                )


def _record_round(trace: RunTrace, scenario: Scenario, states: list[NodeState], k: int) -> None:
    for p, state in enumerate(states):
        truth = scenario.signals[p].support
        j_prec = math.nan
        if len(state.j_hat) > 0:
            j_prec = len(state.j_hat.intersection(truth)) / len(state.j_hat)
        trace.records.append(
            RoundRecord(
                round_index=k,
                node=p,
                residual_norm=state.residual_norm,
                support_distortion=support_distortion(truth, state.result.support),
                j_precision=j_prec,
                tsi_true_overlap=len(state.t_si.intersection(truth)),
                frozen=state.frozen,
            )
        )


def _fusion_phase(
    states: list[NodeState], topology: NetworkTopology, sparsity: int, opts: DippOptions
) -> list[FusionOutput | None]:
    """Consensus and expansion at every active node, from a synchronous snapshot."""
    transmitted = [s.result.support for s in states]
    outputs: list[FusionOutput | None] = []
    for p, state in enumerate(states):
        if state.frozen:
            outputs.append(None)
            continue
        own = state.prev_support if opts.lag_own_estimate else transmitted[p]
        neighbors = [transmitted[q] for q in topology.in_neighbors[p]]
        j_hat = consensus(neighbors, own, sparsity, opts.consensus_truncation)
        outputs.append(expansion(j_hat, state.result.x_hat, sparsity))
    return outputs


def _pursuit_phase(
    states: list[NodeState],
    fusions: list[FusionOutput | None],
    scenario: Scenario,
    k: int,
    opts: DippOptions,
) -> list[NodeState]:
    sparsity = scenario.sparsity
    new_states: list[NodeState] = []
    for p, state in enumerate(states):
        fo = fusions[p]
        if state.frozen or fo is None:
            new_states.append(state)
            continue
        result = sipp_run(
            scenario.measurements[p], scenario.matrices[p], sparsity, fo.t_si, opts.sipp
        )
        norm = result.residual_norm
        if norm > state.residual_norm:
            # Residual condition violated: keep the better iterate from round k-1.
            new_states.append(replace(state, frozen=True))
        else:
            new_states.append(
                NodeState(
                    result=result,
                    residual_norm=norm,
                    prev_support=state.result.support,
                    t_si=fo.t_si,
                    j_hat=fo.j_hat,
                    frozen=False,
                    stop_round=k,
                )
            )
    return new_states


def dipp_round(
    states: list[NodeState],
    topology: NetworkTopology,
    scenario: Scenario,
    k: int,
    opts: DippOptions | None = None,
) -> list[NodeState]:
    """One synchronous exchange-fuse-pursue round (k >= 1)."""
    if k < 1:
        raise ValueError("rounds are counted from 1; round 0 is the initialization")
    opts = opts or DippOptions()
    fusions = _fusion_phase(states, topology, scenario.sparsity, opts)
    return _pursuit_phase(states, fusions, scenario, k, opts)


def dipp_run(
    scenario: Scenario,
    topology: NetworkTopology,
    opts: DippOptions | None = None,
) -> tuple[list[SippResult], RunTrace]:
    """Run the distributed pursuit to its stopping round on every node.

    Returns the per-node pursuit results (each node's best accepted iterate)
    and a per-round trace.  Terminates when every node froze, when no node's
    side-information set changed between rounds (a fixed point: further rounds
    would reproduce the same estimates), or at max_outer rounds.
    """
    opts = opts or DippOptions()
    if scenario.node_count != topology.node_count:
        raise ValueError(
            f"scenario has {scenario.node_count} nodes but topology has {topology.node_count}"
        )
    if not is_connected(topology):
        log.warning("topology is not strongly connected; information cannot reach every node")

    sparsity = scenario.sparsity
    states: list[NodeState] = []
    for p in range(scenario.node_count):
        result = sipp_run(
            scenario.measurements[p], scenario.matrices[p], sparsity, SupportSet(), opts.sipp
        )
        states.append(
            NodeState(
                result=result,
                residual_norm=result.residual_norm,
                prev_support=result.support,
                t_si=SupportSet(),
                j_hat=SupportSet(),
                frozen=False,
                stop_round=0,
            )
        )
    trace = RunTrace()
    _record_round(trace, scenario, states, 0)

    for k in range(1, opts.max_outer + 1):
        if all(s.frozen for s in states):
            break
        fusions = _fusion_phase(states, topology, sparsity, opts)
        unchanged = all(
            fo is None or fo.t_si == state.t_si for fo, state in zip(fusions, states)
        )
        if unchanged:
            break
        states = _pursuit_phase(states, fusions, scenario, k, opts)
        _record_round(trace, scenario, states, k)

    trace.stop_rounds = tuple(s.stop_round for s in states)
    return [s.result for s in states], trace
