"""Construction of small certified instances for the inequality suite.

Exact restricted-isometry constants are only enumerable for small column
counts, and at those sizes plain Gaussian matrices are far from isometric.
The builder therefore blends a truncated random orthogonal matrix (nearly
isometric) with a Gaussian perturbation, giving order-3T constants spread
over roughly [0.5, 1.2]; instances at or above 1 fail certification and are
skipped by callers.
"""
from __future__ import annotations

import numpy as np

from dippsim.analysis import LemmaInstance
from dippsim.core import SupportSet
from dippsim.fusion import consensus, expansion
from dippsim.pursuit import sp_run
from dippsim.signals import SparseSignal, stream


def near_isometric_matrix(n, m, blend, rng):
    q = np.linalg.qr(rng.standard_normal((n, n)))[0][:m, :]
    a = (1.0 - blend) * q + blend * rng.standard_normal((m, n)) / np.sqrt(m)
    return a / np.linalg.norm(a, axis=0)


def build_lemma_instance(seed):
    """Three-node mini problem; returns the node-0 instance with fusion context."""
    rng = stream(1000 + seed)
    sparsity = 2 if seed % 2 == 0 else 3
    if sparsity == 2:
        n, m, j_size = (18, 16, 1) if seed % 4 < 2 else (20, 18, 1)
    else:
        n, m, j_size = (16, 15, 2) if seed % 4 < 2 else (18, 17, 2)
    i_size = sparsity - j_size
    blend = (0.0, 0.1, 0.2, 0.3)[seed % 4]
    smnr = (None, 20.0, 10.0)[seed % 3]
    common = SupportSet(rng.permutation(n)[:j_size].tolist())
    pool = np.setdiff1d(np.arange(n), common.to_array())
    nodes = []
    for _ in range(3):
        indiv = SupportSet(rng.permutation(pool)[:i_size].tolist())
        support = common.union(indiv)
        x = np.zeros(n)
        x[support.to_array()] = rng.standard_normal(sparsity)
        signal = SparseSignal(x, support, common, indiv)
        A = near_isometric_matrix(n, m, blend, rng)
        sigma = 0.0 if smnr is None else np.sqrt(sparsity / (10 ** (smnr / 10) * m))
        e = sigma * rng.standard_normal(m)
        nodes.append((signal, A, e, A @ x + e))

    init = [sp_run(y, A, sparsity) for (_, A, _, y) in nodes]
    j_hat = consensus([init[1].support, init[2].support], init[0].support, sparsity)
    fused = expansion(j_hat, init[0].x_hat, sparsity)
    signal, A, e, y = nodes[0]
    return LemmaInstance(
        A=A,
        y=y,
        e=e,
        signal=signal,
        sparsity=sparsity,
        side_info=fused.t_si,
        fusion_prev_support=init[0].support,
        fusion=fused,
    )
