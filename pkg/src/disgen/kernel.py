"""Convolution partial tree kernel over GRCT trees, plus its normalization.

``ptk`` sums, over every pair of nodes (one from each tree), the number of
partial-tree fragments the two subtrees share. A fragment rooted at a node is
the node itself or the node plus fragments hung on any ordered subsequence of
its children, so the kernel also counts structures that are not full
subtrees. Two decay factors temper the raw count: ``mu`` per level of depth
and ``lam`` per unit of child-subsequence span, following the efficient
subsequence dynamic program of Moschitti's partial tree kernel. With both at
1.0 (the default) the result is the exact common-fragment count.

Node identity is the (kind, label) pair, so a POS tag never matches an
equally spelled relation or word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grct import GrctNode


class KernelError(Exception):
    pass


@dataclass(frozen=True)
class KernelParams:
    lam: float = 1.0  # decay per unit of child-subsequence span
    mu: float = 1.0  # decay per tree level

    def __post_init__(self) -> None:
        if not (0.0 < self.lam <= 1.0):
            raise KernelError(f"lam must be in (0, 1], got {self.lam}")
        if not (0.0 < self.mu <= 1.0):
            raise KernelError(f"mu must be in (0, 1], got {self.mu}")


def _postorder(root: GrctNode) -> list[GrctNode]:
    out: list[GrctNode] = []

    def walk(node: GrctNode) -> None:
        for c in node.children:
            walk(c)
        out.append(node)

    walk(root)
    return out


def _subsequence_sum(
    c1: list[GrctNode],
    c2: list[GrctNode],
    delta: dict[tuple[int, int], float],
    ids1: dict[int, int],
    ids2: dict[int, int],
    lam: float,
) -> float:
    """Sum over shared ordered child subsequences of the product of child
    deltas, each side weighted by lam^(subsequence span)."""
    m, n = len(c1), len(c2)
    if m == 0 or n == 0:
        return 0.0
    lam2 = lam * lam
    # kmat[i][j] = delta of (i+1)-th child of n1 vs (j+1)-th child of n2
    kmat = [[delta.get((ids1[id(a)], ids2[id(b)]), 0.0) for b in c2] for a in c1]
    if not any(any(row) for row in kmat):
        return 0.0
    total = 0.0
    # dp_p[i][j]: sum over subsequence pairs of length p ending exactly at
    # (i, j), weighted by lam^(span-1) on each side; w = lam-weighted prefix
    # sums of the previous dp so the recursion stays O(m*n) per length.
    w_prev: list[list[float]] | None = None
    for p in range(1, min(m, n) + 1):
        dp = [[0.0] * (n + 1) for _ in range(m + 1)]
        any_nonzero = False
        for i in range(1, m + 1):
            row = kmat[i - 1]
            for j in range(1, n + 1):
                k = row[j - 1]
                if k == 0.0:
                    continue
                if p == 1:
                    d = k
                else:
                    d = k * lam2 * w_prev[i - 1][j - 1]  # type: ignore[index]
                if d != 0.0:
                    dp[i][j] = d
                    total += d
                    any_nonzero = True
        if not any_nonzero:
            break
        if p < min(m, n):
            w = [[0.0] * (n + 1) for _ in range(m + 1)]
            for i in range(1, m + 1):
                wi, wi1, di = w[i], w[i - 1], dp[i]
                for j in range(1, n + 1):
                    wi[j] = di[j] + lam * wi1[j] + lam * wi[j - 1] - lam2 * wi1[j - 1]
            w_prev = w
    return lam2 * total


def ptk(t1: GrctNode, t2: GrctNode, params: KernelParams = KernelParams()) -> float:
    """Partial tree kernel: total weighted count of shared tree fragments."""
    nodes1 = _postorder(t1)
    nodes2 = _postorder(t2)
    ids1 = {id(node): i for i, node in enumerate(nodes1)}
    ids2 = {id(node): i for i, node in enumerate(nodes2)}
    lam, mu = params.lam, params.mu
    lam2 = lam * lam
    delta: dict[tuple[int, int], float] = {}
    total = 0.0
    # children are visited before parents, so child deltas are always ready
    for i, n1 in enumerate(nodes1):
        key1 = (n1.kind, n1.label)
        for j, n2 in enumerate(nodes2):
            if key1 != (n2.kind, n2.label):
                continue
            d = mu * (lam2 + _subsequence_sum(n1.children, n2.children, delta, ids1, ids2, lam))
            delta[(i, j)] = d
            total += d
    return total


def ncptk(t1: GrctNode, t2: GrctNode, params: KernelParams = KernelParams()) -> float:
    """Normalized kernel in [0, 1]; 1.0 exactly when the trees are identical."""
    k11 = ptk(t1, t1, params)
    k22 = ptk(t2, t2, params)
    if k11 <= 0.0 or k22 <= 0.0:
        raise KernelError("self-kernel is zero; cannot normalize")
    value = ptk(t1, t2, params) / math.sqrt(k11 * k22)
    # guard against float overshoot at the boundaries
    return min(1.0, max(0.0, value))
