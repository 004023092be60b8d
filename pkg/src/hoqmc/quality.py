"""Quality measures of digital nets.

Dick metric functions, dual-net enumeration, the minimum Dick metric,
exhaustive verification of the order-alpha (t, m, s)-net property, the
propagation rule and the coefficients of the metric interpolation
inequality. Everything here is exact integer/rational arithmetic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gf_linalg import IncrementalBasis
from .nets import GeneratingMatrices

MAX_DUAL_CANDIDATES = 10 ** 8
DEFAULT_MAX_NODES = 5_000_000


class SearchLimitExceeded(RuntimeError):
    """An exhaustive search would exceed its configured size guard."""


def digit_positions(k: int, b: int) -> list[int]:
    """Positions c (1-based, descending) of the nonzero base-b digits of k."""
    pos = []
    c = 1
    while k:
        k, r = divmod(k, b)
        if r:
            pos.append(c)
        c += 1
    pos.reverse()
    return pos


def mu(alpha: int, k: int, b: int = 2) -> int:
    """Dick metric: sum of the alpha most significant nonzero digit positions of k."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if k < 0:
        raise ValueError("k must be non-negative")
    return sum(digit_positions(k, b)[:alpha])


def mu_vec(alpha: int, k: Sequence[int], b: int = 2) -> int:
    return sum(mu(alpha, kj, b) for kj in k)


def mu1(k: int, b: int) -> int:
    """Number of base-b digits of k (0 for k = 0)."""
    c = 0
    while k:
        k //= b
        c += 1
    return c


@dataclass(frozen=True)
class DualNetElement:
    k: tuple[int, ...]
    base: int

    @property
    def mu1(self) -> int:
        return sum(mu1(kj, self.base) for kj in self.k)

    def mu(self, alpha: int) -> int:
        return mu_vec(alpha, self.k, self.base)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j for j, kj in enumerate(self.k) if kj)

    def is_zero(self) -> bool:
        return not any(self.k)


def dual_candidate_count(b: int, n: int, s: int, budget: int) -> int:
    """Number of k in [0, b^n)^s with mu_1(k) <= budget."""
    per = [1] + [(b - 1) * b ** (l - 1) for l in range(1, min(n, budget) + 1)]
    total = [1]
    for _ in range(s):
        new = [0] * (budget + 1)
        for i, c in enumerate(total):
            for l, d in enumerate(per):
                if i + l <= budget:
                    new[i + l] += c * d
        total = new
    return sum(total)


def _coordinate_table(C: np.ndarray, b: int, L: int):
    """All k < b^L with their mu_1 and syndromes C^T k (as digit rows)."""
    size = b ** L
    k = np.arange(size, dtype=np.int64)
    kd = np.stack([(k // b ** i) % b for i in range(L)], axis=1) if L else np.zeros((1, 0), np.int64)
    syn = (kd @ C[:L]) % b
    level = np.zeros(size, dtype=np.int64)
    for i in range(L):
        level[kd[:, i] != 0] = i + 1
    return k, level, syn


def enumerate_dual(G: GeneratingMatrices, max_mu1: int) -> list[DualNetElement]:
    """All dual-net elements k with k_j < b^n and mu_1(k) <= max_mu1."""
    ks, _ = _enumerate_dual_arrays(G, max_mu1)
    return [DualNetElement(tuple(int(x) for x in row), G.base) for row in ks]


def _enumerate_dual_arrays(G: GeneratingMatrices, budget: int):
    b, n, m, s = G.base, G.n, G.m, G.s
    if budget < 0:
        raise ValueError("budget must be non-negative")
    count = dual_candidate_count(b, n, s, budget)
    if count > MAX_DUAL_CANDIDATES:
        raise SearchLimitExceeded(
            f"{count} dual candidates exceed the limit {MAX_DUAL_CANDIDATES}")
    L = min(budget, n)
    tables = [_coordinate_table(C.array, b, L) for C in G.mats]

    # Partial tuples over the first s-1 coordinates, pruned by budget.
    part_k = np.zeros((1, 0), dtype=np.int64)
    part_mu = np.zeros(1, dtype=np.int64)
    part_syn = np.zeros((1, m), dtype=np.int64)
    for j in range(s - 1):
        k, level, syn = tables[j]
        new_k, new_mu, new_syn = [], [], []
        for lvl in range(L + 1):
            sel = np.nonzero(level == lvl)[0]
            ok = np.nonzero(part_mu + lvl <= budget)[0]
            if sel.size == 0 or ok.size == 0:
                continue
            pi = np.repeat(ok, sel.size)
            si = np.tile(sel, ok.size)
            new_k.append(np.column_stack([part_k[pi], k[si]]))
            new_mu.append(part_mu[pi] + lvl)
            new_syn.append((part_syn[pi] + syn[si]) % b)
        part_k = np.concatenate(new_k)
        part_mu = np.concatenate(new_mu)
        part_syn = np.concatenate(new_syn)

    # Join with the last coordinate on matching (negated) syndromes, one
    # mu_1 level at a time so only budget-feasible pairs are materialised.
    k, level, syn = tables[-1]
    weights = b ** np.arange(m, dtype=np.int64)
    code_last = syn @ weights
    code_need = ((-part_syn) % b) @ weights
    out_k, out_mu = [], []
    for lvl in range(L + 1):
        sel = np.nonzero(level == lvl)[0]
        ok = np.nonzero(part_mu + lvl <= budget)[0]
        if sel.size == 0 or ok.size == 0:
            continue
        order = sel[np.argsort(code_last[sel], kind="stable")]
        sorted_codes = code_last[order]
        need = code_need[ok]
        lo = np.searchsorted(sorted_codes, need, side="left")
        hi = np.searchsorted(sorted_codes, need, side="right")
        counts = hi - lo
        total = int(counts.sum())
        if total == 0:
            continue
        pi = np.repeat(ok, counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        li = order[np.repeat(lo, counts) + offsets]
        out_k.append(np.column_stack([part_k[pi], k[li]]))
        out_mu.append(part_mu[pi] + lvl)
    ks = np.concatenate(out_k)
    mus = np.concatenate(out_mu)
    idx = np.lexsort(ks.T[::-1])
    return ks[idx], mus[idx]


def is_dual(G: GeneratingMatrices, k: Sequence[int]) -> bool:
    b, n = G.base, G.n
    total = np.zeros(G.m, dtype=np.int64)
    for C, kj in zip(G.mats, k):
        kd = np.array([(kj // b ** i) % b for i in range(n)], dtype=np.int64)
        total += kd @ C.array
    return not (total % b).any()


@dataclass(frozen=True)
class DickMetric:
    """Minimum Dick metric over the dual net.

    ``truncated`` is set when the value equals the cap n + 1 coming from the
    always-dual element k_j = b^n rather than from an element with k_j < b^n.
    """

    value: int
    truncated: bool
    cap: int

    def __int__(self) -> int:
        return self.value


def min_dick_metric(G: GeneratingMatrices, alpha: int,
                    search_budget: int | None = None) -> DickMetric:
    b, n = G.base, G.n
    cap = n + 1
    limit = cap - 1 if search_budget is None else min(search_budget, cap - 1)
    budget = 1
    while True:
        budget = min(budget, limit)
        ks, _ = _enumerate_dual_arrays(G, budget)
        best = None
        for row in ks:
            if row.any():
                v = mu_vec(alpha, [int(x) for x in row], b)
                best = v if best is None else min(best, v)
        # Any k with mu_alpha <= budget + 1 has mu_1 <= budget + 1, and only
        # those with mu_1 = budget + 1 are missing, which cannot beat it.
        if best is not None and best <= budget + 1 and best < cap:
            return DickMetric(best, False, cap)
        if cap <= budget + 1:
            return DickMetric(cap, True, cap)
        if budget >= limit:
            raise SearchLimitExceeded(
                f"dual search with mu_1 <= {budget} cannot certify the minimum Dick metric")
        budget *= 2


def _order_alpha_independent(rows: np.ndarray, b: int, alpha: int, budget: int,
                             max_nodes: int) -> bool:
    """DFS over index selections allowed by ``budget``; False on dependence.

    rows has shape (s, n, m). Per coordinate a selection is either a set of
    fewer than alpha indices (weight = their sum) or alpha indices
    c_1 > ... > c_alpha together with every index below c_alpha (weight =
    c_1 + ... + c_alpha). Every admissible selection is contained in one of
    these with the same weight.
    """
    s, n, m = rows.shape
    basis = IncrementalBasis(m, b)
    nodes = 0

    def add(j: int, i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise SearchLimitExceeded(f"order verification exceeded {max_nodes} nodes")
        return basis.add(rows[j, i - 1])

    def coord(j: int, remaining: int) -> bool:
        if j == s:
            return True
        if not coord(j + 1, remaining):
            return False
        return pick(j, remaining, n + 1, 0)

    def pick(j: int, remaining: int, upper: int, v: int) -> bool:
        # choose next index c < upper with c <= remaining
        for c in range(min(upper - 1, remaining), 0, -1):
            snap = basis.snapshot()
            if not add(j, c):
                return False
            if v + 1 == alpha:
                ok = True
                for i in range(c - 1, 0, -1):
                    if not add(j, i):
                        ok = False
                        break
                if not ok:
                    return False
                if not coord(j + 1, remaining - c):
                    return False
            else:
                if not coord(j + 1, remaining - c):
                    return False
                if not pick(j, remaining - c, c, v + 1):
                    return False
            basis.restore(snap)
        return True

    return coord(0, budget)


def verify_order_t(G: GeneratingMatrices, alpha: int, t: int,
                   max_nodes: int = DEFAULT_MAX_NODES) -> bool:
    """Check the order-alpha (t, m, s)-net condition by exhaustive search."""
    m = G.m
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if not 0 <= t <= alpha * m:
        raise ValueError(f"t must lie in [0, {alpha * m}], got {t}")
    if G.n < alpha * m:
        warnings.warn(f"n={G.n} < alpha*m={alpha * m}; deeper rows are treated as zero",
                      stacklevel=2)
    budget = alpha * m - t
    if budget < 1:
        return True
    return _order_alpha_independent(G.stacked(), G.base, alpha, budget, max_nodes)


def exact_t_value(G: GeneratingMatrices, alpha: int,
                  max_nodes: int = DEFAULT_MAX_NODES) -> int:
    """Smallest t for which ``verify_order_t`` holds (binary search)."""
    lo, hi = 0, alpha * G.m
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while lo < hi:
            mid = (lo + hi) // 2
            if verify_order_t(G, alpha, mid, max_nodes):
                hi = mid
            else:
                lo = mid + 1
    return lo


def propagate_t(t: int, alpha: int, alpha_prime: int) -> int:
    """t-value of an order-alpha net regarded as an order-alpha' net."""
    if not 1 <= alpha_prime < alpha:
        raise ValueError(f"need 1 <= alpha' < alpha, got alpha'={alpha_prime}, alpha={alpha}")
    if t < 0:
        raise ValueError("t must be non-negative")
    return -((-t * alpha_prime) // alpha)


@dataclass(frozen=True)
class InterpolationCoeffs:
    A: Fraction
    B: Fraction


def interpolation_coeffs(alpha: int, beta: int) -> InterpolationCoeffs:
    """A = (alpha-1)/(beta-1), B = (beta-alpha)/(beta-1); alpha=beta gives (1, 0)."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if beta < alpha:
        raise ValueError("beta must be >= alpha")
    return InterpolationCoeffs(Fraction(alpha - 1, beta - 1), Fraction(beta - alpha, beta - 1))


def interpolation_holds(k: int, alpha: int, beta: int, b: int) -> bool:
    """(beta-1) mu_alpha(k) >= (alpha-1) mu_beta(k) + (beta-alpha) mu_1(k)."""
    pos = digit_positions(k, b)
    ma, mb, m1 = sum(pos[:alpha]), sum(pos[:beta]), sum(pos[:1])
    return (beta - 1) * ma >= (alpha - 1) * mb + (beta - alpha) * m1


def dual_shape_counts(G: GeneratingMatrices, budget: int) -> dict[tuple[int, ...], int]:
    """Count enumerated dual elements by their per-coordinate mu_1 profile."""
    ks, _ = _enumerate_dual_arrays(G, budget)
    out: dict[tuple[int, ...], int] = {}
    for row in ks:
        shape = tuple(mu1(int(x), G.base) for x in row)
        out[shape] = out.get(shape, 0) + 1
    return out


def dual_count_bound(b: int, shape: Sequence[int], delta1: int) -> int:
    """Upper bound on dual elements with mu_1(k_j) = l_j (l_j >= 1 on its support)."""
    u = sum(1 for l in shape if l)
    total = sum(shape)
    if total < delta1:
        return 0
    return (b - 1) ** u * b ** max(0, total - (delta1 + u - 1))

