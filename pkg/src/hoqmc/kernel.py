"""Bernoulli polynomials and the weighted Sobolev kernel of smoothness alpha.

The kernel is

    K(x, y) = sum_u gamma_u prod_{j in u} k_alpha(x_j, y_j),
    k_alpha(x, y) = sum_{r=1}^{alpha} B_r(x) B_r(y) / (r!)^2
                    + (-1)^(alpha+1) B_{2 alpha}(|x - y|) / (2 alpha)!.

Each one-dimensional factor integrates to zero in either argument: the
first part because int_0^1 B_r = 0 for r >= 1, the second because
B_{2 alpha}(1 - z) = B_{2 alpha}(z), so int_0^1 B_{2 alpha}(|x - y|) dy =
int_0^1 B_{2 alpha}. Hence int K(x, y) dy = gamma_empty, int int K = gamma_empty,
and the squared worst-case error of an equal-weight rule collapses to

    e^2 = N^-2 sum_{x, x' in P} sum_{u nonempty} gamma_u prod_{j in u} k_alpha(x_j, x'_j).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

ALPHA_MAX = 10
BLOCK_ELEMENTS = 1 << 21


class BernoulliTable:
    """Exact coefficients of B_0, ..., B_R (ascending powers of x)."""

    def __init__(self, max_degree: int):
        if max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        self.max_degree = max_degree
        numbers = [Fraction(1)]
        for n in range(1, max_degree + 1):
            # sum_{k=0}^{n} binom(n+1, k) B_k = 0
            acc = sum(math.comb(n + 1, k) * numbers[k] for k in range(n))
            numbers.append(-acc / (n + 1))
        self.numbers = tuple(numbers)
        coeffs = []
        for r in range(max_degree + 1):
            c = [Fraction(0)] * (r + 1)
            for k in range(r + 1):
                c[r - k] = math.comb(r, k) * numbers[k]
            coeffs.append(tuple(c))
        self.coeffs: tuple[tuple[Fraction, ...], ...] = tuple(coeffs)
        self._float = tuple(np.array([float(x) for x in c]) for c in coeffs)

    def _check(self, r: int) -> None:
        if not 0 <= r <= self.max_degree:
            raise ValueError(f"degree {r} outside table range 0..{self.max_degree}")

    def exact(self, r: int, x) -> Fraction:
        self._check(r)
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs[r]):
            acc = acc * x + c
        return acc

    def __call__(self, r: int, x):
        """Float evaluation; accepts scalars or arrays."""
        self._check(r)
        c = self._float[r]
        x = np.asarray(x, dtype=np.float64)
        acc = np.full_like(x, c[-1])
        for coef in c[-2::-1]:
            acc = acc * x + coef
        return acc


BERNOULLI = BernoulliTable(2 * ALPHA_MAX)


def bernoulli(r: int, x) -> float:
    """B_r(x) evaluated exactly in rationals, rounded once to float."""
    if not 0 <= float(x) <= 1:
        raise ValueError("x must lie in [0, 1]")
    return float(BERNOULLI.exact(r, x))


def _check_alpha(alpha: int) -> None:
    if not 1 <= alpha <= ALPHA_MAX:
        raise ValueError(f"alpha must lie in 1..{ALPHA_MAX}, got {alpha}")


def kernel_1d(alpha: int, x, y):
    """One-dimensional kernel factor; broadcasts over array arguments."""
    _check_alpha(alpha)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape))
    for r in range(1, alpha + 1):
        out += BERNOULLI(r, x) * BERNOULLI(r, y) / math.factorial(r) ** 2
    sign = 1.0 if alpha % 2 else -1.0
    out += sign * BERNOULLI(2 * alpha, np.abs(x - y)) / math.factorial(2 * alpha)
    return out if out.ndim else float(out)


def _subset_key(u: Iterable[int]) -> frozenset[int]:
    return frozenset(int(j) for j in u)


class Weights:
    """Subset weights gamma_u for u in {0, ..., s-1} (0-based coordinates).

    Either product form (gamma_u = prod_{j in u} gamma_j, gamma_empty = 1) or an
    explicit map; subsets missing from the map have weight 0.
    """

    def __init__(self, s: int, *, product: Sequence[float] | None = None,
                 explicit: Mapping[Iterable[int], float] | None = None):
        if (product is None) == (explicit is None):
            raise ValueError("give exactly one of product= or explicit=")
        if s < 1:
            raise ValueError("s must be positive")
        self.s = s
        if product is not None:
            g = tuple(float(x) for x in product)
            if len(g) != s:
                raise ValueError(f"need {s} product weights, got {len(g)}")
            if any(x < 0 for x in g):
                raise ValueError("weights must be non-negative")
            self.product: tuple[float, ...] | None = g
            self.explicit: dict[frozenset[int], float] | None = None
        else:
            ex = {}
            for u, val in explicit.items():
                key = _subset_key(u)
                if any(not 0 <= j < s for j in key):
                    raise ValueError(f"subset {sorted(key)} outside 0..{s - 1}")
                if val < 0:
                    raise ValueError("weights must be non-negative")
                ex[key] = float(val)
            self.product = None
            self.explicit = ex

    @classmethod
    def product_weights(cls, gammas: Sequence[float]) -> "Weights":
        return cls(len(gammas), product=gammas)

    @classmethod
    def uniform(cls, s: int, gamma: float = 1.0) -> "Weights":
        return cls(s, product=[gamma] * s)

    @classmethod
    def from_map(cls, s: int, gammas: Mapping[Iterable[int], float]) -> "Weights":
        return cls(s, explicit=gammas)

    @classmethod
    def from_json(cls, path) -> "Weights":
        """Read ``{"s": s, "gamma": {"1,2": 0.5, ...}}`` with 1-based subsets."""
        data = json.loads(Path(path).read_text())
        s = int(data["s"])
        gam = {}
        for key, val in data["gamma"].items():
            u = [int(t) - 1 for t in key.split(",") if t.strip()]
            gam[frozenset(u)] = float(val)
        return cls(s, explicit=gam)

    @property
    def is_product(self) -> bool:
        return self.product is not None

    def gamma(self, u: Iterable[int]) -> float:
        key = _subset_key(u)
        if self.product is not None:
            return math.prod(self.product[j] for j in key)
        return self.explicit.get(key, 0.0)

    @property
    def gamma_empty(self) -> float:
        return self.gamma(())

    def nonempty_subsets(self) -> list[tuple[frozenset[int], float]]:
        """All nonempty u with gamma_u > 0."""
        if self.product is not None:
            out = []
            for size in range(1, self.s + 1):
                for u in itertools.combinations(range(self.s), size):
                    g = self.gamma(u)
                    if g > 0:
                        out.append((frozenset(u), g))
            return out
        return sorted(((u, g) for u, g in self.explicit.items() if u and g > 0),
                      key=lambda ug: (len(ug[0]), sorted(ug[0])))

    def to_explicit(self) -> "Weights":
        gam = {frozenset(): self.gamma_empty}
        gam.update(dict(self.nonempty_subsets()))
        return Weights(self.s, explicit=gam)

    def scaled(self, c: float) -> "Weights":
        """Multiply every nonempty-subset weight by c; gamma_empty unchanged."""
        ex = self.to_explicit().explicit
        return Weights(self.s, explicit={u: (g if not u else c * g) for u, g in ex.items()})

    def __repr__(self) -> str:
        if self.product is not None:
            return f"Weights(product={list(self.product)})"
        return f"Weights(explicit={ {tuple(sorted(u)): g for u, g in self.explicit.items()} })"


@dataclass(frozen=True)
class KernelParams:
    alpha: int
    weights: Weights

    def __post_init__(self):
        _check_alpha(self.alpha)

    @property
    def s(self) -> int:
        return self.weights.s


def _combine(params: KernelParams, factors: list[np.ndarray]) -> np.ndarray:
    """sum_{u nonempty} gamma_u prod_{j in u} factors[j]."""
    w = params.weights
    if w.is_product:
        # p_j = prod_{i<=j}(1 + g_i k_i) - 1, accumulated without cancellation
        acc = np.zeros_like(factors[0])
        for g, k in zip(w.product, factors):
            if g:
                acc = acc + g * k * (1.0 + acc)
        return acc
    acc = np.zeros_like(factors[0])
    for u, g in w.nonempty_subsets():
        term = np.full_like(factors[0], g)
        for j in u:
            term = term * factors[j]
        acc = acc + term
    return acc


def _as_points(P) -> np.ndarray:
    if hasattr(P, "values"):
        P = P.values()
    X = np.asarray(P, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return X


def kernel(params: KernelParams, x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape[0] != params.s or y.shape[0] != params.s:
        raise ValueError(f"points must have dimension {params.s}")
    factors = [np.asarray(kernel_1d(params.alpha, x[j], y[j])) for j in range(params.s)]
    return params.weights.gamma_empty + float(_combine(params, factors))


def gram_matrix(params: KernelParams, X) -> np.ndarray:
    X = _as_points(X)
    factors = [kernel_1d(params.alpha, X[:, None, j], X[None, :, j]) for j in range(X.shape[1])]
    return params.weights.gamma_empty + _combine(params, factors)


def squared_worst_case_error(params: KernelParams, P) -> float:
    """N^-2 sum over pairs of the nonempty-subset part of the kernel.

    Computed in row blocks; each block sum uses numpy's pairwise summation
    and the block totals are combined with math.fsum.
    """
    X = _as_points(P)
    N, s = X.shape
    if s != params.s:
        raise ValueError(f"point dimension {s} != weights dimension {params.s}")
    if N < 1:
        raise ValueError("empty point set")
    if not params.weights.nonempty_subsets():
        return 0.0
    alpha = params.alpha
    scale = [math.factorial(r) for r in range(alpha + 1)]
    sign = 1.0 if alpha % 2 else -1.0
    # Rank-alpha part of each factor: sum_r B_r(x) B_r(y) / (r!)^2.
    lowrank = [np.stack([BERNOULLI(r, X[:, j]) / scale[r] for r in range(1, alpha + 1)], axis=1)
               for j in range(s)]
    rows = max(1, BLOCK_ELEMENTS // N)
    partial = []
    peak = 0.0
    for start in range(0, N, rows):
        stop = min(N, start + rows)
        factors = []
        for j in range(s):
            diff = np.abs(X[start:stop, None, j] - X[None, :, j])
            f = lowrank[j][start:stop] @ lowrank[j].T
            f += sign / math.factorial(2 * alpha) * BERNOULLI(2 * alpha, diff)
            factors.append(f)
        block = _combine(params, factors)
        peak = max(peak, float(np.abs(block).max()))
        partial.append(float(block.sum()))
    e2 = math.fsum(partial) / (N * N)
    if e2 < 0:
        if -e2 <= 1e-14 * peak:
            return 0.0
        raise ArithmeticError(f"negative squared worst-case error {e2!r}")
    return e2


def worst_case_error(params: KernelParams, P) -> float:
    """Worst-case error of the equal-weight rule on P in the weighted Sobolev space."""
    return math.sqrt(squared_worst_case_error(params, P))


def error_on_representer(params: KernelParams, P, y: Sequence[float]) -> tuple[float, float]:
    """Integration error of f = K(., y) and the bound e(P) * ||f||.

    ||f||^2 = K(y, y) and I(f) = gamma_empty.
    """
    X = _as_points(P)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    factors = [kernel_1d(params.alpha, X[:, j], y[j]) for j in range(params.s)]
    values = params.weights.gamma_empty + _combine(params, factors)
    observed = abs(math.fsum(values) / X.shape[0] - params.weights.gamma_empty)
    bound = worst_case_error(params, X) * math.sqrt(max(kernel(params, y, y), 0.0))
    return observed, bound
