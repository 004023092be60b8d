"""Random digital shifts, RMS worst-case error estimation and error-bound constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kernel import KernelParams, Weights, squared_worst_case_error
from .nets import FLOAT_BITS, GeneratingMatrices, PointSet
from .quality import _enumerate_dual_arrays, interpolation_coeffs, mu_vec


@dataclass(frozen=True)
class DigitalShift:
    """Shift sigma truncated to ``depth`` base-b digits per coordinate; digits has shape (s, d)."""

    base: int
    digits: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.digits)
        if d.ndim != 2:
            raise ValueError("shift digits must have shape (s, d)")
        if d.size and (d.min() < 0 or d.max() >= self.base):
            raise ValueError(f"shift digits must lie in [0, {self.base - 1}]")
        d = d.astype(np.uint8 if self.base <= 256 else np.int64)
        d.setflags(write=False)
        object.__setattr__(self, "digits", d)

    @property
    def s(self) -> int:
        return self.digits.shape[0]

    @property
    def depth(self) -> int:
        return self.digits.shape[1]

    def __add__(self, other: "DigitalShift") -> "DigitalShift":
        if self.base != other.base or self.digits.shape != other.digits.shape:
            raise ValueError("shifts must share base and shape")
        return DigitalShift(self.base, (self.digits.astype(np.int64) + other.digits) % self.base)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DigitalShift):
            return NotImplemented
        return self.base == other.base and np.array_equal(self.digits, other.digits)

    def __hash__(self) -> int:
        return hash((self.base, self.digits.tobytes()))


def default_depth(n: int, b: int) -> int:
    return max(n, math.ceil(FLOAT_BITS / math.log2(b)))


def apply_shift(P: PointSet, sigma: DigitalShift) -> PointSet:
    """Digitwise addition mod b; digits below the point's depth are sigma's."""
    if P.base != sigma.base:
        raise ValueError("base mismatch between points and shift")
    if P.s != sigma.s:
        raise ValueError("dimension mismatch between points and shift")
    if sigma.depth < P.n:
        raise ValueError(f"shift depth {sigma.depth} < point digit depth {P.n}")
    out = np.broadcast_to(sigma.digits, (P.N, P.s, sigma.depth)).astype(np.int64)
    out[:, :, :P.n] = (out[:, :, :P.n] + P.digits) % P.base
    return PointSet(P.base, out, m=P.m)


def shift_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream for shift number ``index`` under ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def sample_shift(seed: int, b: int, s: int, d: int, index: int = 0) -> DigitalShift:
    """I.i.d. uniform base-b digits; identical for identical (seed, index)."""
    rng = shift_rng(seed, index)
    return DigitalShift(b, rng.integers(0, b, size=(s, d)))


@dataclass
class RMSResult:
    estimate: float
    standard_error: float
    per_shift_errors: np.ndarray
    shifts: list[DigitalShift] = field(repr=False, default_factory=list)

    @property
    def mean_square(self) -> float:
        return float(np.mean(self.per_shift_errors ** 2))


def rms_wce_mc(params: KernelParams, P: PointSet, R: int, seed: int,
               depth: int | None = None) -> RMSResult:
    """Monte Carlo estimate of the RMS worst-case error over random digital shifts.

    The standard error maps the sample standard error of e^2 through the
    square root (delta method).
    """
    if R < 2:
        raise ValueError("need at least two shifts")
    d = default_depth(P.n, P.base) if depth is None else depth
    shifts = [sample_shift(seed, P.base, P.s, d, r) for r in range(R)]
    e2 = np.array([squared_worst_case_error(params, apply_shift(P, sig)) for sig in shifts])
    ms = math.fsum(e2) / R
    est = math.sqrt(ms)
    se_ms = float(np.std(e2, ddof=1)) / math.sqrt(R)
    se = se_ms / (2 * est) if est > 0 else 0.0
    return RMSResult(est, se, np.sqrt(e2), shifts)


def best_shift_search(params: KernelParams, P: PointSet, R: int, seed: int,
                      depth: int | None = None,
                      result: RMSResult | None = None) -> tuple[DigitalShift, float]:
    """Shift with the smallest worst-case error among the first R shifts for ``seed``.

    Passing the ``rms_wce_mc`` result of the same sample reuses its errors.
    """
    if R < 1:
        raise ValueError("need at least one shift")
    if result is not None and len(result.shifts) >= R:
        errs, shifts = result.per_shift_errors[:R], result.shifts[:R]
    else:
        d = default_depth(P.n, P.base) if depth is None else depth
        shifts = [sample_shift(seed, P.base, P.s, d, r) for r in range(R)]
        errs = np.array([math.sqrt(squared_worst_case_error(params, apply_shift(P, sig)))
                         for sig in shifts])
    i = int(np.argmin(errs))
    return shifts[i], float(errs[i])


# --- constants of the error bound -------------------------------------------

def _sine(tau: int, b: int, literal: bool) -> float:
    return math.sin(tau / b) if literal else math.sin(math.pi / b)


def constant_C_tau(tau: int, b: int, literal: bool = False) -> float:
    """C_{tau,b}; ``literal`` uses sin(tau/b) in place of sin(pi/b)."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    two_sin = 2 * _sine(tau, b, literal)
    if tau == 1:
        return 1 / two_sin
    return (1 + 1 / b + 1 / (b * (b + 1))) ** (tau - 2) / two_sin ** tau


def constant_D_terms(alpha: int, b: int, literal: bool = False) -> list[float]:
    """The bracketed expression for v = 1..alpha."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    c2a = constant_C_tau(2 * alpha, b, literal)
    out = []
    for v in range(1, alpha + 1):
        acc = sum(constant_C_tau(tau, b, literal) ** 2 / b ** (2 * (tau - v))
                  for tau in range(v, alpha + 1))
        out.append(acc + 2 * c2a / b ** (2 * (alpha - v)))
    return out


def constant_D(alpha: int, b: int, literal: bool = False) -> float:
    return max(constant_D_terms(alpha, b, literal))


def constant_D_maximizer(alpha: int, b: int, literal: bool = False) -> int:
    terms = constant_D_terms(alpha, b, literal)
    return 1 + terms.index(max(terms))


def constant_G(alpha: int, beta: int, b: int, cardinality: int) -> float:
    if beta < 2 * alpha:
        raise ValueError(f"need beta >= 2*alpha, got alpha={alpha}, beta={beta}")
    if cardinality < 1:
        raise ValueError("cardinality must be >= 1")
    B = float(interpolation_coeffs(alpha, beta).B)
    q = b ** (2 * B)
    return (b - 1) ** cardinality * ((q / (q - 1)) ** cardinality
                                     + b * (1 / (q - b)) ** cardinality)


@dataclass(frozen=True)
class BoundConstants:
    alpha: int
    beta: int
    b: int
    t: int
    A: Fraction
    B: Fraction
    t1: int
    D: float
    C_tau: tuple[float, ...]
    G: dict[int, float]
    C: dict[frozenset[int], float]


def _check_bound_args(alpha: int, beta: int, t: int, m: int) -> None:
    if alpha < 2:
        raise ValueError("alpha must be >= 2")
    if beta < 2 * alpha:
        raise ValueError("beta must be >= 2*alpha")
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 <= t <= beta * m:
        raise ValueError(f"t must lie in [0, beta*m] = [0, {beta * m}]")


def bound_constants(alpha: int, beta: int, b: int, t: int, weights: Weights,
                    literal: bool = False) -> BoundConstants:
    coeffs = interpolation_coeffs(alpha, beta)
    t1 = -(-t // beta)
    D = constant_D(alpha, b, literal)
    G, C = {}, {}
    for u, _ in weights.nonempty_subsets():
        q = len(u)
        if q not in G:
            G[q] = constant_G(alpha, beta, b, q)
        C[u] = (b ** (float(coeffs.A) * t + float(coeffs.B) * t1) * D ** (q / 2)
                * math.sqrt(G[q]) * (3 / math.log(b)) ** ((q - 1) / 2))
    ctau = tuple(constant_C_tau(tau, b, literal) for tau in range(1, 2 * alpha + 1))
    return BoundConstants(alpha, beta, b, t, coeffs.A, coeffs.B, t1, D, ctau, G, C)


def theoretical_bound(alpha: int, beta: int, b: int, t: int, m: int, weights: Weights,
                      literal: bool = False) -> float:
    """Upper bound on the RMS worst-case error of a shifted order-beta (t, m, s)-net."""
    _check_bound_args(alpha, beta, t, m)
    consts = bound_constants(alpha, beta, b, t, weights, literal)
    N = float(b) ** m
    logN = m * math.log(b)
    total = math.fsum(math.sqrt(g) * consts.C[u] * logN ** ((len(u) - 1) / 2)
                      for u, g in weights.nonempty_subsets())
    return total / N ** alpha


def dick_weight_profile(alpha: int, b: int, lmax: int) -> np.ndarray:
    """f[l] = sum over k with mu_1(k) = l of b^(-2 mu_alpha(k)), l = 0..lmax (f[0] = 0)."""
    f = np.zeros(lmax + 1)
    if alpha == 1:
        for l in range(1, lmax + 1):
            f[l] = (b - 1) * float(b) ** (-l - 1)
        return f
    # h[c]: sum over digit strings at positions 1..c-1 of b^(-2 * top positions);
    # start from one counted position, where the remaining digits are free.
    h_prev = np.zeros(lmax + 1)
    acc = 0.0
    for c in range(1, lmax + 1):
        h_prev[c] = 1.0 + acc
        acc += (b - 1) * float(b) ** (-c - 1)
    for _ in range(alpha - 2):
        h = np.zeros(lmax + 1)
        acc = 0.0
        for c in range(1, lmax + 1):
            h[c] = 1.0 + acc
            acc += (b - 1) * float(b) ** (-2 * c) * h_prev[c]
        h_prev = h
    for l in range(1, lmax + 1):
        f[l] = (b - 1) * float(b) ** (-2 * l) * h_prev[l]
    return f


def dual_tail_bound(alpha: int, b: int, q: int, L: int) -> float:
    """Bound on sum over k in N^q with mu_1(k) > L of b^(-2 mu_alpha(k))."""
    extra = q * math.ceil(64 / math.log2(b))
    lmax = L + extra
    f = dick_weight_profile(alpha, b, lmax)
    conv = f.copy()
    for _ in range(q - 1):
        conv = np.convolve(conv, f)[:lmax + 1]
    head = math.fsum(conv[L + 1:lmax + 1])
    # remainder: some l_j > lmax / q, with f(l) <= 2 (b-1) b^-l
    x = lmax // q
    tail1 = 2 * (b - 1) * float(b) ** (-x - 1) / (1 - 1 / b)
    F = math.fsum(f) + tail1
    return head + q * F ** (q - 1) * tail1


def mse_upper_bound_bd(params: KernelParams, G: GeneratingMatrices, dual_budget: int,
                       literal: bool = False) -> tuple[float, float]:
    """Dual-net bound on the mean square worst-case error over random shifts.

    Returns (value over dual elements with mu_1 <= budget and k_j < b^n,
    bound on everything left out).
    """
    w = params.weights
    subsets = w.nonempty_subsets()
    if not subsets:
        return 0.0, 0.0
    b, alpha = G.base, params.alpha
    D = constant_D(alpha, b, literal)
    ks, _ = _enumerate_dual_arrays(G, dual_budget)
    per_support: dict[frozenset[int], list[float]] = {}
    for row in ks:
        supp = frozenset(int(j) for j in np.nonzero(row)[0])
        if supp:
            per_support.setdefault(supp, []).append(
                float(b) ** (-2 * mu_vec(alpha, [int(x) for x in row], b)))
    L = min(dual_budget, G.n)
    value, tail = [], []
    for u, g in subsets:
        coef = g * D ** len(u)
        value.append(coef * math.fsum(per_support.get(u, [])))
        tail.append(coef * dual_tail_bound(alpha, b, len(u), L))
    return math.fsum(value), math.fsum(tail)


def binomial_sum_sides(b: float, k: int, t0: int, T: int) -> tuple[float, float]:
    """Partial sum over t0 <= t <= T of b^-t binom(t+k-1, k-1) and its closed-form bound."""
    lhs = math.fsum(b ** -t * math.comb(t + k - 1, k - 1) for t in range(t0, T + 1))
    rhs = b ** -t0 * math.comb(t0 + k - 1, k - 1) * (1 - 1 / b) ** -k
    return lhs, rhs
