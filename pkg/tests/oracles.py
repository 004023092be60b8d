"""Independent reference computations shared by the test modules."""

from __future__ import annotations

import math

import numpy as np

# Bernoulli polynomials written out by hand, highest power first.
BERNOULLI_POLY = {
    0: [1.0],
    1: [1.0, -1 / 2],
    2: [1.0, -1.0, 1 / 6],
    3: [1.0, -3 / 2, 1 / 2, 0.0],
    4: [1.0, -2.0, 1.0, 0.0, -1 / 30],
    5: [1.0, -5 / 2, 5 / 3, 0.0, -1 / 6, 0.0],
    6: [1.0, -3.0, 5 / 2, 0.0, -1 / 2, 0.0, 1 / 42],
}


def bern(r, x):
    return np.polyval(BERNOULLI_POLY[r], x)


def k1_lowrank(alpha, x, y):
    return sum(bern(r, x) * bern(r, y) / math.factorial(r) ** 2 for r in range(1, alpha + 1))


def k1(alpha, x, y):
    return k1_lowrank(alpha, x, y) + (-1) ** (alpha + 1) * bern(2 * alpha, np.abs(x - y)) / math.factorial(2 * alpha)


def three_term_e2(alpha, pts, gamma0=1.0, gamma1=1.0, M=1 << 14):
    """Squared worst-case error in one dimension from the generic RKHS identity.

    Integrals of the kernel use the M-point midpoint rule. The double integral
    of the |x - y| part uses that the midpoint differences take the values
    d/M with multiplicity M (d = 0) or 2(M - d), so it costs O(M).
    """
    pts = np.asarray(pts, dtype=np.float64)
    z = (np.arange(M) + 0.5) / M
    low = sum(math.fsum(bern(r, z) / M) ** 2 / math.factorial(r) ** 2 for r in range(1, alpha + 1))
    d = np.arange(M)
    mult = np.where(d == 0, M, 2 * (M - d)).astype(np.float64)
    toe = math.fsum(mult * bern(2 * alpha, d / M)) / M ** 2
    double = gamma0 + gamma1 * (low + (-1) ** (alpha + 1) * toe / math.factorial(2 * alpha))
    single = [gamma0 + gamma1 * math.fsum(k1(alpha, x, z)) / M for x in pts]
    N = len(pts)
    gram = gamma0 + gamma1 * k1(alpha, pts[:, None], pts[None, :])
    return double - 2.0 / N * math.fsum(single) + math.fsum(gram.ravel()) / N ** 2
