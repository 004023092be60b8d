"""Digital nets: generating matrices, point generation and digit interlacing.

A digital net over Z_b with generating matrices C_1, ..., C_s (each n x m)
has b^m points. Point h, with base-b digits h = eta_0 + eta_1 b + ... +
eta_{m-1} b^{m-1}, has j-th coordinate digits C_j (eta_0, ..., eta_{m-1})^T,
read as the fraction sum_i xi_i b^{-i}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from ._sobol_table import MAX_DIM as SOBOL_MAX_DIM
from ._sobol_table import SOBOL_TABLE
from .gf_linalg import GFMatrix, check_base

MAX_INDEX_BITS = 30
FLOAT_BITS = 52


@dataclass(frozen=True)
class GeneratingMatrices:
    """``s`` matrices of shape ``n x m`` over Z_b."""

    base: int
    mats: tuple[GFMatrix, ...]

    def __post_init__(self):
        check_base(self.base)
        if len(self.mats) < 1:
            raise ValueError("need at least one generating matrix")
        shape = self.mats[0].shape
        if shape[0] < 1 or shape[1] < 1:
            raise ValueError("generating matrices must be non-empty")
        for C in self.mats:
            if C.base != self.base:
                raise ValueError("all matrices must share the base")
            if C.shape != shape:
                raise ValueError("all matrices must share the shape n x m")

    @classmethod
    def from_arrays(cls, arrays: Sequence, base: int) -> "GeneratingMatrices":
        return cls(base, tuple(GFMatrix(a, base) for a in arrays))

    @property
    def s(self) -> int:
        return len(self.mats)

    @property
    def n(self) -> int:
        return self.mats[0].rows

    @property
    def m(self) -> int:
        return self.mats[0].cols

    def stacked(self) -> np.ndarray:
        """Array of shape (s, n, m)."""
        return np.stack([C.array for C in self.mats])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratingMatrices):
            return NotImplemented
        return self.base == other.base and self.mats == other.mats

    def __hash__(self) -> int:
        return hash((self.base, self.mats))


@dataclass(frozen=True)
class Coordinate:
    """One coordinate x = sum_i digits[i] * b^-(i+1)."""

    base: int
    digits: tuple[int, ...]

    @property
    def rational(self) -> Fraction:
        num = 0
        for d in self.digits:
            num = num * self.base + d
        return Fraction(num, self.base ** len(self.digits))

    @property
    def value(self) -> float:
        return float(self.rational)


def digits_to_float(digits: np.ndarray, b: int) -> np.ndarray:
    """Convert trailing-axis base-b fraction digits to float64.

    Exact when ``n * log2(b) <= 52``; otherwise rounded (Horner from the
    least significant digit).
    """
    digits = np.asarray(digits)
    n = digits.shape[-1]
    if n * math.log2(b) <= FLOAT_BITS:
        weights = b ** np.arange(n - 1, -1, -1, dtype=np.int64)
        num = digits.astype(np.int64) @ weights
        return num.astype(np.float64) / float(b ** n)
    x = np.zeros(digits.shape[:-1], dtype=np.float64)
    for i in range(n - 1, -1, -1):
        x = (x + digits[..., i]) / b
    return x


class PointSet:
    """Points of a digital net stored as exact base-b digits.

    ``digits`` has shape (N, s, n); ``digits[h, j]`` are the fraction digits
    of coordinate j of point h.
    """

    def __init__(self, base: int, digits: np.ndarray, m: int | None = None):
        self.base = base
        d = np.asarray(digits, dtype=np.uint8 if base <= 256 else np.int64)
        if d.ndim != 3:
            raise ValueError("digits must have shape (N, s, n)")
        d.setflags(write=False)
        self.digits = d
        self.m = m
        self._values: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.digits.shape[0]

    @property
    def s(self) -> int:
        return self.digits.shape[1]

    @property
    def n(self) -> int:
        return self.digits.shape[2]

    def __len__(self) -> int:
        return self.N

    def coordinate(self, h: int, j: int) -> Coordinate:
        return Coordinate(self.base, tuple(int(x) for x in self.digits[h, j]))

    def values(self) -> np.ndarray:
        """Float coordinates, shape (N, s)."""
        if self._values is None:
            v = digits_to_float(self.digits, self.base)
            v.setflags(write=False)
            self._values = v
        return self._values

    def rationals(self) -> list[list[Fraction]]:
        return [[self.coordinate(h, j).rational for j in range(self.s)]
                for h in range(self.N)]


def index_digits(m: int, b: int) -> np.ndarray:
    """Digits (eta_0, ..., eta_{m-1}) of h = 0..b^m-1, shape (b^m, m)."""
    h = np.arange(b ** m, dtype=np.int64)
    return np.stack([(h // b ** i) % b for i in range(m)], axis=1) if m else h[:, None][:, :0]


def generate_points(G: GeneratingMatrices) -> PointSet:
    b, m = G.base, G.m
    if m * math.log2(b) > MAX_INDEX_BITS:
        raise OverflowError(f"b^m = {b}^{m} exceeds 2^{MAX_INDEX_BITS} points")
    eta = index_digits(m, b)
    digits = np.stack([(eta @ C.array.T) % b for C in G.mats], axis=1)
    return PointSet(b, digits, m=m)


def pascal_matrix(size: int, b: int, power: int = 1) -> np.ndarray:
    """Upper-triangular Pascal matrix raised to ``power``, mod b.

    Entry (r, c) is binom(c, r) * power^(c - r) mod b.
    """
    P = np.zeros((size, size), dtype=np.int64)
    for r in range(size):
        for c in range(r, size):
            P[r, c] = (math.comb(c, r) * pow(power, c - r, b)) % b
    return P


def faure_matrices(b: int, s: int, m: int) -> GeneratingMatrices:
    """Faure generating matrices: C_j is the (j-1)-th power of Pascal mod b."""
    b = check_base(b)
    if s < 1 or m < 1:
        raise ValueError("s and m must be positive")
    if b < s:
        raise ValueError(f"Faure construction needs b >= s (b={b}, s={s})")
    return GeneratingMatrices.from_arrays(
        [pascal_matrix(m, b, j) for j in range(s)], b)


def sobol_direction_integers(dim: int, m: int) -> list[int]:
    """Integers m_1..m_m (m_k odd, < 2^k) for Sobol' coordinate ``dim`` (1-based)."""
    if dim == 1:
        return [1] * m
    deg, a, init = SOBOL_TABLE[dim - 2]
    mk = list(init[:m])
    for k in range(deg, m):
        new = mk[k - deg] ^ (mk[k - deg] << deg)
        for i in range(1, deg):
            if (a >> (deg - 1 - i)) & 1:
                new ^= mk[k - i] << i
        mk.append(new)
    return mk


def sobol_matrices(s: int, m: int) -> GeneratingMatrices:
    """Base-2 Sobol' generating matrices (m x m) for the first ``s`` coordinates."""
    if not 1 <= s <= SOBOL_MAX_DIM:
        raise ValueError(f"Sobol' table holds {SOBOL_MAX_DIM} dimensions, got s={s}")
    if not 1 <= m <= 31:
        raise ValueError(f"m must lie in [1, 31], got {m}")
    mats = []
    for j in range(1, s + 1):
        mk = sobol_direction_integers(j, m)
        C = np.zeros((m, m), dtype=np.int64)
        for k in range(1, m + 1):
            # v_k = m_k / 2^k, so digit i of v_k is bit (k - i) of m_k.
            for i in range(1, k + 1):
                C[i - 1, k - 1] = (mk[k - 1] >> (k - i)) & 1
        mats.append(C)
    return GeneratingMatrices.from_arrays(mats, 2)


def sequence_to_net(seq: GeneratingMatrices, m: int) -> GeneratingMatrices:
    """Upper-left m x m blocks of stored digital-sequence matrices."""
    if not 1 <= m <= min(seq.n, seq.m):
        raise ValueError(f"m={m} outside 1..{min(seq.n, seq.m)}")
    return GeneratingMatrices(seq.base, tuple(C.submatrix(m, m) for C in seq.mats))


def interlace(Q: GeneratingMatrices, alpha: int) -> GeneratingMatrices:
    """Digit interlacing of ``alpha * s`` square matrices into ``s`` matrices.

    Row alpha*(h-1)+i of D_j is row h of C_{alpha*(j-1)+i}.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if Q.s % alpha:
        raise ValueError(f"dimension {Q.s} not divisible by alpha={alpha}")
    if Q.n != Q.m:
        raise ValueError("interlacing needs square generating matrices")
    A = Q.stacked()
    s, m = Q.s // alpha, Q.m
    out = []
    for j in range(s):
        block = A[alpha * j:alpha * (j + 1)]           # (alpha, m, m)
        D = block.transpose(1, 0, 2).reshape(alpha * m, m)
        out.append(D)
    return GeneratingMatrices.from_arrays(out, Q.base)


def interlaced_t_bound(t_prime: int, alpha: int, s: int, m: int) -> int:
    """Quality parameter of an interlaced net built from an order-1 (t', m, alpha*s)-net."""
    if not 0 <= t_prime <= m:
        raise ValueError(f"t' must lie in [0, m], got {t_prime}")
    return alpha * min(m, t_prime + (s * (alpha - 1)) // 2)


def write_matrices(G: GeneratingMatrices, path) -> None:
    Path(path).write_text(format_matrices(G))


def format_matrices(G: GeneratingMatrices) -> str:
    lines = [f"{G.base} {G.n} {G.m} {G.s}"]
    for idx, C in enumerate(G.mats):
        if idx:
            lines.append("")
        lines.extend(" ".join(str(int(x)) for x in row) for row in C.array)
    return "\n".join(lines) + "\n"


def parse_matrices(text: str) -> GeneratingMatrices:
    lines = [ln.strip() for ln in text.splitlines()]
    header = lines[0].split()
    if len(header) != 4:
        raise ValueError("header must be 'b n m s'")
    b, n, m, s = map(int, header)
    rows = [ln for ln in lines[1:] if ln]
    if len(rows) != n * s:
        raise ValueError(f"expected {n * s} matrix rows, found {len(rows)}")
    mats = []
    for j in range(s):
        block = [list(map(int, r.split())) for r in rows[j * n:(j + 1) * n]]
        if any(len(r) != m for r in block):
            raise ValueError(f"matrix {j + 1}: every row needs {m} entries")
        mats.append(block)
    return GeneratingMatrices.from_arrays(mats, b)


def read_matrices(path) -> GeneratingMatrices:
    return parse_matrices(Path(path).read_text())
