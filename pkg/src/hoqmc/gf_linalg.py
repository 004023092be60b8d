"""Dense linear algebra over the prime field Z_b.

Digits are stored as small unsigned integers in numpy arrays; all
arithmetic is reduced mod b after every operation.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def is_prime(b: int) -> bool:
    if b < 2:
        return False
    i = 2
    while i * i <= b:
        if b % i == 0:
            return False
        i += 1
    return True


def check_base(b: int) -> int:
    b = int(b)
    if not is_prime(b):
        raise ValueError(f"base must be prime, got {b}")
    return b


class GFMatrix:
    """Immutable matrix over Z_b.

    Args:
        entries: 2-D array-like of digits in ``{0, ..., b-1}``.
        base: prime modulus.
    """

    __slots__ = ("base", "_a")

    def __init__(self, entries, base: int):
        self.base = check_base(base)
        a = np.array(entries, dtype=np.int64, copy=True)
        if a.ndim != 2:
            raise ValueError("GFMatrix entries must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= self.base):
            raise ValueError(f"entries must lie in [0, {self.base - 1}]")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def identity(cls, k: int, base: int) -> "GFMatrix":
        return cls(np.eye(k, dtype=np.int64), base)

    @classmethod
    def zeros(cls, rows: int, cols: int, base: int) -> "GFMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), base)

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def row(self, i: int) -> np.ndarray:
        return self._a[i]

    def transpose(self) -> "GFMatrix":
        return GFMatrix(self._a.T, self.base)

    def submatrix(self, rows: int, cols: int) -> "GFMatrix":
        return GFMatrix(self._a[:rows, :cols], self.base)

    def __matmul__(self, other: "GFMatrix") -> "GFMatrix":
        if not isinstance(other, GFMatrix):
            return NotImplemented
        if other.base != self.base:
            raise ValueError("base mismatch")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return GFMatrix((self._a @ other._a) % self.base, self.base)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GFMatrix):
            return NotImplemented
        return self.base == other.base and np.array_equal(self._a, other._a)

    def __hash__(self) -> int:
        return hash((self.base, self._a.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"GFMatrix(base={self.base}, shape={self.shape})"


def _as_digits(v: Iterable[int], b: int) -> np.ndarray:
    a = np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=np.int64)
    if a.ndim != 1:
        raise ValueError("digit vector must be one-dimensional")
    if a.size and (a.min() < 0 or a.max() >= b):
        raise ValueError(f"digits must lie in [0, {b - 1}]")
    return a


def mat_vec_mul(M: GFMatrix, v: Sequence[int]) -> np.ndarray:
    """Return ``M @ v`` with arithmetic mod ``M.base``."""
    x = _as_digits(v, M.base)
    if x.shape[0] != M.cols:
        raise ValueError(f"vector length {x.shape[0]} != matrix cols {M.cols}")
    return (M.array @ x) % M.base


def row_echelon(a: np.ndarray, b: int) -> tuple[np.ndarray, list[int]]:
    """Gaussian elimination mod b with first-nonzero pivoting.

    Returns the echelon form and the list of pivot columns.
    """
    R = np.array(a, dtype=np.int64) % b
    nrows, ncols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        inv = pow(int(R[r, c]), -1, b)
        R[r] = (R[r] * inv) % b
        below = R[r + 1:, c]
        if below.any():
            R[r + 1:] = (R[r + 1:] - np.outer(below, R[r])) % b
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M: GFMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(row_echelon(M.array, M.base)[1])


def rows_independent(rows: Sequence[Sequence[int]], b: int) -> bool:
    """True iff the given digit vectors are linearly independent over Z_b."""
    b = check_base(b)
    if len(rows) == 0:
        return True
    length = len(rows[0])
    if any(len(r) != length for r in rows):
        raise ValueError("all rows must have the same length")
    a = np.array([_as_digits(r, b) for r in rows], dtype=np.int64)
    if len(rows) > length:
        return False
    return len(row_echelon(a, b)[1]) == len(rows)


class IncrementalBasis:
    """Echelon basis that accepts vectors one at a time.

    ``add`` reports whether the new vector was independent of those already
    held. ``snapshot``/``restore`` support depth-first search with undo.
    """

    def __init__(self, length: int, b: int):
        self.b = b
        self.length = length
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        b = self.b
        w = np.array(v, dtype=np.int64) % b
        for row, p in zip(self._rows, self._pivots):
            c = w[p]
            if c:
                w = (w - c * row) % b
        return w

    def add(self, v: np.ndarray) -> bool:
        w = self.reduce(v)
        nz = np.nonzero(w)[0]
        if nz.size == 0:
            return False
        p = int(nz[0])
        w = (w * pow(int(w[p]), -1, self.b)) % self.b
        self._rows.append(w)
        self._pivots.append(p)
        return True

    def __len__(self) -> int:
        return len(self._rows)

    def snapshot(self) -> int:
        return len(self._rows)

    def restore(self, size: int) -> None:
        del self._rows[size:]
        del self._pivots[size:]
