"""Exact arithmetic over the prime field F_q and dense linear algebra on it.

Scalars are plain Python ints in [0, q); matrices are 2-D numpy int64 arrays
with entries in [0, q).  Everything is exact -- no floating point anywhere --
so rank and dimension checks are decisions, not estimates.

Only prime moduli are supported.  The default modulus is the Mersenne prime
2**31 - 1, large enough that randomized nonzero-certificates succeed with
overwhelming probability while products of two residues still fit in int64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_Q = 2147483647  # 2**31 - 1, prime


class NonPrimeModulus(ValueError):
    """Raised when a field modulus fails the primality test."""


class NoSolution(ArithmeticError):
    """Raised by solve() when the right-hand side is outside the column span."""


class RankDeficient(ArithmeticError):
    """Raised when a full-column-rank matrix was required but not supplied."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldContext:
    """Arithmetic context for the prime field F_q.

    Immutable and safe to share across threads; all methods are pure.
    """

    q: int = DEFAULT_Q

    def __post_init__(self) -> None:
        if not is_prime(self.q):
            raise NonPrimeModulus(f"field modulus must be prime, got {self.q}")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse via Fermat exponentiation a**(q-2)."""
        if a % self.q == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.q - 2, self.q)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.q)

    def rand(self, rng: np.random.Generator, size=None):
        """Uniform element(s) of F_q; int64 array for array sizes."""
        if size is None:
            return int(rng.integers(0, self.q))
        return rng.integers(0, self.q, size=size, dtype=np.int64)

    def rand_nonzero(self, rng: np.random.Generator, size=None):
        """Uniform nonzero element(s) of F_q."""
        if size is None:
            return int(rng.integers(1, self.q))
        return rng.integers(1, self.q, size=size, dtype=np.int64)


def field_new(q: int) -> FieldContext:
    """Create a FieldContext, rejecting non-prime moduli."""
    return FieldContext(q)


def _as_matrix(m, q: int) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a % q


def rank(m, q: int = DEFAULT_Q) -> int:
    """Rank over F_q by exact Gaussian elimination."""
    a = _as_matrix(m, q).copy()
    if a.size == 0:
        return 0
    pivots = np.full(a.shape[0], -1, dtype=np.int64)
    return int(kernels.row_reduce(a, q, pivots))


def solve(a, y, q: int = DEFAULT_Q) -> np.ndarray:
    """Solve A x = y for the unique x, requiring A to have full column rank.

    Raises NoSolution if y is outside the column span of A, RankDeficient if
    the columns of A are linearly dependent.
    """
    mat = _as_matrix(a, q)
    rhs = np.asarray(y, dtype=np.int64) % q
    if rhs.ndim != 1 or rhs.shape[0] != mat.shape[0]:
        raise ValueError("right-hand side must be a vector with one entry per row")
    rows, cols = mat.shape
    aug = np.concatenate([mat, rhs[:, None]], axis=1)
    pivots = np.full(rows, -1, dtype=np.int64)
    r = int(kernels.row_reduce(aug, q, pivots))
    if any(int(pivots[i]) == cols for i in range(r)):
        raise NoSolution("right-hand side is not in the column span")
    if r < cols:
        raise RankDeficient(f"matrix has column rank {r} < {cols}")
    x = np.zeros(cols, dtype=np.int64)
    for i in range(r):
        x[int(pivots[i])] = aug[i, cols]
    return x


def inverse(a, q: int = DEFAULT_Q) -> np.ndarray:
    """Inverse of a square matrix over F_q; RankDeficient if singular."""
    mat = _as_matrix(a, q)
    n_dim = mat.shape[0]
    if mat.shape[1] != n_dim:
        raise ValueError("matrix inverse requires a square matrix")
    aug = np.concatenate([mat, np.eye(n_dim, dtype=np.int64)], axis=1)
    pivots = np.full(n_dim, -1, dtype=np.int64)
    kernels.row_reduce(aug, q, pivots)
    # singular iff some pivot falls in the identity block
    main_rank = sum(1 for i in range(n_dim) if 0 <= int(pivots[i]) < n_dim)
    if main_rank < n_dim:
        raise RankDeficient(f"matrix is singular (rank {main_rank} < {n_dim})")
    return aug[:, n_dim:]


def mat_mul(a, b, q: int = DEFAULT_Q) -> np.ndarray:
    """Exact matrix product over F_q (reduces after every outer product)."""
    ma = _as_matrix(a, q)
    mb = _as_matrix(b, q)
    if ma.shape[1] != mb.shape[0]:
        raise ValueError("inner dimensions do not match")
    out = np.zeros((ma.shape[0], mb.shape[1]), dtype=np.int64)
    for k in range(ma.shape[1]):
        out = (out + ma[:, k, None] * mb[k, None, :]) % q
    return out


def mat_vec(a, x, q: int = DEFAULT_Q) -> np.ndarray:
    """Exact matrix-vector product over F_q."""
    xv = np.asarray(x, dtype=np.int64) % q
    return mat_mul(a, xv[:, None], q)[:, 0]
