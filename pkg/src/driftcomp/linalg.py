"""Minimal dense linear-algebra kernel used by the rest of the package.

Everything is float64 and row-major. Values are immutable after
construction (the backing numpy arrays are marked read-only), so
instances can be shared freely between threads.

The least-squares solver deliberately uses the normal equations with a
small ridge guard instead of QR/SVD: every system in this package has at
most a few dozen columns, and the ridge keeps conditioning honest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularMatrixError

__all__ = ["Matrix", "Vector", "mat_vec", "mat_mul", "solve_least_squares"]


def _freeze(arr: np.ndarray, ndim: int, what: str) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C", copy=True)
    if out.ndim != ndim:
        raise DimensionError(f"{what} must be {ndim}-dimensional, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{what} entries must be finite")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Matrix:
    """Dense real matrix; ``data`` is a read-only (rows, cols) float64 array."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data, 2, "Matrix"))

    @classmethod
    def from_flat(cls, flat, rows: int, cols: int) -> "Matrix":
        arr = np.asarray(flat, dtype=np.float64).reshape(rows, cols)
        return cls(arr)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(np.zeros((rows, cols)))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class Vector:
    """Dense real vector; ``data`` is a read-only float64 array."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(self.data, 1, "Vector"))

    @classmethod
    def zeros(cls, n: int) -> "Vector":
        return cls(np.zeros(n))

    @property
    def len(self) -> int:
        return self.data.shape[0]

    def __len__(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, Vector) and np.array_equal(self.data, other.data)


def mat_vec(m: Matrix, v: Vector) -> Vector:
    """result[i] = sum_j m[i, j] * v[j]."""
    if m.cols != len(v):
        raise DimensionError(f"mat_vec: {m.rows}x{m.cols} matrix with length-{len(v)} vector")
    return Vector(m.data @ v.data)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise DimensionError(f"mat_mul: {a.rows}x{a.cols} with {b.rows}x{b.cols}")
    return Matrix(a.data @ b.data)


def solve_least_squares(a: Matrix, b: Matrix, ridge: float = 1e-9) -> Matrix:
    """Minimize ||aX - b||^2_F + ridge * ||X||^2_F via the normal equations.

    Solves (a^T a + ridge*I) X = a^T b with a direct symmetric solve.
    Deterministic; raises SingularMatrixError when the system is rank
    deficient and ridge is zero.
    """
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    if a.rows != b.rows:
        raise DimensionError(f"solve_least_squares: a has {a.rows} rows, b has {b.rows}")
    if a.rows < a.cols:
        raise DimensionError(f"solve_least_squares: underdetermined ({a.rows} rows < {a.cols} cols)")
    gram = a.data.T @ a.data
    if ridge:
        gram = gram + ridge * np.eye(a.cols)
    rhs = a.data.T @ b.data
    try:
        # Cholesky doubles as the positive-definiteness check: a rank
        # deficient gram matrix is only positive semi-definite.
        np.linalg.cholesky(gram)
        x = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        rank = np.linalg.matrix_rank(a.data)
        raise SingularMatrixError(
            f"normal equations are singular: a has rank {rank} < {a.cols} columns "
            "(pass ridge > 0 to regularize)"
        ) from None
    return Matrix(x)
