"""Exact max-plus (tropical) scalar and matrix arithmetic.

The semiring is (R ∪ {-inf}, max, +): addition ``oplus`` is max with
neutral element EPS = -inf, multiplication ``otimes`` is ordinary + with
neutral element E = 0.0.  IEEE-754 doubles represent the carrier exactly
for integer-valued inputs, and -inf obeys the null/absorption laws
natively, so no sentinel branching is needed for max.  The product still
short-circuits EPS operands so no float-addition pathology can produce
NaN.

Matrices are immutable dense wrappers over float64 arrays.  All
operations are pure and shape-checked; there is no implicit
broadcasting.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

EPS: float = float("-inf")
E: float = 0.0


class ShapeError(ValueError):
    """Operand dimensions are incompatible."""


class NotInvertibleError(ValueError):
    """Matrix has no max-plus multiplicative inverse."""


def oplus(x: float, y: float) -> float:
    """Semiring addition: max(x, y)."""
    return x if x >= y else y


def otimes(x: float, y: float) -> float:
    """Semiring multiplication: x + y, with EPS absorbing."""
    if x == EPS or y == EPS:
        return EPS
    return x + y


def inverse(x: float) -> float:
    """Multiplicative inverse -x of a finite scalar."""
    if x == EPS:
        raise NotInvertibleError("eps has no multiplicative inverse")
    return -x


def _as_clean_array(entries) -> np.ndarray:
    arr = np.array(entries, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"matrix entries must be 2-dimensional, got ndim={arr.ndim}")
    if np.isnan(arr).any() or np.isposinf(arr).any():
        raise ValueError("matrix entries must lie in R union {-inf}")
    arr.setflags(write=False)
    return arr


class MaxPlusMatrix:
    """Dense rectangular matrix over the max-plus semiring.

    Immutable after construction.  ``A + B`` is entrywise oplus,
    ``A @ B`` the max-plus product (also accepts a 1-D numpy vector on
    the right and returns a 1-D vector), ``A ** p`` the p-th power.
    Equality is exact on values; eps compares equal to eps.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        self._a = _as_clean_array(entries)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "MaxPlusMatrix":
        return cls(arr)

    @classmethod
    def null(cls, rows: int, cols: int | None = None) -> "MaxPlusMatrix":
        """All-eps matrix (the additive zero, written script-E)."""
        if cols is None:
            cols = rows
        return cls(np.full((rows, cols), EPS))

    @classmethod
    def identity(cls, n: int) -> "MaxPlusMatrix":
        """e on the diagonal, eps elsewhere."""
        a = np.full((n, n), EPS)
        np.fill_diagonal(a, E)
        return cls(a)

    @classmethod
    def diag(cls, values: Iterable[float]) -> "MaxPlusMatrix":
        v = np.asarray(list(values), dtype=np.float64)
        n = v.size
        a = np.full((n, n), EPS)
        a[np.arange(n), np.arange(n)] = v
        return cls(a)

    # -- shape and access ---------------------------------------------

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    def __getitem__(self, idx):
        return self._a[idx]

    def to_array(self) -> np.ndarray:
        """Writable copy of the raw entries."""
        return self._a.copy()

    def readonly(self) -> np.ndarray:
        """The underlying read-only array (no copy)."""
        return self._a

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "MaxPlusMatrix") -> "MaxPlusMatrix":
        if not isinstance(other, MaxPlusMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeError(f"cannot add shapes {self.shape} and {other.shape}")
        return MaxPlusMatrix(np.maximum(self._a, other._a))

    def __matmul__(
        self, other: Union["MaxPlusMatrix", np.ndarray]
    ) -> Union["MaxPlusMatrix", np.ndarray]:
        if isinstance(other, MaxPlusMatrix):
            if self.cols != other.rows:
                raise ShapeError(
                    f"cannot multiply shapes {self.shape} and {other.shape}"
                )
            if self.cols == 0:
                return MaxPlusMatrix.null(self.rows, other.cols)
            prod = self._a[:, :, None] + other._a[None, :, :]
            return MaxPlusMatrix(prod.max(axis=1))
        vec = np.asarray(other, dtype=np.float64)
        if vec.ndim != 1 or vec.size != self.cols:
            raise ShapeError(
                f"cannot apply shape {self.shape} to vector of length {vec.size}"
            )
        if self.cols == 0:
            return np.full(self.rows, EPS)
        return matvec(self._a, vec)

    def __pow__(self, p: int) -> "MaxPlusMatrix":
        if self.rows != self.cols:
            raise ShapeError("matrix power requires a square matrix")
        if p < 0:
            raise ValueError("matrix power requires a nonnegative exponent")
        out = MaxPlusMatrix.identity(self.rows)
        for _ in range(p):
            out = out @ self
        return out

    def scale(self, scalar: float) -> "MaxPlusMatrix":
        """Scalar multiplication: add ``scalar`` to every finite entry."""
        if scalar == EPS:
            return MaxPlusMatrix.null(self.rows, self.cols)
        return MaxPlusMatrix(self._a + scalar)

    def diag_inverse(self) -> "MaxPlusMatrix":
        """Inverse of a diagonal matrix with finite diagonal."""
        if self.rows != self.cols:
            raise ShapeError("diagonal inverse requires a square matrix")
        n = self.rows
        d = np.diagonal(self._a)
        if np.isneginf(d).any():
            raise NotInvertibleError("diagonal entry eps has no inverse")
        off = self._a.copy()
        off[np.arange(n), np.arange(n)] = EPS
        if not np.isneginf(off).all():
            raise NotInvertibleError("matrix is not diagonal")
        return MaxPlusMatrix.diag(-d)

    def is_null(self) -> bool:
        return bool(np.isneginf(self._a).all())

    # -- comparison ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaxPlusMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    __hash__ = None

    def __repr__(self) -> str:
        return f"MaxPlusMatrix({self._a.tolist()!r})"


def matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Max-plus matrix-vector product on raw arrays."""
    return (a + v[None, :]).max(axis=1)


def approx_equal(a: MaxPlusMatrix, b: MaxPlusMatrix, tol: float = 1e-9) -> bool:
    """Tolerance comparison for float-valued service times.

    eps entries must match exactly; finite entries may differ by tol.
    """
    if a.shape != b.shape:
        return False
    xa, xb = a.readonly(), b.readonly()
    ea, eb = np.isneginf(xa), np.isneginf(xb)
    if not np.array_equal(ea, eb):
        return False
    fin = ~ea
    return bool(np.all(np.abs(xa[fin] - xb[fin]) <= tol))


# -- text fixture format ----------------------------------------------
# One row per line, whitespace-separated entries, literal token `eps`
# for -inf, decimal numerals otherwise.

EPS_TOKEN = "eps"


def format_scalar(x: float) -> str:
    return EPS_TOKEN if x == EPS else format(x, ".17g")


def parse_scalar(token: str) -> float:
    if token == EPS_TOKEN:
        return EPS
    return float(token)


def format_matrix(m: MaxPlusMatrix) -> str:
    lines = []
    for row in m.readonly():
        lines.append(" ".join(format_scalar(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> MaxPlusMatrix:
    rows = []
    for line in text.strip().splitlines():
        if not line.strip():
            continue
        rows.append([parse_scalar(tok) for tok in line.split()])
    if not rows:
        raise ValueError("empty matrix text")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ShapeError("ragged rows in matrix text")
    return MaxPlusMatrix(rows)
