"""Implicit linear equations x = A (x) x (+) b for nilpotent A.

A square matrix A is nilpotent when some power A^p is the all-eps
matrix; the equation then has the unique solution
x = b (+) A b (+) ... (+) A^(p-1) b.  The truncated star sum
E (+) A (+) ... (+) A^(p-1) is also exposed because the tandem-model
builders need it directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MaxPlusMatrix, ShapeError


class NotNilpotentError(ValueError):
    """A is not nilpotent within the search bound; no unique solution."""


@dataclass(frozen=True)
class NilpotencyCertificate:
    """Outcome of a bounded nilpotency search.

    ``index`` is the least p with A^p all-eps, or None when no such p
    exists up to ``bound``.
    """

    index: int | None
    bound: int

    @property
    def nilpotent(self) -> bool:
        return self.index is not None


def nilpotency_index(A: MaxPlusMatrix, bound: int | None = None) -> NilpotencyCertificate:
    """Search for the least p <= bound with A^p = all-eps.

    Power iteration is deliberate: orders stay small here and it
    mirrors the algebraic definition.  A precedence-graph acyclicity
    check would be the asymptotic improvement if ever needed.
    """
    if A.rows != A.cols:
        raise ShapeError("nilpotency is defined for square matrices only")
    if bound is None:
        bound = A.rows
    if bound < 1:
        raise ValueError("bound must be >= 1")
    power = A
    for p in range(1, bound + 1):
        if power.is_null():
            return NilpotencyCertificate(index=p, bound=bound)
        power = power @ A
    return NilpotencyCertificate(index=None, bound=bound)


def star_truncated(A: MaxPlusMatrix, p: int) -> MaxPlusMatrix:
    """Finite star sum E (+) A (+) ... (+) A^(p-1)."""
    if A.rows != A.cols:
        raise ShapeError("star sum is defined for square matrices only")
    if p < 1:
        raise ValueError("truncation order must be >= 1")
    out = MaxPlusMatrix.identity(A.rows)
    power = MaxPlusMatrix.identity(A.rows)
    for _ in range(p - 1):
        power = power @ A
        out = out + power
    return out


def solve_implicit(A: MaxPlusMatrix, b: np.ndarray) -> np.ndarray:
    """Unique solution of x = A (x) x (+) b for nilpotent A.

    Evaluated Horner-style (x <- A x (+) b, repeated p-1 times from
    x = b), which avoids materializing matrix powers and gives the same
    result by distributivity.
    """
    if A.rows != A.cols:
        raise ShapeError("coefficient matrix must be square")
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or b.size != A.rows:
        raise ShapeError(f"right-hand side length {b.size} != order {A.rows}")
    cert = nilpotency_index(A, A.rows)
    if not cert.nilpotent:
        raise NotNilpotentError(
            f"matrix is not nilpotent within bound {A.rows}; solution may not be unique"
        )
    x = b.copy()
    for _ in range(cert.index - 1):
        x = np.maximum(A @ x, b)
    return x
