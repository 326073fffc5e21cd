"""Truncated matrix-coefficient power series.

Coefficients are exact for the truncated algebra: no approximation enters
beyond floating-point roundoff. Truncation orders are explicit arguments
everywhere, never ambient state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidInput, NotInvertible
from .opcore import CMatrix, as_cmatrix


@dataclass(frozen=True)
class MatrixSeries:
    """Finite list of matrix coefficients c0..cN of an analytic function."""

    coeffs: tuple[CMatrix, ...]
    out_dim: int
    in_dim: int

    def __post_init__(self):
        coeffs = tuple(as_cmatrix(c, rows=self.out_dim, cols=self.in_dim) for c in self.coeffs)
        if not coeffs:
            raise InvalidInput("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, coeffs) -> "MatrixSeries":
        first = as_cmatrix(coeffs[0])
        return cls(tuple(coeffs), first.shape[0], first.shape[1])

    @classmethod
    def zero(cls, out_dim: int, in_dim: int, order: int = 0) -> "MatrixSeries":
        z = np.zeros((out_dim, in_dim), dtype=np.complex128)
        return cls((z,) * (order + 1), out_dim, in_dim)

    @classmethod
    def identity(cls, dim: int, order: int = 0) -> "MatrixSeries":
        coeffs = [np.eye(dim, dtype=np.complex128)]
        coeffs += [np.zeros((dim, dim), dtype=np.complex128)] * order
        return cls(tuple(coeffs), dim, dim)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, n: int) -> CMatrix:
        """n-th coefficient; zero beyond the truncation order."""
        if n < 0:
            raise InvalidInput(f"coefficient index must be nonnegative, got {n}")
        if n <= self.order:
            return self.coeffs[n]
        return np.zeros((self.out_dim, self.in_dim), dtype=np.complex128)

    def eval(self, lam: complex) -> CMatrix:
        """Horner evaluation of the truncated polynomial at ``lam``."""
        acc = np.array(self.coeffs[-1])
        for c in reversed(self.coeffs[:-1]):
            acc = c + lam * acc
        return acc

    def truncate(self, order: int) -> "MatrixSeries":
        """Pad with zeros or drop coefficients so the result has the given order."""
        coeffs = [self.coeff(n) for n in range(order + 1)]
        return MatrixSeries(tuple(coeffs), self.out_dim, self.in_dim)


def add(a: MatrixSeries, b: MatrixSeries, order: int) -> MatrixSeries:
    if (a.out_dim, a.in_dim) != (b.out_dim, b.in_dim):
        raise DimensionMismatch(f"cannot add {a.out_dim}x{a.in_dim} and {b.out_dim}x{b.in_dim} series")
    coeffs = tuple(a.coeff(n) + b.coeff(n) for n in range(order + 1))
    return MatrixSeries(coeffs, a.out_dim, a.in_dim)


def scale(a: MatrixSeries, factor: complex) -> MatrixSeries:
    return MatrixSeries(tuple(factor * c for c in a.coeffs), a.out_dim, a.in_dim)


def mul(a: MatrixSeries, b: MatrixSeries, order: int) -> MatrixSeries:
    """Cauchy product truncated at ``order``."""
    if a.in_dim != b.out_dim:
        raise DimensionMismatch(f"cannot multiply {a.out_dim}x{a.in_dim} by {b.out_dim}x{b.in_dim} series")
    zero = np.zeros((a.out_dim, b.in_dim), dtype=np.complex128)
    coeffs = []
    for n in range(order + 1):
        acc = zero.copy()
        for k in range(n + 1):
            if k <= a.order and n - k <= b.order:
                acc += a.coeffs[k] @ b.coeffs[n - k]
        coeffs.append(acc)
    return MatrixSeries(tuple(coeffs), a.out_dim, b.in_dim)


def inv(a: MatrixSeries, order: int) -> MatrixSeries:
    """Multiplicative inverse, requiring an invertible constant term.

    Coefficients solve ``b_n = -a0^{-1} * sum_{k=1..n} a_k b_{n-k}`` with
    ``b_0 = a0^{-1}``.
    """
    if a.out_dim != a.in_dim:
        raise DimensionMismatch(f"only square series are invertible, got {a.out_dim}x{a.in_dim}")
    d = a.out_dim
    a0 = a.coeffs[0]
    if d == 0:
        return MatrixSeries.zero(0, 0, order)
    svals = np.linalg.svd(a0, compute_uv=False)
    if svals[-1] == 0.0:
        raise NotInvertible("constant term is singular (condition number inf)")
    cond = float(svals[0] / svals[-1])
    try:
        a0_inv = np.linalg.inv(a0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - svd check fires first
        raise NotInvertible(f"constant term is singular (condition number {cond:.3e})") from exc
    out = [a0_inv]
    for n in range(1, order + 1):
        acc = np.zeros((d, d), dtype=np.complex128)
        for k in range(1, n + 1):
            if k <= a.order:
                acc += a.coeffs[k] @ out[n - k]
        out.append(-a0_inv @ acc)
    return MatrixSeries(tuple(out), d, d)


def shift(a: MatrixSeries, k: int) -> MatrixSeries:
    """Multiply by lambda^k, displacing every coefficient upward by ``k``."""
    if k < 0:
        raise InvalidInput(f"shift exponent must be nonnegative, got {k}")
    zero = np.zeros((a.out_dim, a.in_dim), dtype=np.complex128)
    return MatrixSeries((zero,) * k + a.coeffs, a.out_dim, a.in_dim)
