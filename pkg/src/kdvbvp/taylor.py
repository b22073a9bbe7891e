"""Truncated Taylor-series arithmetic for higher-order derivatives.

A ``Series`` holds coefficients [a_0, ..., a_K] of a_0 + a_1 h + ... + a_K h^K;
all operations truncate at the common order K.  Used to push derivative
towers through determinant and logarithm formulas without symbolic algebra.
"""

from __future__ import annotations

import math

import numpy as np


class Series:
    __slots__ = ("c",)

    def __init__(self, coeffs, order: int | None = None):
        c = np.asarray(coeffs, dtype=float)
        if order is not None:
            if len(c) < order + 1:
                c = np.pad(c, (0, order + 1 - len(c)))
            else:
                c = c[: order + 1]
        self.c = c

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @staticmethod
    def constant(value: float, order: int) -> "Series":
        c = np.zeros(order + 1)
        c[0] = value
        return Series(c)

    @staticmethod
    def variable(value: float, order: int) -> "Series":
        """value + h."""
        c = np.zeros(order + 1)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return Series(c)

    @staticmethod
    def exp_linear(rate: float, x0: float, order: int) -> "Series":
        """exp(rate * (x0 + h)) as a series in h."""
        c = np.empty(order + 1)
        c[0] = math.exp(rate * x0)
        for k in range(1, order + 1):
            c[k] = c[k - 1] * rate / k
        return Series(c)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Series):
            c = self.c.copy()
            c[0] += other
            return Series(c)
        return Series(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Series) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.c * float(other))
        n = len(self.c)
        return Series(np.convolve(self.c, other.c)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series(self.c / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def reciprocal(self) -> "Series":
        if self.c[0] == 0.0:
            raise ZeroDivisionError("series with zero constant term")
        n = len(self.c)
        out = np.zeros(n)
        out[0] = 1.0 / self.c[0]
        for k in range(1, n):
            out[k] = -np.dot(self.c[1 : k + 1], out[k - 1 :: -1]) / self.c[0]
        return Series(out)

    def log(self) -> "Series":
        """log of a series with positive constant term."""
        if self.c[0] <= 0.0:
            raise ValueError("log of series with nonpositive constant term")
        n = len(self.c)
        out = np.zeros(n)
        out[0] = math.log(self.c[0])
        # (log f)' = f'/f  =>  k*out_k = (1/f0) * (k*c_k - sum_{j=1}^{k-1} j*out_j*c_{k-j})
        for k in range(1, n):
            acc = k * self.c[k]
            for j in range(1, k):
                acc -= j * out[j] * self.c[k - j]
            out[k] = acc / (k * self.c[0])
        return Series(out)

    def deriv(self) -> "Series":
        """d/dh, one order shorter."""
        if self.order == 0:
            return Series([0.0])
        return Series(self.c[1:] * np.arange(1, len(self.c)))

    def derivatives(self) -> np.ndarray:
        """[f(x0), f'(x0), ..., f^(K)(x0)] from the Taylor coefficients."""
        return self.c * np.array([math.factorial(k) for k in range(len(self.c))])

    def __repr__(self):
        return f"Series({self.c.tolist()})"


def series_det(matrix: list[list[Series]]) -> Series:
    """Determinant of a square matrix of Series via Gaussian elimination.

    Assumes pivots have nonzero constant terms (true for I + Gram matrices
    with positive entries).
    """
    n = len(matrix)
    a = [row[:] for row in matrix]
    order = a[0][0].order if n else 0
    det = Series.constant(1.0, order)
    for i in range(n):
        # pick the pivot with the largest constant term for stability
        p = max(range(i, n), key=lambda r: abs(a[r][i].c[0]))
        if p != i:
            a[i], a[p] = a[p], a[i]
            det = -det
        det = det * a[i][i]
        inv = a[i][i].reciprocal()
        for r in range(i + 1, n):
            factor = a[r][i] * inv
            for col in range(i + 1, n):
                a[r][col] = a[r][col] - factor * a[i][col]
    return det


def series_solve(matrix: list[list[Series]], rhs: list[Series]) -> list[Series]:
    """Solve A x = b for Series-valued A, b by Gaussian elimination."""
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for i in range(n):
        p = max(range(i, n), key=lambda r: abs(a[r][i].c[0]))
        if p != i:
            a[i], a[p] = a[p], a[i]
        inv = a[i][i].reciprocal()
        for r in range(i + 1, n):
            factor = a[r][i] * inv
            for col in range(i + 1, n + 1):
                a[r][col] = a[r][col] - factor * a[i][col]
    x: list[Series] = [None] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for col in range(i + 1, n):
            acc = acc - a[i][col] * x[col]
        x[i] = acc / a[i][i]
    return x
