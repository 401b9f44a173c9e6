"""Operators as bivariate Laurent kernels and residue-based trace formulas.

A dimension-N operator A with entries a[i, j] (0-based) corresponds to the
kernel sum_{i,j} a[i,j] y^j / x^(i+1).  The formal integral extracts the
coefficient of 1/x, so composition, traces, and graded traces become pure
coefficient bookkeeping; at finite dimension no contour is ever needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as _cartesian

import numpy as np

from . import fock, linalg
from .fock import Statistics, as_statistics


@dataclass
class LaurentPoly:
    """Finite-support Laurent polynomial: map from integer exponent to
    complex coefficient."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {int(e): complex(c) for e, c in self.coeffs.items()
                       if c != 0}

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0.0) + c
        return LaurentPoly(out)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            out = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    out[e1 + e2] = out.get(e1 + e2, 0.0) + c1 * c2
            return LaurentPoly(out)
        return LaurentPoly({e: other * c for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def coefficient(self, exponent):
        return self.coeffs.get(exponent, 0.0 + 0.0j)


def formal_integral(f: LaurentPoly):
    """The algebraic residue: coefficient at x^(-1)."""
    return f.coefficient(-1)


def formal_integral_multi(coeffs, n_vars):
    """Residue in every variable of a multivariate Laurent table
    {exponent tuple: coefficient}: the coefficient at (-1, ..., -1)."""
    return coeffs.get((-1,) * n_vars, 0.0 + 0.0j)


@dataclass
class LaurentKernel:
    """Bivariate kernel sum c[(p, q)] x^p y^q with p in -N..-1, q in 0..N-1."""

    dim: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (p, q), c in self.coeffs.items():
            if c == 0:
                continue
            if not (-self.dim <= p <= -1 and 0 <= q <= self.dim - 1):
                raise ValueError(f"exponent pair ({p}, {q}) outside the "
                                 f"dimension-{self.dim} window")
            clean[(int(p), int(q))] = complex(c)
        self.coeffs = clean


def kernel_of(a):
    """Kernel encoding of a square matrix: entry (i, j) sits at x^-(i+1) y^j."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = {(-(i + 1), j): a[i, j] for i in range(n) for j in range(n)
              if a[i, j] != 0}
    return LaurentKernel(n, coeffs)


def operator_of(kernel: LaurentKernel):
    """Inverse of kernel_of."""
    out = np.zeros((kernel.dim, kernel.dim), dtype=complex)
    for (p, q), c in kernel.coeffs.items():
        out[-p - 1, q] = c
    return out


def d_tensor(n):
    """The identity-pairing kernel (1/x) sum_{i<n} (y/x)^i; reproduces
    polynomials of degree < n under the formal integral."""
    return LaurentKernel(n, {(-(i + 1), i): 1.0 for i in range(n)})


def compose_kernels(a_kernel: LaurentKernel, b_kernel: LaurentKernel):
    """Residue composition in the middle variable; equals kernel_of(A @ B)."""
    if a_kernel.dim != b_kernel.dim:
        raise ValueError("kernel dimensions differ")
    out = {}
    for (pa, qa), ca in a_kernel.coeffs.items():
        for (pb, qb), cb in b_kernel.coeffs.items():
            # z-exponent of the product is qa + pb; the residue keeps -1.
            if qa + pb == -1:
                key = (pa, qb)
                out[key] = out.get(key, 0.0) + ca * cb
    return LaurentKernel(a_kernel.dim, out)


def kernel_apply_poly(kernel: LaurentKernel, poly: LaurentPoly):
    """Formal integral of kernel(u, v) * poly(u) du, a polynomial in v."""
    out = {}
    for (p, q), c in kernel.coeffs.items():
        for e, pc in poly.coeffs.items():
            if p + e == -1:
                out[q] = out.get(q, 0.0) + c * pc
    return LaurentPoly(out)


def residue_trace(a):
    """Trace as the formal integral of the kernel on the diagonal x = y."""
    kern = kernel_of(a)
    acc = {}
    for (p, q), c in kern.coeffs.items():
        acc[p + q] = acc.get(p + q, 0.0) + c
    return formal_integral(LaurentPoly(acc))


def gram_inverse_trace(a, gram: LaurentKernel):
    """Trace recovered from pairings against a non-dual basis pair.

    ``gram`` is the kernel of the basis Gram matrix G; the observable
    pairing data for A is the kernel of G @ A, and composing with the
    kernel of G^{-1} before taking the residue trace undoes the basis.
    """
    a = np.asarray(a, dtype=complex)
    g = operator_of(gram)
    g_inv = np.linalg.inv(g)
    paired = kernel_of(g @ a)
    return residue_trace(operator_of(compose_kernels(kernel_of(g_inv), paired)))


def _multi_pairing_table(a, n, statistics):
    """Multivariate Laurent table of <prod beta(x_i) | A-bar prod alpha(x_i)>
    restricted to the exponent tuples that can carry the residue."""
    a = np.asarray(a, dtype=complex)
    dim = a.shape[0]
    table = {}
    for rows in _cartesian(range(1, dim + 1), repeat=n):
        cols = tuple(r - 1 for r in rows)  # residue pairs x^-r with x^(r-1)
        sub = a[np.ix_([r - 1 for r in rows], cols)]
        if statistics is Statistics.FERMIONIC:
            val = linalg.determinant(sub)
        else:
            val = linalg.permanent(sub)
        key = (-1,) * n
        table[key] = table.get(key, 0.0) + val
    return table


def graded_residue_trace(a, n, statistics):
    """Grade-n trace of the induced operator as an n-fold formal residue of
    the generating-function pairing, divided by n!."""
    statistics = as_statistics(statistics)
    if n == 0:
        return 1.0 + 0.0j
    table = _multi_pairing_table(np.asarray(a, dtype=complex), n, statistics)
    return formal_integral_multi(table, n) / math.factorial(n)


def pairing_table_full(a, n, statistics):
    """Full multivariate Laurent table of the grade-n generating pairing;
    exponential in size, intended for small n and dim."""
    statistics = as_statistics(statistics)
    a = np.asarray(a, dtype=complex)
    dim = a.shape[0]
    table = {}
    for rows in _cartesian(range(1, dim + 1), repeat=n):
        for cols in _cartesian(range(dim), repeat=n):
            sub = a[np.ix_([r - 1 for r in rows], cols)]
            if statistics is Statistics.FERMIONIC:
                val = linalg.determinant(sub)
            else:
                val = linalg.permanent(sub)
            if val == 0:
                continue
            key = tuple(c - r for r, c in zip(rows, cols))
            table[key] = table.get(key, 0.0) + val
    return table
