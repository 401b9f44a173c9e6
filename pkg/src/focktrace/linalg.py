"""Dense complex linear-algebra primitives: determinant, permanent,
resolvent solves, power traces, and the partition-sum recursions that turn
power traces into elementary/complete symmetric functions.

The permanent dispatches to a compiled Ryser kernel when the extension was
built, otherwise to a pure-Python implementation of the same algorithm;
``PERMANENT_BACKEND`` records which one is active.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from ._ryser import permanent as _permanent_kernel
    PERMANENT_BACKEND = "cython"
except ImportError:  # extension not built
    from ._ryser_py import permanent as _permanent_kernel
    PERMANENT_BACKEND = "python"

# Ryser cost is 2^n * n; beyond this size the exact permanent is not a
# desk-scale computation.
PERMANENT_CAP = 20

# Resolvent solves are rejected when the estimated relative error
# (condition number times machine epsilon) exceeds this.
RESOLVENT_RELATIVE_ERROR_CAP = 1e-6


class SingularResolvent(np.linalg.LinAlgError):
    """(1 +/- rho) is singular (or too ill-conditioned) to invert."""


def _as_square(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    return m


def determinant(m):
    """det(m) by LU with partial pivoting."""
    m = _as_square(m)
    if m.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(m))


def permanent(m):
    """per(m), exact up to round-off.  Size capped at PERMANENT_CAP."""
    m = _as_square(m)
    n = m.shape[0]
    if n > PERMANENT_CAP:
        raise ValueError(f"permanent size {n} exceeds cap {PERMANENT_CAP}")
    if n == 0:
        return 1.0 + 0.0j
    if PERMANENT_BACKEND == "cython":
        return complex(_permanent_kernel(np.ascontiguousarray(m)))
    return complex(_permanent_kernel(m.tolist()))


def resolvent_matrix(rho, sign):
    """(1 + sign*rho) with the sign checked to be +/-1."""
    rho = _as_square(rho)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return np.eye(rho.shape[0], dtype=complex) + sign * rho


def resolvent_apply(rho, sign, v):
    """Solve (1 + sign*rho) x = v.

    Raises SingularResolvent when the system is singular to tolerance,
    the degenerate case of the trace identities.
    """
    m = resolvent_matrix(rho, sign)
    v = np.asarray(v, dtype=complex)
    try:
        cond = np.linalg.cond(m)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond * np.finfo(float).eps > RESOLVENT_RELATIVE_ERROR_CAP:
        raise SingularResolvent(
            f"1 {'+' if sign > 0 else '-'} rho is singular to working tolerance")
    return np.linalg.solve(m, v)


def power_traces(rho, order):
    """[Tr rho, Tr rho^2, ..., Tr rho^order] by repeated multiplication."""
    rho = _as_square(rho)
    if order < 1:
        raise ValueError("order must be >= 1")
    out = np.empty(order, dtype=complex)
    acc = rho.copy()
    out[0] = np.trace(acc)
    for k in range(1, order):
        acc = acc @ rho
        out[k] = np.trace(acc)
    return out


def _partition_multiplicities(n):
    """Yield partitions of n as lists of (part, multiplicity), parts descending."""

    def rec(remaining, max_part):
        if remaining == 0:
            yield []
            return
        for part in range(min(remaining, max_part), 0, -1):
            for mult in range(remaining // part, 0, -1):
                for rest in rec(remaining - mult * part, part - 1):
                    yield [(part, mult)] + rest

    yield from rec(n, n)


def _cycle_sum(powers, n, signed):
    powers = np.asarray(powers, dtype=complex)
    if n == 0:
        return 1.0 + 0.0j
    if len(powers) < n:
        raise ValueError(f"need power traces up to order {n}, got {len(powers)}")
    total = 0.0 + 0.0j
    for partition in _partition_multiplicities(n):
        weight = 1.0
        term = 1.0 + 0.0j
        sign_exp = 0
        for part, mult in partition:
            weight *= math.factorial(mult) * part ** mult
            term *= powers[part - 1] ** mult
            sign_exp += (part - 1) * mult
        if signed and sign_exp % 2:
            term = -term
        total += term / weight
    return total


def elementary_from_power(powers, n):
    """n-th elementary symmetric function of the spectrum from power traces.

    The partition weight carries the permutation-cycle sign
    (-1)^(sum_l (l-1) n_l): a cycle of length l contributes (-1)^(l-1).
    """
    return _cycle_sum(powers, n, signed=True)


def complete_from_power(powers, n):
    """n-th complete homogeneous symmetric function of the spectrum."""
    return _cycle_sum(powers, n, signed=False)


def adjugate(m):
    """Adjugate (transposed cofactor matrix); adj(m) @ m = det(m) * I.

    Cofactor expansion, intended for the small dimensions where the
    singular-resolvent fallback is used.
    """
    m = _as_square(m)
    n = m.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    out = np.empty((n, n), dtype=complex)
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = m[np.ix_(rows != j, rows != i)]
            out[i, j] = (-1) ** (i + j) * determinant(minor)
    return out
