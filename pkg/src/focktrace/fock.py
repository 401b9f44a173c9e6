"""Finite-dimensional fermionic and bosonic Fock-space algebra.

The state space is the exterior algebra (fermionic) or the polynomial
algebra (bosonic) over a finite ordered basis e_1..e_N.  Multivectors are
stored as sparse maps from canonical multi-indices to complex coefficients;
basis monomials carry no normalization factors, so a bosonic coefficient is
a plain polynomial coefficient.

Conventions:

* The pairing between the dual algebra and the algebra follows Wick's rule:
  a determinant of single-particle pairings for fermions, a permanent for
  bosons.  Consequently <w^k|v^k> = k! <w|v>^k in the bosonic case.
* The pairing is bilinear (algebraic dual), not sesquilinear.
* ``create(v, x)`` is leftward multiplication v*x.  ``annihilate(w, x)`` is
  fixed by duality against multiplication on the dual side:
  <u|A(w) x> = <w*u|x> for every dual test element u.  For a grade-1 w this
  is the usual interior product / partial derivative.
"""

from __future__ import annotations

from enum import Enum
from itertools import combinations, combinations_with_replacement

import numpy as np

# Coefficients below this magnitude are dropped to keep term maps sparse.
COEFF_FLOOR = 1e-300


class Statistics(str, Enum):
    FERMIONIC = "fermionic"
    BOSONIC = "bosonic"


def as_statistics(value) -> Statistics:
    """Coerce a Statistics value or its string name."""
    if isinstance(value, Statistics):
        return value
    return Statistics(str(value).lower())


def canonicalize(indices, statistics):
    """Sort a multi-index into canonical order, tracking the fermionic sign.

    Returns ``(canonical_tuple, sign)`` where sign is +1, -1, or 0 (a
    repeated fermionic index).  Bosonic indices sort with sign +1.
    """
    statistics = as_statistics(statistics)
    indices = tuple(int(i) for i in indices)
    for i in indices:
        if i < 1:
            raise ValueError(f"basis index {i} out of range (1-based)")
    if statistics is Statistics.BOSONIC:
        return tuple(sorted(indices)), 1
    # Insertion sort, counting transpositions; cheap at the grades used here.
    seq = list(indices)
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(seq, seq[1:]):
        if a == b:
            return tuple(seq), 0
    return tuple(seq), sign


def graded_basis(dim, n, statistics):
    """Lexicographically ordered multi-indices of grade ``n`` on ``dim`` modes."""
    statistics = as_statistics(statistics)
    rng = range(1, dim + 1)
    if statistics is Statistics.FERMIONIC:
        return list(combinations(rng, n))
    return list(combinations_with_replacement(rng, n))


class Multivector:
    """Sparse graded element of the exterior or symmetric algebra.

    ``terms`` maps canonical multi-index tuples to complex coefficients.
    Instances are treated as immutable; all operations return new objects.
    """

    __slots__ = ("statistics", "dim", "terms")

    def __init__(self, statistics, dim, terms=None):
        self.statistics = as_statistics(statistics)
        self.dim = int(dim)
        clean = {}
        for idx, coeff in (terms or {}).items():
            c = complex(coeff)
            if abs(c) <= COEFF_FLOOR:
                continue
            key = tuple(int(i) for i in idx)
            if key and (key[-1] > self.dim or key[0] < 1):
                raise ValueError(f"multi-index {key} out of range for dim {self.dim}")
            clean[key] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def vacuum(cls, statistics, dim):
        return cls(statistics, dim, {(): 1.0})

    @classmethod
    def basis_state(cls, statistics, dim, indices):
        idx, sign = canonicalize(indices, statistics)
        if sign == 0:
            return cls(statistics, dim, {})
        return cls(statistics, dim, {idx: sign})

    @classmethod
    def from_vector(cls, statistics, coeffs):
        """Grade-1 element with the given coefficient vector."""
        coeffs = np.asarray(coeffs, dtype=complex)
        return cls(statistics, coeffs.shape[0],
                   {(i + 1,): c for i, c in enumerate(coeffs)})

    # -- linear structure ----------------------------------------------

    def _check_compatible(self, other):
        if self.statistics is not other.statistics or self.dim != other.dim:
            raise ValueError("statistics/dimension mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        terms = dict(self.terms)
        for idx, c in other.terms.items():
            terms[idx] = terms.get(idx, 0.0) + c
        return Multivector(self.statistics, self.dim, terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        s = complex(scalar)
        return Multivector(self.statistics, self.dim,
                           {idx: s * c for idx, c in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def is_zero(self):
        return not self.terms

    def coefficient(self, indices):
        idx, sign = canonicalize(indices, self.statistics)
        return sign * self.terms.get(idx, 0.0)

    def grades(self):
        return sorted({len(idx) for idx in self.terms})

    def grade_part(self, n):
        return Multivector(self.statistics, self.dim,
                           {idx: c for idx, c in self.terms.items() if len(idx) == n})

    def __repr__(self):
        items = ", ".join(f"{idx}: {c:.4g}" for idx, c in sorted(self.terms.items()))
        return f"Multivector({self.statistics.value}, dim={self.dim}, {{{items}}})"


def wick_pair(w_covectors, v_vectors, statistics):
    """Pairing of factor lists: det (fermionic) or permanent (bosonic) of
    the single-particle pairing matrix <w_i|v_j>.  Empty lists pair to 1."""
    from . import linalg

    statistics = as_statistics(statistics)
    if len(w_covectors) != len(v_vectors):
        raise ValueError("factor lists must have equal length")
    if not w_covectors:
        return 1.0 + 0.0j
    w = np.asarray(w_covectors, dtype=complex)
    v = np.asarray(v_vectors, dtype=complex)
    if w.shape[1] != v.shape[1]:
        raise ValueError("covector/vector dimension mismatch")
    gram = w @ v.T
    if statistics is Statistics.FERMIONIC:
        return linalg.determinant(gram)
    return linalg.permanent(gram)


def _monomial_pairing(p_idx, q_idx, statistics):
    """<e~_P | e_Q> for canonical multi-indices P, Q of equal grade."""
    if p_idx != q_idx:
        return 0.0
    if statistics is Statistics.FERMIONIC:
        return 1.0
    # Permanent of the identity-pattern pairing matrix: product of
    # multiplicity factorials.
    out = 1.0
    run = 1
    for a, b in zip(q_idx, q_idx[1:]):
        run = run + 1 if a == b else 1
        out *= run if run > 1 else 1
    return out


def pair_multivectors(w, v):
    """Bilinear extension of the Wick pairing; cross-grade terms vanish."""
    w._check_compatible(v)
    if len(w.terms) > len(v.terms):
        w, v = v, w  # pairing of canonical monomials is symmetric in the index
    total = 0.0 + 0.0j
    stat = w.statistics
    for idx, cw in w.terms.items():
        cv = v.terms.get(idx)
        if cv is not None:
            total += cw * cv * _monomial_pairing(idx, idx, stat)
    return total


def create(v, x):
    """Leftward multiplication v * x in the algebra."""
    v._check_compatible(x)
    stat = v.statistics
    terms = {}
    for p_idx, c in v.terms.items():
        for q_idx, d in x.terms.items():
            idx, sign = canonicalize(p_idx + q_idx, stat)
            if sign == 0:
                continue
            terms[idx] = terms.get(idx, 0.0) + sign * c * d
    return Multivector(stat, v.dim, terms)


def _annihilate_index(p, idx, statistics):
    """Single-index annihilation on one canonical monomial.

    Yields (coefficient, remaining_index); at most one term fermionic,
    at most one (scaled by multiplicity) bosonic.
    """
    if p not in idx:
        return None
    pos = idx.index(p)
    rest = idx[:pos] + idx[pos + 1:]
    if statistics is Statistics.FERMIONIC:
        return ((-1.0) ** pos, rest)
    return (float(idx.count(p)), rest)


def annihilate(w, x):
    """Dual of multiplication by w on the dual algebra.

    For a monomial w = e~_{p_1} * ... * e~_{p_k} the factors act in order
    p_1 first, which realizes <u|A(w) x> = <w*u|x>.
    """
    w._check_compatible(x)
    stat = w.statistics
    out = {}
    for p_idx, cw in w.terms.items():
        current = {idx: cw * c for idx, c in x.terms.items()}
        for p in p_idx:
            nxt = {}
            for idx, c in current.items():
                hit = _annihilate_index(p, idx, stat)
                if hit is None:
                    continue
                factor, rest = hit
                nxt[rest] = nxt.get(rest, 0.0) + factor * c
            current = nxt
            if not current:
                break
        for idx, c in current.items():
            out[idx] = out.get(idx, 0.0) + c
    return Multivector(stat, w.dim, out)


def induce(rho, n, statistics):
    """Matrix of the second-quantized operator on the grade-n subspace.

    Columns follow the lexicographic graded basis; the entry (I, J) is the
    coefficient of monomial I in the product of rho applied factorwise to
    monomial J.  Fermionic n > dim returns the 0-dimensional operator.
    """
    statistics = as_statistics(statistics)
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("rho must be square")
    dim = rho.shape[0]
    if statistics is Statistics.FERMIONIC and n > dim:
        return np.zeros((0, 0), dtype=complex)
    basis = graded_basis(dim, n, statistics)
    index_of = {idx: i for i, idx in enumerate(basis)}
    columns = [Multivector.from_vector(statistics, rho[:, j]) for j in range(dim)]
    out = np.zeros((len(basis), len(basis)), dtype=complex)
    for col, j_idx in enumerate(basis):
        mv = Multivector.vacuum(statistics, dim)
        for j in reversed(j_idx):
            mv = create(columns[j - 1], mv)
        for idx, c in mv.terms.items():
            out[index_of[idx], col] = c
    return out
