"""Infinite-product evaluation of exponential-insertion trace ratios, the
multi-indexed product convergence criterion with its integral
representation, and the damped truncated-boson cross-check.

The mode space is spanned by a_{-1}, a_{-2}, ... with the pairing
normalization <dual of a_{-m} | a_n> = n delta_{nm}; the generating vector
at an insertion point u has n-th coefficient u^n/n and its dual at v has
v^{-n}, so the single-particle pairing is -log(1 - u/v) truncated to the
mode count.  The shift operator that translates insertion points acts on
those coordinates by the binomial lower-triangular matrix with unit
diagonal.  Damping mode n by t^n makes the shift trace-class with spectral
radius t, and the t -> 1 limit of the damped trace ratio recovers the
infinite product (Abel summation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad as _quad

from . import traces


class DivergentProduct(ValueError):
    """Partial-product shells do not decay; tail estimate is meaningless."""


class VanishingFactor(ValueError):
    """A product factor vanishes in the computed range (pole of the trace)."""


@dataclass
class ProductResult:
    value: complex
    tail_estimate: float
    shells_used: int


@dataclass(frozen=True)
class ConvergenceCheck:
    ok: bool
    failing_q: int | None = None

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# specs


def _complex_tuple(values):
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class BarnesSpec:
    """Numerator/denominator base points a, b and shift directions omega
    for the product over k >= 0 of prod(a + k.omega)/prod(b + k.omega)."""

    a: tuple
    b: tuple
    omega: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", _complex_tuple(self.a))
        object.__setattr__(self, "b", _complex_tuple(self.b))
        object.__setattr__(self, "omega", _complex_tuple(self.omega))
        if len(self.a) != len(self.b):
            raise ValueError(
                "need equally many numerator and denominator points, else the "
                "product factors do not tend to 1")
        if not self.omega:
            raise ValueError("need at least one shift direction")
        if any(w.real >= 0 for w in self.omega):
            raise ValueError("shift directions must have negative real part")

    @property
    def depth(self):
        return len(self.omega)


@dataclass(frozen=True)
class VertexSpec:
    """Insertion points alpha (creation side, integer exponents k) and beta
    (annihilation side, exponents l), with shift gamma per product step."""

    alpha: tuple
    k: tuple
    beta: tuple
    l: tuple
    gamma: complex
    m_start: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", _complex_tuple(self.alpha))
        object.__setattr__(self, "beta", _complex_tuple(self.beta))
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))
        if len(self.alpha) != len(self.k) or len(self.beta) != len(self.l):
            raise ValueError("insertion points and exponents must pair up")
        if sum(self.k) != 0:
            raise ValueError("creation exponents must satisfy sum k_i = 0")
        if sum(self.l) != 0:
            raise ValueError("annihilation exponents must satisfy sum l_j = 0")


@dataclass(frozen=True)
class EtaSpec:
    """Insertions w_j (exponents k_j) against eta-type generating-function
    insertions at z_p (exponents p_k), with ladder spacing 2*hbar."""

    w: tuple
    k: tuple
    z: tuple
    p: tuple
    hbar: complex
    gamma: complex

    def __post_init__(self):
        object.__setattr__(self, "w", _complex_tuple(self.w))
        object.__setattr__(self, "z", _complex_tuple(self.z))
        object.__setattr__(self, "hbar", complex(self.hbar))
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if len(self.w) != len(self.k) or len(self.z) != len(self.p):
            raise ValueError("insertion points and exponents must pair up")
        if sum(self.k) != 0:
            raise ValueError("w-side exponents must satisfy sum k_j = 0")
        if sum(self.p) != 0:
            raise ValueError("z-side exponents must satisfy sum p_k = 0")


@dataclass(frozen=True)
class TruncatedBoson:
    """Mode and degree cutoffs plus the damping t for the regularized trace."""

    n_modes: int
    degree: int
    t: float

    def __post_init__(self):
        if not (0.0 < self.t < 1.0):
            raise ValueError("damping t must lie in (0, 1)")
        if self.n_modes < 1 or self.degree < 1:
            raise ValueError("n_modes and degree must be >= 1")


# ---------------------------------------------------------------------------
# convergence criterion and the multi-indexed product


def barnes_converges(spec: BarnesSpec, tol=1e-12):
    """Power sums of a and b must match for q = 0 .. depth."""
    for q in range(spec.depth + 1):
        sa = sum(x**q for x in spec.a)
        sb = sum(x**q for x in spec.b)
        if abs(sa - sb) > tol * max(1.0, abs(sa), abs(sb)):
            return ConvergenceCheck(False, q)
    return ConvergenceCheck(True, None)


def _extrapolate_to_zero(xs, fs):
    """Lagrange extrapolation of f(x) to x = 0."""
    total = 0.0 + 0.0j
    for i, (xi, fi) in enumerate(zip(xs, fs)):
        weight = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                weight *= xj / (xj - xi)
        total += weight * fi
    return total


def _box_log_sum(spec: BarnesSpec, box):
    """Sum over k in [0, box]^depth of the paired-ratio logs
    log[(a_m + k.w)/(b_m + k.w)].

    Logging the ratios (which tend to 1) rather than the individual factors
    keeps the sum free of the +/- i pi ramps a principal-branch log would
    pick up as the factors march to complex infinity; exp of the sum is the
    boxed partial product either way, but only this form extrapolates.
    """
    grids = np.indices((box + 1,) * spec.depth).reshape(spec.depth, -1)
    shift = sum(np.asarray(w) * grids[i] for i, w in enumerate(spec.omega))
    total = 0.0 + 0.0j
    for num, den in zip(spec.a, spec.b):
        top = num + shift
        bottom = den + shift
        if np.any(np.abs(top) < 1e-13):
            raise VanishingFactor("numerator factor vanishes in range")
        if np.any(np.abs(bottom) < 1e-13):
            raise VanishingFactor("denominator factor vanishes in range")
        total += np.sum(np.log(top / bottom))
    return total


def barnes_product(spec: BarnesSpec, k_max=64, extrapolate=True):
    """Partial product over the box 0 <= k_j <= k_max.

    The box-truncation error of the log decays like 1/k_max once the power
    sums match, so the value is Richardson-extrapolated from three nested
    boxes; the tail estimate is the spread of the extrapolants.
    """
    check = barnes_converges(spec)
    if not check:
        raise ValueError(
            f"power-sum constraint violated at q={check.failing_q}; "
            "product does not converge")
    if k_max < 8:
        raise ValueError("k_max too small to estimate a tail")
    boxes = [k_max // 4, k_max // 2, k_max]
    logs = [_box_log_sum(spec, b) for b in boxes]
    if abs(logs[2] - logs[1]) > 2.0 * abs(logs[1] - logs[0]) + 1e-12:
        raise DivergentProduct("box-to-box increments grow with the cutoff")
    if not extrapolate:
        return ProductResult(np.exp(logs[2]), abs(logs[2] - logs[1]), k_max)
    xs = [1.0 / b for b in boxes]
    lim2 = _extrapolate_to_zero(xs[1:], logs[1:])
    lim3 = _extrapolate_to_zero(xs, logs)
    return ProductResult(np.exp(lim3), float(abs(lim3 - lim2)), k_max)


def _integrand_factory(spec: BarnesSpec):
    a = np.asarray(spec.a)
    b = np.asarray(spec.b)
    omega = np.asarray(spec.omega)
    n = spec.depth
    # The integral gives the log of the product: per factor, Frullani's
    # formula reads int (e^{ax}-e^{bx})/x dx = ln(b/a), so the numerator
    # carries b with plus sign.  The power sums cancel through order n;
    # evaluate the numerator by its series where that cancellation would
    # otherwise destroy precision.
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-30)
    x_switch = 0.25 / scale
    q_hi = n + 50
    coeffs = np.array([
        (np.sum(b**q) - np.sum(a**q)) / math.factorial(q)
        for q in range(n + 1, q_hi + 1)
    ])

    def integrand(x):
        if x <= 0.0:
            x = 1e-300
        if x < x_switch:
            powers = x ** np.arange(n + 1, q_hi + 1)
            numer = np.sum(coeffs * powers)
        else:
            numer = np.sum(np.exp(b * x)) - np.sum(np.exp(a * x))
        denom = x * np.prod(-np.expm1(omega * x))
        return numer / denom

    return integrand


def barnes_integral(spec: BarnesSpec):
    """Integral representation of the product: exp of the integral over
    (0, inf) of [sum e^{a x} - sum e^{b x}] / (x prod(1 - e^{omega x})).

    Requires Re a, Re b < 0 (factors violating this can be split off of the
    product by hand) and the matching power sums that keep the x -> 0 limit
    finite.
    """
    check = barnes_converges(spec)
    if not check:
        raise ValueError(
            f"power-sum constraint violated at q={check.failing_q}; "
            "integrand has a non-integrable 1/x singularity")
    if any(x.real >= 0 for x in spec.a) or any(x.real >= 0 for x in spec.b):
        raise ValueError("integral form needs Re a_m, Re b_p < 0")
    integrand = _integrand_factory(spec)
    val, err = _quad(integrand, 0.0, np.inf, complex_func=True,
                     limit=400, epsabs=1e-13, epsrel=1e-12)
    return complex(np.exp(val))


# ---------------------------------------------------------------------------
# vertex-operator products


def _vertex_pairs(spec: VertexSpec):
    pairs = []
    for i, (al, ki) in enumerate(zip(spec.alpha, spec.k)):
        for j, (be, lj) in enumerate(zip(spec.beta, spec.l)):
            if ki * lj != 0:
                pairs.append((al, be, -ki * lj))  # exponent of the factor
    return pairs


def vertex_trace_ratio(spec: VertexSpec, m_max=200000, extrapolate=True):
    """prod_{m >= m_start} prod_{i,j} (beta_j - alpha_i - m gamma)^(-k_i l_j),
    as a partial product with Richardson extrapolation of the log tail.

    Convergence follows from the power-sum criterion with the single shift
    direction -gamma, which the exponent-sum constraints guarantee.
    """
    pairs = _vertex_pairs(spec)
    if not pairs:
        return ProductResult(1.0 + 0.0j, 0.0, 0)
    m = np.arange(spec.m_start, m_max + 1)
    log_terms = np.zeros(len(m), dtype=complex)
    for al, be, expo in pairs:
        base = be - al - m * spec.gamma
        small = np.abs(base) < 1e-12 * max(1.0, abs(be - al))
        if np.any(small):
            raise VanishingFactor(
                f"factor vanishes at m={int(m[np.argmax(small)])}: pole of the trace")
        log_terms += expo * np.log(base)
    csum = np.cumsum(log_terms)
    ends = [len(m) // 4 - 1, len(m) // 2 - 1, len(m) - 1]
    logs = [csum[e] for e in ends]
    if abs(log_terms[-1]) > abs(log_terms[ends[1]]):
        raise DivergentProduct("product shells do not decay")
    if not extrapolate:
        return ProductResult(np.exp(logs[2]), abs(logs[2] - logs[1]), m_max)
    xs = [1.0 / (m[e] + 1) for e in ends]
    lim2 = _extrapolate_to_zero(xs[1:], logs[1:])
    lim3 = _extrapolate_to_zero(xs, logs)
    return ProductResult(np.exp(lim3), float(abs(lim3 - lim2)), m_max)


def eta_trace_ratio(spec: EtaSpec, m_max=3000, k_max=3000, extrapolate=True):
    """Double product over m >= 1, k >= 0 of
    [(z - w - hbar - m gamma - 2 k hbar)/(z - w - m gamma - 2 k hbar)]^(k_j p_k).

    The box-truncation error of the log decays like 1/cutoff, so the value
    is Richardson-extrapolated from three nested boxes (both cutoffs scaled
    together); the tail estimate is the spread of the extrapolants.
    """
    pairs = [
        (wj, zp, kj * pk)
        for wj, kj in zip(spec.w, spec.k)
        for zp, pk in zip(spec.z, spec.p)
        if kj * pk != 0
    ]
    if not pairs:
        return ProductResult(1.0 + 0.0j, 0.0, 0)
    if m_max < 8 or k_max < 8:
        raise ValueError("cutoffs too small to estimate a tail")
    k = np.arange(0, k_max + 1)[None, :]
    logs = np.empty((m_max, k_max + 1), dtype=complex)
    for lo in range(0, m_max, 512):  # row chunks bound the transient arrays
        hi = min(lo + 512, m_max)
        m = np.arange(lo + 1, hi + 1)[:, None]
        ladder = m * spec.gamma + 2.0 * spec.hbar * k
        chunk = np.zeros(ladder.shape, dtype=complex)
        for wj, zp, expo in pairs:
            base = zp - wj - ladder
            shifted = base - spec.hbar
            if np.any(np.abs(base) < 1e-12) or np.any(np.abs(shifted) < 1e-12):
                raise VanishingFactor("factor vanishes in the computed range")
            chunk += expo * np.log(shifted / base)
        logs[lo:hi] = chunk
    boxes = [(m_max // 4, k_max // 4), (m_max // 2, k_max // 2), (m_max, k_max)]
    sums = [np.sum(logs[:bm, : bk + 1]) for bm, bk in boxes]
    if not extrapolate:
        return ProductResult(np.exp(sums[2]), float(abs(sums[2] - sums[1])),
                             m_max * (k_max + 1))
    xs = [1.0 / bm for bm, _ in boxes]
    lim2 = _extrapolate_to_zero(xs[1:], sums[1:])
    lim3 = _extrapolate_to_zero(xs, sums)
    return ProductResult(np.exp(lim3), float(abs(lim3 - lim2)),
                         m_max * (k_max + 1))


def pairing_product(g: Callable, u, v, gamma, n_max=200):
    """prod_{n=0}^{n_max} exp(g(u - v - n gamma)) with a geometric tail fit."""
    vals = np.array([g(u - v - n * gamma) for n in range(n_max + 1)], dtype=complex)
    if len(vals) >= 3 and abs(vals[-1]) > 0:
        ratio = abs(vals[-1]) / max(abs(vals[-2]), 1e-300)
        if ratio >= 1.0:
            raise DivergentProduct("pairing terms do not decay")
        tail = abs(vals[-1]) * ratio / (1.0 - ratio)
    else:
        tail = 0.0
    return ProductResult(np.exp(np.sum(vals)), float(tail), n_max)


# ---------------------------------------------------------------------------
# truncated-boson regularization


def shift_matrix(gamma, n_modes):
    """Matrix of the insertion-point shift on mode coordinates.

    With the generating vector at u having n-th coordinate u^n/n, replacing
    u by u+gamma (and discarding the constant term the truncation cannot
    hold) gives M[i, j] = (j/i) C(i, j) gamma^(i-j), unit lower-triangular.
    """
    gamma = complex(gamma)
    out = np.zeros((n_modes, n_modes), dtype=complex)
    for i in range(1, n_modes + 1):
        for j in range(1, i + 1):
            out[i - 1, j - 1] = j / i * math.comb(i, j) * gamma ** (i - j)
    return out


def creation_coordinates(point, n_modes):
    """Coefficient vector of the creation-side generating function at a
    point: n-th mode coordinate point^n / n."""
    n = np.arange(1, n_modes + 1)
    return np.asarray(point, dtype=complex) ** n / n


def annihilation_coordinates(point, n_modes):
    """Dual coefficient vector at a point, normalized so that the pairing
    with creation_coordinates(u) is the truncation of -log(1 - u/point)."""
    n = np.arange(1, n_modes + 1)
    return np.asarray(point, dtype=complex) ** (-n)


def damped_shift(gamma, trunc: TruncatedBoson):
    """t-damped shift operator; lower-triangular with diagonal t^n, so its
    spectral radius is t < 1 and the full-space trace exists."""
    n = np.arange(1, trunc.n_modes + 1)
    return (trunc.t**n)[:, None] * shift_matrix(gamma, trunc.n_modes)


def regularized_truncated_trace(spec: VertexSpec, trunc: TruncatedBoson,
                                order="CA"):
    """Damped truncated-Fock evaluation of the vertex trace ratio.

    The insertion exponentials reduce to a single creation/annihilation
    pair on mode coordinates; the trace ratio is the degree-truncated
    exponential-insertion closed form with rho = T_t . shift.  The 'CA'
    order (creation exponentials left of annihilation ones) matches the
    product over m >= 1; 'AC' starts the product at m = 0.
    """
    rho = damped_shift(spec.gamma, trunc)
    v = sum(
        ki * creation_coordinates(al, trunc.n_modes)
        for al, ki in zip(spec.alpha, spec.k)
    )
    w = sum(
        lj * annihilation_coordinates(be, trunc.n_modes)
        for be, lj in zip(spec.beta, spec.l)
    )
    return traces.exp_insertion_ratio(rho, w, v, order=order,
                                      degree_cap=trunc.degree)
