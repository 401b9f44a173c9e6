"""Second-kind Fredholm machinery on an interval: determinant and minor
series, their permanent analogues, the series solution formulas, and a
dense Nystrom baseline.

Discretization: a quadrature rule turns iterated integrals over [a,b]^n
into sums over node tuples with product weights.  The order-n determinant
term then equals the n-th elementary symmetric function of the weighted
kernel matrix (sum of principal n-minors), computed from power traces; the
permanent term is the complete homogeneous analogue.  Minor series use the
classical bordered-determinant recursion

    B_0(s,t) = K(s,t),   c_n = int B_{n-1}(x,x) dx,
    B_n(s,t) = c_n K(s,t) -/+ n int K(s,u) B_{n-1}(u,t) du,

evaluated on the nodes bordered by the requested (s, t) points, so no
interpolation of the minor is ever performed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg


class VanishingDeterminant(ValueError):
    """The series determinant vanishes; the solution formula degenerates."""


class DivergentKernel(ValueError):
    """Discretized spectral radius >= 1; the permanent series diverges."""


# ---------------------------------------------------------------------------
# kernels and quadrature

KERNEL_REGISTRY = {
    "zero": lambda p: (lambda x, y: np.zeros(np.broadcast(x, y).shape)),
    "product": lambda p: (lambda x, y: p.get("c", 1.0) * x * y),
    "gaussian": lambda p: (
        lambda x, y: p.get("c", 1.0) * np.exp(-p.get("alpha", 1.0) * (x - y) ** 2)
    ),
    "cosine": lambda p: (
        lambda x, y: p.get("c", 1.0) * np.cos(p.get("omega", 1.0) * (x - y))
    ),
}


@dataclass(frozen=True)
class KernelSpec:
    """A named kernel K(x, y) from the registry with real parameters."""

    name: str
    params: dict = field(default_factory=dict)
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        if self.name not in KERNEL_REGISTRY:
            raise ValueError(
                f"unknown kernel {self.name!r}; choose from {sorted(KERNEL_REGISTRY)}")
        a, b = self.domain
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError("domain must be a finite interval [a, b]")
        for v in self.params.values():
            if not np.isfinite(v):
                raise ValueError("kernel parameters must be finite")

    def __call__(self, x, y):
        return KERNEL_REGISTRY[self.name](self.params)(np.asarray(x), np.asarray(y))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and weights must be matching 1-d arrays")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")

    @property
    def count(self):
        return self.nodes.shape[0]

    @classmethod
    def gauss_legendre(cls, q, domain=(0.0, 1.0)):
        a, b = domain
        x, w = np.polynomial.legendre.leggauss(q)
        nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
        weights = 0.5 * (b - a) * w
        rule = cls(nodes, weights)
        if abs(weights.sum() - (b - a)) > 1e-12 * max(1.0, abs(b - a)):
            raise ValueError("quadrature weights do not sum to the interval length")
        return rule


def weighted_kernel_matrix(kernel, quad):
    """A[i, j] = K(xi_i, xi_j) * mu_j, the discretized integral operator."""
    k = kernel(quad.nodes[:, None], quad.nodes[None, :])
    return np.asarray(k, dtype=complex) * quad.weights[None, :]


def dense_determinant(kernel, quad, sign=1):
    """det(I + sign * W K), the dense reference for the series."""
    a = weighted_kernel_matrix(kernel, quad)
    return linalg.determinant(np.eye(quad.count) + sign * a)


# ---------------------------------------------------------------------------
# series results


@dataclass
class FredholmResult:
    value: complex
    per_order_terms: list
    n_max: int


@dataclass
class FredholmSolution:
    nodes: np.ndarray
    values: np.ndarray
    evaluate: Callable
    residual: float
    determinant: complex


def fredholm_determinant(kernel, quad, n_max=10):
    """Series for det(1 + K): 1 + int K(x,x) + (1/2!) int int det[...] + ...

    The order-n term is the n-th elementary symmetric function of the
    weighted kernel matrix, obtained from its power traces.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    terms = [1.0 + 0.0j]
    if n_max >= 1:
        a = weighted_kernel_matrix(kernel, quad)
        powers = linalg.power_traces(a, n_max)
        terms += [linalg.elementary_from_power(powers, n) for n in range(1, n_max + 1)]
    return FredholmResult(sum(terms), terms, n_max)


def fredholm_permanent(kernel, quad, n_max=8):
    """Permanent analogue of the determinant series for 1 - K; equals the
    full-space symmetric trace, i.e. 1/det(1 - K), in the series limit."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if n_max > linalg.PERMANENT_CAP:
        raise ValueError(f"n_max {n_max} exceeds permanent cap {linalg.PERMANENT_CAP}")
    terms = [1.0 + 0.0j]
    if n_max >= 1:
        a = weighted_kernel_matrix(kernel, quad)
        radius = float(np.max(np.abs(np.linalg.eigvals(a))))
        if radius >= 1.0:
            raise DivergentKernel(f"discretized spectral radius {radius:.4f} >= 1")
        powers = linalg.power_traces(a, n_max)
        terms += [linalg.complete_from_power(powers, n) for n in range(1, n_max + 1)]
    return FredholmResult(sum(terms), terms, n_max)


def _minor_term_blocks(kernel, quad, s_points, t_points, n_max, sign):
    """Per-order bordered-series blocks B_n(s,t)/n! on s_points x t_points.

    sign +1 gives the determinant minor recursion, -1 the permanent one.
    """
    s_points = np.atleast_1d(np.asarray(s_points, dtype=float))
    t_points = np.atleast_1d(np.asarray(t_points, dtype=float))
    nodes, mu = quad.nodes, quad.weights
    rows = np.concatenate([s_points, nodes])
    cols = np.concatenate([t_points, nodes])
    ns, nt = len(s_points), len(t_points)
    k_rc = np.asarray(kernel(rows[:, None], cols[None, :]), dtype=complex)
    k_rn = np.asarray(kernel(rows[:, None], nodes[None, :]), dtype=complex)
    kw = k_rn * mu[None, :]
    b = k_rc.copy()
    blocks = [b[:ns, :nt].copy()]
    factorial = 1.0
    for n in range(1, n_max + 1):
        diag = b[ns:, nt:].diagonal()
        c_n = np.sum(mu * diag)
        b = c_n * k_rc - sign * n * (kw @ b[ns:, :])
        factorial *= n
        blocks.append(b[:ns, :nt] / factorial)
    return blocks


def fredholm_minor(kernel, quad, s, t, n_max=10):
    """Bordered-determinant series D_{s,t}(1 + K) at a single point pair."""
    blocks = _minor_term_blocks(kernel, quad, [s], [t], n_max, sign=+1)
    terms = [complex(b[0, 0]) for b in blocks]
    return FredholmResult(sum(terms), terms, n_max)


def permanent_minor(kernel, quad, s, t, n_max=8):
    """Bordered-permanent series P_{s,t}(1 - K)."""
    if n_max > linalg.PERMANENT_CAP:
        raise ValueError(f"n_max {n_max} exceeds permanent cap {linalg.PERMANENT_CAP}")
    blocks = _minor_term_blocks(kernel, quad, [s], [t], n_max, sign=-1)
    terms = [complex(b[0, 0]) for b in blocks]
    return FredholmResult(sum(terms), terms, n_max)


def _series_solution(kernel, f, quad, n_max, sign):
    nodes, mu = quad.nodes, quad.weights
    if sign > 0:
        det = fredholm_determinant(kernel, quad, n_max).value
    else:
        det = fredholm_permanent(kernel, quad, n_max).value
    if abs(det) < 1e-12:
        raise VanishingDeterminant(f"series determinant {det} vanishes to tolerance")
    f_nodes = np.asarray(f(nodes), dtype=complex)

    def ratio_rows(s_points):
        blocks = _minor_term_blocks(kernel, quad, s_points, nodes, n_max, sign)
        return sum(blocks) / det

    phi_nodes = f_nodes - sign * (ratio_rows(nodes) * mu[None, :]) @ f_nodes

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        pts = np.atleast_1d(x)
        vals = np.asarray(f(pts), dtype=complex) - sign * (
            (ratio_rows(pts) * mu[None, :]) @ f_nodes)
        return complex(vals[0]) if scalar else vals

    kmat = np.asarray(kernel(nodes[:, None], nodes[None, :]), dtype=complex)
    residual = float(np.max(np.abs(
        phi_nodes + sign * (kmat * mu[None, :]) @ phi_nodes - f_nodes)))
    return FredholmSolution(nodes, phi_nodes, evaluate, residual, det)


def solve_plus(kernel, f, quad, n_max=10):
    """Series solution of phi(x) + int K(x,y) phi(y) dy = f(x):
    phi(s) = f(s) - int (D_{s,t}/D) f(t) dt."""
    return _series_solution(kernel, f, quad, n_max, sign=+1)


def solve_minus(kernel, f, quad, n_max=8):
    """Series solution of phi(x) - int K(x,y) phi(y) dy = f(x):
    phi(s) = f(s) + int (P_{s,t}/P) f(t) dt."""
    return _series_solution(kernel, f, quad, n_max, sign=-1)


def nystrom_solve(kernel, f, quad, sign=1):
    """Dense baseline: solve (I + sign W K) phi = f at the nodes."""
    nodes, mu = quad.nodes, quad.weights
    kmat = np.asarray(kernel(nodes[:, None], nodes[None, :]), dtype=complex)
    system = np.eye(quad.count, dtype=complex) + sign * kmat * mu[None, :]
    f_nodes = np.asarray(f(nodes), dtype=complex)
    phi = np.linalg.solve(system, f_nodes)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        pts = np.atleast_1d(x)
        krow = np.asarray(kernel(pts[:, None], nodes[None, :]), dtype=complex)
        vals = np.asarray(f(pts), dtype=complex) - sign * (krow * mu[None, :]) @ phi
        return complex(vals[0]) if scalar else vals

    residual = float(np.max(np.abs(system @ phi - f_nodes)))
    return FredholmSolution(nodes, phi, evaluate, residual,
                            linalg.determinant(system))
