"""
Nodal distributions, Lagrange interpolation and quadrature on [-1, 1].

Node indices are zero-based throughout. A 2D node index ``Q`` maps to the
tensor pair ``(Q % n, Q // n)`` with ``n`` nodes per side, i.e. x runs fastest.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDegreeError, NumericalFailureError

EQUISPACED = "equispaced"
CHEBYSHEV = "chebyshev"
LOBATTO = "lobatto"
GAUSS_LEGENDRE = "gauss_legendre"
GAUSS_LOBATTO = "gauss_lobatto"

NODE_FAMILIES = (EQUISPACED, CHEBYSHEV, LOBATTO)
QUADRATURE_KINDS = (GAUSS_LEGENDRE, GAUSS_LOBATTO)

_ROOT_TOL = 1e-14
_MAX_NEWTON = 100


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class NodalSet:
    """Sampling points of a degree-``order`` Lagrange basis."""

    family: str
    order: int
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords))
        c = self.coords
        if len(c) != self.order + 1:
            raise ValueError("a degree-M nodal set needs M+1 coordinates")
        if np.any(np.diff(c) <= 0) or c[0] < -1 or c[-1] > 1:
            raise ValueError("nodal coordinates must be strictly increasing in [-1, 1]")

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: str
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))

    def __len__(self):
        return len(self.points)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.points)))


@dataclass(frozen=True, eq=False)
class ElementSpec:
    """Nodal set plus the rule used to integrate the element matrices.

    An "n x n element" has ``n`` nodes per side, so polynomial degree n-1.
    """

    nodal: NodalSet
    quadrature: QuadratureRule

    @property
    def nodes_per_side(self) -> int:
        return self.nodal.order + 1

    @property
    def order(self) -> int:
        return self.nodal.order

    @property
    def is_spectral(self) -> bool:
        return (self.nodal.family == LOBATTO
                and self.quadrature.kind == GAUSS_LOBATTO
                and len(self.quadrature) == len(self.nodal)
                and np.allclose(self.quadrature.points, self.nodal.coords, rtol=0, atol=1e-12))

    @property
    def label(self) -> str:
        n = self.nodes_per_side
        kind = "spectral" if self.is_spectral else "classical"
        return f"{kind} {n}x{n}"

    @classmethod
    def spectral(cls, n: int) -> "ElementSpec":
        """Lobatto nodes with the matching GLL rule, ``n`` nodes per side."""
        return cls(lobatto_nodes(n - 1), gll_quadrature(n - 1))

    @classmethod
    def classical(cls, n: int) -> "ElementSpec":
        """Equispaced nodes, fully integrated with ``n``-point Gauss-Legendre."""
        return cls(equispaced_nodes(n - 1), gauss_legendre_quadrature(n))


# ---------------------------------------------------------------------------
# Nodal sets

def equispaced_nodes(M: int) -> NodalSet:
    if M < 1:
        raise InvalidDegreeError(f"degree must be >= 1, got {M}")
    coords = np.linspace(-1.0, 1.0, M + 1)
    coords[0], coords[-1] = -1.0, 1.0
    return NodalSet(EQUISPACED, M, coords)


def chebyshev_nodes(n: int) -> NodalSet:
    """The ``n`` roots of T_n, ascending."""
    if n < 2:
        raise InvalidDegreeError(f"need at least 2 Chebyshev nodes, got {n}")
    k = np.arange(1, n + 1)
    x = np.cos((2 * k - 1) * np.pi / (2 * n))[::-1].copy()
    # exact antisymmetry; the middle root of odd n is exactly zero
    half = n // 2
    x[n - half:] = -x[:half][::-1]
    if n % 2:
        x[half] = 0.0
    return NodalSet(CHEBYSHEV, n - 1, x)


def legendre(n: int, x):
    """P_n(x) and P'_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    # P'_n = n (x P_n - P_{n-1}) / (x^2 - 1), with the endpoint limit n(n+1)/2 * (+-1)^(n+1)
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = n * (x * p - p_prev) / (x * x - 1.0)
    at_end = np.abs(np.abs(x) - 1.0) < 1e-15
    if np.any(at_end):
        dp = np.where(at_end, 0.5 * n * (n + 1) * np.sign(x) ** (n + 1), dp)
    return p, dp


def _newton_roots(f_df, guess, what):
    x = np.array(guess, dtype=float)
    for _ in range(_MAX_NEWTON):
        f, df = f_df(x)
        step = f / df
        x = x - step
        if np.all(np.abs(step) <= _ROOT_TOL * np.maximum(1.0, np.abs(x))):
            return x
    raise NumericalFailureError(f"Newton iteration for {what} did not converge")


def lobatto_nodes(M: int) -> NodalSet:
    """Sorted roots of (1 - x^2) P'_M(x): the endpoints plus the zeros of P'_M."""
    if M < 1:
        raise InvalidDegreeError(f"degree must be >= 1, got {M}")
    coords = np.empty(M + 1)
    coords[0], coords[-1] = -1.0, 1.0
    if M > 1:
        # Chebyshev-Gauss-Lobatto interior points separate the roots well enough
        guess = -np.cos(np.pi * np.arange(1, M) / M)

        def f_df(x):
            p, dp = legendre(M, x)
            # Legendre ODE: (1 - x^2) P'' = 2x P' - M(M+1) P
            d2p = (2 * x * dp - M * (M + 1) * p) / (1 - x * x)
            return dp, d2p

        inner = _newton_roots(f_df, guess, f"Lobatto nodes of degree {M}")
        inner = 0.5 * (inner - inner[::-1])
        coords[1:-1] = inner
    if np.any(np.diff(coords) <= 0):
        raise NumericalFailureError(f"Lobatto root search collapsed for degree {M}")
    return NodalSet(LOBATTO, M, coords)


def gll_quadrature(M: int) -> QuadratureRule:
    """(M+1)-point Gauss-Lobatto-Legendre rule, exact through degree 2M-1."""
    x = lobatto_nodes(M).coords
    p, _ = legendre(M, x)
    w = 2.0 / (M * (M + 1) * p ** 2)
    w[0] = w[-1] = 2.0 / (M * (M + 1))
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(GAUSS_LOBATTO, x, w)


def gauss_legendre_quadrature(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule, exact through degree 2n-1."""
    if n < 1:
        raise InvalidDegreeError(f"need at least one point, got {n}")
    if n == 1:
        return QuadratureRule(GAUSS_LEGENDRE, [0.0], [2.0])
    i = np.arange(1, n + 1)
    guess = -np.cos(np.pi * (i - 0.25) / (n + 0.5))
    x = _newton_roots(lambda t: legendre(n, t), guess, f"{n}-point Gauss-Legendre")
    x = 0.5 * (x - x[::-1])
    _, dp = legendre(n, x)
    w = 2.0 / ((1 - x * x) * dp ** 2)
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(GAUSS_LEGENDRE, x, w)


def make_nodal_set(family: str, M: int) -> NodalSet:
    if family == EQUISPACED:
        return equispaced_nodes(M)
    if family == CHEBYSHEV:
        return chebyshev_nodes(M + 1)
    if family == LOBATTO:
        return lobatto_nodes(M)
    raise ValueError(f"unknown node family {family!r}")


def make_quadrature(kind: str, npoints: int) -> QuadratureRule:
    if kind == GAUSS_LEGENDRE:
        return gauss_legendre_quadrature(npoints)
    if kind == GAUSS_LOBATTO:
        return gll_quadrature(npoints - 1)
    raise ValueError(f"unknown quadrature kind {kind!r}")


# ---------------------------------------------------------------------------
# Lagrange basis

def lagrange_eval(nodal: NodalSet, Q: int, x):
    """Value of the Q-th Lagrange polynomial (product form)."""
    c = nodal.coords
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for P in range(len(c)):
        if P != Q:
            out = out * (x - c[P]) / (c[Q] - c[P])
    return out


def lagrange_deriv(nodal: NodalSet, Q: int, x):
    """Derivative of the Q-th Lagrange polynomial.

    Uses the sum over P != Q of 1/(x^Q - x^P) times the product over
    R != P, Q of (x - x^R)/(x^Q - x^R); the singular factor never appears,
    so the result is finite at the nodes.
    """
    c = nodal.coords
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for P in range(len(c)):
        if P == Q:
            continue
        term = np.full_like(x, 1.0 / (c[Q] - c[P]))
        for R in range(len(c)):
            if R != P and R != Q:
                term = term * (x - c[R]) / (c[Q] - c[R])
        out = out + term
    return out


def lagrange_table(nodal: NodalSet, x):
    """Values and derivatives of every basis polynomial at points ``x``.

    Returns two arrays of shape ``(len(x), M+1)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(nodal)
    vals = np.column_stack([lagrange_eval(nodal, Q, x) for Q in range(n)])
    ders = np.column_stack([lagrange_deriv(nodal, Q, x) for Q in range(n)])
    return vals, ders


def interpolate(nodal: NodalSet, f, x):
    """Evaluate the Lagrange interpolant of ``f`` through ``nodal`` at ``x``."""
    vals, _ = lagrange_table(nodal, x)
    return vals @ f(nodal.coords)


def shape2d(spec: ElementSpec, Q: int, xi):
    """Tensor-product shape function and its reference gradient.

    Returns ``(N, dN/dx, dN/dy)`` at ``xi = (x, y)``.
    """
    n = spec.nodes_per_side
    qx, qy = Q % n, Q // n
    x, y = xi
    lx, ly = lagrange_eval(spec.nodal, qx, x), lagrange_eval(spec.nodal, qy, y)
    dlx, dly = lagrange_deriv(spec.nodal, qx, x), lagrange_deriv(spec.nodal, qy, y)
    return lx * ly, dlx * ly, lx * dly


def runge(x):
    return 1.0 / (1.0 + 25.0 * np.asarray(x) ** 2)


def runge_study(degree: int = 10, n_probe: int = 2001, f=runge) -> dict[str, float]:
    """Max abs interpolation error of ``f`` for each node family at ``degree``."""
    probe = np.linspace(-1.0, 1.0, n_probe)
    exact = f(probe)
    out = {}
    for family in NODE_FAMILIES:
        nodal = make_nodal_set(family, degree)
        out[family] = float(np.max(np.abs(interpolate(nodal, f, probe) - exact)))
    return out


def monomial_exactness(rule: QuadratureRule, max_power: int) -> list[tuple[int, float, float]]:
    """``(p, quadrature, exact)`` for x**p, p = 0..max_power."""
    rows = []
    for p in range(max_power + 1):
        exact = 0.0 if p % 2 else 2.0 / (p + 1)
        rows.append((p, rule.integrate(lambda t: t ** p), exact))
    return rows
