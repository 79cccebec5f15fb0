"""Hermite eigenbasis of the harmonic oscillator -Delta + |x|^2 in d = 1, 2.

The orthonormal Hermite functions h_n (polynomial times exp(-x^2/2), unit
L^2 norm) diagonalize H = -Delta + |x|^2 with H h_n = (2|n| + d) h_n.  This
module provides stable pointwise evaluation, Gauss-Hermite and trapezoid
quadrature, forward/inverse transforms between grid values and expansion
coefficients, and the exact ladder-operator actions of x and d/dx on
coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_hermite

__all__ = [
    "HermiteBasis",
    "Grid",
    "GridFunction",
    "QuadratureRule",
    "SpectralCoefficients",
    "gauss_hermite_rule",
    "uniform_rule",
    "hermite_values",
    "eval_hermite",
    "analyze",
    "synthesize",
    "apply_position",
    "apply_derivative",
    "apply_poly_diff",
    "apply_H",
    "laplacian",
    "position_squared",
]

# Coverage rule for grids paired with a basis of max degree N: the classically
# allowed region |x| <= sqrt(2N+d) plus a Gaussian tail buffer.
GRID_BUFFER_MIN = 4.0
GRID_BUFFER_DEFAULT = 6.0
DEFAULT_SPACING = 1.0 / 16.0

_RESCALE_EVERY = 32
_RESCALE_LIMIT = 2.0 ** 500


def hermite_values(max_degree: int, x: np.ndarray, n_lo: int = 0) -> np.ndarray:
    """Values h_n(x) for n in [n_lo, max_degree], shape (count, len(x)).

    Uses the three-term recurrence on the Hermite *functions* themselves,

        h_0 = pi^{-1/4} exp(-x^2/2),
        h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1},

    carried on (mantissa, shared exponent) pairs so that passing through the
    classically forbidden region (where intermediate values underflow but
    later degrees revive to O(1)) loses nothing.  Safe well past degree 2000.
    """
    if max_degree < 0 or n_lo < 0 or n_lo > max_degree:
        raise ValueError(f"bad degree window [{n_lo}, {max_degree}]")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    npts = x.size
    out = np.empty((max_degree - n_lo + 1, npts))

    # h_0 in (mantissa, exponent) form; exponent is per-point.
    log2_h0 = -0.25 * math.log2(math.pi) - x * x / (2.0 * math.log(2.0))
    expo = np.floor(log2_h0).astype(np.int64)
    m_prev = np.exp2(log2_h0 - expo)
    if n_lo == 0:
        out[0] = np.ldexp(m_prev, expo)
    if max_degree == 0:
        return out

    m_cur = math.sqrt(2.0) * x * m_prev
    if n_lo <= 1:
        out[1 - n_lo] = np.ldexp(m_cur, expo)
    for n in range(1, max_degree):
        a = math.sqrt(2.0 / (n + 1))
        b = math.sqrt(n / (n + 1.0))
        m_next = a * x * m_cur - b * m_prev
        m_prev, m_cur = m_cur, m_next
        if n % _RESCALE_EVERY == 0:
            big = np.maximum(np.abs(m_cur), np.abs(m_prev))
            shift = np.zeros(npts, dtype=np.int64)
            shift[big > _RESCALE_LIMIT] = -500
            nonzero = big > 0.0
            shift[nonzero & (big < 1.0 / _RESCALE_LIMIT)] = 500
            if np.any(shift):
                scale = np.exp2(shift.astype(float))
                m_prev = m_prev * scale
                m_cur = m_cur * scale
                expo = expo - shift
        if n + 1 >= n_lo:
            out[n + 1 - n_lo] = np.ldexp(m_cur, expo)
    return out


def eval_hermite(n: int | Sequence[int], points) -> np.ndarray:
    """Pointwise values of the orthonormal eigenfunction h_n.

    ``n`` is an integer in d = 1 or a length-d multi-index; ``points`` is an
    array of 1-d abscissae, or a tuple of per-axis abscissae in d = 2 (the
    result is then the tensor-product outer value table).
    """
    if np.isscalar(n):
        return hermite_values(int(n), np.asarray(points, dtype=float), n_lo=int(n))[0]
    idx = tuple(int(k) for k in n)
    if len(idx) == 1:
        return eval_hermite(idx[0], points)
    if len(idx) != 2:
        raise ValueError("only d in {1, 2} is supported")
    ax0, ax1 = points
    v0 = eval_hermite(idx[0], ax0)
    v1 = eval_hermite(idx[1], ax1)
    return np.outer(v0, v1)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights, either Gauss-Hermite (weight e^{-x^2}) or trapezoid."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str  # "gauss_hermite" | "trapezoid"

    @cached_property
    def modified_weights(self) -> np.ndarray:
        """Weights for integrating functions that carry their own decay.

        For a Gauss-Hermite rule of order M these are w_i * exp(x_i^2),
        computed stably as 1 / (M * h_{M-1}(x_i)^2); the rule then satisfies
        sum_i lam_i g(x_i) = int g(x) dx exactly for g = (poly of degree
        <= 2M-1) * exp(-x^2).  For a trapezoid rule they equal the weights.
        """
        if self.kind != "gauss_hermite":
            return self.weights
        order = self.nodes.size
        h_last = hermite_values(order - 1, self.nodes, n_lo=order - 1)[0]
        return 1.0 / (order * h_last * h_last)


def gauss_hermite_rule(order: int) -> QuadratureRule:
    """Gauss-Hermite rule of the given order for the weight e^{-x^2}."""
    if order < 1:
        raise ValueError(f"Gauss-Hermite order must be >= 1, got {order}")
    nodes, weights = roots_hermite(order)
    return QuadratureRule(nodes=nodes, weights=weights, kind="gauss_hermite")


def uniform_rule(half_width: float, spacing: float) -> QuadratureRule:
    """Trapezoid rule on [-L, L]; L is rounded up to a multiple of the spacing."""
    n_side = int(math.ceil(half_width / spacing - 1e-12))
    nodes = spacing * np.arange(-n_side, n_side + 1)
    weights = np.full(nodes.size, spacing)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return QuadratureRule(nodes=nodes, weights=weights, kind="trapezoid")


@dataclass(frozen=True)
class HermiteBasis:
    """Tensor Hermite basis in d in {1, 2} with per-axis degrees 0..max_degree."""

    d: int
    max_degree: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("only d in {1, 2} is supported")
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.max_degree + 1,) * self.d

    @property
    def size(self) -> int:
        return (self.max_degree + 1) ** self.d

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """H-eigenvalues 2|n| + d as a tensor over multi-indices."""
        n = np.arange(self.max_degree + 1)
        if self.d == 1:
            return 2.0 * n + 1.0
        return 2.0 * (n[:, None] + n[None, :]) + 2.0

    @cached_property
    def sqrt_eigenvalues(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def max_sqrt_eigenvalue(self) -> float:
        return math.sqrt(2.0 * self.d * self.max_degree + self.d)

    def default_grid(self, spacing: float = DEFAULT_SPACING,
                     buffer: float = GRID_BUFFER_DEFAULT) -> "Grid":
        return Grid(self.d, self.max_sqrt_eigenvalue + buffer, spacing)

    def grown(self, extra: int) -> "HermiteBasis":
        return HermiteBasis(self.d, self.max_degree + extra)


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on [-L, L]^d (the same axis on every axis)."""

    d: int
    half_width: float
    spacing: float = DEFAULT_SPACING

    @cached_property
    def axis(self) -> np.ndarray:
        n_side = int(math.ceil(self.half_width / self.spacing - 1e-12))
        return self.spacing * np.arange(-n_side, n_side + 1)

    @cached_property
    def axis_weights(self) -> np.ndarray:
        w = np.full(self.axis.size, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.axis.size,) * self.d

    def weights(self) -> np.ndarray:
        """Tensor trapezoid weights matching ``shape``."""
        if self.d == 1:
            return self.axis_weights
        return np.multiply.outer(self.axis_weights, self.axis_weights)

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        if self.d == 1:
            return (self.axis,)
        return tuple(np.meshgrid(self.axis, self.axis, indexing="ij"))

    def covers(self, basis: HermiteBasis) -> bool:
        return self.half_width >= basis.max_sqrt_eigenvalue + GRID_BUFFER_MIN - 1e-9

    def key(self) -> tuple:
        return (self.d, round(self.half_width, 12), round(self.spacing, 12))


@dataclass
class GridFunction:
    """Sampled values of a function on a tensor grid, with quadrature weights."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}")


@dataclass
class SpectralCoefficients:
    """Finite Hermite expansion of a function: f = sum_n c_n h_n.

    ``flags`` records lossy events ("truncated" when a degree-raising
    operation had no headroom, "aliasing" when a product projection left a
    fat tail).  Instances are treated as immutable; ``_cache`` only memoizes
    derived per-block norms and never changes observable state.
    """

    basis: HermiteBasis
    coeffs: np.ndarray
    flags: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.basis.shape:
            raise ValueError(
                f"coeffs shape {self.coeffs.shape} != basis shape {self.basis.shape}")

    def with_coeffs(self, coeffs: np.ndarray,
                    extra_flags: tuple[str, ...] = ()) -> "SpectralCoefficients":
        flags = tuple(sorted(set(self.flags) | set(extra_flags)))
        return SpectralCoefficients(self.basis, coeffs, flags)

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs.ravel()))

    def inner(self, other: "SpectralCoefficients") -> complex:
        """L^2 inner product <self, other> = sum c_n conj(d_n) (Parseval)."""
        if self.basis != other.basis:
            raise ValueError("bases differ")
        return complex(np.vdot(other.coeffs, self.coeffs))

    def tail_fraction(self) -> float:
        """Energy fraction carried by the two outermost degree shells."""
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        if total == 0.0:
            return 0.0
        n = self.basis.max_degree
        if n == 0:
            return 0.0
        if self.basis.d == 1:
            tail = float(np.sum(np.abs(self.coeffs[max(0, n - 1):]) ** 2))
        else:
            outer = np.maximum(np.arange(n + 1)[:, None], np.arange(n + 1)[None, :])
            tail = float(np.sum(np.abs(self.coeffs[outer >= n - 1]) ** 2))
        return tail / total

    def scaled(self, factor: complex) -> "SpectralCoefficients":
        return self.with_coeffs(self.coeffs * factor)

    def __add__(self, other: "SpectralCoefficients") -> "SpectralCoefficients":
        if self.basis != other.basis:
            raise ValueError("bases differ")
        return SpectralCoefficients(
            self.basis, self.coeffs + other.coeffs,
            tuple(sorted(set(self.flags) | set(other.flags))))

    def __sub__(self, other: "SpectralCoefficients") -> "SpectralCoefficients":
        return self + other.scaled(-1.0)

    def in_basis(self, basis: HermiteBasis) -> "SpectralCoefficients":
        """Embed (zero-pad) or truncate onto another basis of the same d."""
        if basis == self.basis:
            return self
        if basis.d != self.basis.d:
            raise ValueError("dimension mismatch")
        new = np.zeros(basis.shape, dtype=complex)
        m = min(basis.max_degree, self.basis.max_degree) + 1
        flags = self.flags
        if self.basis.d == 1:
            new[:m] = self.coeffs[:m]
            dropped = np.sum(np.abs(self.coeffs[m:]) ** 2)
        else:
            new[:m, :m] = self.coeffs[:m, :m]
            dropped = np.sum(np.abs(self.coeffs) ** 2) - np.sum(np.abs(self.coeffs[:m, :m]) ** 2)
        if dropped > 1e-28:
            flags = tuple(sorted(set(flags) | {"truncated"}))
        return SpectralCoefficients(basis, new, flags)


# ---------------------------------------------------------------------------
# basis-value caches


_BASIS_MATRIX_CACHE: dict[tuple, np.ndarray] = {}


def basis_matrix(basis: HermiteBasis, axis: np.ndarray, key: tuple | None = None) -> np.ndarray:
    """h_n(x_i) for n <= max_degree on a 1-d axis, cached per (basis, axis)."""
    if key is not None:
        full_key = (basis.max_degree,) + key
        hit = _BASIS_MATRIX_CACHE.get(full_key)
        if hit is not None:
            return hit
    mat = hermite_values(basis.max_degree, axis)
    if key is not None:
        if len(_BASIS_MATRIX_CACHE) > 32:
            _BASIS_MATRIX_CACHE.clear()
        _BASIS_MATRIX_CACHE[full_key] = mat
    return mat


# ---------------------------------------------------------------------------
# transforms


def synthesize(c: SpectralCoefficients, grid: Grid | None = None) -> GridFunction:
    """Pointwise values sum_n c_n h_n on the grid."""
    grid = grid if grid is not None else c.basis.default_grid()
    mat = basis_matrix(c.basis, grid.axis, key=grid.key())
    if c.basis.d == 1:
        values = c.coeffs @ mat
    else:
        values = mat.T @ c.coeffs @ mat
    return GridFunction(grid, values)


def synthesize_at(c: SpectralCoefficients, axes: tuple[np.ndarray, ...]) -> np.ndarray:
    """Synthesis on an explicit per-axis node set (no caching)."""
    if c.basis.d == 1:
        return c.coeffs @ hermite_values(c.basis.max_degree, axes[0])
    m0 = hermite_values(c.basis.max_degree, axes[0])
    m1 = hermite_values(c.basis.max_degree, axes[1])
    return m0.T @ c.coeffs @ m1


def analyze(f, basis: HermiteBasis, quad_order: int | None = None) -> SpectralCoefficients:
    """Expansion coefficients c_n = <f, h_n>.

    ``f`` may be a callable (evaluated on a Gauss-Hermite rule whose modified
    weights integrate poly * exp(-x^2) exactly; default order 2N+1) or a
    GridFunction (trapezoid quadrature on its own grid, which must cover the
    basis).  Exact on the resolved span in both cases.
    """
    if isinstance(f, GridFunction):
        grid = f.grid
        if grid.d != basis.d:
            raise ValueError("grid dimension does not match basis")
        if not grid.covers(basis):
            raise ValueError(
                f"grid half-width {grid.half_width:.3f} below coverage bound "
                f"{basis.max_sqrt_eigenvalue + GRID_BUFFER_MIN:.3f} for N={basis.max_degree}")
        mat = basis_matrix(basis, grid.axis, key=grid.key())
        wv = f.values * grid.weights()
        if basis.d == 1:
            coeffs = mat @ wv
        else:
            coeffs = mat @ wv @ mat.T
        return SpectralCoefficients(basis, coeffs)

    order = quad_order if quad_order is not None else 2 * basis.max_degree + 1
    if order < basis.max_degree + 1:
        raise ValueError("quadrature order below basis degree + 1")
    rule = gauss_hermite_rule(order)
    lam = rule.modified_weights
    mat = hermite_values(basis.max_degree, rule.nodes)
    if basis.d == 1:
        vals = np.asarray(f(rule.nodes), dtype=complex)
        coeffs = mat @ (lam * vals)
    else:
        x0, x1 = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
        vals = np.asarray(f(x0, x1), dtype=complex)
        wv = vals * np.multiply.outer(lam, lam)
        coeffs = mat @ wv @ mat.T
    return SpectralCoefficients(basis, coeffs)


# ---------------------------------------------------------------------------
# ladder operators

_TRUNC_TOL = 1e-14


def _apply_ladder_1d(coeffs: np.ndarray, sign: float) -> tuple[np.ndarray, bool]:
    # (x f)_m = (sqrt(m) c_{m-1} + sqrt(m+1) c_{m+1}) / sqrt(2)   (sign = +1)
    # (f')_m  = (sqrt(m) c_{m-1} - sqrt(m+1) c_{m+1}) / sqrt(2) * (-1 on c_{m-1})
    # handled by the caller through ``sign`` on the lowering part.
    n = coeffs.shape[0]
    root = np.sqrt(np.arange(1, n, dtype=float))[:, None]
    out = np.zeros_like(coeffs)
    out[1:] = sign * root * coeffs[:-1] / math.sqrt(2.0)
    out[:-1] += root * coeffs[1:] / math.sqrt(2.0)
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    lossy = bool(np.max(np.abs(coeffs[-1:])) > _TRUNC_TOL * max(scale, 1e-300))
    return out, lossy


def _apply_axis(c: SpectralCoefficients, axis: int, sign: float) -> SpectralCoefficients:
    if axis < 0 or axis >= c.basis.d:
        raise ValueError(f"axis {axis} out of range for d={c.basis.d}")
    arr = np.moveaxis(c.coeffs, axis, 0)
    out, lossy = _apply_ladder_1d(arr.reshape(arr.shape[0], -1), sign)
    out = np.moveaxis(out.reshape(arr.shape), 0, axis)
    return c.with_coeffs(out, ("truncated",) if lossy else ())


def apply_position(c: SpectralCoefficients, axis: int = 0) -> SpectralCoefficients:
    """Exact coefficient action of multiplication by x_axis.

    x h_n = (sqrt(n) h_{n-1} + sqrt(n+1) h_{n+1}) / sqrt(2).  The result stays
    at the same max degree; if the dropped degree-(N+1) coefficient would be
    nonzero the "truncated" flag is set.
    """
    return _apply_axis(c, axis, +1.0)


def apply_derivative(c: SpectralCoefficients, axis: int = 0) -> SpectralCoefficients:
    """Exact coefficient action of d/dx_axis.

    d/dx h_n = (sqrt(n) h_{n-1} - sqrt(n+1) h_{n+1}) / sqrt(2).
    """
    # lowering part keeps +sqrt(m+1) c_{m+1}; raising part flips sign:
    # (f')_m = (sqrt(m+1) c_{m+1} - sqrt(m) c_{m-1}) / sqrt(2)
    return _apply_axis(c, axis, -1.0)


def apply_poly_diff(alpha: Sequence[int], beta: Sequence[int],
                    c: SpectralCoefficients) -> SpectralCoefficients:
    """Coefficient action of x^alpha grad^beta (derivatives applied first)."""
    alpha = tuple(int(a) for a in alpha)
    beta = tuple(int(b) for b in beta)
    if len(alpha) != c.basis.d or len(beta) != c.basis.d:
        raise ValueError("multi-index length must equal d")
    if any(a < 0 for a in alpha) or any(b < 0 for b in beta):
        raise ValueError("multi-index entries must be >= 0")
    out = c
    for axis, b in enumerate(beta):
        for _ in range(b):
            out = apply_derivative(out, axis)
    for axis, a in enumerate(alpha):
        for _ in range(a):
            out = apply_position(out, axis)
    return out


def apply_H(c: SpectralCoefficients) -> SpectralCoefficients:
    """Diagonal action of H: c_n -> (2|n| + d) c_n."""
    return c.with_coeffs(c.coeffs * c.basis.eigenvalues)


def laplacian(c: SpectralCoefficients) -> SpectralCoefficients:
    """Ladder-operator realization of Delta = sum_k d^2/dx_k^2."""
    total = None
    for axis in range(c.basis.d):
        term = apply_derivative(apply_derivative(c, axis), axis)
        total = term if total is None else total + term
    return total


def position_squared(c: SpectralCoefficients) -> SpectralCoefficients:
    """Ladder-operator realization of multiplication by |x|^2."""
    total = None
    for axis in range(c.basis.d):
        term = apply_position(apply_position(c, axis), axis)
        total = term if total is None else total + term
    return total
