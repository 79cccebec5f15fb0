"""Dyadic partition of unity on the spectrum of sqrt(H) and spectral multipliers.

The bump phi_0 is built from the classic exp(-1/t) mollifier so that
supp phi_0 = [1/2, 2] exactly, phi_0(1) = 1, and sum_j phi_0(2^{-j} lambda) = 1
for every lambda > 0 up to roundoff.  Multipliers m(sqrt(H)) act diagonally on
Hermite coefficients; dense integral kernels K(x, y) = sum_n m(mu_n) h_n(x)
h_n(y) support L^1 -> L^1 and L^inf -> L^inf operator-norm estimation in d = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hermite import (
    Grid,
    HermiteBasis,
    SpectralCoefficients,
    apply_poly_diff,
    basis_matrix,
    hermite_values,
)

__all__ = [
    "DyadicPartition",
    "SymbolFn",
    "KernelMatrix",
    "build_partition",
    "apply_multiplier",
    "lp_block",
    "widened_block",
    "low_block",
    "apply_H_power",
    "multiplier_kernel",
    "operator_norm",
    "poly_diff_block_l1_norm",
    "poly_diff_l2_ratio",
    "h_split_ratios",
]

KERNEL_RESOLVED_TOL = 1e-10


def _mollifier(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def _bump_unnormalized(lam: np.ndarray) -> np.ndarray:
    # supported exactly on (1/2, 2), positive inside, vanishes at the ends
    return _mollifier(lam - 0.5) * _mollifier(2.0 - lam)


@dataclass(frozen=True)
class SymbolFn:
    """Scalar spectral symbol lambda -> m(lambda) on [0, inf)."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "symbol"
    support: tuple[float, float] | None = None  # closed support bounds, if compact

    def __call__(self, lam) -> np.ndarray:
        return self.fn(np.asarray(lam, dtype=float))


class DyadicPartition:
    """Concrete dyadic partition of unity adapted to sqrt(H).

    ``j0`` is the largest integer with 2^(j0+1) <= d = inf spec(H), so blocks
    with j < j0 annihilate every eigenfunction.  ``psi`` collects all blocks
    with j <= 0, so psi + sum_{j>=1} phi_j = 1 on (0, inf).
    """

    def __init__(self, d: int):
        if d not in (1, 2):
            raise ValueError("only d in {1, 2} is supported")
        self.d = d
        self.j0 = int(math.floor(math.log2(d))) - 1
        # floor(log2(d)) - 1 realizes "largest j0 with 2^(j0+1) <= d" for d in {1,2}

    # -- scalar symbols -----------------------------------------------------

    def phi0(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        out = np.zeros_like(lam)
        inside = (lam > 0.5) & (lam < 2.0)
        if np.any(inside):
            x = lam[inside]
            num = _bump_unnormalized(x)
            den = num.copy()
            # only dyadic shifts landing in (1/2, 2) contribute to the sum
            for k in (-1, 1):
                den = den + _bump_unnormalized(x * 2.0 ** (-k))
            out[inside] = num / den
        return out

    def phi(self, j: int, lam) -> np.ndarray:
        return self.phi0(np.asarray(lam, dtype=float) * 2.0 ** (-j))

    def widened(self, j: int, lam) -> np.ndarray:
        """Phi_j = phi_{j-1} + phi_j + phi_{j+1}; equals 1 on supp phi_j."""
        lam = np.asarray(lam, dtype=float)
        return self.phi(j - 1, lam) + self.phi(j, lam) + self.phi(j + 1, lam)

    def psi(self, lam) -> np.ndarray:
        """Low-part symbol sum_{j <= 0} phi_j."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        out = np.zeros_like(lam)
        pos = lam > 0
        if np.any(pos):
            x = lam[pos]
            # phi_j(x) != 0 needs 2^{j-1} < x < 2^{j+1}; collect all j <= 0
            jmin = np.floor(np.log2(np.min(x))) - 1.0
            acc = np.zeros_like(x)
            j = 0
            while j >= jmin:
                acc += self.phi(j, x)
                j -= 1
            out[pos] = np.minimum(acc, 1.0)
        return out

    # -- block bookkeeping ----------------------------------------------------

    def j_max(self, basis: HermiteBasis) -> int:
        """Largest block meeting the resolved spectrum of the basis."""
        mu_max = basis.max_sqrt_eigenvalue
        j = int(math.ceil(math.log2(mu_max)))
        while float(self.phi(j + 1, mu_max)[0]) > 0.0:
            j += 1
        return j

    def block_range(self, basis: HermiteBasis) -> range:
        return range(self.j0, self.j_max(basis) + 1)

    def is_resolved(self, j: int, basis: HermiteBasis) -> bool:
        """True when supp phi_j lies inside the resolved spectrum."""
        return 2.0 ** (j + 1) <= basis.max_sqrt_eigenvalue + 1e-12

    # -- symbol factories -----------------------------------------------------

    def block_symbol(self, j: int) -> SymbolFn:
        lo, hi = 2.0 ** (j - 1), 2.0 ** (j + 1)
        return SymbolFn(lambda lam, j=j: self.phi(j, lam), f"phi_{j}", (lo, hi))

    def widened_symbol(self, j: int) -> SymbolFn:
        lo, hi = 2.0 ** (j - 2), 2.0 ** (j + 2)
        return SymbolFn(lambda lam, j=j: self.widened(j, lam), f"Phi_{j}", (lo, hi))

    def low_symbol(self) -> SymbolFn:
        return SymbolFn(self.psi, "psi", (0.0, 2.0))


def build_partition(d: int, N: int | None = None) -> DyadicPartition:
    """Dyadic partition for dimension d (N is accepted for symmetry, unused)."""
    return DyadicPartition(d)


# ---------------------------------------------------------------------------
# diagonal actions


def apply_multiplier(m, c: SpectralCoefficients) -> SpectralCoefficients:
    """Diagonal action c_n -> m(sqrt(2|n|+d)) c_n on the resolved span."""
    vals = m(c.basis.sqrt_eigenvalues)
    return c.with_coeffs(c.coeffs * vals)


def lp_block(P: DyadicPartition, j: int, c: SpectralCoefficients) -> SpectralCoefficients:
    """Littlewood-Paley block f_j = phi_j(sqrt(H)) f (exactly zero for j < j0)."""
    return apply_multiplier(lambda lam: P.phi(j, lam), c)


def widened_block(P: DyadicPartition, j: int, c: SpectralCoefficients) -> SpectralCoefficients:
    return apply_multiplier(lambda lam: P.widened(j, lam), c)


def low_block(P: DyadicPartition, c: SpectralCoefficients) -> SpectralCoefficients:
    return apply_multiplier(P.psi, c)


def apply_H_power(alpha: float, c: SpectralCoefficients) -> SpectralCoefficients:
    """c_n -> (2|n|+d)^(alpha/2) c_n; negative alpha is fine (spectrum >= d > 0)."""
    return c.with_coeffs(c.coeffs * c.basis.eigenvalues ** (alpha / 2.0))


# ---------------------------------------------------------------------------
# dense kernels (d = 1)


@dataclass
class KernelMatrix:
    """Dense kernel K(x, y) on a 1-d grid with trapezoid weights."""

    axis: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    resolved: bool = True
    name: str = "kernel"

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))


def multiplier_kernel(m, basis: HermiteBasis, grid: Grid,
                      name: str | None = None) -> KernelMatrix:
    """K(x, y) = sum_n m(mu_n) h_n(x) h_n(y) on the grid (d = 1 only).

    The kernel is honest only when the symbol has died out by the edge of the
    resolved spectrum; ``resolved`` is False when |m| at the top eigenvalue
    exceeds 1e-10.
    """
    if basis.d != 1 or grid.d != 1:
        raise ValueError("dense kernels are supported in d = 1 only")
    mvals = np.asarray(m(basis.sqrt_eigenvalues), dtype=float)
    resolved = bool(abs(mvals[-1]) <= KERNEL_RESOLVED_TOL)
    mat = basis_matrix(basis, grid.axis, key=grid.key())
    kern = mat.T @ (mvals[:, None] * mat)
    label = name or getattr(m, "name", "kernel")
    return KernelMatrix(grid.axis, grid.axis_weights, kern, resolved, label)


def operator_norm(K: KernelMatrix, p: float) -> float:
    """L^p -> L^p operator norm of the integral operator, p in {1, inf}.

    ||T||_{1->1} = sup_y int |K(x,y)| dx (columns);
    ||T||_{inf->inf} = sup_x int |K(x,y)| dy (rows).
    """
    absk = np.abs(K.matrix)
    if p == 1:
        return float(np.max(K.weights @ absk))
    if math.isinf(p):
        return float(np.max(absk @ K.weights))
    raise ValueError("operator norms are computed for p in {1, inf} only; "
                     "interpolate min(||.||_1, ||.||_inf) for an upper bound")


# ---------------------------------------------------------------------------
# kernels of x^alpha grad^beta phi_j(sqrt(H))  (d = 1, arbitrarily deep blocks)


def _ladder_matrix_window(alpha: int, beta: int, n_lo: int, n_hi: int,
                          phi_vals: np.ndarray) -> tuple[np.ndarray, int]:
    """Columns of x^alpha d^beta phi_j(sqrt(H)) on a mode window.

    Returns (W, lo) with W of shape (hi - lo + 1, n_hi - n_lo + 1) expressing
    (x^alpha d^beta) phi_j h_n over modes [lo, hi], lo = max(0, n_lo - r),
    hi = n_hi + r, r = alpha + beta.  The ladder steps act on true degrees,
    so the square-root factors are indexed by lo + position.
    """
    r = alpha + beta
    lo = max(0, n_lo - r)
    hi = n_hi + r
    size = hi - lo + 1
    ncols = n_hi - n_lo + 1
    work = np.zeros((size, ncols))
    work[np.arange(n_lo, n_hi + 1) - lo, np.arange(ncols)] = phi_vals
    root = np.sqrt(np.arange(lo, hi + 2, dtype=float))[:, None]

    def step(mat: np.ndarray, sign: float) -> np.ndarray:
        out = np.zeros_like(mat)
        out[1:] = sign * root[1:size] * mat[:-1] / math.sqrt(2.0)
        out[:-1] += root[1:size] * mat[1:] / math.sqrt(2.0)
        return out

    for _ in range(beta):
        work = step(work, -1.0)
    for _ in range(alpha):
        work = step(work, +1.0)
    return work, lo


def poly_diff_block_l1_norm(P: DyadicPartition, j: int, alpha: int, beta: int,
                            *, n_y: int = 221, x_per_wave: float = 10.0,
                            chunk: int = 4096) -> float:
    """Measured ||x^alpha d^beta phi_j(sqrt(H))||_{L^1 -> L^1} in d = 1.

    The supremum over the input position y is taken on a y-grid scaled with
    the block (y = 2^{j+1} v for a fixed set of v), which keeps the sampling
    self-similar across j; column integrals run on an x-grid fine enough for
    the block's top frequency 2^{j+1}.
    """
    mu_hi = 2.0 ** (j + 1)
    n_hi = int(math.floor((mu_hi ** 2 - P.d) / 2.0))
    n_lo = int(math.ceil(((2.0 ** (j - 1)) ** 2 - P.d) / 2.0))
    n_lo = max(0, n_lo)
    if n_hi < n_lo:
        return 0.0
    mu = np.sqrt(2.0 * np.arange(n_lo, n_hi + 1) + P.d)
    phi_vals = P.phi(j, mu)
    keep = phi_vals > 0.0
    if not np.any(keep):
        return 0.0
    idx = np.arange(n_lo, n_hi + 1)[keep]
    n_lo, n_hi = int(idx[0]), int(idx[-1])
    phi_vals = phi_vals[keep]

    weights_cols, lo = _ladder_matrix_window(alpha, beta, n_lo, n_hi, phi_vals)
    hi = lo + weights_cols.shape[0] - 1

    # scaled y set: bulk plus the turning region carry the supremum
    v = np.linspace(-1.1, 1.1, n_y)
    y = mu_hi * v
    h_y = hermite_values(n_hi, y, n_lo=n_lo)
    col_coeffs = weights_cols @ h_y  # modes [lo, hi] x y

    spacing = min(1.0 / 16.0, 2.0 * math.pi / (x_per_wave * mu_hi))
    half = mu_hi * 1.15 + 8.0
    n_side = int(math.ceil(half / spacing))
    x_all = spacing * np.arange(-n_side, n_side + 1)
    col_l1 = np.zeros(y.size)
    for start in range(0, x_all.size, chunk):
        x = x_all[start:start + chunk]
        hx = hermite_values(hi, x, n_lo=lo)
        block = col_coeffs.T @ hx  # y x x-chunk
        w = np.full(x.size, spacing)
        if start == 0:
            w[0] *= 0.5
        if start + chunk >= x_all.size:
            w[-1] *= 0.5
        col_l1 += np.abs(block) @ w
    return float(np.max(col_l1))


# ---------------------------------------------------------------------------
# p = 2 operator inequalities via exact ladder algebra


def poly_diff_l2_ratio(c: SpectralCoefficients, alpha, beta) -> float:
    """||x^alpha grad^beta f||_2 / ||H^((|a|+|b|)/2) f||_2, exact on the span.

    The numerator is computed in a grown basis so no ladder step truncates.
    """
    order = int(sum(alpha) + sum(beta))
    big = c.in_basis(c.basis.grown(order + 1))
    num = apply_poly_diff(alpha, beta, big).l2_norm()
    den = np.linalg.norm(c.coeffs * c.basis.eigenvalues ** (order / 2.0))
    if den == 0.0:
        return 0.0
    return float(num / den)


def h_split_ratios(c: SpectralCoefficients) -> tuple[float, float]:
    """(||Delta f||_2 + |||x|^2 f||_2) / ||H f||_2 and its reciprocal."""
    from .hermite import laplacian, position_squared

    big = c.in_basis(c.basis.grown(3))
    num = laplacian(big).l2_norm() + position_squared(big).l2_norm()
    den = np.linalg.norm(c.coeffs * c.basis.eigenvalues)
    if den == 0.0:
        return (0.0, 0.0)
    return (float(num / den), float(den / num))
