"""Pointwise products and the Bony decomposition fg = low-high + high-low + resonant.

A product of two degree-N expansions is poly * exp(-x^2), so its projection
onto the degree-N_prod span is computed exactly by a Gauss-Hermite rule in the
variable x = sqrt(2/3) u (the weight exp(-3x^2/2) of the triple product pulled
back to exp(-u^2)); the discarded tail is measured against ||fg||_{L^2}
evaluated on a second rule scaled for the weight exp(-2x^2).  All estimate
checkers return scale-invariant ratios; a zero denominator yields 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .besov import BesovParams, besov_norm, lp_norm, recip
from .calculus import DyadicPartition
from .hermite import (
    HermiteBasis,
    SpectralCoefficients,
    gauss_hermite_rule,
    hermite_values,
    synthesize,
)

__all__ = [
    "BonyPieces",
    "product",
    "bony_decompose",
    "lowhigh_estimate_ratio",
    "negative_s_lowhigh_ratio",
    "resonant_estimate_ratio",
    "product_estimate_ratio",
    "negative_positive_product_ratio",
]

ALIASING_TOL = 1e-8
DEFAULT_CUTOFF = 2  # the split k <= l-2 / l <= k-2 / |k-l| <= 1


@lru_cache(maxsize=8)
def _scaled_rule(order: int, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes kappa*u_i and weights kappa*lam_i of the modified GH rule."""
    rule = gauss_hermite_rule(order)
    return kappa * rule.nodes, kappa * rule.modified_weights


def _product_nodes(order: int):
    return _scaled_rule(order, math.sqrt(2.0 / 3.0))


def _square_nodes(order: int):
    return _scaled_rule(order, math.sqrt(0.5))


def _values_at(c: SpectralCoefficients, nodes: np.ndarray) -> np.ndarray:
    mat = hermite_values(c.basis.max_degree, nodes)
    if c.basis.d == 1:
        return c.coeffs @ mat
    return mat.T @ c.coeffs @ mat


def _project(values: np.ndarray, basis: HermiteBasis, nodes: np.ndarray,
             weights: np.ndarray) -> np.ndarray:
    mat = hermite_values(basis.max_degree, nodes)
    if basis.d == 1:
        return mat @ (weights * values)
    wv = values * np.multiply.outer(weights, weights)
    return mat @ wv @ mat.T


def _l2sq_of_product(fv: np.ndarray, gv: np.ndarray, weights: np.ndarray,
                     d: int) -> float:
    a = np.abs(fv * gv) ** 2
    if d == 1:
        return float(np.sum(weights * a))
    return float(np.sum(np.multiply.outer(weights, weights) * a))


def product(f: SpectralCoefficients, g: SpectralCoefficients,
            n_prod: int | None = None, quad_order: int | None = None
            ) -> SpectralCoefficients:
    """L^2 projection of the pointwise product onto degree n_prod.

    Defaults: n_prod = 2 max(N_f, N_g), quadrature order 2 n_prod + 1 (more
    than enough for exactness of every coefficient).  Sets the "aliasing"
    flag when the discarded tail carries more than 1e-8 of ||fg||_{L^2}^2.
    """
    if f.basis.d != g.basis.d:
        raise ValueError("dimension mismatch")
    d = f.basis.d
    base_n = max(f.basis.max_degree, g.basis.max_degree)
    n_prod = n_prod if n_prod is not None else 2 * base_n
    order = quad_order if quad_order is not None else 2 * n_prod + 1
    need = (f.basis.max_degree + g.basis.max_degree + n_prod) // 2 + 1
    order = max(order, need)
    out_basis = HermiteBasis(d, n_prod)

    nodes, weights = _product_nodes(order)
    fv = _values_at(f, nodes)
    gv = _values_at(g, nodes)
    coeffs = _project(fv * gv, out_basis, nodes, weights)

    sq_nodes, sq_weights = _square_nodes(order)
    total = _l2sq_of_product(_values_at(f, sq_nodes), _values_at(g, sq_nodes),
                             sq_weights, d)
    kept = float(np.sum(np.abs(coeffs) ** 2))
    tail = max(total - kept, 0.0)
    flags = set(f.flags) | set(g.flags)
    if total > 0.0 and tail > ALIASING_TOL * total:
        flags.add("aliasing")
    return SpectralCoefficients(out_basis, coeffs, tuple(sorted(flags)))


@dataclass
class BonyPieces:
    """The three paraproduct pieces, all on the shared product basis."""

    low_high: SpectralCoefficients   # sum over k <= l - n0 of f_k g_l
    high_low: SpectralCoefficients   # sum over l <= k - n0
    resonant: SpectralCoefficients   # sum over |k - l| <= n0 - 1
    full: SpectralCoefficients       # projection of f g itself
    n0: int

    def recombined(self) -> SpectralCoefficients:
        return self.low_high + self.high_low + self.resonant

    def completeness_residual(self) -> float:
        """||pieces - fg||_{L^2} on the product span."""
        diff = self.recombined().coeffs - self.full.coeffs
        return float(np.linalg.norm(diff.ravel()))


def _block_values(c: SpectralCoefficients, P: DyadicPartition,
                  nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(js, stacked block values at nodes) for all resolved blocks of c."""
    js = np.array(list(P.block_range(c.basis)), dtype=int)
    mu = c.basis.sqrt_eigenvalues
    shape = (js.size,) + ((nodes.size,) * c.basis.d)
    out = np.empty(shape, dtype=complex)
    for i, j in enumerate(js):
        out[i] = _values_at(c.with_coeffs(c.coeffs * P.phi(j, mu)), nodes)
    return js, out


def bony_decompose(f: SpectralCoefficients, g: SpectralCoefficients,
                   P: DyadicPartition, n0: int = DEFAULT_CUTOFF,
                   n_prod: int | None = None) -> BonyPieces:
    """Assemble the three Bony pieces of fg with frequency cutoff n0.

    Any n0 >= 1 regroups the same double sum, so the recombined pieces agree
    with the projected product to roundoff for every n0.
    """
    if n0 < 1:
        raise ValueError("cutoff n0 must be >= 1")
    d = f.basis.d
    base_n = max(f.basis.max_degree, g.basis.max_degree)
    n_prod = n_prod if n_prod is not None else 2 * base_n
    order = 2 * n_prod + 1
    out_basis = HermiteBasis(d, n_prod)
    nodes, weights = _product_nodes(order)

    jf, fblocks = _block_values(f, P, nodes)
    jg, gblocks = _block_values(g, P, nodes)
    # cumulative sums S_m f = sum_{k <= m} f_k, indexed by position in jf
    fcum = np.cumsum(fblocks, axis=0)
    gcum = np.cumsum(gblocks, axis=0)

    def cum_at(cum, js, m):
        """sum of blocks with index <= m (blocks below js[0] vanish)."""
        pos = int(np.searchsorted(js, m, side="right")) - 1
        if pos < 0:
            return None
        return cum[pos]

    zero = np.zeros((nodes.size,) * d, dtype=complex)
    low_high = zero.copy()
    high_low = zero.copy()
    resonant = zero.copy()
    for i, l in enumerate(jg):
        s = cum_at(fcum, jf, l - n0)
        if s is not None:
            low_high += s * gblocks[i]
        lo = cum_at(fcum, jf, l + n0 - 1)
        hi = cum_at(fcum, jf, l - n0)
        near = (lo if lo is not None else zero) - (hi if hi is not None else zero)
        resonant += near * gblocks[i]
    for i, k in enumerate(jf):
        s = cum_at(gcum, jg, k - n0)
        if s is not None:
            high_low += fblocks[i] * s

    full = product(f, g, n_prod=n_prod, quad_order=order)
    flags = full.flags

    def proj(vals):
        return SpectralCoefficients(out_basis, _project(vals, out_basis, nodes, weights), flags)

    return BonyPieces(proj(low_high), proj(high_low), proj(resonant), full, n0)


# ---------------------------------------------------------------------------
# bilinear estimate checkers


def _require_holder(p, parts, what="p"):
    total = sum(recip(x) for x in parts)
    if abs(recip(p) - total) > 1e-12:
        raise ValueError(
            f"Hoelder mismatch: 1/{what} = {recip(p):.6g} but parts sum to {total:.6g}")


def _safe_ratio(num: float, den: float) -> float:
    return num / den if den > 0.0 else 0.0


def lowhigh_estimate_ratio(f, g, P: DyadicPartition, s: float, p: float,
                           p1: float, p2: float, q: float,
                           n0: int = DEFAULT_CUTOFF) -> float:
    """||f<g||_{B^s_{p,q}} / (||f||_{L^p1} ||g||_{B^s_{p2,q}})."""
    _require_holder(p, (p1, p2))
    pieces = bony_decompose(f, g, P, n0)
    num, _ = besov_norm(pieces.low_high, P, BesovParams(s, p, q))
    fn = lp_norm(synthesize(f), p1)
    gn, _ = besov_norm(g, P, BesovParams(s, p2, q))
    return _safe_ratio(num, fn * gn)


def negative_s_lowhigh_ratio(f, g, P: DyadicPartition, s: float, r: float,
                             p: float, p1: float, p2: float, q: float,
                             n0: int = DEFAULT_CUTOFF) -> float:
    """||f<g||_{B^{s+r}_{p,q}} / (||f||_{B^s_{p1,inf}} ||g||_{B^r_{p2,q}}), s < 0."""
    if s >= 0.0:
        raise ValueError(f"this estimate requires s < 0, got s={s}")
    _require_holder(p, (p1, p2))
    pieces = bony_decompose(f, g, P, n0)
    num, _ = besov_norm(pieces.low_high, P, BesovParams(s + r, p, q))
    fn, _ = besov_norm(f, P, BesovParams(s, p1, math.inf))
    gn, _ = besov_norm(g, P, BesovParams(r, p2, q))
    return _safe_ratio(num, fn * gn)


def resonant_estimate_ratio(f, g, P: DyadicPartition, s1: float, s2: float,
                            p: float, p1: float, p2: float,
                            q: float, q1: float, q2: float,
                            n0: int = DEFAULT_CUTOFF) -> float:
    """||f.g||_{B^{s1+s2}_{p,q}} / (||f||_{B^{s1}_{p1,q1}} ||g||_{B^{s2}_{p2,q2}})."""
    if s1 + s2 <= 0.0:
        raise ValueError(f"resonant estimate requires s1 + s2 > 0, got {s1 + s2}")
    _require_holder(p, (p1, p2))
    _require_holder(q, (q1, q2), what="q")
    pieces = bony_decompose(f, g, P, n0)
    num, _ = besov_norm(pieces.resonant, P, BesovParams(s1 + s2, p, q))
    fn, _ = besov_norm(f, P, BesovParams(s1, p1, q1))
    gn, _ = besov_norm(g, P, BesovParams(s2, p2, q2))
    return _safe_ratio(num, fn * gn)


def product_estimate_ratio(f, g, P: DyadicPartition, s: float, p: float,
                           p1: float, p2: float, p3: float, p4: float,
                           q: float) -> float:
    """||fg||_{B^s_{p,q}} over the two-sided Leibniz-type right side, s > 0."""
    if s <= 0.0:
        raise ValueError(f"product estimate requires s > 0, got s={s}")
    _require_holder(p, (p1, p2))
    _require_holder(p, (p3, p4))
    fg = product(f, g)
    num, _ = besov_norm(fg, P, BesovParams(s, p, q))
    f_b, _ = besov_norm(f, P, BesovParams(s, p1, q))
    g_lp = lp_norm(synthesize(g), p2)
    f_lp = lp_norm(synthesize(f), p3)
    g_b, _ = besov_norm(g, P, BesovParams(s, p4, q))
    return _safe_ratio(num, f_b * g_lp + f_lp * g_b)


def negative_positive_product_ratio(f, g, P: DyadicPartition, s: float,
                                    r: float, p: float, p1: float, p2: float,
                                    q: float) -> float:
    """||fg||_{B^s_{p,q}} / (||f||_{B^s_{p1,q}} ||g||_{B^r_{p2,q}}), s < 0 < r, s+r > 0."""
    if not (s < 0.0 < r and s + r > 0.0):
        raise ValueError(f"requires s < 0 < r with s + r > 0, got s={s}, r={r}")
    _require_holder(p, (p1, p2))
    fg = product(f, g)
    num, _ = besov_norm(fg, P, BesovParams(s, p, q))
    fn, _ = besov_norm(f, P, BesovParams(s, p1, q))
    gn, _ = besov_norm(g, P, BesovParams(r, p2, q))
    return _safe_ratio(num, fn * gn)
