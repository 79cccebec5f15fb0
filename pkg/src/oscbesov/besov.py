"""L^p and dyadic-block Besov norms, with the associated inequality checkers.

The norm of index (s, p, q) aggregates the weighted block norms
2^{sj} ||phi_j(sqrt(H)) f||_{L^p} over j in [j0, j_max] in little-l^q.
p = 2 block norms are evaluated spectrally (Parseval); all other p on a
uniform grid with trapezoid weights, p = infinity as the grid maximum.
Every checker returns a plain ratio so sweeps can aggregate and never abort:
a vanishing denominator yields 0 (with a flag on the profile, where one is
returned).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import DyadicPartition, apply_H_power, apply_multiplier
from .hermite import Grid, GridFunction, HermiteBasis, SpectralCoefficients, synthesize

__all__ = [
    "BesovParams",
    "BlockProfile",
    "lp_norm",
    "block_profile",
    "besov_norm",
    "duality_pairing",
    "embedding_ratio",
    "sandwich_check",
    "interpolation_check",
    "lifting_ratio",
    "lq_aggregate",
    "recip",
]

RESOLVED_TAIL_TOL = 1e-12


def recip(p: float) -> float:
    """1/p with the convention 1/inf = 0."""
    if math.isinf(p):
        return 0.0
    if p < 1.0:
        raise ValueError(f"integrability index must be in [1, inf], got {p}")
    return 1.0 / p


def _check_index(val: float, name: str) -> float:
    val = float(val)
    if not (val >= 1.0 or math.isinf(val)):
        raise ValueError(f"{name} must be in [1, inf], got {val}")
    return val


@dataclass(frozen=True)
class BesovParams:
    """Index triple (s, p, q); q = inf aggregates blocks by supremum."""

    s: float
    p: float
    q: float
    j_range: tuple[int, int] | None = None

    def __post_init__(self):
        _check_index(self.p, "p")
        _check_index(self.q, "q")


@dataclass
class BlockProfile:
    """Per-block diagnostics for one Besov-norm evaluation."""

    js: np.ndarray
    block_lp: np.ndarray       # ||f_j||_{L^p}
    weighted: np.ndarray       # 2^{sj} ||f_j||_{L^p}
    value: float
    flags: tuple[str, ...] = ()


def lp_norm(f: GridFunction, p: float) -> float:
    """Trapezoid L^p norm for p < inf, grid maximum for p = inf."""
    p = _check_index(p, "p")
    a = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(a))
    w = f.grid.weights()
    return float(np.sum(w * a ** p) ** (1.0 / p))


def lq_aggregate(values: np.ndarray, q: float) -> float:
    """little-l^q norm of a nonnegative sequence; q = inf is the supremum."""
    q = _check_index(q, "q")
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(np.max(values))
    return float(np.sum(values ** q) ** (1.0 / q))


def block_profile(c: SpectralCoefficients, P: DyadicPartition, p: float,
                  grid: Grid | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(js, ||f_j||_{L^p}) over the partition's resolved block range.

    Results are memoized on the coefficient object per (partition, p, grid),
    since inequality sweeps revisit the same block norms for many (s, q).
    """
    p = _check_index(p, "p")
    gkey = None if (p == 2.0) else (grid.key() if grid is not None else "default")
    key = ("blocks", id(P), p, gkey)
    hit = c._cache.get(key)
    if hit is not None:
        return hit

    js = np.array(list(P.block_range(c.basis)), dtype=int)
    mu = c.basis.sqrt_eigenvalues
    norms = np.empty(js.size)
    if p == 2.0:
        a2 = np.abs(c.coeffs) ** 2
        for i, j in enumerate(js):
            norms[i] = math.sqrt(float(np.sum(P.phi(j, mu) ** 2 * a2)))
    else:
        use_grid = grid if grid is not None else c.basis.default_grid()
        for i, j in enumerate(js):
            blk = c.with_coeffs(c.coeffs * P.phi(j, mu))
            norms[i] = lp_norm(synthesize(blk, use_grid), p)
    c._cache[key] = (js, norms)
    return js, norms


def besov_norm(c: SpectralCoefficients, P: DyadicPartition,
               params: BesovParams, grid: Grid | None = None
               ) -> tuple[float, BlockProfile]:
    """Besov norm of index (s, p, q) together with its block profile."""
    js, norms = block_profile(c, P, params.p, grid)
    if params.j_range is not None:
        lo, hi = params.j_range
        mask = (js >= lo) & (js <= hi)
        js, norms = js[mask], norms[mask]
    weighted = 2.0 ** (params.s * js) * norms
    value = lq_aggregate(weighted, params.q)
    flags: tuple[str, ...] = c.flags
    if c.tail_fraction() > RESOLVED_TAIL_TOL:
        flags = tuple(sorted(set(flags) | {"unresolved_tail"}))
    return value, BlockProfile(js, norms, weighted, value, flags)


def duality_pairing(f: SpectralCoefficients, g: SpectralCoefficients,
                    P: DyadicPartition) -> complex:
    """sum_j <phi_j(sqrt(H)) f, Phi_j(sqrt(H)) g>.

    Since sum_j phi_j Phi_j = (sum_j phi_j)^2 = 1 on the spectrum, this equals
    <f, g> exactly on the resolved span.
    """
    if f.basis != g.basis:
        raise ValueError("bases differ")
    mu = f.basis.sqrt_eigenvalues
    total = 0.0 + 0.0j
    for j in P.block_range(f.basis):
        fj = f.coeffs * P.phi(j, mu)
        gj = g.coeffs * P.widened(j, mu)
        total += complex(np.vdot(gj, fj))
    return total


def embedding_ratio(f: SpectralCoefficients, P: DyadicPartition,
                    s: float, r: float, p: float, q: float,
                    grid: Grid | None = None) -> float:
    """||f||_{B^s_{p,q}} / ||f||_{B^{s + d(1/r - 1/p)}_{r,q}} for r <= p."""
    r = _check_index(r, "r")
    p = _check_index(p, "p")
    if recip(r) < recip(p):
        raise ValueError(f"embedding requires r <= p, got r={r} > p={p}")
    d = f.basis.d
    s_src = s + d * (recip(r) - recip(p))
    num, _ = besov_norm(f, P, BesovParams(s, p, q), grid)
    den, _ = besov_norm(f, P, BesovParams(s_src, r, q), grid)
    if den == 0.0:
        return 0.0
    return num / den


def sandwich_check(f: SpectralCoefficients, P: DyadicPartition, p: float,
                   grid: Grid | None = None) -> tuple[float, float]:
    """(||f||_{B^0_{p,inf}} / ||f||_{L^p},  ||f||_{L^p} / ||f||_{B^0_{p,1}})."""
    use_grid = grid if grid is not None else f.basis.default_grid()
    lpf = lp_norm(synthesize(f, use_grid), p)
    b_inf, _ = besov_norm(f, P, BesovParams(0.0, p, math.inf), use_grid)
    b_one, _ = besov_norm(f, P, BesovParams(0.0, p, 1.0), use_grid)
    left = b_inf / lpf if lpf > 0.0 else 0.0
    right = lpf / b_one if b_one > 0.0 else 0.0
    return left, right


def interpolation_check(f: SpectralCoefficients, P: DyadicPartition,
                        s: float, s0: float, p: float, r: float, r0: float,
                        theta: float, grid: Grid | None = None) -> float:
    """||f||_{B^s_{p,1}} / (||f||_{B^0_{r,inf}}^theta ||f||_{B^{s0}_{r0,inf}}^(1-theta)).

    The parameter tuple must satisfy the convexity relation
    s - d/p = theta (-d/r) + (1-theta)(s0 - d/r0) with -d/r != s0 - d/r0,
    s, s0 > 0, theta in (0, 1), and the case condition relating s to
    (1-theta) s0 according to the position of p among r, r0.
    """
    for name, v in (("p", p), ("r", r), ("r0", r0)):
        _check_index(v, name)
    if not (0.0 < theta < 1.0):
        raise ValueError(f"theta must be in (0,1), got {theta}")
    if s <= 0.0 or s0 <= 0.0:
        raise ValueError("s and s0 must be positive")
    d = f.basis.d
    lhs = s - d * recip(p)
    rhs = theta * (-d * recip(r)) + (1.0 - theta) * (s0 - d * recip(r0))
    if abs(lhs - rhs) > 1e-12:
        raise ValueError(
            f"convexity relation violated: s - d/p = {lhs:.6g} != {rhs:.6g}")
    if abs((-d * recip(r)) - (s0 - d * recip(r0))) < 1e-12:
        raise ValueError("degenerate tuple: -d/r equals s0 - d/r0")
    lo, hi = min(recip(r), recip(r0)), max(recip(r), recip(r0))
    # note 1/. reverses order: r <= p means 1/r >= 1/p
    if recip(p) <= lo:  # p >= max(r, r0)
        if s > (1.0 - theta) * s0 + 1e-12:
            raise ValueError("requires s <= (1-theta) s0 when max(r, r0) <= p")
    elif recip(p) <= hi:  # min(r, r0) <= p < max(r, r0)
        if s >= (1.0 - theta) * s0 - 1e-12:
            raise ValueError("requires s < (1-theta) s0 when min(r,r0) <= p < max(r,r0)")
    else:
        raise ValueError("requires min(r, r0) <= p")

    num, _ = besov_norm(f, P, BesovParams(s, p, 1.0), grid)
    den_a, _ = besov_norm(f, P, BesovParams(0.0, r, math.inf), grid)
    den_b, _ = besov_norm(f, P, BesovParams(s0, r0, math.inf), grid)
    den = den_a ** theta * den_b ** (1.0 - theta)
    if den == 0.0:
        return 0.0
    return num / den


def lifting_ratio(f: SpectralCoefficients, P: DyadicPartition,
                  s: float, p: float, q: float, alpha: float,
                  grid: Grid | None = None) -> float:
    """||H^(alpha/2) f||_{B^s_{p,q}} / ||f||_{B^{s+alpha}_{p,q}}."""
    lifted = apply_H_power(alpha, f)
    num, _ = besov_norm(lifted, P, BesovParams(s, p, q), grid)
    den, _ = besov_norm(f, P, BesovParams(s + alpha, p, q), grid)
    if den == 0.0:
        return 0.0
    return num / den
