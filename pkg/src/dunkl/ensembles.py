"""Seeded families of well-confined test functions.

Norm-inequality verification needs ensembles that are rich enough to probe a
bound yet decay fast enough that the truncated grid carries essentially all
of their mass.  Two families cover the use cases.

``schwartz_ensemble`` draws Gaussian-chirp-polynomial samples

    p(x . u) exp(-|x - x0|^2 / (2 sigma^2)) exp(i (omega . x + beta |x|^2))

with moderate centers, widths, frequencies and chirps, so every member is a
Schwartz function whose mass outside the grid box is negligible.

``focused_ensemble`` draws free-evolution Gaussian packets

    p(x . u) exp(-|x|^2 / (2 a0)) exp(i omega . x),   a0 = w^2 - 2 i t_f,

meant to be propagated across a time window [0, horizon].  The complex width
evolves as a(t) = a0 + 2 i t, giving effective spatial variance
w^2 + 4 (t - t_f)^2 / w^2; choosing t_f = horizon / 2 and w^2 = horizon
minimizes the worst-case spread over the window, so members that start inside
the box stay inside it for the whole window.  The momentum kick omega moves
the packet at speed 2 |omega|, so kicks are capped by a drift budget.
"""

from __future__ import annotations

import numpy as np

from .measure import DEFAULT_SEED, QuadratureGrid, SampledFunction

__all__ = ["schwartz_ensemble", "focused_ensemble"]


def _modulated_gaussian(
    pts: np.ndarray,
    center: np.ndarray,
    inv_two_a,
    omega: np.ndarray,
    chirp: float,
    direction: np.ndarray,
    coeffs: np.ndarray,
    poly_scale: float = 1.0,
) -> np.ndarray:
    r2 = np.sum((pts - center) ** 2, axis=1)
    phase = pts @ omega + chirp * np.sum(pts**2, axis=1)
    poly = np.polynomial.polynomial.polyval((pts @ direction) / poly_scale, coeffs)
    return poly * np.exp(-r2 * inv_two_a) * np.exp(1j * phase)


def _unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d)
    nrm = np.linalg.norm(v)
    while nrm < 1e-12:
        v = rng.normal(size=d)
        nrm = np.linalg.norm(v)
    return v / nrm


def schwartz_ensemble(
    grid: QuadratureGrid,
    size: int = 50,
    seed: int | None = None,
    *,
    center_span: float = 3.0,
    width_range: tuple[float, float] = (0.6, 1.6),
    max_freq: float = 4.0,
    max_chirp: float = 0.8,
    max_degree: int = 3,
) -> list[SampledFunction]:
    """`size` seeded Gaussian-chirp-polynomial members, each of unit L^2_k norm."""
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    pts = grid.nodes
    out: list[SampledFunction] = []
    for _ in range(size):
        center = rng.uniform(-center_span, center_span, size=grid.d)
        sigma = rng.uniform(*width_range)
        omega = rng.uniform(-max_freq, max_freq, size=grid.d)
        chirp = rng.uniform(-max_chirp, max_chirp)
        direction = _unit_vector(rng, grid.d)
        degree = int(rng.integers(0, max_degree + 1))
        coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        vals = _modulated_gaussian(
            pts, center, 1.0 / (2.0 * sigma**2), omega, chirp, direction, coeffs
        )
        out.append(SampledFunction(grid, vals).normalized())
    return out


def focused_ensemble(
    grid: QuadratureGrid,
    horizon: float,
    size: int = 50,
    seed: int | None = None,
    *,
    max_degree: int = 2,
    drift_budget: float = 2.0,
    center_span: float = 1.0,
) -> list[SampledFunction]:
    """`size` seeded packets that stay confined while propagated over [0, horizon].

    Dispersion forces the worst-case variance 2*horizon, so the defaults suit
    windows up to about 2 on an R = 12 box.  Longer windows push the dispersed
    packet against the box edge, and the mu_k weight amplifies whatever leaks;
    pass gentler ``max_degree`` / ``drift_budget`` / ``center_span`` there
    (degree 0, budget 0.5, span 0.25 hold five time units at k <= 1).
    """
    if horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    pts = grid.nodes
    focus = horizon / 2.0
    # w^2 = horizon keeps a floor for short windows
    w2_base = max(horizon, 1.0)
    max_kick = drift_budget / (2.0 * horizon)
    out: list[SampledFunction] = []
    for _ in range(size):
        w2 = w2_base * rng.uniform(0.8, 1.25)
        a0 = w2 - 2j * focus
        center = rng.uniform(-center_span, center_span, size=grid.d)
        omega = rng.uniform(-max_kick, max_kick, size=grid.d)
        direction = _unit_vector(rng, grid.d)
        degree = int(rng.integers(0, max_degree + 1))
        coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        vals = _modulated_gaussian(
            pts, center, 1.0 / (2.0 * a0), omega, 0.0, direction, coeffs,
            poly_scale=np.sqrt(w2),
        )
        out.append(SampledFunction(grid, vals).normalized())
    return out
