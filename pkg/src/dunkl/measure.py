"""Reflection-group weight and quadrature for Z2^d.

The group Z2^d acts on R^d by sign changes of the coordinates.  With the
positive roots alpha_j = sqrt(2) e_j (normalized so <alpha, alpha> = 2) and a
nonnegative multiplicity k_j per coordinate, the weight is

    h_k^2(x) = prod_j |<x, alpha_j>|^(2 k_j) = prod_j 2^(k_j) |x_j|^(2 k_j),

and the measure used everywhere in this package is dmu_k = h_k^2(x) dx.  Two
derived quantities recur:

    gamma_k = sum_j k_j            (total multiplicity)
    N       = d + 2 gamma_k        (homogeneity: mu_k(B(0, r)) ~ r^N)

The normalization constant of the transform is

    c_h^(-1) = integral h_k^2(x) exp(-|x|^2 / 2) dx
             = prod_j 2^(2 k_j + 1/2) Gamma(k_j + 1/2),

evaluated per coordinate in closed form.

Grids are composite Gauss-Legendre rules on [-R, R] per axis with dyadic panel
refinement toward x_j = 0 whenever k_j > 0 (the weight has a non-smooth point
there for non-integer 2 k_j).  Grid construction is a pure function of its
parameters: equal parameters give bit-identical nodes and weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.special import gammaln

__all__ = [
    "RootSystemConfig",
    "QuadratureGrid",
    "SampledFunction",
    "GridError",
    "rank1",
    "weight_density",
    "normalization_constant",
    "measure_antiderivative",
    "interval_measure_1d",
    "ball_measure",
    "ball_measure_bound",
    "build_grid",
    "grid_to_json",
    "grid_from_json",
    "DEFAULT_SEED",
]

PANEL_POINTS = 16
DEFAULT_REFINE_LEVELS = 6
GRID_SCHEMA_VERSION = 1
# fixed seed for every stochastic component, spelled as the bytes "D0NK"
DEFAULT_SEED = int.from_bytes(b"D0NK", "big")


class GridError(ValueError):
    """Invalid grid or root-system parameters."""


@dataclass(frozen=True)
class RootSystemConfig:
    """Z2^d root system: one reflection per coordinate, multiplicity k_j >= 0."""

    d: int
    multiplicities: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise GridError(f"dimension must be >= 1, got {self.d}")
        mult = tuple(float(k) for k in self.multiplicities)
        if len(mult) != self.d:
            raise GridError(
                f"need {self.d} multiplicities, got {len(mult)}"
            )
        if any(k < 0 or not math.isfinite(k) for k in mult):
            raise GridError(f"multiplicities must be finite and >= 0: {mult}")
        object.__setattr__(self, "multiplicities", mult)

    @property
    def gamma_k(self) -> float:
        return float(sum(self.multiplicities))

    @property
    def homogeneity(self) -> float:
        """d + 2 gamma_k, the scaling exponent of mu_k."""
        return self.d + 2.0 * self.gamma_k

    @property
    def is_rank1(self) -> bool:
        return self.d == 1


def rank1(k: float) -> RootSystemConfig:
    """One-dimensional configuration with multiplicity k."""
    return RootSystemConfig(1, (float(k),))


def _as_points(x, d: int) -> np.ndarray:
    """Coerce scalar / sequence / array input to shape (m, d)."""
    pts = np.asarray(x, dtype=float)
    if d == 1:
        pts = pts.reshape(-1, 1) if pts.ndim <= 1 else pts
    elif pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != d:
        raise GridError(f"points must have {d} coordinates, got shape {pts.shape}")
    return pts


def weight_density(x, cfg: RootSystemConfig):
    """h_k^2(x) = prod_j 2^(k_j) |x_j|^(2 k_j); 0^0 = 1 when k_j = 0."""
    pts = _as_points(x, cfg.d)
    out = np.ones(pts.shape[0])
    for j, kj in enumerate(cfg.multiplicities):
        if kj > 0.0:
            out = out * (2.0**kj) * np.abs(pts[:, j]) ** (2.0 * kj)
    if np.ndim(x) == 0 or (cfg.d > 1 and np.ndim(x) == 1):
        return float(out[0])
    return out


def normalization_constant(cfg: RootSystemConfig) -> float:
    """c_h, with 1/c_h = prod_j 2^(2 k_j + 1/2) Gamma(k_j + 1/2)."""
    log_inv = 0.0
    for kj in cfg.multiplicities:
        log_inv += (2.0 * kj + 0.5) * math.log(2.0) + gammaln(kj + 0.5)
    return math.exp(-log_inv)


def measure_antiderivative(x, k: float):
    """F with F' = 2^k |x|^(2k), F(0) = 0: F(x) = 2^k sgn(x) |x|^(2k+1) / (2k+1)."""
    xv = np.asarray(x, dtype=float)
    return (2.0**k) * np.sign(xv) * np.abs(xv) ** (2.0 * k + 1.0) / (2.0 * k + 1.0)


def interval_measure_1d(a: float, b: float, k: float) -> float:
    """mu_k([a, b]) in one dimension, exact."""
    if b < a:
        raise GridError(f"empty interval [{a}, {b}]")
    return float(measure_antiderivative(b, k) - measure_antiderivative(a, k))


def ball_measure(x, r: float, cfg: RootSystemConfig, *, epsabs: float = 1e-11) -> float:
    """mu_k(B(x, r)).

    Exact via the antiderivative for d = 1; adaptive quadrature (target
    absolute tolerance ``epsabs`` per level) over the Euclidean ball for
    d >= 2, with the innermost axis integrated in closed form.
    """
    if r <= 0:
        raise GridError(f"radius must be positive, got {r}")
    center = _as_points(x, cfg.d)[0]
    ks = cfg.multiplicities
    if cfg.d == 1:
        return interval_measure_1d(center[0] - r, center[0] + r, ks[0])

    def level(i: int, c_rest: np.ndarray, rad: float) -> float:
        if i == cfg.d - 1:
            return interval_measure_1d(c_rest[0] - rad, c_rest[0] + rad, ks[i])

        def integrand(t: float) -> float:
            w = rad * rad - (t - c_rest[0]) ** 2
            if w <= 0.0:
                return 0.0
            inner = level(i + 1, c_rest[1:], math.sqrt(w))
            kj = ks[i]
            return (2.0**kj) * abs(t) ** (2.0 * kj) * inner

        lo, hi = c_rest[0] - rad, c_rest[0] + rad
        pts = [0.0] if lo < 0.0 < hi else None
        val, _ = quad(integrand, lo, hi, epsabs=epsabs, limit=200, points=pts)
        return val

    return level(0, center, r)


def ball_measure_bound(x, r: float, cfg: RootSystemConfig) -> tuple[float, float]:
    """Comparability envelope V(x, r) = r^d prod_j (|<x, alpha_j>| + r)^(2 k_j).

    Returns (V, mu_k(B(x, r)) / V).  The ratio is bounded above and below by
    constants depending only on d and k; callers report the observed range.
    """
    center = _as_points(x, cfg.d)[0]
    v = float(r) ** cfg.d
    for j, kj in enumerate(cfg.multiplicities):
        v *= (math.sqrt(2.0) * abs(center[j]) + r) ** (2.0 * kj)
    mu = ball_measure(x, r, cfg)
    return v, mu / v


# ---- grid construction ----


def _half_axis_breakpoints(R: float, panels: int, kj: float, levels: int) -> list[float]:
    """Panel edges on [0, R]; innermost panel split dyadically when kj > 0."""
    if panels == 1 or kj == 0.0 or levels == 0:
        return [R * i / panels for i in range(panels + 1)]
    L = min(levels, panels - 1)
    q = panels - L  # uniform base panels
    base = R / q
    edges = [0.0] + [base * 2.0 ** (m - L) for m in range(L + 1)]
    edges += [base * (i + 1) for i in range(1, q)]
    return edges


def _axis_rule(R: float, n_axis: int, kj: float, levels: int):
    """Nodes (ascending) and geometric weights on [-R, R] for one axis."""
    gl_x, gl_w = leggauss(PANEL_POINTS)
    if n_axis == PANEL_POINTS:
        half = None
        edges = [-R, R]
        nodes = (gl_x + 1.0) * R - R
        wts = gl_w * R
        return nodes, wts, [float(e) for e in edges]
    panels_half = n_axis // (2 * PANEL_POINTS)
    half = _half_axis_breakpoints(R, panels_half, kj, levels)
    pos_nodes, pos_w = [], []
    for a, b in zip(half[:-1], half[1:]):
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        pos_nodes.append(mid + rad * gl_x)
        pos_w.append(rad * gl_w)
    pos_nodes = np.concatenate(pos_nodes)
    pos_w = np.concatenate(pos_w)
    nodes = np.concatenate([-pos_nodes[::-1], pos_nodes])
    wts = np.concatenate([pos_w[::-1], pos_w])
    edges = [-e for e in half[::-1]] + half[1:]
    return nodes, wts, [float(e) for e in edges]


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Immutable composite Gauss-Legendre grid carrying mu_k weights.

    ``nodes`` has shape (n, d); ``weights`` has shape (n,) and already
    includes the density h_k^2, so sum(weights * f(nodes)) approximates
    integral f dmu_k.  ``n`` is the total node count (n_axis ** d).
    """

    cfg: RootSystemConfig
    R: float
    n_axis: int
    refine_levels: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    axis_nodes: tuple[np.ndarray, ...] = field(repr=False)
    axis_breakpoints: tuple[tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    @property
    def d(self) -> int:
        return self.cfg.d

    @property
    def spacing(self) -> float:
        """Mean node spacing per axis; the 'grid cell' scale."""
        return 2.0 * self.R / self.n_axis

    @property
    def x(self) -> np.ndarray:
        """Coordinate view for d = 1 grids."""
        if self.d != 1:
            raise GridError("x is defined for 1D grids only")
        return self.nodes[:, 0]

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))

    def norm(self, values: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(values) ** 2).real))

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.sum(self.weights * np.conj(f) * g))


def build_grid(
    R: float,
    n: int,
    cfg: RootSystemConfig,
    refine_levels: int = DEFAULT_REFINE_LEVELS,
) -> QuadratureGrid:
    """Composite Gauss-Legendre grid on [-R, R]^d.

    ``n`` is the per-axis node count; it must be 16 or a multiple of 32 so the
    16-point panels tile the two half-axes symmetrically.  The total node
    count is n ** d.  Equal parameters yield bit-identical grids.
    """
    return _build_grid_cached(float(R), int(n), cfg, int(refine_levels))


@lru_cache(maxsize=32)
def _build_grid_cached(
    R: float, n: int, cfg: RootSystemConfig, refine_levels: int
) -> QuadratureGrid:
    if not (R > 0.0) or not math.isfinite(R):
        raise GridError(f"R must be positive and finite, got {R}")
    if n < PANEL_POINTS:
        raise GridError(f"need at least {PANEL_POINTS} nodes per axis, got {n}")
    if n != PANEL_POINTS and n % (2 * PANEL_POINTS) != 0:
        raise GridError(
            f"n must be {PANEL_POINTS} or a multiple of {2 * PANEL_POINTS}, got {n}"
        )
    if refine_levels < 0:
        raise GridError(f"refine_levels must be >= 0, got {refine_levels}")

    axis_nodes, axis_geo_w, axis_edges = [], [], []
    for kj in cfg.multiplicities:
        nd, wt, edges = _axis_rule(R, n, kj, refine_levels)
        axis_nodes.append(nd)
        axis_geo_w.append(wt)
        axis_edges.append(tuple(edges))

    if cfg.d == 1:
        nodes = axis_nodes[0].reshape(-1, 1)
        geo = axis_geo_w[0]
    else:
        mesh = np.meshgrid(*axis_nodes, indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=1)
        wmesh = np.meshgrid(*axis_geo_w, indexing="ij")
        geo = np.ones(nodes.shape[0])
        for wm in wmesh:
            geo = geo * wm.ravel()

    weights = geo * weight_density(nodes, cfg)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    for arr in axis_nodes:
        arr.flags.writeable = False
    return QuadratureGrid(
        cfg=cfg,
        R=R,
        n_axis=n,
        refine_levels=refine_levels,
        nodes=nodes,
        weights=weights,
        axis_nodes=tuple(axis_nodes),
        axis_breakpoints=tuple(axis_edges),
    )


def grid_to_json(grid: QuadratureGrid) -> str:
    doc = {
        "version": GRID_SCHEMA_VERSION,
        "d": grid.cfg.d,
        "multiplicities": list(grid.cfg.multiplicities),
        "R": grid.R,
        "n_axis": grid.n_axis,
        "refine_levels": grid.refine_levels,
        "points_per_panel": PANEL_POINTS,
        "breakpoints": [list(b) for b in grid.axis_breakpoints],
    }
    return json.dumps(doc, sort_keys=True)


def grid_from_json(text: str) -> QuadratureGrid:
    doc = json.loads(text)
    if doc.get("version") != GRID_SCHEMA_VERSION:
        raise GridError(f"unsupported grid schema version: {doc.get('version')}")
    if doc.get("points_per_panel") != PANEL_POINTS:
        raise GridError("grid document uses a different panel rule")
    cfg = RootSystemConfig(int(doc["d"]), tuple(doc["multiplicities"]))
    grid = build_grid(doc["R"], doc["n_axis"], cfg, doc["refine_levels"])
    stored = [tuple(b) for b in doc["breakpoints"]]
    if stored != [tuple(b) for b in grid.axis_breakpoints]:
        raise GridError("breakpoints in document do not match reconstruction")
    return grid


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of a function at the nodes of a grid."""

    grid: QuadratureGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n,):
            raise GridError(
                f"values shape {vals.shape} does not match grid size {self.grid.n}"
            )
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: QuadratureGrid, fn) -> "SampledFunction":
        pts = grid.x if grid.d == 1 else grid.nodes
        return cls(grid, np.asarray(fn(pts), dtype=np.complex128))

    def norm(self) -> float:
        return self.grid.norm(self.values)

    def l1_norm(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.values)))

    def mass(self) -> complex:
        return self.grid.integrate(self.values)

    def normalized(self) -> "SampledFunction":
        nrm = self.norm()
        if nrm == 0.0:
            raise GridError("cannot normalize the zero function")
        return SampledFunction(self.grid, self.values / nrm)
