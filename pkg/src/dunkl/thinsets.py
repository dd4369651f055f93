"""Thin sets for the weighted measure: representation, certification, scaling.

A measurable S is (eps, k)-thin when

    mu_k(S intersect B(x, rho(x))) <= eps mu_k(B(x, rho(x))),
    rho(x) = min(1, 1/|x|),

for every x.  Here S is a finite disjoint union of closed intervals, the
local density ratio is evaluated with the exact power antiderivative of the
weight (no quadrature in the checker), and the certificate is a supremum over
an adapted sample: a uniform dyadic grid plus every point where the moving
ball boundary x +/- rho(x) crosses an interval endpoint (the ratio is
piecewise smooth between those kinks, so the extrema live near them).

Generated combs have reflection-symmetric teeth centered near the nonzero
integers with seeded jitter; widths start proportional to eps * rho and all
shrink by 0.8 until the checker certifies the target.  Everything here is
bounded-extent: beyond the last tooth the ratio only decays, which makes the
certificate an under-approximation of the unbounded sets the continuum theory
allows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .measure import (
    DEFAULT_SEED,
    GridError,
    RootSystemConfig,
    interval_measure_1d,
)

__all__ = [
    "ThinSetError",
    "SetUnion",
    "ThinnessReport",
    "rho",
    "set_measure",
    "thinness_check",
    "generate_comb",
    "dilate",
]


class ThinSetError(ValueError):
    """Invalid set description or failed generation."""


@dataclass(frozen=True)
class SetUnion:
    """Disjoint sorted union of closed intervals (1D) or boxes (diagonal
    products of them; only d=1 supports measure-exact operations)."""

    d: int
    pieces: tuple[tuple[float, float], ...]
    bounded: bool = True

    def __post_init__(self):
        if self.d != 1:
            raise ThinSetError("only d=1 interval unions are supported")
        pieces = tuple((float(a), float(b)) for a, b in self.pieces)
        prev_end = -np.inf
        for a, b in pieces:
            if not (np.isfinite(a) and np.isfinite(b) and a < b):
                raise ThinSetError(f"invalid interval [{a}, {b}]")
            if a <= prev_end:
                raise ThinSetError("intervals must be sorted and disjoint")
            prev_end = b
        object.__setattr__(self, "pieces", pieces)

    @property
    def is_empty(self) -> bool:
        return len(self.pieces) == 0

    @property
    def extent(self) -> float:
        if self.is_empty:
            return 0.0
        return max(abs(self.pieces[0][0]), abs(self.pieces[-1][1]))

    def contains(self, x) -> np.ndarray:
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(xv.shape, dtype=bool)
        for a, b in self.pieces:
            out |= (xv >= a) & (xv <= b)
        return out

    def complement_within(self, lo: float, hi: float) -> "SetUnion":
        """Closure of [lo, hi] minus this set."""
        if lo >= hi:
            raise ThinSetError("need lo < hi")
        gaps = []
        cur = lo
        for a, b in self.pieces:
            if b <= lo or a >= hi:
                continue
            if max(a, lo) > cur:
                gaps.append((cur, max(a, lo)))
            cur = max(cur, min(b, hi))
        if cur < hi:
            gaps.append((cur, hi))
        return SetUnion(1, tuple(gaps))

    def to_json(self) -> str:
        return json.dumps(
            {"d": self.d, "pieces": [[a, b] for a, b in self.pieces]},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "SetUnion":
        data = json.loads(text)
        return SetUnion(int(data["d"]), tuple((a, b) for a, b in data["pieces"]))


def rho(x):
    """Localization radius min(1, 1/|x|)."""
    xv = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.minimum(1.0, 1.0 / np.abs(xv))
    return out if out.ndim else float(out)


def set_measure(S: SetUnion, cfg: RootSystemConfig, lo=-np.inf, hi=np.inf) -> float:
    """mu_k(S intersect [lo, hi]), exact."""
    total = 0.0
    for a, b in S.pieces:
        aa, bb = max(a, lo), min(b, hi)
        if aa < bb:
            total += interval_measure_1d(aa, bb, cfg.multiplicities[0])
    return total


def _density_ratio(S: SetUnion, x: np.ndarray, cfg: RootSystemConfig) -> np.ndarray:
    r = np.minimum(1.0, 1.0 / np.maximum(np.abs(x), 1e-300))
    out = np.empty(x.shape, dtype=float)
    for i, (xi, ri) in enumerate(zip(x, r)):
        ball = interval_measure_1d(xi - ri, xi + ri, cfg.multiplicities[0])
        out[i] = set_measure(S, cfg, xi - ri, xi + ri) / ball
    return out


def _kink_points(e: float) -> list[float]:
    # solutions of x - rho(x) = e and x + rho(x) = e
    pts = []
    for s in (-1.0, 1.0):
        # |x| <= 1 branch: x + s = e
        c = e - s
        if abs(c) <= 1.0:
            pts.append(c)
        # x > 1 branch: x + s/x = e  ->  x^2 - e x + s = 0
        disc = e * e - 4.0 * s
        if disc >= 0:
            for root in ((e + np.sqrt(disc)) / 2.0, (e - np.sqrt(disc)) / 2.0):
                if root > 1.0:
                    pts.append(root)
        # x < -1 branch: x - s/x = e  ->  x^2 - e x - s = 0
        disc = e * e + 4.0 * s
        if disc >= 0:
            for root in ((e + np.sqrt(disc)) / 2.0, (e - np.sqrt(disc)) / 2.0):
                if root < -1.0:
                    pts.append(root)
    return pts


@dataclass(frozen=True)
class ThinnessReport:
    epsilon_hat: float
    argmax: float
    n_samples: int
    R_check: float
    samples_per_unit: float = field(default=0.0)

    def __post_init__(self):
        if not 0.0 <= self.epsilon_hat <= 1.0 + 1e-12:
            raise ThinSetError(
                f"density ratio {self.epsilon_hat} outside [0, 1]"
            )


def thinness_check(
    S: SetUnion,
    cfg: RootSystemConfig,
    R_check: float | None = None,
    samples: int | None = None,
) -> ThinnessReport:
    """Certify sup over the adapted sample of the local density ratio.

    Sample = dyadic uniform grid on [-R_check, R_check] (``samples`` points,
    rounded up to a power of two, default 40 per unit length) + all ball
    boundary kinks x +/- rho(x) = endpoint with small perturbations + the rho
    kinks at 0 and +-1.  Measures are exact, so the only looseness is the
    finite sample.
    """
    if cfg.d != 1:
        raise ThinSetError("thinness certification is 1D only")
    if R_check is None:
        R_check = max(2.0 * S.extent, 2.0)
    if samples is None:
        samples = int(80 * R_check)
    m = max(8, int(np.ceil(np.log2(max(samples, 2)))))
    base = np.linspace(-R_check, R_check, 2**m + 1)
    extra = [0.0, 1.0, -1.0]
    offsets = np.array([0.0, -1e-9, 1e-9, -1e-4, 1e-4, -0.02, 0.02])
    for a, b in S.pieces:
        for e in (a, b):
            for p in _kink_points(e) + [e]:
                extra.extend(p + offsets)
    pts = np.concatenate([base, np.asarray(extra, dtype=float)])
    pts = pts[np.abs(pts) <= R_check + 1.0]
    pts = np.unique(pts)
    if S.is_empty:
        return ThinnessReport(0.0, 0.0, pts.size, float(R_check), 0.0)
    ratios = _density_ratio(S, pts, cfg)
    i = int(np.argmax(ratios))
    eps_hat = float(min(ratios[i], 1.0))
    return ThinnessReport(
        epsilon_hat=eps_hat,
        argmax=float(pts[i]),
        n_samples=int(pts.size),
        R_check=float(R_check),
        samples_per_unit=float((2**m + 1) / (2 * R_check)),
    )


def generate_comb(
    eps_target: float,
    extent: int,
    cfg: RootSystemConfig,
    seed: int | None = None,
    max_iters: int = 50,
) -> SetUnion:
    """Reflection-symmetric comb certified (eps_target, k)-thin.

    Teeth sit at jittered integer centers 1..extent (mirrored); all widths
    shrink by 0.8 until the exact checker certifies eps_hat <= eps_target.
    """
    if not 0.0 < eps_target < 1.0:
        raise ThinSetError(f"eps_target must be in (0, 1), got {eps_target}")
    if extent < 1:
        raise ThinSetError("extent must be >= 1")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    jitter = rng.uniform(-0.2, 0.2, size=extent)
    centers = np.arange(1, extent + 1) + jitter
    # initial half-widths: ratio at a tooth center is about width / (2 rho)
    half = eps_target * np.minimum(1.0, 1.0 / centers) * 0.85
    # keep teeth separated regardless of jitter
    half = np.minimum(half, 0.28)
    last = None
    for _ in range(max_iters):
        pieces = []
        for c, h in zip(centers, half):
            pieces.append((c - h, c + h))
        pieces = sorted(pieces + [(-b, -a) for a, b in pieces])
        S = SetUnion(1, tuple(pieces))
        report = thinness_check(S, cfg)
        last = (S, report)
        if report.epsilon_hat <= eps_target:
            return S
        half = half * 0.8
    raise ThinSetError(
        f"comb generation did not certify eps<={eps_target} after "
        f"{max_iters} shrink steps (last eps_hat={last[1].epsilon_hat:.4g} "
        f"at x={last[1].argmax:.4g})"
    )


def dilate(S: SetUnion, lam: float) -> SetUnion:
    """lam * S = {lam x : x in S}, lam > 0."""
    if not lam > 0:
        raise ThinSetError(f"dilation factor must be positive, got {lam}")
    return SetUnion(S.d, tuple((lam * a, lam * b) for a, b in S.pieces), S.bounded)
