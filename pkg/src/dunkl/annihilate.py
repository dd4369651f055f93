"""Annihilating pairs: projections, the operator H, and the norm inequalities.

For a space set S and a frequency set Sigma, the composition

    H f = chi_Sigma D_k (chi_S f)

measures how much a function can concentrate on S while its transform
concentrates on Sigma.  On the grid the transform acts through its unitarized
matrix U~, the indicator projections become 0/1 diagonals P, and H is the
dense block of P_Sigma U~ P_S between the member nodes.  When ||H|| < 1 the
pair annihilates with explicit constants

    D = (1 - ||H||)^(-1),   C = 1 + D,

and every f obeys ||f|| <= C (||chi_{S^c} f|| + ||chi_{Sigma^c} D_k f||).
``verify_pair`` stresses that bound on a seeded Schwartz ensemble plus
adversarial members (the top singular vector of H, functions piled onto S,
functions whose transform piles onto Sigma).  Frequency-side tails are
measured as Plancherel complements, which keeps the certified inequality
valid for members whose rough spectra the truncated box cannot represent; see
``_pair_ratio``.

``verify_two_time`` runs the full two-time pipeline: a free Schrodinger
solution observed outside a thin set A at time S and outside the dilated set
2(T-S)B at time T controls the initial mass with constant 2C^2, where C comes
from the pair (A, B).  The chirp change of variables that proves this maps
u(., T) restricted to (2(T-S)B)^c onto the transform of a unimodular
modulation of u(., S) restricted to B^c, so the pair constant transfers
unchanged; the verifier checks the resulting ratio directly with the
multiplier propagator.

Everything here is a discretization certificate, not a proof: norms live on
the unitarized grid operator, and reports carry (n, R) so stability under
refinement can be checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import schwartz_ensemble
from .measure import DEFAULT_SEED, GridError, SampledFunction
from .reports import OperatorReport
from .schrodinger import propagate_multiplier
from .thinsets import SetUnion, dilate
from .transform import TransformOperator, transform_operator

__all__ = [
    "AnnihilationOperator",
    "PairConstants",
    "ConvergenceError",
    "annihilation_operator",
    "project_space",
    "project_freq",
    "operator_norm",
    "pair_constants",
    "verify_pair",
    "verify_two_time",
    "norm_curve",
]


class ConvergenceError(RuntimeError):
    """Iterative norm estimation failed to settle."""


@dataclass(frozen=True, eq=False)
class AnnihilationOperator:
    """Dense block of P_Sigma U~ P_S between member nodes.

    ``block[a, b]`` couples S-node ``s_index[b]`` to Sigma-node
    ``sigma_index[a]``; all other entries of the full matrix vanish.
    """

    space_set: SetUnion
    freq_set: SetUnion
    op: TransformOperator
    s_index: np.ndarray
    sigma_index: np.ndarray
    block: np.ndarray

    @property
    def n(self) -> int:
        return self.op.n

    def matrix(self) -> np.ndarray:
        """Full n-by-n matrix P_Sigma U~ P_S (zero outside the block)."""
        full = np.zeros((self.n, self.n), dtype=np.complex128)
        if self.block.size:
            full[np.ix_(self.sigma_index, self.s_index)] = self.block
        return full


@dataclass(frozen=True)
class PairConstants:
    """Annihilating-pair constants from the operator norm."""

    norm_h: float
    D: float
    C: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.norm_h < 1.0:
            raise ValueError(
                f"operator norm {self.norm_h}: not an annihilating certificate "
                "at this discretization"
            )


def _node_mask(S: SetUnion, op: TransformOperator) -> np.ndarray:
    if op.grid.d != 1:
        raise GridError("thin-set projections are defined for 1D grids")
    return S.contains(op.grid.x)


def annihilation_operator(
    S: SetUnion, Sigma: SetUnion, op: TransformOperator
) -> AnnihilationOperator:
    s_index = np.flatnonzero(_node_mask(S, op))
    sigma_index = np.flatnonzero(_node_mask(Sigma, op))
    if s_index.size == 0 or sigma_index.size == 0:
        block = np.zeros((sigma_index.size, s_index.size), dtype=np.complex128)
    else:
        unitary = op.unitarized_matrix()
        block = np.ascontiguousarray(unitary[np.ix_(sigma_index, s_index)])
    return AnnihilationOperator(S, Sigma, op, s_index, sigma_index, block)


def project_space(f: SampledFunction, S: SetUnion) -> SampledFunction:
    """chi_S f."""
    mask = S.contains(f.grid.x)
    return SampledFunction(f.grid, np.where(mask, f.values, 0.0))


def project_freq(
    f: SampledFunction, Sigma: SetUnion, op: TransformOperator | None = None
) -> SampledFunction:
    """Band limitation: D_k^{-1}(chi_Sigma D_k f)."""
    if op is None:
        op = transform_operator(f.grid)
    mask = Sigma.contains(op.grid.x)
    return op.apply_multiplier(f, mask.astype(float))


def operator_norm(
    H: AnnihilationOperator,
    method: str = "svd",
    *,
    tol: float = 1e-8,
    max_iters: int = 500,
    seed: int | None = None,
) -> float:
    """Largest singular value of the block."""
    if H.block.size == 0:
        return 0.0
    if method == "svd":
        return float(np.linalg.svd(H.block, compute_uv=False)[0])
    if method != "power":
        raise ValueError(f"unknown method {method!r}; use 'svd' or 'power'")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    v = rng.normal(size=H.block.shape[1]) + 1j * rng.normal(size=H.block.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iters):
        w = H.block.conj().T @ (H.block @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        new_sigma = float(np.sqrt(nrm))
        v = w / nrm
        if abs(new_sigma - sigma) <= tol * max(new_sigma, 1.0):
            return new_sigma
        sigma = new_sigma
    raise ConvergenceError(
        f"power iteration did not converge within {max_iters} iterations "
        f"(last estimate {sigma})"
    )


def pair_constants(norm_h: float) -> PairConstants:
    """D = (1 - ||H||)^(-1), C = 1 + D."""
    if not 0.0 <= norm_h < 1.0:
        raise ValueError(
            f"operator norm {norm_h}: not an annihilating certificate "
            "at this discretization"
        )
    D = 1.0 / (1.0 - norm_h)
    return PairConstants(norm_h=norm_h, D=D, C=1.0 + D)


def _adversarial_members(H: AnnihilationOperator) -> list[SampledFunction]:
    grid = H.op.grid
    members: list[SampledFunction] = []
    # top right-singular vector lifted from unitarized coordinates
    if H.block.size:
        _, _, vh = np.linalg.svd(H.block, full_matrices=False)
        vals = np.zeros(grid.n, dtype=np.complex128)
        vals[H.s_index] = vh[0].conj() / np.sqrt(grid.weights[H.s_index])
        members.append(SampledFunction(grid, vals).normalized())
    gauss = SampledFunction(grid, np.exp(-0.5 * grid.x**2).astype(np.complex128))
    clipped = project_space(gauss, H.space_set)
    if clipped.norm() > 0.0:
        members.append(clipped.normalized())
    banded = project_freq(gauss, H.freq_set, H.op)
    if banded.norm() > 0.0:
        members.append(banded.normalized())
    return members


def _pair_tails(
    f: SampledFunction, s_mask: np.ndarray, sigma_mask: np.ndarray, op: TransformOperator
) -> tuple[float, float, float]:
    """(||f||, ||chi_{S^c} f||, ||chi_{Sigma^c} D_k f||) on the grid.

    The Sigma^c tail is the Plancherel complement ||f||^2 - ||chi_Sigma D_k f||^2
    rather than a direct sum over Sigma^c nodes.  The true transform conserves
    mass, but the grid one is isometric only on box-band-limited functions, so
    a direct tail collapses for rough members (comb-supported spikes) and the
    ratio would spuriously exceed C.  With the complement, ||U~|| <= 1 alone
    gives tail_S + tail_Sigma >= (1 - ||H||) ||f||, so the certificate covers
    every grid vector.
    """
    w = op.grid.weights
    fh = op.forward_values(f.values)
    outside_s = np.sqrt(np.sum(w[~s_mask] * np.abs(f.values[~s_mask]) ** 2))
    on_sigma_sq = float(np.sum(w[sigma_mask] * np.abs(fh[sigma_mask]) ** 2))
    outside_sigma = np.sqrt(max(f.norm() ** 2 - on_sigma_sq, 0.0))
    return f.norm(), float(outside_s), outside_sigma


def verify_pair(
    ensemble: list[SampledFunction] | None,
    S: SetUnion,
    Sigma: SetUnion,
    constants: PairConstants,
    op: TransformOperator | None = None,
    *,
    size: int = 50,
    seed: int | None = None,
    rel_tol: float = 1e-6,
) -> OperatorReport:
    """Max of ||f|| / (||chi_{S^c} f|| + ||chi_{Sigma^c} D_k f||) over the ensemble.

    With ``ensemble=None`` draws `size` seeded Schwartz members; adversarial
    members are always appended.  Pass iff the max ratio <= C (1 + rel_tol).
    """
    if op is None:
        op = transform_operator_for(ensemble)
    H = annihilation_operator(S, Sigma, op)
    if ensemble is None:
        ensemble = schwartz_ensemble(op.grid, size, seed)
    members = list(ensemble) + _adversarial_members(H)
    s_mask = _node_mask(S, op)
    sigma_mask = _node_mask(Sigma, op)
    terms = [_pair_tails(f, s_mask, sigma_mask, op) for f in members]
    ratios = [nrm / (a + b) for nrm, a, b in terms]
    max_ratio = float(np.max(ratios))
    # squared form: ||f||^2 <= C^2 (a + b)^2 <= 2 C^2 (a^2 + b^2)
    max_sq_ratio = float(np.max([nrm**2 / (a**2 + b**2) for nrm, a, b in terms]))
    bound = constants.C * (1.0 + rel_tol)
    return OperatorReport(
        id="annihilating-pair",
        params={
            "n": op.n,
            "R": op.grid.R,
            "multiplicities": list(op.grid.cfg.multiplicities),
            "set_S": S.to_json(),
            "set_Sigma": Sigma.to_json(),
            "ensemble_size": len(members),
        },
        values={
            "norm_H": constants.norm_h,
            "D": constants.D,
            "C": constants.C,
            "max_ratio": max_ratio,
            "max_squared_ratio": max_sq_ratio,
            "ratios": [float(r) for r in ratios],
        },
        tolerances={"bound": bound, "squared_bound": 2.0 * constants.C**2},
        passed=bool(max_ratio <= bound),
    )


def transform_operator_for(ensemble) -> TransformOperator:
    if not ensemble:
        raise GridError("need an operator or a non-empty ensemble to locate the grid")
    return transform_operator(ensemble[0].grid)


def verify_two_time(
    ensemble: list[SampledFunction],
    A: SetUnion,
    B: SetUnion,
    s_time: float,
    t_time: float,
    op: TransformOperator | None = None,
    *,
    rel_tol: float = 1e-4,
) -> OperatorReport:
    """Two-time observability: ||u0||^2 <= 2 C^2 (mass outside A at time S
    plus mass outside 2(T-S)B at time T), with C from the pair (A, B)."""
    if not s_time >= 0.0:
        raise ValueError(f"S must be >= 0, got {s_time}")
    if not t_time > s_time:
        raise ValueError(f"need T > S, got S={s_time}, T={t_time}")
    if op is None:
        op = transform_operator_for(ensemble)
    delta = t_time - s_time
    H = annihilation_operator(A, B, op)
    constants = pair_constants(operator_norm(H))
    grid = op.grid
    w = grid.weights
    outside_a = ~A.contains(grid.x)
    outside_dilated = ~dilate(B, 2.0 * delta).contains(grid.x)
    ratios = []
    for u0 in ensemble:
        u_s = propagate_multiplier(u0, s_time, op) if s_time > 0.0 else u0
        u_t = propagate_multiplier(u0, t_time, op)
        rhs = float(
            np.sum(w[outside_a] * np.abs(u_s.values[outside_a]) ** 2)
            + np.sum(w[outside_dilated] * np.abs(u_t.values[outside_dilated]) ** 2)
        )
        ratios.append(u0.norm() ** 2 / rhs)
    max_ratio = float(np.max(ratios))
    bound = 2.0 * constants.C**2 * (1.0 + rel_tol)
    return OperatorReport(
        id="two-time-observability",
        params={
            "n": op.n,
            "R": grid.R,
            "multiplicities": list(grid.cfg.multiplicities),
            "set_A": A.to_json(),
            "set_B": B.to_json(),
            "S": s_time,
            "T": t_time,
            "ensemble_size": len(ensemble),
        },
        values={
            "norm_H": constants.norm_h,
            "D": constants.D,
            "C": constants.C,
            "max_ratio": max_ratio,
            "ratios": [float(r) for r in ratios],
        },
        tolerances={"bound": bound},
        passed=bool(max_ratio <= bound),
    )


def norm_curve(
    eps_targets,
    extent: int,
    op: TransformOperator,
    *,
    seed: int | None = None,
) -> list[dict]:
    """Empirical eps -> ||H|| map over generated comb pairs.

    S and Sigma get independent jitter.  No threshold is asserted; the curve
    is reported so the sqrt(eps) trend can be judged.
    """
    from .thinsets import generate_comb, thinness_check

    cfg = op.grid.cfg
    base = DEFAULT_SEED if seed is None else seed
    rows = []
    for i, eps in enumerate(eps_targets):
        S = generate_comb(eps, extent, cfg, seed=base + 2 * i)
        Sigma = generate_comb(eps, extent, cfg, seed=base + 2 * i + 1)
        nh = operator_norm(annihilation_operator(S, Sigma, op))
        rows.append(
            {
                "eps_target": float(eps),
                "eps_hat_S": thinness_check(S, cfg).epsilon_hat,
                "eps_hat_Sigma": thinness_check(Sigma, cfg).epsilon_hat,
                "norm_H": nh,
                "norm_over_sqrt_eps": nh / float(np.sqrt(eps)),
            }
        )
    return rows
