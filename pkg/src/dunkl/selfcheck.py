"""Composite invariant suite: one deterministic pass over every module.

Each suite exercises the fast invariants of one module on a shared grid and
returns per-check records (name, value, tolerance, passed).  The aggregate
payload is plain data, so serializing it twice with the same seed yields
byte-identical output; nothing here reads clocks, hostnames, or global RNG
state.

This is a smoke layer, not the test suite: tolerances match the library
contracts but sample sizes are trimmed so the whole pass stays well under a
minute at the default n = 1024.
"""

from __future__ import annotations

import math

import numpy as np

from . import lp
from .annihilate import (
    annihilation_operator,
    operator_norm,
    pair_constants,
    project_space,
    verify_pair,
    verify_two_time,
)
from .ensembles import DEFAULT_SEED, schwartz_ensemble
from .kernel import dunkl_kernel, dunkl_kernel_series
from .measure import (
    RootSystemConfig,
    SampledFunction,
    build_grid,
    grid_from_json,
    grid_to_json,
    interval_measure_1d,
    rank1,
)
from .schrodinger import min_explicit_time, propagate
from .thinsets import SetUnion, generate_comb, thinness_check
from .transform import forward, inverse, plancherel_defect, transform_operator
from .translate import concentrated_bump, support_check, translate


def _check(name: str, value: float, tol: float) -> dict:
    value = float(value)
    return {
        "name": name,
        "value": value,
        "tolerance": float(tol),
        "passed": bool(math.isfinite(value) and value <= tol),
    }


def _suite(name: str, checks: list[dict]) -> dict:
    return {
        "name": name,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def _measure_suite(grid) -> dict:
    cfg = grid.cfg
    k = float(cfg.multiplicities[0])
    checks = [
        _check("weights-positive", float(np.max(-grid.weights)), 0.0),
        _check(
            "total-mass-vs-closed-form",
            abs(float(np.sum(grid.weights)) - interval_measure_1d(-grid.R, grid.R, k))
            / interval_measure_1d(-grid.R, grid.R, k),
            1e-13,
        ),
    ]
    # Gaussian mass: int e^{-x^2} dmu_k = 2^k Gamma(k + 1/2) in rank one
    gauss = float(np.sum(grid.weights * np.exp(-grid.x**2)))
    exact = 2.0**k * math.gamma(k + 0.5)
    checks.append(_check("gaussian-mass", abs(gauss - exact) / exact, 1e-10))
    round_trip = grid_from_json(grid_to_json(grid))
    checks.append(
        _check(
            "grid-json-round-trip",
            0.0 if grid_to_json(round_trip) == grid_to_json(grid) else 1.0,
            0.0,
        )
    )
    return _suite("measure", checks)


def _kernel_suite(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        k = float(rng.uniform(0.05, 3.0))
        x = float(rng.uniform(-4.5, 4.5))
        y = float(rng.uniform(-4.4, 4.4))
        cfg = rank1(k)
        closed = dunkl_kernel(x, y, cfg, mode="plain")
        series = dunkl_kernel_series(x, y, k)
        # plain mode grows like e^{|xy|}; compare relative once above 1
        worst = max(worst, abs(closed - series) / max(1.0, abs(series)))
    cfg = rank1(0.8)
    sym = abs(dunkl_kernel(1.3, 2.1, cfg) - dunkl_kernel(2.1, 1.3, cfg))
    scale = abs(dunkl_kernel(0.5 * 1.3, 2.1, cfg) - dunkl_kernel(1.3, 0.5 * 2.1, cfg))
    at_zero = abs(dunkl_kernel(0.0, 1.7, cfg) - 1.0)
    modulus = abs(dunkl_kernel(2.0, 3.0, cfg)) - 1.0
    return _suite(
        "kernel",
        [
            _check("closed-form-vs-series", worst, 1e-10),
            _check("symmetry", sym, 1e-12),
            _check("rescaling", scale, 1e-12),
            _check("normalized-at-zero", at_zero, 1e-14),
            _check("imaginary-mode-bounded", modulus, 1e-12),
        ],
    )


def _transform_suite(grid, op) -> dict:
    defect = plancherel_defect(op, degree=20)
    x = grid.x
    f = SampledFunction(
        grid, ((1.0 + 0.3 * x) * np.exp(-0.7 * x**2)).astype(np.complex128)
    ).normalized()
    round_trip = float(np.max(np.abs(inverse(forward(f, op), op).values - f.values)))
    even = SampledFunction(grid, np.exp(-(x**2)).astype(np.complex128))
    hat = forward(even, op).values
    parity = float(np.max(np.abs(hat - hat[::-1]))) + float(np.max(np.abs(hat.imag)))
    return _suite(
        "transform",
        [
            _check("plancherel-defect-degree-20", defect, 1e-5),
            _check("round-trip", round_trip, 1e-7),
            _check("even-real-spectrum", parity, 1e-10),
        ],
    )


def _translate_suite(grid, op) -> dict:
    x = grid.x
    f = SampledFunction(
        grid, ((1.0 + 0.4 * x) * np.exp(-0.6 * (x - 0.3) ** 2)).astype(np.complex128)
    )
    checks = []
    # tau_y f(x) = tau_{-x} f(-y); the grid is reflection-symmetric so both
    # sides land on nodes
    worst = 0.0
    for a, b in ((0.7, -1.2), (1.9, 0.4), (-2.3, -0.8)):
        ia = int(np.argmin(np.abs(x - a)))
        ib = int(np.argmin(np.abs(x - b)))
        lhs = translate(f, float(x[ia]), op=op).values[ib]
        rhs = translate(f, float(-x[ib]), op=op).values[grid.n - 1 - ia]
        worst = max(worst, abs(lhs - rhs))
    checks.append(_check("point-symmetry", worst, 1e-8))
    g = SampledFunction(grid, np.exp(-0.5 * (x + 0.6) ** 2).astype(np.complex128))
    dual = abs(
        np.sum(grid.weights * translate(f, 1.3, op=op).values * g.values)
        - np.sum(grid.weights * translate(g, -1.3, op=op).values * f.values)
    )
    checks.append(_check("pairing-symmetry", dual, 1e-8))
    radial = SampledFunction(grid, np.exp(-(x**2)).astype(np.complex128))
    mass0 = radial.mass()
    mass1 = translate(radial, 1.7, op=op).mass()
    checks.append(_check("radial-mass-conservation", abs(mass1 - mass0) / abs(mass0), 1e-6))
    l1_ratio = translate(radial, 1.1, op=op).l1_norm() / radial.l1_norm() - 1.0
    checks.append(_check("l1-non-expansive", l1_ratio, 1e-6))
    bump = concentrated_bump(grid, 2.0, op=op)
    leak = support_check(bump, 2.0, 3.0, op=op)
    checks.append(_check("support-leak", leak.values["leak_rel"], 1e-6))
    return _suite("translate", checks)


def _schrodinger_suite(grid, op) -> dict:
    x = grid.x
    u0 = SampledFunction(
        grid, (np.exp(-0.8 * (x - 0.4) ** 2 + 0.5j * x)).astype(np.complex128)
    ).normalized()
    t = max(1.0, 1.25 * min_explicit_time(grid))
    um = propagate(u0, t, method="multiplier", op=op)
    ue = propagate(u0, t, method="explicit", op=op)
    cross = float(
        np.sqrt(np.sum(grid.weights * np.abs(um.u.values - ue.u.values) ** 2))
    )
    conserve = abs(um.norm() - u0.norm())
    return _suite(
        "schrodinger",
        [
            _check("explicit-vs-multiplier", cross, 1e-5),
            _check("norm-conservation", conserve, 1e-5),
        ],
    )


def _thinsets_suite(cfg, seed: int) -> dict:
    empty = SetUnion(d=1, pieces=())
    eps_empty = thinness_check(empty, cfg).epsilon_hat
    comb = generate_comb(0.05, 3, cfg, seed=seed)
    eps_comb = thinness_check(comb, cfg).epsilon_hat
    sub = SetUnion(d=1, pieces=(comb.pieces[0],))
    eps_sub = thinness_check(sub, cfg).epsilon_hat
    return _suite(
        "thinsets",
        [
            _check("empty-set-thinness", eps_empty, 0.0),
            _check("comb-certified", eps_comb, 0.05),
            _check("monotone-under-subset", eps_sub - eps_comb, 1e-12),
        ],
    )


def _annihilate_suite(cfg, op, seed: int) -> dict:
    S = generate_comb(0.05, 3, cfg, seed=seed)
    Sigma = generate_comb(0.05, 3, cfg, seed=seed + 1)
    H = annihilation_operator(S, Sigma, op)
    norm_h = operator_norm(H)
    constants = pair_constants(norm_h)
    members = schwartz_ensemble(op.grid, size=12, seed=seed)
    report = verify_pair(members, S, Sigma, constants, op=op)
    f = members[0]
    proj = project_space(f, S)
    idem = float(np.max(np.abs(project_space(proj, S).values - proj.values)))
    return _suite(
        "annihilate",
        [
            _check("norm-below-one", norm_h, 1.0 - 1e-9),
            _check(
                "pair-inequality-margin",
                report.values["max_ratio"] / report.tolerances["bound"],
                1.0,
            ),
            _check("projection-idempotent", idem, 1e-14),
        ],
    )


def _lp_suite(grid, cfg, seed: int) -> dict:
    family = lp.build_family(6, grid, cfg)
    checks = [
        _check("bump-plateau", abs(lp.bump_profile(0.5) - 1.0), 0.0),
        _check("bump-support", abs(lp.bump_profile(2.5)), 0.0),
        _check("profile-imaginary-part", family.phi.values.imag.max(initial=0.0), 1e-9),
    ]
    xi = np.linspace(0.0, 2.0 * grid.R, 25)
    recon = float(np.max(np.abs(family.transform_of_table(xi) - family.b(xi))))
    checks.append(_check("profile-transform-matches-bump", recon, 1e-7))
    checks.append(
        _check(
            "dilated-l1-invariance",
            abs(family.phi_j_l1(3) - family.phi_l1) / family.phi_l1,
            1e-6,
        )
    )
    x = grid.x
    f = SampledFunction(
        grid, np.exp(-0.8 * (x - 0.5) ** 2 + 0.9j * x).astype(np.complex128)
    ).normalized()
    N = 4
    Lf = lp.apply_L_N(f, N, family)
    Tf = lp.apply_T_N(f, N, family)
    sums = sum(lp.psi_profile(j, np.abs(x)) for j in range(N + 1))
    part = float(np.max(np.abs(Lf.values + Tf.values - sums * f.values)))
    checks.append(_check("partition-identity", part, 1e-8))
    worst = 0.0
    for xv in (0.0, 0.4, 1.3):
        i = int(np.argmin(np.abs(x - xv)))
        row = np.zeros(grid.n)
        for j in range(N + 1):
            c = float(lp.psi_profile(j, abs(float(x[i]))))
            if c != 0.0:
                row += c * family.translated_row(j, float(x[i]), x)
        quad = complex(np.sum(grid.weights * row * f.values))
        worst = max(worst, abs(quad - Lf.values[i]))
    checks.append(_check("kernel-consistency", worst, 1e-6))
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-grid.R, grid.R, 6)
    two_form = max(
        abs(
            lp.kernel_M_N(a, b, N, family, form="direct")
            - lp.kernel_M_N(a, b, N, family, form="regrouped")
        )
        for a in pts
        for b in pts
    )
    checks.append(_check("m-kernel-two-forms", two_form, 1e-7))
    return _suite("littlewood-paley", checks)


def _two_time_suite(cfg, op, seed: int) -> dict:
    A = generate_comb(0.05, 3, cfg, seed=seed)
    B = generate_comb(0.05, 3, cfg, seed=seed + 1)
    members = schwartz_ensemble(op.grid, size=8, seed=seed + 2)
    report = verify_two_time(members, A, B, 0.0, 1.0, op=op)
    return _suite(
        "two-time",
        [
            _check(
                "observability-margin",
                report.values["max_ratio"] / report.tolerances["bound"],
                1.0,
            ),
            _check("constant-positive", 1.0 - report.values["C"], 0.0),
        ],
    )


def run_selfcheck(
    cfg: RootSystemConfig | None = None,
    R: float = 12.0,
    n: int = 1024,
    seed: int = DEFAULT_SEED,
) -> dict:
    """Run every module suite on one shared grid; returns a plain-data payload."""
    if cfg is None:
        cfg = rank1(1.0)
    grid = build_grid(R, n, cfg)
    op = transform_operator(grid)
    suites = [
        _measure_suite(grid),
        _kernel_suite(seed),
        _transform_suite(grid, op),
        _translate_suite(grid, op),
        _schrodinger_suite(grid, op),
        _thinsets_suite(cfg, seed),
        _annihilate_suite(cfg, op, seed),
        _lp_suite(grid, cfg, seed),
        _two_time_suite(cfg, op, seed),
    ]
    return {
        "seed": int(seed),
        "grid": {"R": float(R), "n": int(n)},
        "multiplicities": [float(v) for v in cfg.multiplicities],
        "suites": suites,
        "passed": all(s["passed"] for s in suites),
    }
