"""The Dunkl transform as a dense quadrature operator.

Definition (with the Gaussian-normalized constant c_h from ``measure``):

    D_k f(y)      = c_h integral f(x) E(x, -i y) dmu_k(x)
    D_k^{-1} g(x) = c_h integral g(y) E(i x, y) dmu_k(y),

and E(i x, y) = conj(E(x, -i y)) for real x, y.  On a grid with nodes x_i and
weights w_i (frequency grid = space grid by construction) the forward map is
the matrix K[j, i] = c_h E(x_i, -i x_j) w_i.  The unitarized form

    U = c_h W^(1/2) E W^(1/2),      W = diag(w),

is the object whose deviation from unitarity measures the Plancherel defect.
The defect is evaluated on the subspace spanned by samples of the Schwartz
family x^m exp(-|x|^2 / 2), m <= degree: band-limited, well-resolved functions
for which the quadrature represents the continuum transform.  The defect over
the full discrete space is reported separately and is not small (the grid
truncates frequencies), which is expected and not asserted against.

At k = 0 the kernel is exp(-i x y) and D_0 is the unitary Fourier transform;
for every k the Gaussian exp(-|x|^2 / 2) is a fixed point.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernel import kernel_factor_minus_i
from .measure import (
    GridError,
    QuadratureGrid,
    SampledFunction,
    grid_from_json,
    grid_to_json,
    normalization_constant,
)

__all__ = [
    "TransformOperator",
    "transform_operator",
    "forward",
    "inverse",
    "plancherel_defect",
    "schwartz_family",
    "export_operator",
    "import_operator",
    "OPERATOR_MAGIC",
]

OPERATOR_MAGIC = b"DUNKLOP1"


@dataclass(frozen=True, eq=False)
class TransformOperator:
    """Dense transform pair on one grid.

    ``emat[j, i] = E(x_i, -i x_j)``; forward and inverse applications reuse it
    without materializing separate matrices.
    """

    grid: QuadratureGrid
    c_h: float
    emat: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    def forward_values(self, values: np.ndarray) -> np.ndarray:
        return self.c_h * (self.emat @ (self.grid.weights * values))

    def inverse_values(self, values: np.ndarray) -> np.ndarray:
        return self.c_h * (self.emat.conj().T @ (self.grid.weights * values))

    def forward(self, f: SampledFunction) -> SampledFunction:
        self._check(f)
        return SampledFunction(self.grid, self.forward_values(f.values))

    def inverse(self, g: SampledFunction) -> SampledFunction:
        self._check(g)
        return SampledFunction(self.grid, self.inverse_values(g.values))

    def apply_multiplier(self, f: SampledFunction, multiplier: np.ndarray) -> SampledFunction:
        """D_k^{-1}( multiplier * D_k f ): the spectral calculus workhorse."""
        self._check(f)
        return SampledFunction(
            self.grid, self.inverse_values(multiplier * self.forward_values(f.values))
        )

    def unitarized_apply(self, v: np.ndarray) -> np.ndarray:
        sw = np.sqrt(self.grid.weights)
        return self.c_h * sw * (self.emat @ (sw * v))

    def unitarized_adjoint_apply(self, v: np.ndarray) -> np.ndarray:
        sw = np.sqrt(self.grid.weights)
        return self.c_h * sw * (self.emat.conj().T @ (sw * v))

    def unitarized_matrix(self) -> np.ndarray:
        sw = np.sqrt(self.grid.weights)
        return self.c_h * (sw[:, None] * self.emat * sw[None, :])

    def _check(self, f: SampledFunction) -> None:
        if f.grid is not self.grid:
            raise GridError("sampled function lives on a different grid")


def _kernel_matrix(grid: QuadratureGrid) -> np.ndarray:
    """E[j, i] = E(x_i, -i x_j), product of coordinate factors."""
    out = None
    for axis in range(grid.d):
        coords = grid.nodes[:, axis]
        u = np.multiply.outer(coords, coords)
        fac = kernel_factor_minus_i(u, grid.cfg.multiplicities[axis])
        out = fac if out is None else out * fac
    return out


@lru_cache(maxsize=8)
def _operator_for(grid: QuadratureGrid) -> TransformOperator:
    emat = _kernel_matrix(grid)
    emat.flags.writeable = False
    return TransformOperator(
        grid=grid, c_h=normalization_constant(grid.cfg), emat=emat
    )


def transform_operator(grid: QuadratureGrid) -> TransformOperator:
    """Build (or fetch the cached) transform pair for a grid."""
    return _operator_for(grid)


def forward(f: SampledFunction, op: TransformOperator | None = None) -> SampledFunction:
    op = op or transform_operator(f.grid)
    return op.forward(f)


def inverse(g: SampledFunction, op: TransformOperator | None = None) -> SampledFunction:
    op = op or transform_operator(g.grid)
    return op.inverse(g)


def schwartz_family(grid: QuadratureGrid, degree: int = 20) -> np.ndarray:
    """Samples of x^m exp(-x^2/2), m = 0..degree, as columns (1D grids)."""
    if grid.d != 1:
        raise GridError("the polynomial-Gaussian family is defined for 1D grids")
    x = grid.x
    cols = [x**m * np.exp(-0.5 * x**2) for m in range(degree + 1)]
    return np.stack(cols, axis=1).astype(np.complex128)


def plancherel_defect(
    op: TransformOperator, degree: int = 20, full: bool = False, seed: int = 0
) -> float:
    """Operator-norm defect of U* U - I.

    Restricted (default) to the orthonormalized Schwartz subspace: returns
    sigma_max((U* U - I) Q) with Q an orthonormal basis of the family.  With
    ``full=True`` estimates the defect over the whole discrete space by power
    iteration; that number reflects grid truncation and is informational only.
    """
    if full:
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(60):
            u = op.unitarized_adjoint_apply(op.unitarized_apply(v)) - v
            nrm = np.linalg.norm(u)
            if nrm == 0.0:
                return 0.0
            lam, v = nrm, u / nrm
        return float(lam)
    fam = schwartz_family(op.grid, degree)
    fam = np.sqrt(op.grid.weights)[:, None] * fam  # unitarized coordinates
    q, _ = np.linalg.qr(fam)
    img = np.stack(
        [op.unitarized_adjoint_apply(op.unitarized_apply(q[:, m])) - q[:, m]
         for m in range(q.shape[1])],
        axis=1,
    )
    return float(np.linalg.svd(img, compute_uv=False)[0])


def export_operator(op: TransformOperator, path: str, which: str = "forward") -> None:
    """Write an operator matrix: magic, header length, grid JSON header, raw
    row-major complex128 entries.

    The forward matrix is K = c_h E diag(w); the inverse matrix is its
    conjugate transpose with weights on the other side.
    """
    if which not in ("forward", "inverse"):
        raise GridError(f"unknown operator selector: {which!r}")
    w = op.grid.weights
    if which == "forward":
        mat = op.c_h * (op.emat * w[None, :])
    else:
        mat = op.c_h * (op.emat.conj().T * w[None, :])
    header = {
        "version": 1,
        "which": which,
        "dtype": "complex128",
        "order": "row-major",
        "shape": [op.n, op.n],
        "grid": json.loads(grid_to_json(op.grid)),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(OPERATOR_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(mat, dtype=np.complex128).tobytes())


def import_operator(path: str) -> tuple[np.ndarray, dict]:
    with open(path, "rb") as fh:
        magic = fh.read(len(OPERATOR_MAGIC))
        if magic != OPERATOR_MAGIC:
            raise GridError("not an operator dump")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        n0, n1 = header["shape"]
        data = np.frombuffer(fh.read(), dtype=np.complex128).reshape(n0, n1)
    grid_from_json(json.dumps(header["grid"]))  # validates reconstructibility
    return data, header
