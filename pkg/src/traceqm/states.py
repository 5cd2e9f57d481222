"""State vectors and the two inner products they carry.

States live either in a bare finite-dimensional space or on a uniform 1D
grid with hard-wall (dirichlet) boundaries.  Grid-bound inner products carry
the cell width as a quadrature weight, so sums approximate integrals over
the interval.

Two inner products coexist:

* ``complex_inner`` is the ordinary sesquilinear product, returned as a
  :class:`~traceqm.scalars.TraceScalar`.
* ``real_inner`` is its trace form, ``trace(complex_inner(f, g))``, which is
  bilinear over the reals.  A complex-normalized state f therefore has
  ``real_inner(f, f) == TRACE_OF_ONE == 2``.

Normalization always refers to the complex inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSetError,
    DimensionError,
    GridError,
    SamplingError,
    ZeroVectorError,
)
from .scalars import TraceScalar, trace

__all__ = [
    "TRACE_OF_ONE",
    "GridMeta",
    "StateVector",
    "complex_inner",
    "real_inner",
    "normalize",
    "superpose",
    "gram_schmidt",
    "grid_sample",
]

#: trace of the unit scalar; equals real_inner(f, f) for complex-normalized f.
TRACE_OF_ONE = 2.0

#: a state flagged normalized must have |norm - 1| within this bound.
NORMALIZED_TOL = 1e-10

#: projection residual below which a vector set counts as dependent.
DEPENDENT_TOL = 1e-10

MIN_GRID_POINTS = 8


@dataclass(frozen=True)
class GridMeta:
    """Uniform 1D grid of interior points on (0, length) with hard walls.

    With ``npoints`` interior points the spacing is ``length/(npoints + 1)``
    and the sample positions are ``x_j = j*spacing`` for j = 1..npoints; the
    walls at 0 and length are not stored (the state vanishes there).
    ``mass`` and ``hbar`` travel with the grid so model builders and
    analytic references agree on units.
    """

    length: float
    npoints: int
    mass: float = 1.0
    hbar: float = 1.0
    boundary: str = "dirichlet"

    def __post_init__(self):
        if not (isinstance(self.npoints, (int, np.integer)) and not isinstance(self.npoints, bool)):
            raise GridError(f"npoints must be an integer, got {self.npoints!r}")
        object.__setattr__(self, "npoints", int(self.npoints))
        for name in ("length", "mass", "hbar"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not np.isfinite(value) or value <= 0.0:
                raise GridError(f"{name} must be positive and finite, got {value!r}")
        if self.npoints < MIN_GRID_POINTS:
            raise GridError(f"need at least {MIN_GRID_POINTS} grid points, got {self.npoints}")
        if self.boundary != "dirichlet":
            raise GridError(f"unsupported boundary {self.boundary!r}")

    @property
    def spacing(self) -> float:
        return self.length / (self.npoints + 1)

    @property
    def positions(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.npoints + 1, dtype=np.float64)


class StateVector:
    """Immutable coefficient vector, optionally bound to a grid.

    Coefficients are elements of the dimension-two scalar algebra, held as a
    read-only complex128 array.
    """

    __slots__ = ("coeffs", "grid")

    def __init__(self, coeffs, grid: GridMeta | None = None):
        arr = np.array(coeffs, dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise DimensionError(f"coefficients must form a nonempty 1D array, got shape {arr.shape}")
        if grid is not None and arr.size != grid.npoints:
            raise GridError(f"{arr.size} coefficients do not fit a grid of {grid.npoints} points")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "grid", grid)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        """Complex norm, with the grid weight when bound."""
        return _raw_norm(self.coeffs, self.grid)

    @property
    def normalized(self) -> bool:
        return abs(self.norm() - 1.0) <= NORMALIZED_TOL

    def __repr__(self):
        where = f" on {self.grid.npoints}-point grid" if self.grid is not None else ""
        return f"<StateVector dim={self.dim}{where}>"


def _weight(grid: GridMeta | None) -> float:
    return 1.0 if grid is None else grid.spacing


def _raw_inner(a: np.ndarray, b: np.ndarray, grid: GridMeta | None) -> complex:
    return complex(np.vdot(a, b)) * _weight(grid)


def _raw_norm(a: np.ndarray, grid: GridMeta | None) -> float:
    return float(np.linalg.norm(a)) * np.sqrt(_weight(grid))


def _require_compatible(f: StateVector, g: StateVector):
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if f.grid != g.grid:
        raise GridError("states are bound to different grids")


def complex_inner(f: StateVector, g: StateVector) -> TraceScalar:
    """Sesquilinear inner product, conjugate-linear in ``f``."""
    _require_compatible(f, g)
    raw = _raw_inner(f.coeffs, g.coeffs, f.grid)
    return TraceScalar(raw.real, raw.imag)


def real_inner(f: StateVector, g: StateVector) -> float:
    """Trace form of the complex inner product: 2*Re complex_inner(f, g)."""
    return trace(complex_inner(f, g))


def normalize(f: StateVector) -> StateVector:
    """Rescale to unit complex norm; the zero vector is rejected."""
    nrm = f.norm()
    if nrm == 0.0:
        raise ZeroVectorError("cannot normalize the zero vector")
    return StateVector(f.coeffs / nrm, f.grid)


def superpose(states, weights) -> StateVector:
    """Weighted sum of states; weights may be TraceScalar, complex, or real."""
    states = list(states)
    weights = [complex(w) for w in weights]
    if not states:
        raise DimensionError("need at least one state to superpose")
    if len(states) != len(weights):
        raise DimensionError(f"{len(states)} states but {len(weights)} weights")
    first = states[0]
    for s in states[1:]:
        _require_compatible(first, s)
    if all(w == 0 for w in weights):
        raise ZeroVectorError("all superposition weights are zero")
    acc = np.zeros(first.dim, dtype=np.complex128)
    for s, w in zip(states, weights):
        acc += w * s.coeffs
    return StateVector(acc, first.grid)


def gram_schmidt(states) -> list[StateVector]:
    """Orthonormalize a list of states in order.

    Runs a modified Gram-Schmidt sweep twice per vector, so the returned
    basis is orthonormal to machine precision.  If a vector's residual after
    projection is below ``DEPENDENT_TOL`` (relative to the vector's own
    norm), the set is dependent and :class:`DegenerateSetError` is raised.
    """
    states = list(states)
    if not states:
        return []
    first = states[0]
    for s in states[1:]:
        _require_compatible(first, s)
    grid = first.grid
    weight = _weight(grid)
    basis: list[np.ndarray] = []
    for k, s in enumerate(states):
        nrm = _raw_norm(s.coeffs, grid)
        if nrm == 0.0:
            raise DegenerateSetError(f"vector {k} is zero")
        v = s.coeffs / nrm
        for _ in range(2):
            for b in basis:
                v = v - b * (np.vdot(b, v) * weight)
        residual = _raw_norm(v, grid)
        if residual < DEPENDENT_TOL:
            raise DegenerateSetError(
                f"vector {k} is dependent on its predecessors (residual {residual:.3e})"
            )
        basis.append(v / residual)
    return [StateVector(b, grid) for b in basis]


def grid_sample(profile, grid: GridMeta) -> StateVector:
    """Sample a pointwise profile on the grid and normalize.

    ``profile`` is called once per interior position and may return real or
    complex values.  Non-finite samples raise :class:`SamplingError`.
    """
    values = np.asarray([profile(x) for x in grid.positions], dtype=np.complex128)
    if not np.all(np.isfinite(values.real) & np.isfinite(values.imag)):
        raise SamplingError("profile produced non-finite values on the grid")
    return normalize(StateVector(values, grid))
