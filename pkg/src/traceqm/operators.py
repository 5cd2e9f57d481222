"""Hermitian operators and expectation machinery.

Observables enter the workbench through :func:`certify_hermitian`, which
measures the worst entry deviation from the adjoint and refuses matrices
beyond tolerance.  Expectations come in the complex flavour ``expect_c``
(the real part of the sesquilinear form, with the imaginary part asserted
to vanish) and the trace-form flavour ``expect_r`` which is exactly twice
``expect_c`` for hermitian input.

Any product of two hermitian operators splits as
``A @ B = S + i*D`` with ``S = (AB + BA)/2`` and ``D = (AB - BA)/(2i)``
both hermitian; :func:`sym_antisym_split` returns that pair certified.
``av_decompose`` splits the action of an observable on a state into a mean
part along the state and a dispersion part orthogonal to it.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, GridError, NotHermitianError, StateError
from .scalars import TraceScalar, trace
from .states import GridMeta, StateVector, _raw_inner, _raw_norm

__all__ = [
    "Operator",
    "HermitianOperator",
    "AvResult",
    "adjoint",
    "certify_hermitian",
    "sym_antisym_split",
    "expect_c",
    "expect_r",
    "dispersion",
    "av_decompose",
]

#: default relative bound for hermiticity certification.
CERT_TOL = 1e-10

#: expectation routines reject states whose norm deviates more than this.
STATE_NORM_TOL = 1e-8

#: relative bound on the imaginary part of a hermitian expectation.
IMAG_EXPECT_TOL = 1e-10

#: dispersion below which no orthogonal component is returned.
BETA_FLOOR = 1e-10


class Operator:
    """Square matrix acting on states, optionally bound to a grid."""

    __slots__ = ("matrix", "grid")

    def __init__(self, matrix, grid: GridMeta | None = None):
        arr = np.array(matrix, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionError(f"operator matrix must be square, got shape {arr.shape}")
        if grid is not None and arr.shape[0] != grid.npoints:
            raise GridError(f"{arr.shape[0]}x{arr.shape[0]} matrix does not fit a grid of {grid.npoints} points")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "grid", grid)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, state: StateVector) -> StateVector:
        _require_match(self, state)
        return StateVector(self.matrix @ state.coeffs, self.grid)

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.grid != other.grid:
            raise GridError("operators are bound to different grids")
        return Operator(self.matrix @ other.matrix, self.grid)

    def __repr__(self):
        return f"<{type(self).__name__} dim={self.dim}>"


class HermitianOperator(Operator):
    """Operator whose hermiticity has been certified.

    ``certificate`` records the worst entry deviation max|A - adjoint(A)|
    found at certification time.
    """

    __slots__ = ("certificate",)

    def __init__(self, matrix, grid: GridMeta | None = None, certificate: float = 0.0):
        super().__init__(matrix, grid)
        object.__setattr__(self, "certificate", float(certificate))


class AvResult(NamedTuple):
    """Mean-plus-deviation split of an observable acting on a state."""

    alpha: float
    beta: float
    perp: StateVector | None


def _require_match(a: Operator, state: StateVector):
    if a.dim != state.dim:
        raise DimensionError(f"dimension mismatch: operator {a.dim} vs state {state.dim}")
    if a.grid != state.grid:
        raise GridError("operator and state are bound to different grids")


def _require_normalized(state: StateVector):
    if abs(state.norm() - 1.0) > STATE_NORM_TOL:
        raise StateError(f"state is not normalized (norm {state.norm():.12f})")


def adjoint(a: Operator) -> Operator:
    """Conjugate transpose; an exact involution."""
    return Operator(a.matrix.conj().T, a.grid)


def certify_hermitian(a, tol: float = CERT_TOL, grid: GridMeta | None = None) -> HermitianOperator:
    """Check max|A - adjoint(A)| against ``tol`` scaled by (1 + max|A|).

    Accepts an :class:`Operator` or a bare matrix.  Returns a
    :class:`HermitianOperator` carrying the measured deviation as its
    certificate, or raises :class:`NotHermitianError`.
    """
    if not (np.isfinite(tol) and tol > 0.0):
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    if isinstance(a, Operator):
        matrix, grid = a.matrix, a.grid
    else:
        matrix = np.asarray(a, dtype=np.complex128)
    probe = Operator(matrix, grid)
    deviation = float(np.max(np.abs(probe.matrix - probe.matrix.conj().T)))
    bound = tol * (1.0 + float(np.max(np.abs(probe.matrix))))
    if deviation > bound:
        raise NotHermitianError(deviation, bound)
    return HermitianOperator(probe.matrix, grid, certificate=deviation)


def sym_antisym_split(a: HermitianOperator, b: HermitianOperator) -> tuple[HermitianOperator, HermitianOperator]:
    """Split A @ B into hermitian S and D with A @ B = S + i*D.

    S = (AB + BA)/2 and D = (AB - BA)/(2i) are both hermitian whenever A
    and B are; the identity holds entrywise to roundoff.
    """
    ab = a @ b
    ba = b @ a
    s = certify_hermitian(Operator((ab.matrix + ba.matrix) / 2.0, a.grid))
    d = certify_hermitian(Operator((ab.matrix - ba.matrix) / 2j, a.grid))
    return s, d


def _raw_value(a: Operator, psi: StateVector) -> tuple[complex, np.ndarray]:
    _require_match(a, psi)
    _require_normalized(psi)
    image = a.matrix @ psi.coeffs
    return _raw_inner(psi.coeffs, image, psi.grid), image


def _raw_expectation(a: HermitianOperator, psi: StateVector) -> tuple[complex, np.ndarray]:
    raw, image = _raw_value(a, psi)
    scale = 1.0 + _raw_norm(image, psi.grid)
    assert abs(raw.imag) <= IMAG_EXPECT_TOL * scale, (
        f"hermitian expectation has imaginary part {raw.imag:.3e} (scale {scale:.3e})"
    )
    return raw, image


def expect_c(a: HermitianOperator, psi: StateVector) -> float:
    """Complex-form expectation Re <psi|A psi>; the imaginary part is asserted away."""
    raw, _ = _raw_expectation(a, psi)
    return raw.real


def expect_r(a: Operator, psi: StateVector) -> float:
    """Trace-form expectation tr<psi|A psi>.

    Accepts any operator: the trace form discards the antisymmetric part,
    which is why products A @ B and B @ A of hermitians are indistinguishable
    here.  For a certified hermitian operator this is exactly
    2 * :func:`expect_c`.
    """
    raw, _ = _raw_value(a, psi)
    return trace(TraceScalar(raw.real, raw.imag))


def dispersion(a: HermitianOperator, psi: StateVector) -> float:
    """Standard deviation sqrt(<A^2> - <A>^2), clipped at zero.

    The second moment is computed as the squared norm of A @ psi, an
    independent route from the expectation itself.
    """
    raw, image = _raw_expectation(a, psi)
    second = _raw_norm(image, psi.grid) ** 2
    variance = second - raw.real**2
    return float(np.sqrt(max(0.0, variance)))


def av_decompose(a: HermitianOperator, psi: StateVector) -> AvResult:
    """Split A psi = alpha*psi + beta*perp with perp a unit vector orthogonal to psi.

    alpha is the expectation and beta the dispersion of A in psi.  When beta
    falls at or below ``BETA_FLOOR`` (psi is an eigenvector to working
    precision) no orthogonal direction is defined and ``perp`` is None.
    """
    raw, image = _raw_expectation(a, psi)
    alpha = raw.real
    residual = image - alpha * psi.coeffs
    # scrub the roundoff component along psi so orthogonality survives tiny beta
    residual = residual - psi.coeffs * _raw_inner(psi.coeffs, residual, psi.grid)
    beta = _raw_norm(residual, psi.grid)
    if beta <= BETA_FLOOR:
        return AvResult(alpha, beta, None)
    return AvResult(alpha, beta, StateVector(residual / beta, psi.grid))
