"""Spectral decompositions, joint diagonalization, and single generators.

The eigenbasis conventions are deterministic so repeated runs agree bit
for bit on a given platform:

* eigenvalues ascend;
* within a degenerate group (adjacent eigenvalue gap at most ``group_tol``)
  vectors are reordered by the index of their dominant component and then
  re-orthonormalized in that order;
* each vector's first component of magnitude above ``PHASE_FLOOR`` is made
  real and positive.

A basis is dispersion-free for an observable when every basis vector gives
that observable zero spread; :func:`verify_dispersion_free` measures the
worst spread over a decomposition.  Commuting families share such a basis,
and :func:`vn_generator` compresses a commuting family into one operator
with integer spectrum from which every member is recovered by relabeling
eigenvalues.
"""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    FunctionDomainError,
    GridError,
    InputError,
    NotCommutingError,
)
from .operators import HermitianOperator, Operator, certify_hermitian
from .states import GridMeta, StateVector, _weight

__all__ = [
    "SpectralDecomposition",
    "JointDecomposition",
    "GeneratorResult",
    "eigendecompose",
    "verify_dispersion_free",
    "commute_check",
    "simultaneous_diagonalize",
    "vn_generator",
    "apply_function",
]

#: degenerate-group width is this factor times max(1, spectral range).
GROUP_TOL_FACTOR = 1e-8

#: smallest component magnitude eligible to anchor the phase convention.
PHASE_FLOOR = 1e-8

#: default scaled tolerance for pairwise commutators.
COMMUTE_TOL = 1e-8


def _group_tol(values: np.ndarray) -> float:
    spread = float(values[-1] - values[0]) if values.size else 0.0
    return GROUP_TOL_FACTOR * max(1.0, spread)


def _cluster_sorted(values: np.ndarray, tol: float) -> tuple[tuple[int, ...], ...]:
    """Partition indices of an ascending array into runs with adjacent gap <= tol."""
    groups = []
    current = [0]
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            groups.append(tuple(current))
            current = [i]
        else:
            current.append(i)
    groups.append(tuple(current))
    return tuple(groups)


def _orthonormalize_block(cols: np.ndarray) -> np.ndarray:
    """Reorder near-orthonormal columns by dominant component index, then re-orthonormalize."""
    dominant = [int(np.argmax(np.abs(cols[:, j]))) for j in range(cols.shape[1])]
    cols = cols[:, np.argsort(dominant, kind="stable")]
    out = np.array(cols)
    for j in range(out.shape[1]):
        v = out[:, j]
        for i in range(j):
            v = v - out[:, i] * np.vdot(out[:, i], v)
        out[:, j] = v / np.linalg.norm(v)
    return out


def _phase_fix(basis: np.ndarray) -> np.ndarray:
    for k in range(basis.shape[1]):
        col = basis[:, k]
        pivot = col[int(np.argmax(np.abs(col) > PHASE_FLOOR))]
        basis[:, k] = col * (pivot.conjugate() / abs(pivot))
    return basis


class SpectralDecomposition:
    """Canonical eigendecomposition of one hermitian operator.

    ``basis`` holds orthonormal eigenvector columns in the plain (unweighted)
    sense; the ``eigenvectors`` property rescales them into unit-norm
    :class:`StateVector` objects under the grid weight when one is bound.
    ``groups`` partitions the index range into degenerate clusters.
    """

    def __init__(self, eigenvalues, basis, groups, group_tol, grid: GridMeta | None = None):
        eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
        basis = np.asarray(basis, dtype=np.complex128)
        eigenvalues.setflags(write=False)
        basis.setflags(write=False)
        self.eigenvalues = eigenvalues
        self.basis = basis
        self.groups = tuple(tuple(int(i) for i in g) for g in groups)
        self.group_tol = float(group_tol)
        self.grid = grid

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @cached_property
    def eigenvectors(self) -> list[StateVector]:
        scale = 1.0 / np.sqrt(_weight(self.grid))
        return [StateVector(self.basis[:, k] * scale, self.grid) for k in range(self.dim)]

    def amplitudes(self, state: StateVector) -> np.ndarray:
        """Inner products of every eigenvector with ``state`` (grid weight included)."""
        if state.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs state {state.dim}")
        if state.grid != self.grid:
            raise GridError("state and decomposition are bound to different grids")
        return np.sqrt(_weight(self.grid)) * (self.basis.conj().T @ state.coeffs)

    def group_eigenvalue(self, g: int) -> float:
        """Representative eigenvalue (mean) of degenerate group ``g``."""
        return float(np.mean(self.eigenvalues[list(self.groups[g])]))

    def __repr__(self):
        return f"<SpectralDecomposition dim={self.dim} groups={len(self.groups)}>"


class JointDecomposition:
    """Common eigenbasis of a commuting family with per-operator eigenvalues.

    ``eigenvalue_lists[i, k]`` is the eigenvalue of family member i on basis
    vector k (a Rayleigh quotient in the refined basis).  ``blocks`` groups
    indices that remain jointly degenerate across the whole family.
    """

    def __init__(self, basis, eigenvalue_lists, blocks, grid: GridMeta | None = None):
        basis = np.asarray(basis, dtype=np.complex128)
        eigenvalue_lists = np.asarray(eigenvalue_lists, dtype=np.float64)
        basis.setflags(write=False)
        eigenvalue_lists.setflags(write=False)
        self.basis = basis
        self.eigenvalue_lists = eigenvalue_lists
        self.blocks = tuple(tuple(int(i) for i in b) for b in blocks)
        self.grid = grid

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def eigenvectors(self) -> list[StateVector]:
        scale = 1.0 / np.sqrt(_weight(self.grid))
        return [StateVector(self.basis[:, k] * scale, self.grid) for k in range(self.dim)]

    def __repr__(self):
        ops = self.eigenvalue_lists.shape[0]
        return f"<JointDecomposition dim={self.dim} operators={ops}>"


class GeneratorResult(NamedTuple):
    """Single generator of a commuting family."""

    generator: HermitianOperator
    labels: list[float]
    tables: list[dict[int, float]]


def eigendecompose(a: HermitianOperator) -> SpectralDecomposition:
    """Decompose a certified hermitian operator with canonical conventions."""
    if not isinstance(a, HermitianOperator):
        raise InputError("eigendecompose needs a certified HermitianOperator")
    try:
        eigenvalues, basis = np.linalg.eigh(a.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    tol = _group_tol(eigenvalues)
    groups = _cluster_sorted(eigenvalues, tol)
    basis = np.array(basis)
    for group in groups:
        if len(group) > 1:
            idx = list(group)
            basis[:, idx] = _orthonormalize_block(basis[:, idx])
    basis = _phase_fix(basis)
    return SpectralDecomposition(eigenvalues, basis, groups, tol, a.grid)


def verify_dispersion_free(dec: SpectralDecomposition, a: HermitianOperator) -> float:
    """Worst spread of ``a`` over the basis vectors of ``dec``.

    For a decomposition of ``a`` itself this is zero up to roundoff; a
    mismatched pair shows up as a spread of order the eigenvalue gaps.
    """
    if not isinstance(dec, SpectralDecomposition):
        raise InputError("first argument must be a SpectralDecomposition")
    if not isinstance(a, HermitianOperator):
        raise InputError("second argument must be a certified HermitianOperator")
    if dec.dim != a.dim:
        raise InputError(f"dimension mismatch: decomposition {dec.dim} vs operator {a.dim}")
    if dec.grid != a.grid:
        raise InputError("decomposition and operator are bound to different grids")
    images = a.matrix @ dec.basis
    first = np.einsum("ij,ij->j", dec.basis.conj(), images).real
    # centered residual (A - <A>_k) u_k: algebraically the dispersion, but
    # free of the sqrt(eps)*|eigenvalue| cancellation noise of <A^2> - <A>^2
    centered = images - dec.basis * first
    return float(np.max(np.linalg.norm(centered, axis=0)))


def _maxabs(a: Operator) -> float:
    return float(np.max(np.abs(a.matrix)))


def _worst_commutator(family) -> tuple[tuple[int, int], float]:
    worst_pair, worst = (0, 0), 0.0
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            ai, aj = family[i].matrix, family[j].matrix
            deviation = float(np.max(np.abs(ai @ aj - aj @ ai)))
            scale = max(1.0, _maxabs(family[i]) * _maxabs(family[j]))
            scaled = deviation / scale
            if scaled > worst:
                worst_pair, worst = (i, j), scaled
    return worst_pair, worst


def _check_family(family) -> list[HermitianOperator]:
    family = list(family)
    if not family:
        raise InputError("family is empty")
    for a in family:
        if not isinstance(a, HermitianOperator):
            raise InputError("family members must be certified HermitianOperators")
    first = family[0]
    for a in family[1:]:
        if a.dim != first.dim:
            raise DimensionError(f"dimension mismatch in family: {first.dim} vs {a.dim}")
        if a.grid != first.grid:
            raise GridError("family members are bound to different grids")
    return family


def commute_check(family, tol: float = COMMUTE_TOL) -> bool:
    """True when every pairwise commutator vanishes within ``tol`` (scaled)."""
    family = _check_family(family)
    if len(family) < 2:
        return True
    _, worst = _worst_commutator(family)
    return worst <= tol


def simultaneous_diagonalize(family, tol: float = COMMUTE_TOL) -> JointDecomposition:
    """Common eigenbasis of a commuting family by sequential refinement.

    The first operator is diagonalized outright; every further operator is
    re-diagonalized inside the still-degenerate blocks.  The basis therefore
    ascends lexicographically in the tuple of eigenvalues, and inherits the
    canonical phase convention.
    """
    family = _check_family(family)
    pair, worst = _worst_commutator(family)
    if worst > tol:
        raise NotCommutingError(pair, worst)

    first = family[0]
    try:
        values, basis = np.linalg.eigh(first.matrix)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    basis = np.array(basis)
    blocks = _cluster_sorted(values, _group_tol(values))

    for a in family[1:]:
        refined: list[tuple[int, ...]] = []
        scale_tol = GROUP_TOL_FACTOR * max(1.0, 2.0 * _maxabs(a))
        for block in blocks:
            if len(block) == 1:
                refined.append(block)
                continue
            idx = list(block)
            sub = basis[:, idx]
            m = sub.conj().T @ a.matrix @ sub
            m = (m + m.conj().T) / 2.0
            try:
                w, s = np.linalg.eigh(m)
            except np.linalg.LinAlgError as exc:
                raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
            basis[:, idx] = sub @ s
            for sub_block in _cluster_sorted(w, scale_tol):
                refined.append(tuple(idx[t] for t in sub_block))
        blocks = refined

    for block in blocks:
        if len(block) > 1:
            idx = list(block)
            basis[:, idx] = _orthonormalize_block(basis[:, idx])
    basis = _phase_fix(basis)

    lists = np.empty((len(family), first.dim), dtype=np.float64)
    for i, a in enumerate(family):
        lists[i] = np.einsum("ij,ij->j", basis.conj(), a.matrix @ basis).real
    return JointDecomposition(basis, lists, blocks, first.grid)


def _representatives(values: np.ndarray) -> np.ndarray:
    """Snap a list of eigenvalues to cluster representatives (cluster means)."""
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    tol = _group_tol(ordered)
    reps = np.empty_like(values)
    for cluster in _cluster_sorted(ordered, tol):
        members = order[list(cluster)]
        reps[members] = float(np.mean(values[members]))
    return reps


def vn_generator(family) -> GeneratorResult:
    """Build one operator that generates a whole commuting family.

    Joint eigenspaces (distinct tuples of per-operator eigenvalues) are
    labeled 0, 1, 2, ... in lexicographic tuple order.  The generator has
    exactly those integer labels as spectrum, and each family member equals
    a relabeling of the generator through its returned table.
    """
    joint = simultaneous_diagonalize(family)
    reps = np.array([_representatives(joint.eigenvalue_lists[i]) for i in range(len(joint.eigenvalue_lists))])
    tuples = [tuple(reps[:, k]) for k in range(joint.dim)]
    distinct = sorted(set(tuples))
    label_of = {t: float(i) for i, t in enumerate(distinct)}
    label_per_index = np.array([label_of[t] for t in tuples], dtype=np.float64)

    matrix = (joint.basis * label_per_index) @ joint.basis.conj().T
    generator = certify_hermitian(Operator(matrix, joint.grid))
    tables = []
    for i in range(reps.shape[0]):
        table: dict[int, float] = {}
        for k in range(joint.dim):
            table[int(label_per_index[k])] = float(reps[i, k])
        tables.append(dict(sorted(table.items())))
    labels = [float(i) for i in range(len(distinct))]
    return GeneratorResult(generator, labels, tables)


def apply_function(dec: SpectralDecomposition, fn) -> Operator:
    """Spectral function calculus: sum of fn(eigenvalue) times eigenprojectors.

    ``fn`` may return TraceScalar, complex, or real values; non-finite
    results raise :class:`FunctionDomainError`.
    """
    values = np.array([complex(fn(lam)) for lam in dec.eigenvalues], dtype=np.complex128)
    if not np.all(np.isfinite(values.real) & np.isfinite(values.imag)):
        raise FunctionDomainError("function produced non-finite values on the spectrum")
    matrix = (dec.basis * values) @ dec.basis.conj().T
    return Operator(matrix, dec.grid)
