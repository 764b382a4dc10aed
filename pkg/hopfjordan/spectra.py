"""Dense complex matrix algebra at desk scale.

Eigenvalue clusters, root-subspace (generalized eigenspace) decompositions and
the commutant-preserving m-th root: for invertible ``K`` the root ``K̂`` is
assembled block-wise from truncated binomial series in the nilpotent parts, so
it is a polynomial in ``K`` and commutes with everything ``K`` commutes with.

All matrices are ``numpy.ndarray`` of dtype ``complex128``; norms are
max-entry norms throughout.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import binom

from .core import config
from .core.errors import (
    ContractViolationError,
    IllConditionedSpectrumError,
    ShapeError,
    SingularInputError,
    UnsupportedSizeError,
)

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray


class Tolerance(BaseModel):
    """Clustering radius for eigenvalues and the bound for residual checks."""

    model_config = ConfigDict(frozen=True)

    eigen_cluster_eps: float = Field(
        default_factory=lambda: config.settings.eigen_cluster_eps, ge=0, allow_inf_nan=False
    )
    residual_eps: float = Field(
        default_factory=lambda: config.settings.residual_eps, ge=0, allow_inf_nan=False
    )

    @classmethod
    def from_settings(cls) -> "Tolerance":
        return cls(
            eigen_cluster_eps=config.settings.eigen_cluster_eps,
            residual_eps=config.settings.residual_eps,
        )


def _resolve(tol: Optional[Tolerance]) -> Tolerance:
    return tol if tol is not None else Tolerance.from_settings()


def as_matrix(data: object) -> ComplexMatrix:
    """Coerce ``data`` into a square complex128 array or raise :class:`ShapeError`."""
    try:
        arr = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"not a numeric matrix: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ShapeError(f"expected a non-empty square matrix, got shape {arr.shape}")
    return arr


def max_norm(X: np.ndarray) -> float:
    return float(np.max(np.abs(X))) if X.size else 0.0


def matrices_close(A: ComplexMatrix, B: ComplexMatrix, eps: float) -> bool:
    """Max-entry comparison relative to ``max(1, ‖B‖)``."""
    return max_norm(A - B) <= eps * max(1.0, max_norm(B))


def is_invertible(K: ComplexMatrix, tol: Optional[Tolerance] = None) -> bool:
    tol = _resolve(tol)
    smallest = float(np.linalg.svd(K, compute_uv=False)[-1])
    return smallest > tol.residual_eps * max(1.0, max_norm(K))


def _check_size(K: ComplexMatrix) -> None:
    limit = config.settings.max_dimension
    if K.shape[0] > limit:
        raise UnsupportedSizeError(f"dimension {K.shape[0]} exceeds the desk-scale limit {limit}")


def principal_root(value: complex, m: int) -> complex:
    """Principal m-th root, argument of ``value`` taken in (−π, π]."""
    value = complex(value)
    if value.imag == 0:
        # -0.0 would select the lower branch for negative reals
        value = complex(value.real, 0.0)
    return complex(np.power(value, 1.0 / m))


# A size-k Jordan block computed in floating point has its eigenvalue smeared
# over a circle of radius about ‖K‖·(u‖K‖)^(1/k); this is u with headroom.
_JORDAN_SPREAD = 1e4 * float(np.finfo(np.float64).eps)


def _split_radius(size: int, scale: float) -> float:
    return scale * _JORDAN_SPREAD ** (1.0 / size)


def _jordan_groups(values: np.ndarray, scale: float) -> List[List[int]]:
    """Largest-first search for k values lying within the split radius of their mean."""
    n = len(values)
    assigned = [False] * n
    groups: List[List[int]] = []
    for size in range(n, 1, -1):
        radius = _split_radius(size, scale)
        for i in range(n):
            if assigned[i]:
                continue
            free = [j for j in range(n) if not assigned[j]]
            if len(free) < size:
                break
            nearest = sorted(free, key=lambda j: (abs(values[j] - values[i]), j))[:size]
            centre = np.mean(values[nearest])
            if float(np.max(np.abs(values[nearest] - centre))) <= radius:
                for j in nearest:
                    assigned[j] = True
                groups.append(sorted(nearest))
    groups.extend([i] for i in range(n) if not assigned[i])
    return groups


def _clusters(values: np.ndarray, eps: float, scale: float = 1.0) -> List[List[int]]:
    """Eigenvalue clusters: split Jordan clusters, then single linkage at ``eps``."""
    groups = _jordan_groups(values, scale)
    parent = list(range(len(groups)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            gap = min(abs(values[i] - values[j]) for i in groups[a] for j in groups[b])
            if gap <= eps:
                parent[find(a)] = find(b)
    merged: dict[int, List[int]] = {}
    for a, members in enumerate(groups):
        merged.setdefault(find(a), []).extend(members)
    clusters = [sorted(members) for members in merged.values()]
    clusters.sort(key=lambda idx: _order_key(complex(np.mean(values[idx]))))
    return clusters


def _order_key(value: complex) -> Tuple[float, float]:
    return (round(value.real, 9), round(value.imag, 9))


def _spectrum(K: ComplexMatrix) -> np.ndarray:
    # diagonal of the complex Schur form; the ordered Schur calls below
    # recompute exactly these values
    T, _ = scipy.linalg.schur(K, output="complex")
    return np.diag(T).copy()


def eigenvalues(K: ComplexMatrix, tol: Optional[Tolerance] = None) -> List[Tuple[complex, int]]:
    """Distinct eigenvalues with algebraic multiplicities.

    Values closer than ``tol.eigen_cluster_eps`` are merged, and so are the
    rounding-split copies of a defective eigenvalue; the reported value is the
    cluster mean. Every value is checked to be a numerical root of the
    characteristic polynomial via the smallest singular value of ``K − λE``.
    """
    tol = _resolve(tol)
    K = as_matrix(K)
    _check_size(K)
    values = _spectrum(K)
    scale = max(1.0, max_norm(K))
    bound = np.sqrt(tol.residual_eps) * scale
    result: List[Tuple[complex, int]] = []
    for members in _clusters(values, tol.eigen_cluster_eps, scale):
        value = complex(np.mean(values[members]))
        shifted = K - value * np.eye(K.shape[0])
        residual = float(np.linalg.svd(shifted, compute_uv=False)[-1])
        if residual > bound:
            raise IllConditionedSpectrumError(
                f"cluster at {value:.6g} is not an eigenvalue (residual {residual:.3g})"
            )
        result.append((value, len(members)))
    return result


class RootDecomposition(BaseModel):
    """Spectral projectors and nilpotent parts of ``matrix``.

    ``matrix = Σ (eigenvalues[i]·projectors[i] + nilpotents[i])``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    eigenvalues: Tuple[complex, ...]
    multiplicities: Tuple[int, ...]
    projectors: Tuple[np.ndarray, ...]
    nilpotents: Tuple[np.ndarray, ...]

    @model_validator(mode="after")
    def _check_shapes(self) -> "RootDecomposition":
        n = self.matrix.shape[0]
        k = len(self.eigenvalues)
        if not (len(self.multiplicities) == len(self.projectors) == len(self.nilpotents) == k):
            raise ValueError("eigenvalues, multiplicities, projectors and nilpotents differ in length")
        if sum(self.multiplicities) != n or any(m <= 0 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive and sum to the dimension")
        for arr in (self.matrix, *self.projectors, *self.nilpotents):
            if arr.shape != (n, n):
                raise ValueError("all blocks must be n×n")
            arr.setflags(write=False)
        return self

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    def reconstruct(self) -> ComplexMatrix:
        total = np.zeros_like(self.matrix)
        for lam, P, N in zip(self.eigenvalues, self.projectors, self.nilpotents):
            total = total + lam * P + N
        return total


def root_decomposition(K: ComplexMatrix, tol: Optional[Tolerance] = None) -> RootDecomposition:
    """Split ``K`` along its root subspaces.

    Each cluster's invariant subspace is read off an ordered complex Schur
    form; the projector onto it along the other root subspaces follows from
    the inverse of the stacked bases.
    """
    tol = _resolve(tol)
    K = as_matrix(K)
    _check_size(K)
    if not is_invertible(K, tol):
        raise SingularInputError("root decomposition needs an invertible matrix")
    n = K.shape[0]
    E = np.eye(n, dtype=np.complex128)
    values = _spectrum(K)
    scale = max(1.0, max_norm(K))
    clusters = _clusters(values, tol.eigen_cluster_eps, scale)
    owner = np.empty(n, dtype=int)
    for c, members in enumerate(clusters):
        owner[members] = c

    bases: List[np.ndarray] = []
    for c, members in enumerate(clusters):
        # the sorted call sees the same values; later swaps move them only slightly
        def in_cluster(x: complex, c: int = c) -> bool:
            return bool(owner[int(np.argmin(np.abs(values - x)))] == c)

        _, Z, sdim = scipy.linalg.schur(K, output="complex", sort=in_cluster)
        if sdim != len(members):
            raise IllConditionedSpectrumError(
                f"cluster of size {len(members)} reordered to {sdim} eigenvalues"
            )
        bases.append(Z[:, :sdim])

    V = np.hstack(bases)
    condition = float(np.linalg.cond(V))
    if not np.isfinite(condition) or condition > config.settings.max_projector_condition:
        raise IllConditionedSpectrumError(f"root subspaces are nearly dependent (cond {condition:.3g})")
    W = np.linalg.inv(V)

    eigs: List[complex] = []
    mults: List[int] = []
    projectors: List[np.ndarray] = []
    nilpotents: List[np.ndarray] = []
    start = 0
    for members in clusters:
        size = len(members)
        P = V[:, start:start + size] @ W[start:start + size, :]
        start += size
        lam = complex(np.trace(K @ P)) / size
        N = (K - lam * E) @ P
        if max_norm(np.linalg.matrix_power(N, size)) > tol.residual_eps * scale ** size:
            raise IllConditionedSpectrumError(f"nilpotent part at {lam:.6g} is not nilpotent")
        eigs.append(lam)
        mults.append(size)
        projectors.append(P)
        nilpotents.append(N)

    if max_norm(sum(projectors) - E) > tol.residual_eps * condition:
        raise IllConditionedSpectrumError("projectors do not sum to the identity")
    logger.debug("root decomposition: n=%d clusters=%s cond=%.3g", n, mults, condition)
    return RootDecomposition(
        matrix=K,
        eigenvalues=tuple(eigs),
        multiplicities=tuple(mults),
        projectors=tuple(projectors),
        nilpotents=tuple(nilpotents),
    )


def _series_coefficients(lam: complex, m: int, count: int) -> List[complex]:
    # a_j = binom(1/m, j) · λ^(1/m − j)
    root = principal_root(lam, m)
    return [complex(binom(1.0 / m, j)) * root / lam ** j for j in range(count)]


def _nilpotency_index(N: ComplexMatrix, eps: float) -> int:
    n = N.shape[0]
    scale = max(1.0, max_norm(N))
    power = np.eye(n, dtype=np.complex128)
    for j in range(n + 1):
        if max_norm(power) <= eps * scale ** max(j, 1):
            return j
        power = power @ N
    raise ContractViolationError("matrix is not nilpotent")


def nilpotent_mth_root(
    lam: complex, N: ComplexMatrix, m: int, tol: Optional[Tolerance] = None
) -> ComplexMatrix:
    """Principal m-th root of ``λE + N`` for nilpotent ``N``.

    The binomial series of ``(λ + x)^(1/m)`` is truncated at the nilpotency
    index of ``N``, so the result is a polynomial in ``N``.
    """
    tol = _resolve(tol)
    N = as_matrix(N)
    if m < 1:
        raise ContractViolationError(f"root order must be positive, got {m}")
    lam = complex(lam)
    if abs(lam) <= tol.residual_eps:
        raise SingularInputError("eigenvalue is zero; no m-th root of a singular block")
    n = N.shape[0]
    index = _nilpotency_index(N, tol.residual_eps)
    E = np.eye(n, dtype=np.complex128)
    if m == 1:
        return lam * E + N
    result = np.zeros((n, n), dtype=np.complex128)
    power = E
    for a in _series_coefficients(lam, m, max(index, 1)):
        result = result + a * power
        power = power @ N
    return result


def commutant_preserving_root(K: ComplexMatrix, m: int, tol: Optional[Tolerance] = None) -> ComplexMatrix:
    """m-th root of ``K`` commuting with every matrix that commutes with ``K``.

    On each root subspace the root is ``a₀P + a₁N + … `` built from the
    principal branch at that cluster's eigenvalue.
    """
    tol = _resolve(tol)
    K = as_matrix(K)
    if m < 1:
        raise ContractViolationError(f"root order must be positive, got {m}")
    dec = root_decomposition(K, tol)
    if m == 1:
        return K.copy()
    root = np.zeros_like(K)
    for lam, size, P, N in zip(dec.eigenvalues, dec.multiplicities, dec.projectors, dec.nilpotents):
        power = P
        for a in _series_coefficients(lam, m, size):
            root = root + a * power
            power = power @ N
    residual = max_norm(np.linalg.matrix_power(root, m) - K)
    if residual > tol.residual_eps * max(1.0, max_norm(K)):
        raise IllConditionedSpectrumError(f"root residual {residual:.3g} above tolerance")
    logger.debug("commutant-preserving root m=%d residual=%.3g", m, residual)
    return root


def commute_check(A: ComplexMatrix, B: ComplexMatrix, tol: Optional[Tolerance] = None) -> bool:
    tol = _resolve(tol)
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch {A.shape} vs {B.shape}")
    return max_norm(A @ B - B @ A) <= tol.residual_eps


def invariance_check(A: ComplexMatrix, dec: RootDecomposition, tol: Optional[Tolerance] = None) -> bool:
    """True iff every root subspace of ``dec`` is ``A``-invariant."""
    tol = _resolve(tol)
    A = as_matrix(A)
    if A.shape != dec.matrix.shape:
        raise ShapeError(f"dimension mismatch {A.shape} vs {dec.matrix.shape}")
    return all(max_norm(A @ P - P @ A) <= tol.residual_eps for P in dec.projectors)


def is_linear_contraction(K: ComplexMatrix, tol: Optional[Tolerance] = None) -> bool:
    tol = _resolve(tol)
    K = as_matrix(K)
    if not is_invertible(K, tol):
        return False
    radius = float(np.max(np.abs(np.linalg.eigvals(K))))
    return radius < 1.0 - tol.residual_eps


_STEPWISE = 1000
_ESCAPE = 1e150


def orbit_budget(radius: float, eps: float, base: int) -> int:
    """Iterations after which ``radiusᵛ`` has fallen to ``eps²``.

    Squaring the target leaves room for transient growth of non-normal ``K``.
    """
    if not 0.0 < radius < 1.0 or eps <= 0.0:
        return base
    return base + 2 * int(np.ceil(np.log(eps) / np.log(radius)))


def orbit_converges(
    K: ComplexMatrix,
    x: Sequence[complex] | np.ndarray,
    max_iter: int,
    tol: Optional[Tolerance] = None,
) -> bool:
    """Whether ``‖Kᵛx‖ < residual_eps`` for some ``ν ≤ max_iter``.

    The first ``_STEPWISE`` steps are iterated one by one. Beyond that the
    orbit is sampled at doubling ``ν`` by squaring ``K``, and finally at
    ``ν = max_iter`` itself.
    """
    tol = _resolve(tol)
    K = as_matrix(K)
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.shape[0] != K.shape[0]:
        raise ShapeError(f"vector of length {v.shape[0]} for a {K.shape[0]}×{K.shape[0]} matrix")
    x0 = v
    steps = min(max_iter, _STEPWISE)
    for _ in range(steps + 1):
        size = max_norm(v)
        if size < tol.residual_eps:
            return True
        if size > _ESCAPE:
            return False
        v = K @ v
    if max_iter <= steps:
        return False

    nu = max(steps, 1)
    with np.errstate(over="ignore", invalid="ignore"):
        power = np.linalg.matrix_power(K, nu)
        while 2 * nu <= max_iter:
            power = power @ power
            nu *= 2
            size = max_norm(power @ x0)
            if size < tol.residual_eps:
                return True
            if not np.isfinite(size) or size > _ESCAPE:
                return False
        size = max_norm(np.linalg.matrix_power(K, max_iter) @ x0)
    return bool(size < tol.residual_eps)
