"""From a matrix group with central ``Γ = ⟨K⟩`` to a finite matrix group.

Every ``A ∈ M`` is written ``A = K^t·r_h`` over fixed coset representatives.
With ``ρ̄ = ρ/index_m`` the normalized map ``M → M/R ≅ ℤ`` and ``K̂`` a
commutant-preserving root of order ``ρ̄(K)``, the homomorphism

    φ(A) = A · K̂^(−ρ̄(A))

kills Γ, and its image ``H′`` is a finite group whose minimal abelian index
equals that of ``H = M/Γ``.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core import config
from ..core.errors import (
    CertificationError,
    IllConditionedModelError,
    ModelInconsistencyError,
    NonCentralError,
    NotFiniteError,
)
from ..spectra import (
    ComplexMatrix,
    Tolerance,
    as_matrix,
    commutant_preserving_root,
    matrices_close,
    max_norm,
)
from .closure import matrix_closure
from .extensions import CentralExtensionZ, ExtElement, kernel_and_Z_quotient, transfer_power_map
from .groups import (
    FiniteGroup,
    GroupHom,
    IndexCertificate,
    Subgroup,
    index_preservation_check,
    minimal_abelian_index,
    quotient,
)

logger = logging.getLogger(__name__)


class CosetMap:
    """Coset representatives of ``Γ = ⟨g⟩`` and the ``mod Γ`` membership test.

    ``X ≡ Y (mod Γ)`` is decided by the single candidate
    ``k = round(log|det(X·Y⁻¹)| / log|det g|)`` confirmed by comparing
    ``X·Y⁻¹`` with ``g^k``.
    """

    def __init__(
        self,
        contraction: ComplexMatrix,
        representatives: Sequence[ComplexMatrix] = (),
        tol: Optional[Tolerance] = None,
    ) -> None:
        self.tol = tol if tol is not None else Tolerance.from_settings()
        self.contraction = as_matrix(contraction)
        _, self._log_det_g = np.linalg.slogdet(self.contraction)
        if not np.isfinite(self._log_det_g) or abs(self._log_det_g) < config.settings.ill_conditioned_det_log:
            raise IllConditionedModelError(
                f"log|det g| = {self._log_det_g:.3g} cannot separate powers of g"
            )
        self._powers: Dict[int, ComplexMatrix] = {}
        self.representatives: List[ComplexMatrix] = []
        self._inverses: List[ComplexMatrix] = []
        for r in representatives:
            self.add(r)

    def __len__(self) -> int:
        return len(self.representatives)

    def add(self, representative: ComplexMatrix) -> int:
        r = as_matrix(representative)
        self.representatives.append(r)
        self._inverses.append(np.linalg.inv(r))
        return len(self.representatives) - 1

    def gamma_power(self, k: int) -> ComplexMatrix:
        if k not in self._powers:
            self._powers[k] = np.linalg.matrix_power(self.contraction, k)
        return self._powers[k]

    def gamma_exponent(self, X: ComplexMatrix) -> Optional[int]:
        """``k`` with ``X = g^k``, or None when X is not in Γ."""
        sign, log_det = np.linalg.slogdet(X)
        if sign == 0 or not np.isfinite(log_det):
            return None
        ratio = log_det / self._log_det_g
        k = int(round(ratio))
        if abs(ratio - k) > 0.25:
            return None
        return k if matrices_close(X, self.gamma_power(k), self.tol.residual_eps) else None

    def locate(self, X: ComplexMatrix) -> Optional[ExtElement]:
        """Coordinates ``(t, h)`` with ``X = g^t·r_h``, if X lies in a known coset."""
        for h, r_inv in enumerate(self._inverses):
            k = self.gamma_exponent(X @ r_inv)
            if k is not None:
                return ExtElement(k, h)
        return None

    def coordinates(self, X: ComplexMatrix) -> ExtElement:
        found = self.locate(as_matrix(X))
        if found is None:
            raise ModelInconsistencyError("matrix lies in none of the enumerated cosets")
        return found


class FiniteReduction(BaseModel):
    """Result of :func:`reduce_to_finite`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group: FiniteGroup
    elements: Tuple[np.ndarray, ...]
    generator_images: Tuple[np.ndarray, ...]
    root: np.ndarray
    root_order: int
    index_m: int
    projection: GroupHom
    kernel: Subgroup
    certificate: IndexCertificate
    phi_residual: float


def reduce_to_finite(
    generators: Sequence[ComplexMatrix],
    contraction: ComplexMatrix,
    extension: CentralExtensionZ,
    cosets: CosetMap,
    tol: Optional[Tolerance] = None,
    cap: Optional[int] = None,
) -> FiniteReduction:
    """Build ``H′ = φ(M)`` and certify ``c(H) = c(H′)``.

    ``cosets`` must be the coset map the extension was read from. The
    index-preservation certificate is produced with ``N = μ(ker φ)`` and
    ``ψ: H → H/μ(R)`` exactly as the hypotheses require. ``H′`` may hold at
    most ``cap`` elements (default ``quotient_cap``).
    """
    tol = tol if tol is not None else Tolerance.from_settings()
    if not extension.is_central():
        raise NonCentralError("reduction to a finite group needs a central Γ")
    K = as_matrix(contraction)
    n = K.shape[0]
    H = extension.quotient
    rho = transfer_power_map(extension)
    R, index_m = kernel_and_Z_quotient(extension)
    root_order = rho(extension.fibre_generator) // index_m
    K_hat = commutant_preserving_root(K, root_order, tol)
    K_hat_inv = np.linalg.inv(K_hat)

    def rho_bar(a: ExtElement) -> int:
        return rho(a) // index_m

    def phi(A: ComplexMatrix, a: ExtElement) -> ComplexMatrix:
        return A @ np.linalg.matrix_power(K_hat_inv, rho_bar(a))

    E = np.eye(n, dtype=np.complex128)
    phi_K = phi(K, extension.fibre_generator)
    phi_residual = max_norm(phi_K - E)
    if phi_residual > tol.residual_eps * max(1.0, max_norm(K)):
        raise ModelInconsistencyError(
            f"φ(K) differs from the identity by {phi_residual:.3g}: exponent-sign or branch inconsistency"
        )

    images = [phi(as_matrix(A), cosets.coordinates(A)) for A in generators]
    limit = cap if cap is not None else config.settings.quotient_cap
    try:
        closure = matrix_closure(images, cap=limit, tol=tol)
    except NotFiniteError as exc:
        raise ModelInconsistencyError(f"image of φ exceeds {limit} elements") from exc
    H_prime = closure.group

    g_images: List[int] = []
    for h in H.elements():
        target = closure.index_of(phi(cosets.representatives[h], ExtElement(0, h)))
        if target is None:
            raise ModelInconsistencyError(f"φ of coset representative {H.label(h)} is outside H′")
        g_images.append(target)
    try:
        projection = GroupHom(source=H, target=H_prime, images=tuple(g_images))
    except ValueError as exc:
        raise ModelInconsistencyError("φ does not factor through H as a homomorphism") from exc

    N = projection.kernel()
    R_prime = Subgroup(parent=H, members=tuple(sorted({a.h for a in R})))
    _, psi = quotient(H, R_prime)
    certificate = index_preservation_check(H, N, psi)
    if not certificate.equal:
        raise CertificationError(f"index changed under the reduction: {certificate.lhs} ≠ {certificate.rhs}")
    direct, _ = minimal_abelian_index(H_prime)
    if direct != certificate.rhs:
        raise CertificationError(f"H′ has index {direct}, H/N has {certificate.rhs}")
    logger.info(
        "reduced |H|=%d to |H′|=%d (root order %d, index_m %d)",
        H.order,
        H_prime.order,
        root_order,
        index_m,
    )
    return FiniteReduction(
        group=H_prime,
        elements=tuple(closure.elements),
        generator_images=tuple(images),
        root=K_hat,
        root_order=root_order,
        index_m=index_m,
        projection=projection,
        kernel=N,
        certificate=certificate,
        phi_residual=phi_residual,
    )
