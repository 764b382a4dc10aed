"""Pipeline for linear Hopf models.

A model is a finite list of invertible matrices, one of which is the
designated contraction ``g``. The pipeline

1. validates the model (contraction, orbit convergence, normality of ``⟨g⟩``),
2. enumerates the cosets of ``Γ = ⟨g⟩`` and reads off the extension
   ``1 → ℤ → M → H → 1``,
3. computes the minimal abelian index of ``H`` directly and again through the
   finite matrix group ``H′ = φ(M)``, and refuses to report unless both agree.
"""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core import config
from .core.errors import (
    CertificationError,
    HopfJordanError,
    InfiniteQuotientError,
    InvalidModelError,
    ModelInconsistencyError,
    ShapeError,
)
from .groupcore.extensions import (
    CentralExtensionZ,
    characteristic_power_subgroup,
    extension_quotient,
    index2_reduction,
    kernel_and_Z_quotient,
    torsion_kernel,
    trivial_sign,
)
from .groupcore.groups import FiniteGroup, GroupHom, Subgroup, center, minimal_abelian_index
from .groupcore.reduction import CosetMap, FiniteReduction, reduce_to_finite
from .schemas.report import Certificate
from .spectra import (
    ComplexMatrix,
    Tolerance,
    as_matrix,
    is_invertible,
    is_linear_contraction,
    matrices_close,
    max_norm,
    orbit_budget,
    orbit_converges,
)

logger = logging.getLogger(__name__)


class LinearHopfModel(BaseModel):
    """Generators of ``M ⊂ GL_n(ℂ)`` with a designated contraction."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(..., ge=2)
    generators: Tuple[np.ndarray, ...] = Field(..., min_length=1)
    contraction_index: int = Field(0, ge=0)
    quotient_cap: int = Field(default_factory=lambda: config.settings.quotient_cap, ge=1)
    names: Optional[Tuple[str, ...]] = None

    @field_validator("generators", mode="before")
    @classmethod
    def _coerce_matrices(cls, v):
        try:
            return tuple(as_matrix(A) for A in v)
        except ShapeError as exc:
            raise ValueError(str(exc)) from exc

    @model_validator(mode="after")
    def _check_generators(self) -> "LinearHopfModel":
        n = self.dimension
        for i, A in enumerate(self.generators):
            if A.shape != (n, n):
                raise ValueError(f"generator {i} has shape {A.shape}, expected {n}×{n}")
            if not is_invertible(A):
                raise ValueError(f"generator {i} is singular")
            A.setflags(write=False)
        if self.contraction_index >= len(self.generators):
            raise ValueError("contraction_index points past the generator list")
        if self.names is not None and len(self.names) != len(self.generators):
            raise ValueError("one name per generator is required")
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearHopfModel):
            return NotImplemented
        return (
            (self.dimension, self.contraction_index, self.quotient_cap, self.names)
            == (other.dimension, other.contraction_index, other.quotient_cap, other.names)
            and len(self.generators) == len(other.generators)
            and all(np.array_equal(a, b) for a, b in zip(self.generators, other.generators))
        )

    @property
    def contraction(self) -> ComplexMatrix:
        return self.generators[self.contraction_index]

    def generator_names(self) -> Tuple[str, ...]:
        if self.names is not None:
            return self.names
        return tuple("g" if i == self.contraction_index else f"A{i}" for i in range(len(self.generators)))

    def conjugated(self, S: ComplexMatrix) -> "LinearHopfModel":
        """The same model written in the basis given by the columns of ``S``."""
        S = as_matrix(S)
        S_inv = np.linalg.inv(S)
        return self.model_copy(
            update={"generators": tuple(S @ A @ S_inv for A in self.generators)}
        )


def sample_points(dimension: int, seed: Optional[int] = None) -> List[np.ndarray]:
    """Standard basis plus ``orbit_sample_count`` seeded random points."""
    rng = np.random.default_rng(config.settings.seed if seed is None else seed)
    points = [row.astype(np.complex128) for row in np.eye(dimension)]
    count = config.settings.orbit_sample_count
    raw = rng.standard_normal((count, dimension)) + 1j * rng.standard_normal((count, dimension))
    points.extend(raw)
    return points


def run_certificates(
    model: LinearHopfModel, tol: Optional[Tolerance] = None, seed: Optional[int] = None
) -> List[Certificate]:
    """Evaluate every validation certificate without raising."""
    tol = tol if tol is not None else Tolerance.from_settings()
    g = model.contraction
    certificates: List[Certificate] = []

    radius = float(np.max(np.abs(np.linalg.eigvals(g))))
    certificates.append(
        Certificate(
            name="contraction",
            passed=is_linear_contraction(g, tol),
            residual=radius,
            detail=f"spectral radius {radius:.6g}",
        )
    )

    points = sample_points(model.dimension, seed)
    max_iter = orbit_budget(radius, tol.residual_eps, config.settings.orbit_max_iter)
    failed = [i for i, x in enumerate(points) if not orbit_converges(g, x, max_iter, tol)]
    certificates.append(
        Certificate(
            name="orbit_convergence",
            passed=not failed,
            detail=f"{len(points) - len(failed)}/{len(points)} sample orbits reach 0 within {max_iter} steps",
        )
    )

    # conjugation preserves the spectrum, so A·g·A⁻¹ = gᵏ forces k = 1
    worst = 0.0
    offenders: List[str] = []
    names = model.generator_names()
    for i, A in enumerate(model.generators):
        conj = A @ g @ np.linalg.inv(A)
        deviation = max_norm(conj - g)
        worst = max(worst, deviation)
        if not matrices_close(conj, g, tol.residual_eps):
            offenders.append(names[i])
    certificates.append(
        Certificate(
            name="normality",
            passed=not offenders,
            residual=worst,
            detail="A·g·A⁻¹ = g for every generator"
            if not offenders
            else "conjugation moves g: " + ", ".join(offenders),
        )
    )
    for cert in certificates:
        logger.debug("certificate %s passed=%s %s", cert.name, cert.passed, cert.detail)
    return certificates


def validate_model(
    model: LinearHopfModel, tol: Optional[Tolerance] = None, seed: Optional[int] = None
) -> List[Certificate]:
    """Run the validation certificates; raise :class:`InvalidModelError` on the first failure."""
    certificates = run_certificates(model, tol, seed)
    for cert in certificates:
        if not cert.passed:
            raise InvalidModelError(cert.name, cert.detail, certificates)
    return certificates


def build_extension_model(
    model: LinearHopfModel, tol: Optional[Tolerance] = None
) -> Tuple[CentralExtensionZ, CosetMap]:
    """Enumerate ``M/Γ`` and read the cocycle off representative products.

    Representatives ``r_j`` are generator words found breadth-first, so
    ``r_j = r_p·A_k`` for a parent ``p``. Writing ``r_x·A_k = g^s(x,k)·r_(x·k)``
    gives ``c(x, j) = c(x, p) + s(x·p, k)``.
    """
    tol = tol if tol is not None else Tolerance.from_settings()
    g = model.contraction
    n = model.dimension
    cosets = CosetMap(g, [np.eye(n, dtype=np.complex128)], tol)
    names = model.generator_names()
    others = [(names[i], A) for i, A in enumerate(model.generators) if i != model.contraction_index]

    words = ["e"]
    parent: List[Tuple[int, int]] = [(-1, -1)]
    step: List[List[Tuple[int, int]]] = []
    i = 0
    while i < len(cosets):
        r = cosets.representatives[i]
        row: List[Tuple[int, int]] = []
        for k, (name, A) in enumerate(others):
            X = r @ A
            found = cosets.locate(X)
            if found is None:
                if len(cosets) >= model.quotient_cap:
                    raise InfiniteQuotientError(
                        f"more than {model.quotient_cap} cosets of ⟨g⟩; M/Γ looks infinite"
                    )
                y = cosets.add(X)
                words.append(name if i == 0 else f"{words[i]}*{name}")
                parent.append((i, k))
                row.append((0, y))
            else:
                row.append((found.t, found.h))
        step.append(row)
        i += 1

    order = len(cosets)
    table = [[0] * order for _ in range(order)]
    cocycle = [[0] * order for _ in range(order)]
    for x in range(order):
        table[x][0] = x
        for j in range(1, order):
            p, k = parent[j]
            xp = table[x][p]
            s, y = step[xp][k]
            table[x][j] = y
            cocycle[x][j] = cocycle[x][p] + s
    try:
        H = FiniteGroup(order=order, table=tuple(map(tuple, table)), identity=0, labels=tuple(words))
        ext = CentralExtensionZ(
            quotient=H, cocycle=tuple(map(tuple, cocycle)), action_sign=trivial_sign(H)
        )
    except ValueError as exc:
        raise ModelInconsistencyError(f"coset products do not form an extension: {exc}") from exc
    logger.info("extension model: |H|=%d", order)
    return ext, cosets


def gamma_injective_certificate(cosets: CosetMap, order: int) -> Certificate:
    """``gᵏ ≠ E`` for ``1 ≤ k ≤ order``, so ``Γ ≅ ℤ`` embeds in ``GL_n``."""
    E = np.eye(cosets.contraction.shape[0], dtype=np.complex128)
    distances = [max_norm(cosets.gamma_power(k) - E) for k in range(1, max(order, 1) + 1)]
    hits = [k for k, d in enumerate(distances, start=1) if d <= cosets.tol.residual_eps]
    return Certificate(
        name="gamma_injective",
        passed=not hits,
        residual=min(distances),
        detail=f"gᵏ ≠ E for 1 ≤ k ≤ {order}" if not hits else f"gᵏ = E for k = {hits[0]}",
    )


def tangent_faithful_certificate(finite: FiniteReduction, tol: Optional[Tolerance] = None) -> Certificate:
    """``H′`` acts faithfully on the tangent space and ``H → H′`` is onto with central kernel."""
    tol = tol if tol is not None else Tolerance.from_settings()
    elements = finite.elements
    gaps = [
        max_norm(elements[i] - elements[j]) for i in range(len(elements)) for j in range(i + 1, len(elements))
    ]
    separation = min(gaps, default=float("inf"))
    problems: List[str] = []
    if separation <= tol.residual_eps:
        problems.append("two elements of H′ act identically")
    if finite.projection.image().order != finite.group.order:
        problems.append("H → H′ is not onto")
    H = finite.projection.source
    if not set(finite.kernel.members) <= set(center(H).members):
        problems.append("ker(H → H′) is not central")
    return Certificate(
        name="tangent_faithful",
        passed=not problems,
        residual=separation if gaps else None,
        detail=f"H′ of order {finite.group.order} acts faithfully by matrices"
        if not problems
        else "; ".join(problems),
    )


class JordanReport(BaseModel):
    """Certified outcome of :func:`aut_jordan_index`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    quotient_order: int = Field(..., ge=1)
    jordan_index: int = Field(..., ge=1)
    witness: Subgroup
    root_matrix: np.ndarray
    root_order: int = Field(..., ge=1)
    index_m: int = Field(..., ge=1)
    finite_model_order: int = Field(..., ge=1)
    theta_exponent: int = Field(..., ge=1)
    primary_quotient_order: int = Field(..., ge=1)
    certificates: Tuple[Certificate, ...]
    stage_seconds: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_arithmetic(self) -> "JordanReport":
        if self.primary_quotient_order != self.quotient_order ** 2:
            raise ValueError("primary_quotient_order must equal quotient_order²")
        if self.quotient_order % self.jordan_index:
            raise ValueError("jordan_index must divide quotient_order")
        if self.witness.parent.order != self.quotient_order or self.witness.index != self.jordan_index:
            raise ValueError("witness does not attain jordan_index in H")
        return self

    @property
    def quotient(self) -> FiniteGroup:
        return self.witness.parent

    @property
    def certified(self) -> bool:
        return all(c.passed for c in self.certificates)


@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    start = time.perf_counter()
    logger.info("stage %s", name)
    try:
        yield
    except HopfJordanError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    finally:
        timings[name] = time.perf_counter() - start


def aut_jordan_index(
    model: LinearHopfModel, tol: Optional[Tolerance] = None, seed: Optional[int] = None
) -> JordanReport:
    """Minimal abelian index of ``H = M/Γ``, computed twice and certified."""
    tol = tol if tol is not None else Tolerance.from_settings()
    timings: Dict[str, float] = {}
    certificates: List[Certificate] = []

    with _stage("validate", timings):
        certificates.extend(validate_model(model, tol, seed))

    with _stage("extension", timings):
        ext, cosets = build_extension_model(model, tol)
        H = ext.quotient
        certificates.append(gamma_injective_certificate(cosets, H.order))

    with _stage("index2", timings):
        reduced = index2_reduction(ext)
        certificates.append(
            Certificate(
                name="central_action",
                passed=reduced.index == 1,
                detail=f"[H : ker ε] = {reduced.index}",
            )
        )

    with _stage("transfer", timings):
        R, index_m = kernel_and_Z_quotient(ext)
        torsion = torsion_kernel(ext)
        certificates.append(
            Certificate(
                name="transfer_kernel",
                passed=torsion == R,
                detail=f"|ker ρ| = {len(R)}, im ρ = {index_m}ℤ, "
                + ("equal to the torsion of M" if torsion == R else f"torsion of M has {len(torsion)} elements"),
            )
        )

    with _stage("direct_index", timings):
        jordan_index, witness = minimal_abelian_index(H)

    with _stage("reduction", timings):
        finite = reduce_to_finite(model.generators, model.contraction, ext, cosets, tol, cap=model.quotient_cap)
        reduced_index, _ = minimal_abelian_index(finite.group)
        if reduced_index != jordan_index:
            raise CertificationError(
                f"minimal abelian index of H is {jordan_index} but of H′ is {reduced_index}"
            )
        certificates.append(
            Certificate(
                name="phi_kills_gamma",
                passed=finite.phi_residual <= tol.residual_eps * max(1.0, max_norm(model.contraction)),
                residual=finite.phi_residual,
                detail=f"φ(g) = E with root order {finite.root_order}",
            )
        )
        certificates.append(
            Certificate(
                name="index_preservation",
                passed=finite.certificate.equal,
                detail=f"c(H) = {finite.certificate.lhs}, c(H/N) = {finite.certificate.rhs}, "
                f"c(H′) = {reduced_index}",
            )
        )
        certificates.append(tangent_faithful_certificate(finite, tol))

    with _stage("theta", timings):
        theta = characteristic_power_subgroup(ext)

    report = JordanReport(
        quotient_order=H.order,
        jordan_index=jordan_index,
        witness=witness,
        root_matrix=finite.root,
        root_order=finite.root_order,
        index_m=index_m,
        finite_model_order=finite.group.order,
        theta_exponent=theta,
        primary_quotient_order=H.order * theta,
        certificates=tuple(certificates),
        stage_seconds=timings,
    )
    logger.info("order=%d jordan_index=%d certified=%s", report.quotient_order, report.jordan_index, report.certified)
    return report


def exact_sequence_data(
    model: LinearHopfModel, tol: Optional[Tolerance] = None
) -> Tuple[FiniteGroup, GroupHom]:
    """``G = M/Θ`` with its projection onto ``H``; the kernel is ``Γ/Θ ≅ C_|H|``."""
    ext, _ = build_extension_model(model, tol)
    G, projection = extension_quotient(ext, ext.index)
    kernel = projection.kernel()
    if kernel.order != ext.index:
        raise CertificationError(f"Γ/Θ has order {kernel.order}, expected {ext.index}")
    return G, projection


def corpus_index_bound(reports: Sequence[JordanReport]) -> int:
    """Largest jordan_index observed over a set of reports."""
    return max((r.jordan_index for r in reports), default=1)
