from __future__ import annotations

import numpy as np
import pytest

from hopfjordan.core.errors import (
    IllConditionedModelError,
    InfiniteQuotientError,
    InvalidModelError,
)
from hopfjordan.corpus import scalar_model, shipped, trivial_model, twisted_cyclic_model
from hopfjordan.groupcore.catalog import MATRIX_GROUPS
from hopfjordan.groupcore.closure import matrix_closure
from hopfjordan.groupcore.extensions import kernel_and_Z_quotient
from hopfjordan.groupcore.groups import center, minimal_abelian_index
from hopfjordan.groupcore.reduction import CosetMap, reduce_to_finite
from hopfjordan.hopfpipe import (
    JordanReport,
    LinearHopfModel,
    aut_jordan_index,
    build_extension_model,
    corpus_index_bound,
    exact_sequence_data,
    gamma_injective_certificate,
    tangent_faithful_certificate,
    validate_model,
)
from hopfjordan.schemas.model import ModelSpecFile, load_model_spec
from hopfjordan.spectra import Tolerance, max_norm

E2 = np.eye(2, dtype=np.complex128)
SWAP = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def _model(*generators, cap=None) -> LinearHopfModel:
    kwargs = {"quotient_cap": cap} if cap is not None else {}
    return LinearHopfModel(dimension=2, generators=list(generators), contraction_index=0, **kwargs)


def test_model_validation() -> None:
    with pytest.raises(ValueError):
        LinearHopfModel(dimension=1, generators=[np.eye(1) * 0.5])
    with pytest.raises(ValueError):
        _model(0.5 * E2, np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        LinearHopfModel(dimension=2, generators=[0.5 * E2], contraction_index=1)
    with pytest.raises(ValueError):
        LinearHopfModel(dimension=3, generators=[0.5 * E2])


def test_validate_model_examples() -> None:
    certificates = validate_model(trivial_model())
    assert [c.name for c in certificates] == ["contraction", "orbit_convergence", "normality"]
    assert all(c.passed for c in certificates)

    with pytest.raises(InvalidModelError) as excinfo:
        validate_model(_model(np.diag([0.5, 2.0])))
    assert excinfo.value.certificate == "contraction"
    assert not excinfo.value.certificates[0].passed

    certificates = validate_model(scalar_model("C4"))
    assert certificates[2].name == "normality" and certificates[2].passed


def test_validate_model_rejects_non_normal_contraction() -> None:
    with pytest.raises(InvalidModelError) as excinfo:
        validate_model(_model(np.diag([0.5, 0.25]), SWAP))
    assert excinfo.value.certificate == "normality"


def test_build_extension_trivial() -> None:
    ext, cosets = build_extension_model(trivial_model())
    assert ext.index == 1 and ext.cocycle == ((0,),)
    assert len(cosets) == 1


def test_build_extension_rotation() -> None:
    ext, _ = build_extension_model(scalar_model("C4"))
    H = ext.quotient
    assert H.order == 4 and H.is_abelian()
    assert max(H.element_order(h) for h in H.elements()) == 4
    assert all(c == 0 for row in ext.cocycle for c in row)
    assert H.labels == ("e", "A1", "A1*A1", "A1*A1*A1")


def test_build_extension_quaternion() -> None:
    ext, cosets = build_extension_model(scalar_model("Q8"))
    H = ext.quotient
    assert H.order == 8 and not H.is_abelian()
    assert center(H).order == 2
    assert minimal_abelian_index(H)[0] == 2
    minus = [h for h, r in enumerate(cosets.representatives) if max_norm(r + E2) < 1e-12]
    assert len(minus) == 1
    assert H.mul(minus[0], minus[0]) == H.identity


def test_build_extension_twisted_cocycle() -> None:
    ext, _ = build_extension_model(twisted_cyclic_model(4, 0.5))
    assert ext.index == 4
    assert any(c != 0 for row in ext.cocycle for c in row)
    assert kernel_and_Z_quotient(ext).index_m == 1


def test_build_extension_infinite_quotient() -> None:
    unipotent = np.array([[1, 1], [0, 1]], dtype=np.complex128)
    with pytest.raises(InfiniteQuotientError):
        build_extension_model(_model(0.5 * E2, unipotent, cap=16))


def test_build_extension_ill_conditioned() -> None:
    with pytest.raises(IllConditionedModelError):
        build_extension_model(_model(np.diag([0.5, 2.0])))


@pytest.mark.parametrize(
    "model, expected",
    [
        (trivial_model(), (1, 1, 1, 1)),
        (scalar_model("C4"), (4, 1, 4, 16)),
        (scalar_model("Q8"), (8, 2, 8, 64)),
    ],
    ids=["trivial", "c4", "q8"],
)
def test_aut_jordan_index_examples(model: LinearHopfModel, expected) -> None:
    report = aut_jordan_index(model)
    got = (report.quotient_order, report.jordan_index, report.theta_exponent, report.primary_quotient_order)
    assert got == expected
    assert report.certified
    names = {c.name for c in report.certificates}
    assert {"contraction", "normality", "central_action", "index_preservation", "phi_kills_gamma"} <= names
    assert report.witness.index == report.jordan_index


def test_aut_jordan_index_names_failing_stage() -> None:
    with pytest.raises(InvalidModelError) as excinfo:
        aut_jordan_index(_model(np.diag([0.5, 2.0])))
    assert excinfo.value.stage == "validate"


def test_report_arithmetic_is_enforced() -> None:
    report = aut_jordan_index(scalar_model("C4"))
    fields = {name: getattr(report, name) for name in JordanReport.model_fields}
    with pytest.raises(ValueError):
        JordanReport(**{**fields, "primary_quotient_order": 15})
    with pytest.raises(ValueError):
        JordanReport(**{**fields, "jordan_index": 3})


@pytest.mark.parametrize("stem", sorted(shipped()))
def test_corpus_regression(corpus_dir, stem: str) -> None:
    entry = shipped()[stem]
    spec = load_model_spec(corpus_dir / f"{stem}.json")
    model = spec.to_model()
    assert model == entry.model
    report = aut_jordan_index(model, spec.tolerance_for())
    assert (report.quotient_order, report.jordan_index) == (entry.quotient_order, entry.jordan_index)
    assert report.primary_quotient_order == report.quotient_order ** 2
    assert report.certified


@pytest.mark.parametrize("stem", sorted(shipped()))
def test_corpus_files_match_builders(corpus_dir, stem: str) -> None:
    entry = shipped()[stem]
    spec = ModelSpecFile.from_model(entry.model, description=entry.description)
    assert spec.to_corpus_text() == (corpus_dir / f"{stem}.json").read_text(encoding="utf-8")


def test_corpus_bound_is_observed() -> None:
    reports = [aut_jordan_index(entry.model) for entry in shipped().values()]
    finite_bound = max(
        minimal_abelian_index(matrix_closure(gens).group)[0] for gens in MATRIX_GROUPS.values()
    )
    assert corpus_index_bound(reports) <= finite_bound


@pytest.mark.parametrize("group", ["C4", "Q8", "S3"])
def test_rescaling_invariance(group: str) -> None:
    model = scalar_model(group)
    S = np.array([[2, 1j], [1, 3]], dtype=np.complex128)
    before = aut_jordan_index(model)
    after = aut_jordan_index(model.conjugated(S))
    assert (after.quotient_order, after.jordan_index) == (before.quotient_order, before.jordan_index)


def test_exact_sequence_data() -> None:
    G, projection = exact_sequence_data(trivial_model())
    assert G.order == 1

    G, projection = exact_sequence_data(scalar_model("C4"))
    assert G.order == 16
    assert projection.kernel().order == 4 and projection.image().order == 4

    G, projection = exact_sequence_data(scalar_model("Q8"))
    kernel = projection.kernel()
    assert G.order == 64 and kernel.order == 8
    assert set(kernel.members) <= set(center(G).members)
    assert projection.image().order == 8


@pytest.mark.parametrize(
    "contraction",
    [0.95 * E2, np.array([[0.99, 1], [0, 0.99]], dtype=np.complex128)],
    ids=["scalar", "jordan"],
)
def test_validate_model_slow_contraction(contraction: np.ndarray) -> None:
    certificates = validate_model(_model(contraction))
    assert all(c.passed for c in certificates)
    assert certificates[0].residual == pytest.approx(0.95 if contraction[0, 1] == 0 else 0.99)


def test_aut_jordan_index_slow_contraction() -> None:
    report = aut_jordan_index(scalar_model("C4", 0.95))
    assert report.certified
    assert (report.quotient_order, report.jordan_index) == (4, 1)


def test_gamma_injective_certificate() -> None:
    cosets = CosetMap(0.5 * E2, [E2])
    cert = gamma_injective_certificate(cosets, 4)
    assert cert.passed and cert.residual == pytest.approx(0.5)

    loose = CosetMap(0.5 * E2, [E2], Tolerance(residual_eps=2.0))
    cert = gamma_injective_certificate(loose, 4)
    assert not cert.passed and "k = 1" in cert.detail


def test_tangent_faithful_certificate() -> None:
    model = scalar_model("C4")
    ext, cosets = build_extension_model(model)
    finite = reduce_to_finite(model.generators, model.contraction, ext, cosets)
    cert = tangent_faithful_certificate(finite)
    assert cert.passed and cert.residual is not None and cert.residual > 0.5

    collapsed = finite.model_copy(update={"elements": (finite.elements[0],) * len(finite.elements)})
    cert = tangent_faithful_certificate(collapsed)
    assert not cert.passed and "act identically" in cert.detail


def test_report_certificates_are_computed() -> None:
    report = aut_jordan_index(scalar_model("Q8"))
    by_name = {c.name: c for c in report.certificates}
    assert by_name["gamma_injective"].passed
    assert by_name["gamma_injective"].residual == pytest.approx(0.5)
    assert by_name["tangent_faithful"].passed and by_name["tangent_faithful"].residual > 0
    assert by_name["transfer_kernel"].passed
