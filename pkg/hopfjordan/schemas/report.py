"""Output schemas: certificates and the JSON report written by ``jordan``."""

from __future__ import annotations

from typing import TYPE_CHECKING, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .matrix import MatrixData, encode_matrix

if TYPE_CHECKING:
    from ..hopfpipe import JordanReport


class Certificate(BaseModel):
    """Outcome of one named check; ``residual`` is reported unrounded when meaningful."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    residual: Optional[float] = None
    detail: str = ""


class SubgroupOut(BaseModel):
    order: int
    index: int
    members: List[int]
    labels: List[str]


class ReportFile(BaseModel):
    """Serialized :class:`~hopfjordan.hopfpipe.JordanReport`."""

    schema_version: Literal["1"] = "1"
    input_digest: str = Field(..., pattern=r"^sha256:[0-9a-f]{64}$")
    quotient_order: int
    jordan_index: int
    certified: bool
    witness: SubgroupOut
    root_matrix: MatrixData
    root_order: int
    index_m: int
    finite_model_order: int
    theta_exponent: int
    primary_quotient_order: int
    certificates: List[Certificate]
    stage_seconds: Optional[Dict[str, float]] = None

    @classmethod
    def from_report(cls, report: "JordanReport", digest: str, include_timings: bool = False) -> "ReportFile":
        H = report.quotient
        witness = report.witness
        return cls(
            input_digest=digest,
            quotient_order=report.quotient_order,
            jordan_index=report.jordan_index,
            certified=report.certified,
            witness=SubgroupOut(
                order=witness.order,
                index=witness.index,
                members=list(witness.members),
                labels=[H.label(a) for a in witness.members],
            ),
            root_matrix=encode_matrix(report.root_matrix),
            root_order=report.root_order,
            index_m=report.index_m,
            finite_model_order=report.finite_model_order,
            theta_exponent=report.theta_exponent,
            primary_quotient_order=report.primary_quotient_order,
            certificates=list(report.certificates),
            stage_seconds=dict(report.stage_seconds) if include_timings else None,
        )

    def summary_line(self) -> str:
        certified = "true" if self.certified else "false"
        return f"order={self.quotient_order} jordan_index={self.jordan_index} certified={certified}"

    def to_text(self) -> str:
        lines = [self.summary_line()]
        lines.append(f"witness: {', '.join(self.witness.labels)} (index {self.witness.index})")
        lines.append(
            f"finite model |H′|={self.finite_model_order} root order={self.root_order} "
            f"theta exponent={self.theta_exponent} |M/Θ|={self.primary_quotient_order}"
        )
        for cert in self.certificates:
            lines.append(format_certificate(cert))
        if self.stage_seconds:
            lines.append(
                "timings: " + " ".join(f"{name}={seconds:.3f}s" for name, seconds in self.stage_seconds.items())
            )
        return "\n".join(lines)


def format_certificate(cert: Certificate) -> str:
    status = "PASS" if cert.passed else "FAIL"
    residual = f" residual={cert.residual!r}" if cert.residual is not None else ""
    return f"[{status}] {cert.name}{residual} {cert.detail}".rstrip()


class ValidationResult(BaseModel):
    valid: bool
    certificates: List[Certificate]

    def to_text(self) -> str:
        lines = [format_certificate(cert) for cert in self.certificates]
        lines.append(f"valid={'true' if self.valid else 'false'}")
        return "\n".join(lines)


class RootResult(BaseModel):
    m: int
    root: MatrixData
    residual: float

    def to_text(self) -> str:
        rows = [
            "  ".join(f"{re:.10g}{im:+.10g}j" for re, im in row)
            for row in self.root
        ]
        return "\n".join(rows + [f"residual={self.residual!r}"])
