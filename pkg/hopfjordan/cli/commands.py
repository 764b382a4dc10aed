"""Command handlers behind ``python -m hopfjordan``.

Handlers print their result on standard output and return an exit code.
Domain errors are left to propagate; :func:`hopfjordan.main.main` maps them to
exit codes (2 for input problems, 1 for everything else).
"""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import config
from ..core.errors import InvalidModelError
from ..hopfpipe import aut_jordan_index, validate_model
from ..schemas.matrix import encode_matrix
from ..schemas.model import ModelSpecFile, load_matrix, load_model_spec
from ..schemas.report import ReportFile, RootResult, ValidationResult
from ..spectra import Tolerance, commutant_preserving_root, max_norm

logger = logging.getLogger(__name__)


def file_digest(path: Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _tolerance(spec: Optional[ModelSpecFile], eps: Optional[float]) -> Tolerance:
    # flag > file > environment
    tol = spec.tolerance_for() if spec is not None else Tolerance.from_settings()
    if eps is not None:
        tol = tol.model_copy(update={"residual_eps": eps})
    return tol


def cmd_validate(path: Path, *, tol: Optional[float] = None, seed: Optional[int] = None, fmt: str = "text") -> int:
    """Run the validation certificates; exit 0 iff all pass."""
    spec = load_model_spec(path)
    model = spec.to_model()
    try:
        certificates = validate_model(model, _tolerance(spec, tol), seed)
        result = ValidationResult(valid=True, certificates=certificates)
    except InvalidModelError as exc:
        logger.info("model rejected by certificate %s", exc.certificate)
        result = ValidationResult(valid=False, certificates=exc.certificates)
    print(result.model_dump_json(indent=2) if fmt == "json" else result.to_text())
    return 0 if result.valid else 1


def cmd_jordan(
    path: Path,
    *,
    out: Optional[Path] = None,
    tol: Optional[float] = None,
    cap: Optional[int] = None,
    seed: Optional[int] = None,
    fmt: str = "text",
    timings: bool = False,
) -> int:
    """Run the full pipeline and write the report."""
    spec = load_model_spec(path)
    model = spec.to_model(quotient_cap=cap)
    report = aut_jordan_index(model, _tolerance(spec, tol), seed)
    report_file = ReportFile.from_report(
        report,
        file_digest(path),
        include_timings=timings or config.settings.include_timings,
    )
    payload = report_file.model_dump_json(indent=2, exclude_none=True) + "\n"
    if out is not None:
        Path(out).write_text(payload, encoding="utf-8")
        logger.info("report written to %s", out)
    if fmt == "json":
        print(payload, end="")
    else:
        print(report_file.summary_line())
    return 0 if report_file.certified else 1


def cmd_root(path: Path, m: int, *, tol: Optional[float] = None, fmt: str = "text") -> int:
    """Print the commutant-preserving m-th root of the matrix in ``path``."""
    K = load_matrix(path)
    root = commutant_preserving_root(K, m, _tolerance(None, tol))
    residual = max_norm(np.linalg.matrix_power(root, m) - K)
    result = RootResult(m=m, root=encode_matrix(root), residual=residual)
    print(result.model_dump_json(indent=2) if fmt == "json" else result.to_text())
    return 0
