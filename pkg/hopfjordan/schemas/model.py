"""Input file schemas: linear Hopf model specs and single matrices.

Both loaders turn every failure (unreadable file, invalid JSON, schema
violation, singular generator) into :class:`SpecParseError` carrying the JSON
path of the first problem.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, ValidationError, field_validator, model_validator

from ..core.errors import SpecParseError
from ..hopfpipe import LinearHopfModel
from ..spectra import Tolerance
from .matrix import MatrixData, decode_matrix, encode_matrix, is_square, parse_error

SCHEMA_VERSION = "1"


class ToleranceOverrides(BaseModel):
    """Per-file tolerance overrides; unset fields fall back to settings."""

    model_config = ConfigDict(extra="forbid")

    eigen_cluster_eps: Optional[FiniteFloat] = Field(None, gt=0)
    residual_eps: Optional[FiniteFloat] = Field(None, gt=0)


class ModelSpecFile(BaseModel):
    """On-disk form of a :class:`LinearHopfModel`."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal["1"]
    description: Optional[str] = None
    dimension: int = Field(..., ge=2)
    generators: List[MatrixData] = Field(..., min_length=1)
    contraction_index: int = Field(0, ge=0)
    names: Optional[List[str]] = None
    tolerance: Optional[ToleranceOverrides] = None
    quotient_cap: Optional[int] = Field(None, ge=1)

    @field_validator("generators")
    @classmethod
    def _square(cls, v: List[MatrixData]) -> List[MatrixData]:
        for i, rows in enumerate(v):
            if not is_square(rows):
                raise ValueError(f"generator {i} is not a square matrix")
        return v

    @field_validator("names")
    @classmethod
    def _strip_names(cls, v: Optional[List[str]]) -> Optional[List[str]]:
        if v is None:
            return v
        v = [name.strip() for name in v]
        if any(not name for name in v):
            raise ValueError("generator names must be non-empty")
        return v

    @model_validator(mode="after")
    def _check_consistency(self) -> "ModelSpecFile":
        for i, rows in enumerate(self.generators):
            if len(rows) != self.dimension:
                raise ValueError(f"generator {i} is {len(rows)}×{len(rows)}, dimension is {self.dimension}")
        if self.contraction_index >= len(self.generators):
            raise ValueError("contraction_index points past the generator list")
        if self.names is not None and len(self.names) != len(self.generators):
            raise ValueError("one name per generator is required")
        return self

    def matrices(self) -> List[np.ndarray]:
        return [decode_matrix(rows) for rows in self.generators]

    def tolerance_for(self, base: Optional[Tolerance] = None) -> Tolerance:
        """``base`` (or the settings default) with this file's overrides applied."""
        tol = base if base is not None else Tolerance.from_settings()
        if self.tolerance is None:
            return tol
        overrides = self.tolerance.model_dump(exclude_none=True)
        return tol.model_copy(update=overrides) if overrides else tol

    def to_model(self, quotient_cap: Optional[int] = None) -> LinearHopfModel:
        """Build the model; invalid generators become a parse error at ``$.generators``."""
        kwargs: Dict[str, Any] = {}
        cap = quotient_cap if quotient_cap is not None else self.quotient_cap
        if cap is not None:
            kwargs["quotient_cap"] = cap
        try:
            return LinearHopfModel(
                dimension=self.dimension,
                generators=self.matrices(),
                contraction_index=self.contraction_index,
                names=tuple(self.names) if self.names is not None else None,
                **kwargs,
            )
        except ValidationError as exc:
            raise SpecParseError(exc.errors()[0]["msg"], path="$.generators") from exc

    @classmethod
    def from_model(cls, model: LinearHopfModel, description: Optional[str] = None) -> "ModelSpecFile":
        return cls(
            schema_version=SCHEMA_VERSION,
            description=description,
            dimension=model.dimension,
            generators=[encode_matrix(A) for A in model.generators],
            contraction_index=model.contraction_index,
            names=list(model.names) if model.names is not None else None,
        )

    def to_corpus_text(self) -> str:
        """Layout of ``corpus/*.json``: one matrix row per line, other fields on one line each."""
        fields = []
        for key, value in self.model_dump(mode="json", exclude_none=True).items():
            if key == "generators":
                blocks = ["    [" + ",\n     ".join(json.dumps(row) for row in rows) + "]" for rows in value]
                fields.append('  "generators": [\n' + ",\n".join(blocks) + "\n  ]")
            else:
                fields.append(f"  {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}")
        return "{\n" + ",\n".join(fields) + "\n}\n"


class MatrixFile(BaseModel):
    """A single square matrix, for the root command."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal["1"] = SCHEMA_VERSION
    matrix: MatrixData

    @field_validator("matrix")
    @classmethod
    def _square(cls, v: MatrixData) -> MatrixData:
        if not is_square(v):
            raise ValueError("matrix is not square")
        return v

    def to_array(self) -> np.ndarray:
        return decode_matrix(self.matrix)


def _read_json(path: Path) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read file: {exc.strerror}", path="$") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", path="$") from exc


def load_model_spec(path: Path) -> ModelSpecFile:
    data = _read_json(path)
    try:
        return ModelSpecFile.model_validate(data)
    except ValidationError as exc:
        raise parse_error(exc) from exc


def load_matrix(path: Path) -> np.ndarray:
    """Read a matrix file; a bare nested list is accepted as the matrix itself."""
    data = _read_json(path)
    bare = isinstance(data, list)
    try:
        parsed = MatrixFile.model_validate({"matrix": data} if bare else data)
    except ValidationError as exc:
        # a bare list has no "matrix" key to report
        raise parse_error(exc, strip=1 if bare else 0) from exc
    return parsed.to_array()

