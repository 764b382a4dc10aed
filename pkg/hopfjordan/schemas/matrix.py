"""JSON form of complex matrices: row-major nested lists of ``[re, im]`` pairs."""

from __future__ import annotations

from typing import List, Sequence, Tuple, Union

import numpy as np
from pydantic import FiniteFloat, ValidationError

from ..core.errors import SpecParseError

ComplexPair = Tuple[FiniteFloat, FiniteFloat]
MatrixData = List[List[ComplexPair]]


def _real(x: float) -> float:
    # -0.0 and 0.0 must serialize identically
    return float(x) + 0.0


def encode_complex(z: complex) -> List[float]:
    z = complex(z)
    return [_real(z.real), _real(z.imag)]


def encode_matrix(A: np.ndarray) -> List[List[List[float]]]:
    return [[encode_complex(z) for z in row] for row in np.asarray(A)]


def decode_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    """Inverse of :func:`encode_matrix`; raggedness is left to the caller to check."""
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def is_square(rows: Sequence[Sequence[object]]) -> bool:
    return len(rows) > 0 and all(len(row) == len(rows) for row in rows)


def json_path(loc: Sequence[Union[int, str]]) -> str:
    """``('generators', 0, 1)`` → ``$.generators[0][1]``."""
    out = "$"
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def parse_error(exc: ValidationError, strip: int = 0) -> SpecParseError:
    """First validation error as a :class:`SpecParseError` located by JSON path."""
    first = exc.errors()[0]
    return SpecParseError(first["msg"], path=json_path(tuple(first["loc"])[strip:]))
