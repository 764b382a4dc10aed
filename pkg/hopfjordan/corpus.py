"""Shipped linear Hopf models.

Most models are a scalar contraction ``s·E₂`` next to a finite matrix group,
so ``H`` is that group. ``twisted_c4`` instead uses a contraction that is a
power of another generator, which gives a nontrivial cocycle and a root order
above one.
"""

from __future__ import annotations

from typing import Dict, List, NamedTuple, Sequence

import numpy as np

from .groupcore.catalog import MATRIX_GROUPS
from .hopfpipe import LinearHopfModel

ROTATION = np.array([[0, -1], [1, 0]], dtype=np.complex128)


class CorpusEntry(NamedTuple):
    model: LinearHopfModel
    description: str
    quotient_order: int
    jordan_index: int


def scalar_model(group: str, scale: float = 0.5) -> LinearHopfModel:
    """``⟨s·E₂⟩`` times the finite group ``MATRIX_GROUPS[group]``."""
    finite = MATRIX_GROUPS[group]
    generators = [scale * np.eye(2, dtype=np.complex128), *finite]
    names = ("g", *(f"A{i + 1}" for i in range(len(finite))))
    return LinearHopfModel(dimension=2, generators=generators, contraction_index=0, names=names)


def trivial_model() -> LinearHopfModel:
    return LinearHopfModel(
        dimension=2,
        generators=[np.diag([0.5, 1 / 3]).astype(np.complex128)],
        contraction_index=0,
        names=("g",),
    )


def twisted_cyclic_model(order: int = 4, scale: float = 0.5) -> LinearHopfModel:
    """``g = (s·R)^order`` with R a rotation of that order; ``H ≅ C_order``."""
    if order == 4:
        R = ROTATION
    else:
        c, s = np.cos(2 * np.pi / order), np.sin(2 * np.pi / order)
        R = np.array([[c, -s], [s, c]], dtype=np.complex128)
    A = scale * R
    g = np.linalg.matrix_power(A, order)
    return LinearHopfModel(dimension=2, generators=[g, A], contraction_index=0, names=("g", "A1"))


def shipped() -> Dict[str, CorpusEntry]:
    """Every model in ``corpus/`` keyed by file stem, with its known answer."""
    return {
        "trivial": CorpusEntry(trivial_model(), "diagonal contraction alone", 1, 1),
        "c2": CorpusEntry(scalar_model("C2"), "scalar contraction with -E", 2, 1),
        "c4": CorpusEntry(scalar_model("C4"), "scalar contraction with a rotation of order 4", 4, 1),
        "q8": CorpusEntry(scalar_model("Q8"), "scalar contraction with the quaternion group", 8, 2),
        "dic4": CorpusEntry(scalar_model("Dic4"), "scalar contraction with the binary dihedral group of order 16", 16, 2),
        "s3": CorpusEntry(scalar_model("S3"), "scalar contraction with S3 on the plane x+y+z=0", 6, 2),
        "twisted_c4": CorpusEntry(twisted_cyclic_model(), "contraction equal to the fourth power of a scaled rotation", 4, 1),
    }


def oracle_models(scales: Sequence[float] = (0.5, 1 / 3, 0.75, 0.9)) -> List[LinearHopfModel]:
    """Scalar contractions at several scales over every shipped finite group."""
    return [scalar_model(group, scale) for group in MATRIX_GROUPS for scale in scales]
