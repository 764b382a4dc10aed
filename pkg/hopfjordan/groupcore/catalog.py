"""Standard small groups and finite matrix groups used by the corpus and tests."""

from __future__ import annotations

import math
from typing import Dict, List, Tuple

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import AlternatingGroup, DihedralGroup, SymmetricGroup

from .closure import matrix_closure
from .groups import FiniteGroup, Subgroup, quotient


def trivial_group() -> FiniteGroup:
    return FiniteGroup(order=1, table=((0,),), identity=0, labels=("e",))


def cyclic_group(n: int) -> FiniteGroup:
    """C_n with element ``k`` standing for the k-th power of the generator."""
    if n < 1:
        raise ValueError(f"cyclic group order must be positive, got {n}")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(order=n, table=table, identity=0)


def _cycle_label(p: Permutation) -> str:
    if p.is_Identity:
        return "e"
    return "".join("(" + " ".join(str(i) for i in c) + ")" for c in p.cyclic_form)


def group_from_sympy(pgroup: PermutationGroup) -> FiniteGroup:
    """Multiplication table of a sympy permutation group.

    Elements are sorted by array form, so the identity is element 0.
    ``table[i][j]`` is the index of sympy's product ``elements[i]*elements[j]``.
    """
    elements = sorted(pgroup.generate(), key=lambda p: p.array_form)
    index = {tuple(p.array_form): i for i, p in enumerate(elements)}
    table = tuple(tuple(index[tuple((a * b).array_form)] for b in elements) for a in elements)
    return FiniteGroup(
        order=len(elements),
        table=table,
        identity=0,
        labels=tuple(_cycle_label(p) for p in elements),
    )


def symmetric_group(k: int) -> FiniteGroup:
    if k < 2:
        return trivial_group()
    return group_from_sympy(SymmetricGroup(k))


def alternating_group(k: int) -> FiniteGroup:
    if k < 3:
        return trivial_group()
    return group_from_sympy(AlternatingGroup(k))


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n."""
    if n < 3:
        raise ValueError("dihedral groups need at least 3 vertices")
    return group_from_sympy(DihedralGroup(n))


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """``G × H`` with ``(a, b)`` stored at ``a·|H| + b``."""
    m = H.order
    table = tuple(
        tuple(G.mul(a // m, b // m) * m + H.mul(a % m, b % m) for b in range(G.order * m))
        for a in range(G.order * m)
    )
    labels = tuple(f"({G.label(a)},{H.label(b)})" for a in G.elements() for b in H.elements())
    return FiniteGroup(
        order=G.order * m, table=table, identity=G.identity * m + H.identity, labels=labels
    )


def quaternion_group() -> FiniteGroup:
    return matrix_closure(MATRIX_GROUPS["Q8"], names=["i", "j"]).group


def cyclic_quotient_map(H: FiniteGroup, N: Subgroup) -> Tuple[int, Tuple[int, ...]]:
    """Identify a cyclic ``H/N`` with ``C_k``; returns ``k`` and the images of H.

    Raises ``ValueError`` when the quotient is not cyclic.
    """
    Q, proj = quotient(H, N)
    for x in Q.elements():
        if Q.element_order(x) == Q.order:
            exponent = {Q.power(x, i): i for i in range(Q.order)}
            return Q.order, tuple(exponent[proj(a)] for a in H.elements())
    raise ValueError("quotient is not cyclic")


_S = math.sqrt(3.0) / 2.0
_Z8 = complex(math.sqrt(0.5), math.sqrt(0.5))

MATRIX_GROUPS: Dict[str, List[np.ndarray]] = {
    "C2": [np.array([[-1, 0], [0, -1]], dtype=np.complex128)],
    "C4": [np.array([[0, -1], [1, 0]], dtype=np.complex128)],
    "Q8": [
        np.array([[0, -1], [1, 0]], dtype=np.complex128),
        np.array([[0, 1j], [1j, 0]], dtype=np.complex128),
    ],
    # binary dihedral group of order 16: a⁸ = 1, b² = a⁴, b·a·b⁻¹ = a⁻¹
    "Dic4": [
        np.array([[_Z8, 0], [0, _Z8.conjugate()]], dtype=np.complex128),
        np.array([[0, -1], [1, 0]], dtype=np.complex128),
    ],
    # S₃ acting on the plane x + y + z = 0
    "S3": [
        np.array([[-0.5, -_S], [_S, -0.5]], dtype=np.complex128),
        np.array([[1, 0], [0, -1]], dtype=np.complex128),
    ],
}
