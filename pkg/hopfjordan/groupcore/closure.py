"""Closing a finite set of generators into a :class:`FiniteGroup`.

Elements are discovered breadth-first by right multiplication with the
generators; the multiplication table is then read off the Cayley graph, so
only ``|G|·|gens|`` products and lookups are ever computed. Element equality
is delegated to a store: exact hashing for hashable elements, max-entry
tolerance for matrices (roots of unity are not exactly representable).
"""

from __future__ import annotations

import logging
from typing import Callable, Generic, List, Optional, Protocol, Sequence, Tuple, TypeVar

import numpy as np

from ..core import config
from ..core.errors import NotFiniteError
from ..spectra import ComplexMatrix, Tolerance, as_matrix, max_norm
from .groups import FiniteGroup

logger = logging.getLogger(__name__)

T = TypeVar("T")


class ElementStore(Protocol[T]):
    def locate(self, x: T) -> Optional[int]: ...

    def add(self, x: T) -> int: ...

    def __len__(self) -> int: ...


class ExactStore(Generic[T]):
    """Hash-based store for exactly comparable elements."""

    def __init__(self) -> None:
        self._index: dict[T, int] = {}

    def locate(self, x: T) -> Optional[int]:
        return self._index.get(x)

    def add(self, x: T) -> int:
        self._index[x] = len(self._index)
        return self._index[x]

    def __len__(self) -> int:
        return len(self._index)


class MatrixStore:
    """Matrices deduplicated by max-entry distance below ``eps``."""

    def __init__(self, dimension: int, eps: float) -> None:
        self._eps = eps
        self._stack = np.empty((0, dimension, dimension), dtype=np.complex128)

    def locate(self, x: ComplexMatrix) -> Optional[int]:
        if not len(self._stack):
            return None
        dist = np.max(np.abs(self._stack - x), axis=(1, 2))
        best = int(np.argmin(dist))
        return best if dist[best] < self._eps * max(1.0, max_norm(x)) else None

    def add(self, x: ComplexMatrix) -> int:
        self._stack = np.concatenate([self._stack, x[None]], axis=0)
        return len(self._stack) - 1

    def __len__(self) -> int:
        return len(self._stack)


class Closure(Generic[T]):
    """A closed group: the abstract table plus the concrete elements."""

    def __init__(self, group: FiniteGroup, elements: List[T], store: ElementStore[T]) -> None:
        self.group = group
        self.elements = elements
        self._store = store

    def index_of(self, x: T) -> Optional[int]:
        return self._store.locate(x)

    def __len__(self) -> int:
        return len(self.elements)


def closure_from_generators(
    generators: Sequence[T],
    cap: int,
    *,
    identity: T,
    multiply: Callable[[T, T], T],
    store: ElementStore[T],
    names: Optional[Sequence[str]] = None,
) -> Closure[T]:
    """Close ``generators`` under multiplication.

    Raises :class:`NotFiniteError` as soon as more than ``cap`` elements are
    found. Element 0 is the identity. When ``names`` are given, elements are
    labelled by the generator word that first reached them.
    """
    elements: List[T] = [identity]
    words: List[str] = ["e"]
    store.add(identity)
    gens: List[T] = list(generators)
    gen_names = list(names) if names is not None else [f"g{k + 1}" for k in range(len(gens))]
    # right[k][i] = index of elements[i]·gens[k]
    right: List[List[int]] = [[] for _ in gens]
    parent: List[Tuple[int, int]] = [(-1, -1)]
    i = 0
    while i < len(elements):
        x = elements[i]
        for k, g in enumerate(gens):
            y = multiply(x, g)
            j = store.locate(y)
            if j is None:
                if len(elements) >= cap:
                    raise NotFiniteError(f"closure exceeds {cap} elements")
                j = store.add(y)
                elements.append(y)
                parent.append((i, k))
                words.append(gen_names[k] if i == 0 else f"{words[i]}*{gen_names[k]}")
            right[k].append(j)
        i += 1

    n = len(elements)
    R = np.asarray(right, dtype=np.int64).reshape(len(gens), n)
    # table[:, j] = table[:, parent(j)] followed by the generator reaching j
    table = np.zeros((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    for j in range(1, n):
        p, k = parent[j]
        table[:, j] = R[k][table[:, p]]
    group = FiniteGroup(
        order=n,
        table=tuple(map(tuple, table.tolist())),
        identity=0,
        labels=tuple(words) if names is not None else None,
    )
    logger.debug("closed %d generators into a group of order %d", len(gens), n)
    return Closure(group, elements, store)


def matrix_closure(
    generators: Sequence[ComplexMatrix],
    cap: Optional[int] = None,
    tol: Optional[Tolerance] = None,
    names: Optional[Sequence[str]] = None,
) -> Closure[ComplexMatrix]:
    tol = tol if tol is not None else Tolerance.from_settings()
    gens = [as_matrix(g) for g in generators]
    if not gens:
        raise ValueError("at least one generator is required for a matrix closure")
    n = gens[0].shape[0]
    return closure_from_generators(
        gens,
        cap if cap is not None else config.settings.closure_cap,
        identity=np.eye(n, dtype=np.complex128),
        multiply=lambda a, b: a @ b,
        store=MatrixStore(n, tol.residual_eps),
        names=names,
    )
