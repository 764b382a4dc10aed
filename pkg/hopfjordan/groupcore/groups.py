"""Finite groups given by multiplication tables.

A :class:`FiniteGroup` stores ``table[i][j]`` = index of the product ``i·j``.
Subgroups are sorted member lists, homomorphisms are per-element image lists.
Construction validates the group axioms (Latin square, identity, associativity
exhaustively up to ``associativity_exhaustive_limit`` and by sampling above).
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from ..core import config
from ..core.errors import HypothesisViolationError, NotNormalError, UnsupportedSizeError

logger = logging.getLogger(__name__)


class FiniteGroup(BaseModel):
    """Abstract finite group with elements ``0..order-1``."""

    model_config = ConfigDict(frozen=True)

    order: int = Field(..., ge=1)
    table: Tuple[Tuple[int, ...], ...]
    identity: int = 0
    labels: Optional[Tuple[str, ...]] = None

    _mul: np.ndarray = PrivateAttr()
    _inv: np.ndarray = PrivateAttr()

    def model_post_init(self, __context: Any) -> None:
        n = self.order
        T = np.asarray(self.table, dtype=np.int64)
        if T.shape != (n, n):
            raise ValueError(f"table must be {n}×{n}, got shape {T.shape}")
        if not 0 <= self.identity < n:
            raise ValueError("identity index out of range")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("labels length does not match group order")
        full = np.arange(n)
        if not (np.sort(T, axis=1) == full).all() or not (np.sort(T, axis=0) == full[:, None]).all():
            raise ValueError("table is not a Latin square")
        if not (T[self.identity] == full).all() or not (T[:, self.identity] == full).all():
            raise ValueError("identity row/column is not the identity permutation")
        if n <= config.settings.associativity_exhaustive_limit:
            left = T[T]
            right = T[full[:, None, None], T[None, :, :]]
            associative = bool((left == right).all())
        else:
            rng = np.random.default_rng(config.settings.seed)
            a, b, c = rng.integers(0, n, size=(3, config.settings.associativity_samples))
            associative = bool((T[T[a, b], c] == T[a, T[b, c]]).all())
        if not associative:
            raise ValueError("table is not associative")
        T.setflags(write=False)
        inv = np.argmax(T == self.identity, axis=1)
        inv.setflags(write=False)
        self._mul = T
        self._inv = inv

    # labels are display only; equality is structural
    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return (self.order, self.identity, self.table) == (other.order, other.identity, other.table)

    def __hash__(self) -> int:
        return hash((self.order, self.identity, self.table))

    @property
    def mul_table(self) -> np.ndarray:
        return self._mul

    @property
    def inverses(self) -> np.ndarray:
        return self._inv

    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self._mul[a, b])

    def inv(self, a: int) -> int:
        return int(self._inv[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result = self.identity
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels is not None else str(a)

    def is_abelian(self) -> bool:
        return bool((self._mul == self._mul.T).all())

    def closure_mask(self, generators: Iterable[int]) -> int:
        """Bitmask of the subgroup generated by ``generators``."""
        gens = list(dict.fromkeys(int(g) for g in generators))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self._mul[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        mask = 0
        for x in seen:
            mask |= 1 << x
        return mask

    def subgroup(self, generators: Iterable[int]) -> "Subgroup":
        return Subgroup(parent=self, members=_bits(self.closure_mask(generators)))


def _bits(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class Subgroup(BaseModel):
    """Subgroup of ``parent`` given by its sorted members."""

    model_config = ConfigDict(frozen=True)

    parent: FiniteGroup
    members: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_closed(self) -> "Subgroup":
        members = self.members
        if list(members) != sorted(set(members)):
            raise ValueError("members must be sorted and distinct")
        G = self.parent
        if not members or members[0] < 0 or members[-1] >= G.order:
            raise ValueError("members out of range")
        if G.identity not in members:
            raise ValueError("subgroup must contain the identity")
        idx = np.asarray(members)
        products = G.mul_table[np.ix_(idx, idx)]
        if not np.isin(products, idx).all() or not np.isin(G.inverses[idx], idx).all():
            raise ValueError("members are not closed under products and inverses")
        if G.order % len(members):
            raise ValueError("subgroup order does not divide the group order")
        return self

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def __contains__(self, a: object) -> bool:
        return a in set(self.members)

    def mask(self) -> int:
        out = 0
        for x in self.members:
            out |= 1 << x
        return out

    def is_abelian(self) -> bool:
        idx = np.asarray(self.members)
        block = self.parent.mul_table[np.ix_(idx, idx)]
        return bool((block == block.T).all())

    def is_normal(self) -> bool:
        G = self.parent
        idx = np.asarray(self.members)
        conj = G.mul_table[G.mul_table[:, idx], G.inverses[:, None]]
        return bool(np.isin(conj, idx).all())

    def as_group(self) -> Tuple[FiniteGroup, Tuple[int, ...]]:
        """The subgroup as a standalone group plus the embedding into ``parent``."""
        G = self.parent
        position = {x: i for i, x in enumerate(self.members)}
        table = tuple(
            tuple(position[G.mul(a, b)] for b in self.members) for a in self.members
        )
        labels = tuple(G.label(a) for a in self.members) if G.labels is not None else None
        group = FiniteGroup(
            order=self.order, table=table, identity=position[G.identity], labels=labels
        )
        return group, self.members


class GroupHom(BaseModel):
    """Homomorphism ``source → target`` given by element images."""

    model_config = ConfigDict(frozen=True)

    source: FiniteGroup
    target: FiniteGroup
    images: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_homomorphism(self) -> "GroupHom":
        if len(self.images) != self.source.order:
            raise ValueError("one image per source element is required")
        img = np.asarray(self.images, dtype=np.int64)
        if img.min() < 0 or img.max() >= self.target.order:
            raise ValueError("image index out of range")
        S, T = self.source.mul_table, self.target.mul_table
        if not (img[S] == T[img[:, None], img[None, :]]).all():
            raise ValueError("images do not respect multiplication")
        if img[self.source.identity] != self.target.identity:
            raise ValueError("identity must map to identity")
        return self

    def __call__(self, a: int) -> int:
        return self.images[a]

    def kernel(self) -> Subgroup:
        e = self.target.identity
        return Subgroup(parent=self.source, members=tuple(a for a, b in enumerate(self.images) if b == e))

    def image(self) -> Subgroup:
        return Subgroup(parent=self.target, members=tuple(sorted(set(self.images))))


def center(G: FiniteGroup) -> Subgroup:
    T = G.mul_table
    members = tuple(int(a) for a in np.flatnonzero((T == T.T).all(axis=1)))
    return Subgroup(parent=G, members=members)


def commutator_subgroup(G: FiniteGroup) -> Subgroup:
    T, inv = G.mul_table, G.inverses
    # a·b·a⁻¹·b⁻¹ for all pairs
    ab = T
    ab_ainv = T[ab, inv[:, None]]
    comm = T[ab_ainv, inv[None, :]]
    return G.subgroup(np.unique(comm).tolist())


def is_normal(G: FiniteGroup, N: Subgroup) -> bool:
    return N.parent == G and N.is_normal()


def all_subgroups(G: FiniteGroup) -> List[Subgroup]:
    """Every subgroup of ``G`` exactly once, ordered by (order, members).

    Layer k holds subgroups generated by k cyclic subgroups; each layer is
    extended by joining one more cyclic subgroup until nothing new appears.
    """
    cap = config.settings.subgroup_order_cap
    if G.order > cap:
        raise UnsupportedSizeError(f"group order {G.order} exceeds the subgroup search cap {cap}")
    cyclic: Dict[int, int] = {}
    for a in G.elements():
        cyclic.setdefault(G.closure_mask([a]), a)
    known: Dict[int, Tuple[int, ...]] = {mask: (a,) for mask, a in cyclic.items()}
    layer = dict(known)
    while layer:
        following: Dict[int, Tuple[int, ...]] = {}
        for mask, gens in layer.items():
            for cmask, c in cyclic.items():
                if cmask & ~mask == 0:
                    continue
                joined = G.closure_mask(gens + (c,))
                if joined not in known and joined not in following:
                    following[joined] = gens + (c,)
        known.update(following)
        layer = following
    subgroups = [Subgroup(parent=G, members=_bits(mask)) for mask in known]
    subgroups.sort(key=lambda s: (s.order, s.members))
    logger.debug("subgroup lattice of order-%d group: %d subgroups", G.order, len(subgroups))
    return subgroups


def minimal_abelian_index(G: FiniteGroup) -> Tuple[int, Subgroup]:
    """Smallest index of an abelian subgroup and a witness attaining it.

    Among witnesses of equal index the lexicographically largest member list
    is returned.
    """
    best: Optional[Subgroup] = None
    for S in all_subgroups(G):
        if not S.is_abelian():
            continue
        if best is None or S.order > best.order or (S.order == best.order and S.members > best.members):
            best = S
    assert best is not None  # the trivial subgroup is abelian
    return best.index, best


def quotient(G: FiniteGroup, N: Subgroup) -> Tuple[FiniteGroup, GroupHom]:
    """``G/N`` with its canonical projection; cosets are numbered by least member."""
    if N.parent != G:
        raise NotNormalError("subgroup belongs to a different group")
    if not N.is_normal():
        raise NotNormalError("quotient requested by a non-normal subgroup")
    T = G.mul_table
    idx = np.asarray(N.members)
    reps = sorted({int(T[a, idx].min()) for a in G.elements()})
    coset_id = {r: i for i, r in enumerate(reps)}
    proj = tuple(coset_id[int(T[a, idx].min())] for a in G.elements())
    table = tuple(tuple(proj[G.mul(r, s)] for s in reps) for r in reps)
    labels = tuple(G.label(r) for r in reps) if G.labels is not None else None
    Q = FiniteGroup(order=len(reps), table=table, identity=proj[G.identity], labels=labels)
    return Q, GroupHom(source=G, target=Q, images=proj)


def relabel(G: FiniteGroup, permutation: Sequence[int]) -> FiniteGroup:
    """Isomorphic copy of ``G`` in which element ``a`` becomes ``permutation[a]``."""
    perm = list(permutation)
    if sorted(perm) != list(range(G.order)):
        raise ValueError("relabeling must be a permutation of the element indices")
    table = [[0] * G.order for _ in range(G.order)]
    for a in G.elements():
        for b in G.elements():
            table[perm[a]][perm[b]] = perm[G.mul(a, b)]
    labels = None
    if G.labels is not None:
        new_labels = [""] * G.order
        for a in G.elements():
            new_labels[perm[a]] = G.labels[a]
        labels = tuple(new_labels)
    return FiniteGroup(
        order=G.order, table=tuple(map(tuple, table)), identity=perm[G.identity], labels=labels
    )


class IndexCertificate(NamedTuple):
    lhs: int
    rhs: int
    equal: bool


def index_preservation_check(H: FiniteGroup, N: Subgroup, psi: GroupHom) -> IndexCertificate:
    """Certify that dividing by a central ``N`` keeps the minimal abelian index.

    Hypotheses: ``N ⊆ Z(H)``, ``psi`` maps into an abelian group, and
    ``N ∩ ker psi`` is trivial.
    """
    if N.parent != H or psi.source != H:
        raise HypothesisViolationError("subgroup and homomorphism must live on H")
    if not set(N.members) <= set(center(H).members):
        raise HypothesisViolationError("N is not contained in the center of H")
    if not psi.target.is_abelian():
        raise HypothesisViolationError("psi does not map into an abelian group")
    overlap = set(N.members) & set(psi.kernel().members)
    if overlap != {H.identity}:
        raise HypothesisViolationError(
            f"N and ker psi intersect in {len(overlap)} elements, expected only the identity"
        )
    lhs, _ = minimal_abelian_index(H)
    Q, _ = quotient(H, N)
    rhs, _ = minimal_abelian_index(Q)
    return IndexCertificate(lhs=lhs, rhs=rhs, equal=lhs == rhs)
