"""Extensions ``1 → ℤ → M → H → 1`` encoded by an integer 2-cocycle.

An element of M is a pair ``(t, h)`` with ``t ∈ ℤ`` and ``h`` an element of
the finite quotient H; multiplication is

    (t₁, h₁)(t₂, h₂) = (t₁ + ε(h₁)·t₂ + c(h₁, h₂), h₁h₂)

where ε: H → {±1} is the action sign. All arithmetic here is exact.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, FrozenSet, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr

from ..core import config
from ..core.errors import CertificationError, NonCentralError, NotFiniteError, UnsupportedSizeError
from .closure import ExactStore, closure_from_generators
from .groups import FiniteGroup, GroupHom, Subgroup, minimal_abelian_index

logger = logging.getLogger(__name__)

SIGN_GROUP = FiniteGroup(order=2, table=((0, 1), (1, 0)), identity=0, labels=("+1", "-1"))

# t-range standing in for ℤ in exhaustive checks; every identity checked is
# linear in t
BOUNDED_T = range(-2, 3)


@dataclass(frozen=True, order=True)
class ExtElement:
    t: int
    h: int


def trivial_sign(H: FiniteGroup) -> GroupHom:
    return GroupHom(source=H, target=SIGN_GROUP, images=(0,) * H.order)


class CentralExtensionZ(BaseModel):
    """Quotient H, normalized cocycle ``c`` and action sign ε."""

    model_config = ConfigDict(frozen=True)

    quotient: FiniteGroup
    cocycle: Tuple[Tuple[int, ...], ...]
    action_sign: GroupHom

    _c: np.ndarray = PrivateAttr()
    _eps: np.ndarray = PrivateAttr()

    def model_post_init(self, __context: Any) -> None:
        H = self.quotient
        n = H.order
        C = np.asarray(self.cocycle, dtype=np.int64)
        if C.shape != (n, n):
            raise ValueError(f"cocycle must be {n}×{n}, got shape {C.shape}")
        if self.action_sign.source != H or self.action_sign.target != SIGN_GROUP:
            raise ValueError("action sign must be a homomorphism from the quotient to {+1, -1}")
        e = H.identity
        if C[e].any() or C[:, e].any():
            raise ValueError("cocycle is not normalized: c(e, h) and c(h, e) must vanish")
        eps = np.where(np.asarray(self.action_sign.images) == SIGN_GROUP.identity, 1, -1)
        T = H.mul_table
        full = np.arange(n)
        if n <= config.settings.associativity_exhaustive_limit:
            lhs = C[:, :, None] + C[T]
            rhs = eps[:, None, None] * C[None, :, :] + C[full[:, None, None], T[None, :, :]]
            ok = bool((lhs == rhs).all())
        else:
            rng = np.random.default_rng(config.settings.seed)
            a, b, c = rng.integers(0, n, size=(3, config.settings.associativity_samples))
            ok = bool((C[a, b] + C[T[a, b], c] == eps[a] * C[b, c] + C[a, T[b, c]]).all())
        if not ok:
            raise ValueError("cocycle condition fails; the extension would not be associative")
        C.setflags(write=False)
        eps.setflags(write=False)
        self._c = C
        self._eps = eps

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, CentralExtensionZ):
            return NotImplemented
        return (self.quotient, self.cocycle, self.action_sign) == (
            other.quotient,
            other.cocycle,
            other.action_sign,
        )

    def __hash__(self) -> int:
        return hash((self.quotient, self.cocycle, self.action_sign.images))

    @property
    def index(self) -> int:
        """``[M : Γ] = |H|``."""
        return self.quotient.order

    def is_central(self) -> bool:
        return bool((self._eps == 1).all())

    def sign(self, h: int) -> int:
        return int(self._eps[h])

    def c(self, h1: int, h2: int) -> int:
        return int(self._c[h1, h2])

    @property
    def identity(self) -> ExtElement:
        return ExtElement(0, self.quotient.identity)

    @property
    def fibre_generator(self) -> ExtElement:
        """The generator ``K = (1, e)`` of Γ."""
        return ExtElement(1, self.quotient.identity)

    def mul(self, a: ExtElement, b: ExtElement) -> ExtElement:
        return ExtElement(
            a.t + int(self._eps[a.h]) * b.t + int(self._c[a.h, b.h]),
            self.quotient.mul(a.h, b.h),
        )

    def inv(self, a: ExtElement) -> ExtElement:
        h_inv = self.quotient.inv(a.h)
        return ExtElement(-int(self._eps[a.h]) * (a.t + int(self._c[a.h, h_inv])), h_inv)

    def power(self, a: ExtElement, k: int) -> ExtElement:
        if k < 0:
            a, k = self.inv(a), -k
        result = self.identity
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def conjugate(self, a: ExtElement, by: ExtElement) -> ExtElement:
        return self.mul(self.mul(by, a), self.inv(by))

    def commutator(self, a: ExtElement, b: ExtElement) -> ExtElement:
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def bounded_elements(self, ts: Sequence[int] = BOUNDED_T) -> Iterator[ExtElement]:
        for t in ts:
            for h in self.quotient.elements():
                yield ExtElement(t, h)


def split_extension(H: FiniteGroup) -> CentralExtensionZ:
    """``ℤ × H``."""
    return CentralExtensionZ(
        quotient=H, cocycle=((0,) * H.order,) * H.order, action_sign=trivial_sign(H)
    )


def carry_cocycle(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Generator of H²(C_n, ℤ): the carry of ``a + b`` modulo ``n``."""
    return tuple(tuple((a + b) // n for b in range(n)) for a in range(n))


def pullback_cocycle(
    cocycle: Sequence[Sequence[int]], images: Sequence[int], order: int
) -> Tuple[Tuple[int, ...], ...]:
    """``c(φ(a), φ(b))`` for a homomorphism given by ``images``."""
    return tuple(tuple(int(cocycle[images[a]][images[b]]) for b in range(order)) for a in range(order))


def coboundary(H: FiniteGroup, f: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """``δf(a, b) = f(a) + f(b) − f(ab)`` (trivial action, needs ``f(e) = 0``)."""
    if f[H.identity] != 0:
        raise ValueError("f must vanish at the identity for a normalized coboundary")
    return tuple(tuple(f[a] + f[b] - f[H.mul(a, b)] for b in H.elements()) for a in H.elements())


def random_cocycle(
    H: FiniteGroup,
    rng: np.random.Generator,
    base: Optional[Sequence[Sequence[int]]] = None,
    spread: int = 3,
) -> Tuple[Tuple[int, ...], ...]:
    """``k·base + δf`` with random ``k ∈ {0, 1, 2}`` and random normalized ``f``."""
    f = [int(x) for x in rng.integers(-spread, spread + 1, size=H.order)]
    f[H.identity] = 0
    twist = coboundary(H, f)
    k = int(rng.integers(0, 3)) if base is not None else 0
    return tuple(
        tuple(twist[a][b] + (k * int(base[a][b]) if base is not None else 0) for b in H.elements())
        for a in H.elements()
    )


def _require_central(M: CentralExtensionZ) -> None:
    if not M.is_central():
        raise NonCentralError("Γ is not central; pass to the kernel of the action sign first")


class TransferMap:
    """``ρ(a)``: the ℤ-coordinate of ``a^n`` with ``n = |H|``.

    Because Γ is central, ``ρ(t, h) = n·t + ρ(0, h)``, so the map is stored by
    its values on ``t = 0``.
    """

    def __init__(self, n: int, base: Tuple[int, ...]) -> None:
        self.n = n
        self.base = base

    def __call__(self, a: ExtElement) -> int:
        return self.n * a.t + self.base[a.h]


def transfer_power_map(M: CentralExtensionZ) -> TransferMap:
    _require_central(M)
    H = M.quotient
    n = H.order
    base: List[int] = []
    for h in H.elements():
        power = M.power(ExtElement(0, h), n)
        if power.h != H.identity:
            raise CertificationError(f"(0, {H.label(h)})^{n} left the fibre")
        base.append(power.t)
    rho = TransferMap(n, tuple(base))
    for h1 in H.elements():
        for h2 in H.elements():
            product = M.mul(ExtElement(0, h1), ExtElement(0, h2))
            if rho(product) != base[h1] + base[h2]:
                raise CertificationError(
                    f"transfer is not additive on ({H.label(h1)}, {H.label(h2)})"
                )
    return rho


class ZQuotient(NamedTuple):
    R: Tuple[ExtElement, ...]
    index_m: int


def kernel_and_Z_quotient(M: CentralExtensionZ) -> ZQuotient:
    """``R = ker ρ`` listed explicitly and the positive generator of ``im ρ``.

    ``M/R ≅ ℤ`` via ``ρ/index_m``.
    """
    rho = transfer_power_map(M)
    H = M.quotient
    n = rho.n
    if rho.base[H.identity] != 0 or rho(M.fibre_generator) != n:
        raise CertificationError("ker ρ meets Γ nontrivially")
    members = tuple(
        ExtElement(-rho.base[h] // n, h) for h in H.elements() if rho.base[h] % n == 0
    )
    members_set = set(members)
    conjugators = [M.fibre_generator] + [ExtElement(0, h) for h in H.elements()]
    for x in conjugators:
        for r in members:
            if M.conjugate(r, x) not in members_set:
                raise CertificationError("ker ρ is not normal")
    index_m = math.gcd(n, *rho.base)
    logger.debug("transfer kernel |R|=%d, im ρ = %dℤ", len(members), index_m)
    return ZQuotient(R=tuple(sorted(members)), index_m=index_m)


def torsion_kernel(M: CentralExtensionZ) -> Tuple[ExtElement, ...]:
    """Finite-order elements of M: the preimage of the torsion of ``M/[M, M] ≅ ℤ × B``.

    For a central extension these form a finite normal subgroup with
    quotient ℤ, and coincide with ``ker ρ``.
    """
    _require_central(M)
    H = M.quotient
    out = []
    for h in H.elements():
        k = H.element_order(h)
        s = M.power(ExtElement(0, h), k).t
        # (t, h)^k = (k·t + s, e)
        if s % k == 0:
            out.append(ExtElement(-s // k, h))
    return tuple(sorted(out))


def schur_commutators_finite(M: CentralExtensionZ) -> FrozenSet[ExtElement]:
    """The commutator subgroup of M, closed explicitly.

    With Γ central, ``[(t₁, h₁), (t₂, h₂)]`` depends only on ``(h₁, h₂)``, so
    finitely many generators suffice.
    """
    _require_central(M)
    H = M.quotient
    gens = sorted(
        {M.commutator(ExtElement(0, a), ExtElement(0, b)) for a in H.elements() for b in H.elements()}
    )
    try:
        closed = closure_from_generators(
            gens,
            config.settings.closure_cap,
            identity=M.identity,
            multiply=M.mul,
            store=ExactStore(),
        )
    except NotFiniteError as exc:
        raise CertificationError("commutator closure is unbounded; cocycle condition must be broken") from exc
    return frozenset(closed.elements)


class Index2Reduction(NamedTuple):
    extension: CentralExtensionZ
    index: int
    embedding: Tuple[int, ...]


def index2_reduction(M: CentralExtensionZ) -> Index2Reduction:
    """Restrict to ``ker ε``, where Γ is central; ``index`` is 1 or 2."""
    H = M.quotient
    if M.is_central():
        return Index2Reduction(extension=M, index=1, embedding=tuple(H.elements()))
    kernel: Subgroup = M.action_sign.kernel()
    K, embedding = kernel.as_group()
    cocycle = tuple(tuple(M.c(a, b) for b in embedding) for a in embedding)
    reduced = CentralExtensionZ(quotient=K, cocycle=cocycle, action_sign=trivial_sign(K))
    return Index2Reduction(extension=reduced, index=kernel.index, embedding=embedding)


def jordan_index_bound(M: CentralExtensionZ) -> int:
    """Upper bound ``[H : ker ε] · c(ker ε)`` for the minimal abelian index of H."""
    reduced, index, _ = index2_reduction(M)
    inner, _ = minimal_abelian_index(reduced.quotient)
    return index * inner


def characteristic_power_subgroup(
    ext: CentralExtensionZ,
    automorphisms: Sequence[Callable[[ExtElement], ExtElement]] = (),
) -> int:
    """Exponent ``n = |H|`` of ``Θ = ⟨Kⁿ⟩``.

    Checks that every inner automorphism (over the bounded representatives)
    and every supplied automorphism sends ``(n, e)`` to ``(±n, e)``.
    """
    n = ext.index
    target = ExtElement(n, ext.quotient.identity)
    allowed = {target, ExtElement(-n, ext.quotient.identity)}
    for x in ext.bounded_elements():
        image = ext.conjugate(target, x)
        if image not in allowed:
            raise CertificationError(f"conjugation by {x} moves Θ's generator to {image}")
    for sigma in automorphisms:
        image = sigma(target)
        if image not in allowed:
            raise CertificationError(f"supplied automorphism moves Θ's generator to {image}")
    return n


def extension_quotient(ext: CentralExtensionZ, modulus: int) -> Tuple[FiniteGroup, GroupHom]:
    """``M/⟨(modulus, e)⟩`` with its projection onto H.

    The element ``(t mod modulus, h)`` is stored at ``h·modulus + t``.
    """
    H = ext.quotient
    size = H.order * modulus
    if size > config.settings.closure_cap:
        raise UnsupportedSizeError(f"quotient of order {size} exceeds the closure cap")

    def index(t: int, h: int) -> int:
        return h * modulus + t % modulus

    table = [[0] * size for _ in range(size)]
    for h1 in H.elements():
        for t1 in range(modulus):
            row = table[index(t1, h1)]
            for h2 in H.elements():
                for t2 in range(modulus):
                    p = ext.mul(ExtElement(t1, h1), ExtElement(t2, h2))
                    row[index(t2, h2)] = index(p.t, p.h)
    labels = tuple(f"({t},{H.label(h)})" for h in H.elements() for t in range(modulus))
    G = FiniteGroup(
        order=size,
        table=tuple(map(tuple, table)),
        identity=index(0, H.identity),
        labels=labels,
    )
    projection = GroupHom(source=G, target=H, images=tuple(i // modulus for i in range(size)))
    return G, projection
