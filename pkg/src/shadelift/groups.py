"""Finite abelian groups given as products of cyclic factors.

Elements are residue tuples; internally they are also numbered ``0..|A|-1``
in mixed radix (first factor most significant) so hot loops can use tables.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property

from .scalars import CyclotomicRing, ring_for

__all__ = ["AbelianGroup", "group_make"]


class AbelianGroup:
    """Z/n_1 + ... + Z/n_r with componentwise modular arithmetic.

    >>> A = AbelianGroup([4])
    >>> A.add((3,), (2,))
    (1,)
    >>> AbelianGroup([2, 2]).exponent
    2
    """

    def __init__(self, factors=()):
        factors = tuple(int(n) for n in factors)
        for n in factors:
            if n < 2:
                raise ValueError(f"cyclic factors must be >= 2, got {n}")
        self.factors = factors

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.factors) if self.factors else 1

    @cached_property
    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(n) for n in self.factors)))

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {g: i for i, g in enumerate(self.elements)}

    def index(self, g) -> int:
        return self._index[self.normalize(g)]

    def normalize(self, g) -> tuple[int, ...]:
        if isinstance(g, int) and self.rank == 1:
            g = (g,)
        g = tuple(g)
        if len(g) != self.rank:
            raise ValueError(f"element {g} has wrong length for group {self.factors}")
        return tuple(x % n for x, n in zip(g, self.factors))

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, g, h) -> tuple[int, ...]:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.factors))

    def neg(self, g) -> tuple[int, ...]:
        return tuple((-a) % n for a, n in zip(g, self.factors))

    def scale(self, m: int, g) -> tuple[int, ...]:
        return tuple((m * a) % n for a, n in zip(g, self.factors))

    def element_order(self, g) -> int:
        return math.lcm(*(n // math.gcd(a, n) for a, n in zip(g, self.factors))) if g else 1

    def generators(self) -> list[tuple[int, ...]]:
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            gens.append(tuple(e))
        return gens

    @cached_property
    def add_table(self) -> list[list[int]]:
        els = self.elements
        idx = self._index
        return [[idx[self.add(g, h)] for h in els] for g in els]

    @cached_property
    def neg_table(self) -> list[int]:
        return [self._index[self.neg(g)] for g in self.elements]

    @cached_property
    def ring(self) -> CyclotomicRing:
        """Scalars for this group: conductor lcm(exp(A), 4), delta^2 = |A|."""
        return ring_for(self.exponent, self.order)

    def automorphisms(self, max_order: int = 64):
        """Yield automorphisms as tuples of generator images.

        Images are chosen generator by generator; a partial assignment is
        pruned as soon as the subgroup it generates is too small.
        """
        if self.order > max_order:
            raise ValueError(f"|A| = {self.order} exceeds the bound {max_order}")
        yield from homomorphisms_into(self, self, injective=True)

    def apply_hom(self, images, g, target: "AbelianGroup | None" = None) -> tuple[int, ...]:
        target = target or self
        out = target.identity
        for a, img in zip(g, images):
            out = target.add(out, target.scale(a, img))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, AbelianGroup) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        if not self.factors:
            return "AbelianGroup(trivial)"
        return "AbelianGroup(" + " + ".join(f"Z/{n}" for n in self.factors) + ")"

    def to_json(self) -> list[int]:
        return list(self.factors)


def homomorphisms_into(src: AbelianGroup, dst: AbelianGroup, injective: bool = False):
    """Yield homomorphisms src -> dst as tuples of generator images.

    With ``injective=True`` only injective ones (and, for equal orders,
    isomorphisms) are produced.
    """
    if injective and src.order > dst.order:
        return
    els = dst.elements
    choices = []
    for n in src.factors:
        choices.append([g for g in els if n % dst.element_order(g) == 0])

    def extend(j, images, span):
        if j == src.rank:
            yield tuple(images)
            return
        n = src.factors[j]
        for g in choices[j]:
            if injective:
                multiples = [dst.scale(m, g) for m in range(n)]
                new_span = set()
                ok = True
                for x in span:
                    for y in multiples:
                        z = dst.add(x, y)
                        if z in new_span:
                            ok = False
                            break
                        new_span.add(z)
                    if not ok:
                        break
                if not ok:
                    continue
            else:
                new_span = span
            images.append(g)
            yield from extend(j + 1, images, new_span)
            images.pop()

    yield from extend(0, [], {dst.identity})


def group_make(factors) -> AbelianGroup:
    return AbelianGroup(factors)
