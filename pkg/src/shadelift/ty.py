"""Tambara-Yamagami fusion data attached to symmetric self-dualities."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bigraph import Bigraph, BigraphParseError, bigraph_fp_norm, bigraph_parse
from .duality import Bicharacter, bichar_enumerate_classify
from .groups import AbelianGroup, homomorphisms_into

__all__ = [
    "FusionRing",
    "TYDatum",
    "ty_fusion_ring",
    "fs_indicators",
    "ty_equivalent",
    "ty_classify",
    "Bigraph",
    "BigraphParseError",
    "bigraph_parse",
    "bigraph_fp_norm",
]


class FusionRing:
    """Objects ``A + {m}``; ``N[x][y][z]`` is the multiplicity of z in x (x) y."""

    def __init__(self, group: AbelianGroup, objects: list, N: list, dims: list):
        self.group = group
        self.objects = objects
        self.N = N
        self.dims = dims
        if not self.is_associative():
            raise ValueError("fusion table is not associative")

    def index(self, x) -> int:
        return self.objects.index(x)

    def fuse(self, x, y) -> dict:
        i, j = self.index(x), self.index(y)
        return {self.objects[k]: m for k, m in enumerate(self.N[i][j]) if m}

    def is_associative(self) -> bool:
        n = len(self.objects)
        N = self.N
        for x, y, z, v in itertools.product(range(n), repeat=4):
            lhs = sum(N[x][y][w] * N[w][z][v] for w in range(n))
            rhs = sum(N[y][z][w] * N[x][w][v] for w in range(n))
            if lhs != rhs:
                return False
        return True

    def grading(self) -> list[int]:
        return [0 if o != "m" else 1 for o in self.objects]

    def respects_grading(self) -> bool:
        gr = self.grading()
        n = len(self.objects)
        return all(
            (gr[x] + gr[y]) % 2 == gr[z]
            for x, y, z in itertools.product(range(n), repeat=3)
            if self.N[x][y][z]
        )


def ty_fusion_ring(A: AbelianGroup) -> FusionRing:
    """a (x) b = ab,  a (x) m = m (x) a = m,  m (x) m = sum of all a."""
    els = A.elements
    objects = list(els) + ["m"]
    n = len(objects)
    m = n - 1
    N = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            N[i][j][A.index(A.add(a, b))] = 1
        N[i][m][m] = 1
        N[m][i][m] = 1
    for k in range(len(els)):
        N[m][m][k] = 1
    ring = A.ring
    dims = [ring.one] * len(els) + [ring.delta]
    return FusionRing(A, objects, N, dims)


@dataclass(frozen=True)
class TYDatum:
    group: AbelianGroup
    chi: Bicharacter
    sign: str

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")
        if self.chi.group != self.group:
            raise ValueError("bicharacter lives on a different group")
        if not (self.chi.is_symmetric() and self.chi.is_nondegenerate()):
            raise ValueError("TY data needs a symmetric non-degenerate bicharacter")

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "chi": self.chi.to_json(), "sign": self.sign}


@dataclass(frozen=True)
class Indicators:
    values: dict  # object -> nu_2 (0, 1 or -1)
    factor_planar_algebra_admissible: bool

    def to_json(self) -> dict:
        return {
            "nu2": {("m" if k == "m" else ",".join(map(str, k))): v for k, v in self.values.items()},
            "factor_planar_algebra_admissible": self.factor_planar_algebra_admissible,
        }


def fs_indicators(datum: TYDatum) -> Indicators:
    """nu_2(a) = [a^2 = e] on invertible objects, nu_2(m) = sign."""
    A = datum.group
    vals = {a: int(A.add(a, a) == A.identity) for a in A.elements}
    vals["m"] = 1 if datum.sign == "+" else -1
    return Indicators(vals, datum.sign == "+")


def ty_equivalent(d1: TYDatum, d2: TYDatum):
    """Return (True, generator images) for an isomorphism carrying chi_1 to chi_2, else (False, None)."""
    if d1.sign != d2.sign or d1.group.order != d2.group.order:
        return False, None
    A, B = d1.group, d2.group
    N1, N2 = d1.chi.N, d2.chi.N
    T1, T2 = d1.chi.table, d2.chi.table
    gens = [A.index(e) for e in A.generators()]
    for images in homomorphisms_into(A, B, injective=True):
        idx = [B.index(x) for x in images]
        if all(
            T1[gens[i]][gens[j]] * N2 == T2[idx[i]][idx[j]] * N1
            for i in range(A.rank)
            for j in range(A.rank)
        ):
            return True, images
    return False, None


def ty_classify(A: AbelianGroup, bound: int = 64) -> list[TYDatum]:
    reps = bichar_enumerate_classify(A, "symmetric_nondegenerate", bound=bound).representatives
    return [TYDatum(A, chi, s) for chi in reps for s in ("+", "-")]
