"""Bicharacters, self-dualities of the group planar algebra, and lifting.

A non-degenerate bicharacter chi gives the map on side-``-`` 2-boxes

    Q_g  ->  sum_h chi(g, h) / d * P_h

whose Fourier conjugate handles side ``+``.  Conversely the bicharacter is
read back as ``d * Tr(Phi(Q_g) P_h)``.  The lift of a shaded evaluation to
unshaded tangles inserts the self-duality on every input disk whose
distinguished interval is shaded.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .groups import AbelianGroup
from .grouppa import (
    BoxError,
    GENERATORS,
    SpinVector,
    TwoBox,
    adjoint,
    box_coprod,
    box_mul,
    box_trace,
    calibrate,
    contragredient,
    fourier,
    fs_power,
    state_sum_eval,
    unit_box,
)
from .scalars import Scalar
from .tangle import Tangle, TangleError, compose, shade

__all__ = [
    "Bicharacter",
    "BicharacterError",
    "Classification",
    "bichar_props",
    "bichar_enumerate_classify",
    "parse_inline_chi",
    "SelfDuality",
    "phi_from_chi",
    "chi_from_phi",
    "verify_star_iso",
    "check_symmetric_duality",
    "generator_terms",
    "lift_action",
    "check_functoriality",
    "functoriality_suite",
    "psi_identity_holds",
]


class BicharacterError(ValueError):
    pass


class Bicharacter:
    """chi(e_i, e_j) = exp(2 pi i q_ij) on generators, extended bimultiplicatively."""

    def __init__(self, group: AbelianGroup, phases):
        r = group.rank
        rows = [[Fraction(q) % 1 for q in row] for row in phases] if r else []
        if len(rows) != r or any(len(row) != r for row in rows):
            raise BicharacterError(f"phase matrix must be {r}x{r}")
        n = group.factors
        for i, j in itertools.product(range(r), repeat=2):
            g = math.gcd(n[i], n[j])
            if (rows[i][j] * g).denominator != 1:
                raise BicharacterError(
                    f"phase ({i + 1},{j + 1}) = {rows[i][j]} is not a multiple of 1/{g}; chi would be ill-defined"
                )
        self.group = group
        self.phases = tuple(tuple(row) for row in rows)
        self._table = None

    @property
    def N(self) -> int:
        return self.group.ring.N

    @property
    def table(self) -> list[list[int]]:
        """exps[g][h] with chi(g, h) = zeta_N ** exps[g][h] (element indices)."""
        if self._table is None:
            A, N = self.group, self.N
            q = [[int(x * N) for x in row] for row in self.phases]
            r = A.rank
            self._table = [
                [sum(g[i] * h[j] * q[i][j] for i in range(r) for j in range(r)) % N for h in A.elements]
                for g in A.elements
            ]
        return self._table

    def value(self, g, h) -> Scalar:
        A = self.group
        return A.ring.zeta(self.table[A.index(g)][A.index(h)])

    def is_symmetric(self) -> bool:
        return all(self.phases[i][j] == self.phases[j][i] for i in range(self.group.rank) for j in range(i))

    def is_nondegenerate(self) -> bool:
        # g -> chi(g, .) is a homomorphism, so injective iff its rows are distinct
        return len({tuple(row) for row in self.table}) == self.group.order

    def transform(self, images) -> "Bicharacter":
        """chi'(x, y) = chi(alpha x, alpha y) for the automorphism with the given generator images."""
        A, N = self.group, self.N
        idx = [A.index(x) for x in images]
        T = self.table
        return Bicharacter(A, [[Fraction(T[a][b], N) for b in idx] for a in idx])

    def key(self) -> tuple:
        return tuple(q for row in self.phases for q in row)

    def __eq__(self, other) -> bool:
        return isinstance(other, Bicharacter) and self.group == other.group and self.phases == other.phases

    def __hash__(self) -> int:
        return hash((self.group, self.phases))

    def __repr__(self) -> str:
        return f"Bicharacter({self.group.factors}, {[[str(q) for q in row] for row in self.phases]})"

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "phases": [[str(q) for q in row] for row in self.phases]}

    @classmethod
    def from_json(cls, data: dict) -> "Bicharacter":
        return cls(AbelianGroup(data["group"]), [[Fraction(q) for q in row] for row in data["phases"]])


def parse_inline_chi(group: AbelianGroup, text: str) -> Bicharacter:
    """Parse ``"1,1=1/4; 1,2=1/2"``: 1-based generator indices, phases mod 1."""
    r = group.rank
    phases = [[Fraction(0)] * r for _ in range(r)]
    for part in filter(None, (p.strip() for p in text.split(";"))):
        try:
            lhs, rhs = part.split("=")
            i, j = (int(x) for x in lhs.split(","))
            q = Fraction(rhs.strip())
        except ValueError:
            raise BicharacterError(f"cannot parse phase assignment {part!r}; expected 'i,j=num/den'") from None
        if not (1 <= i <= r and 1 <= j <= r):
            raise BicharacterError(f"generator index out of range in {part!r} (rank {r})")
        phases[i - 1][j - 1] = q
    return Bicharacter(group, phases)


@dataclass(frozen=True)
class BicharProps:
    is_symmetric: bool
    is_nondegenerate: bool


def bichar_props(chi: Bicharacter) -> BicharProps:
    return BicharProps(chi.is_symmetric(), chi.is_nondegenerate())


def all_bicharacters(A: AbelianGroup):
    """Every bicharacter, in lexicographic order of phase matrices."""
    n = A.factors
    ranges = [range(math.gcd(n[i], n[j])) for i in range(A.rank) for j in range(A.rank)]
    dens = [math.gcd(n[i], n[j]) for i in range(A.rank) for j in range(A.rank)]
    for ms in itertools.product(*ranges):
        flat = [Fraction(m, g) for m, g in zip(ms, dens)]
        yield Bicharacter(A, [flat[i * A.rank : (i + 1) * A.rank] for i in range(A.rank)])


FILTERS = ("all", "symmetric", "nondegenerate", "symmetric_nondegenerate")


@dataclass
class Classification:
    group: AbelianGroup
    filter: str
    bicharacters: list
    orbits: list  # lists of Bicharacter, representative (lexicographic minimum) first

    @property
    def representatives(self) -> list:
        return [o[0] for o in self.orbits]

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "filter": self.filter,
            "count": len(self.bicharacters),
            "orbit_count": len(self.orbits),
            "orbits": [{"representative": o[0].to_json(), "size": len(o)} for o in self.orbits],
        }


def bichar_enumerate_classify(A: AbelianGroup, filter: str = "all", bound: int = 64) -> Classification:
    """Enumerate bicharacters passing ``filter`` and split them into Aut(A)-orbits."""
    filter = filter.replace("-", "_")
    if filter not in FILTERS:
        raise ValueError(f"unknown filter {filter!r}; choose from {FILTERS}")
    if A.order > bound:
        raise ValueError(f"|A| = {A.order} exceeds the bound {bound}")

    def keep(chi):
        if "symmetric" in filter and not chi.is_symmetric():
            return False
        if "nondegenerate" in filter and not chi.is_nondegenerate():
            return False
        return True

    chars = [c for c in all_bicharacters(A) if keep(c)]
    autos = list(A.automorphisms(max_order=bound)) if chars else []
    seen = set()
    orbits = []
    for chi in chars:
        if chi in seen:
            continue
        orbit = {chi}
        for alpha in autos:
            orbit.add(chi.transform(alpha))
        seen |= orbit
        orbits.append(sorted(orbit, key=Bicharacter.key))
    return Classification(A, filter, chars, orbits)


# ----------------------------------------------------------------------------
# self-dualities


class SelfDuality:
    """The pair (Phi_+, Phi_-) on 2-boxes, as matrices in the bases {P_g}, {Q_g}.

    ``minus[g][h]`` is the P_h-coefficient of Phi_-(Q_g); ``plus[g][h]`` is the
    Q_h-coefficient of Phi_+(P_g).  On 0- and 1-boxes both maps are the
    identification of units.
    """

    def __init__(self, group: AbelianGroup, minus):
        self.group = group
        ring = group.ring
        self.minus = [[ring(c) for c in row] for row in minus]
        self.plus = [list(self._plus_image(g).coeffs) for g in range(group.order)]

    def _plus_image(self, g: int) -> TwoBox:
        # Fourier conjugate: rotate into side -, apply Phi_-, rotate back
        A = self.group
        x = fourier(TwoBox.basis(A, "+", A.elements[g]), "rotate")
        return fs_power(self.apply_minus(x), -1)

    def apply_minus(self, x):
        if isinstance(x, SpinVector):
            return self._units(x, "-")
        if x.side != "-":
            raise BoxError("Phi_- acts on side '-' boxes")
        return self._apply(x, self.minus, "+")

    def apply_plus(self, x):
        if isinstance(x, SpinVector):
            return self._units(x, "+")
        if x.side != "+":
            raise BoxError("Phi_+ acts on side '+' boxes")
        return self._apply(x, self.plus, "-")

    def apply(self, x):
        side = x.side
        return self.apply_plus(x) if side == "+" else self.apply_minus(x)

    def _apply(self, x: TwoBox, M, side: str) -> TwoBox:
        A = self.group
        acc = [{} for _ in range(A.order)]
        for g, c in enumerate(x.coeffs):
            if not c.terms:
                continue
            for h, m in enumerate(M[g]):
                if m.terms:
                    c.mul_add(acc[h], m)
        ring = A.ring
        return TwoBox(A, side, [Scalar(ring, {k: v for k, v in t.items() if v}) for t in acc])

    def _units(self, v: SpinVector, side: str):
        if v.side != side:
            raise BoxError(f"expected a side '{side}' box")
        if v.n == 2:
            return self.apply(v.to_twobox()).to_spin()
        if v.n > 2:
            raise BoxError("self-duality is only materialized up to 2-boxes")
        other = "-" if side == "+" else "+"
        src = unit_box(self.group, v.n, side)
        dst = unit_box(self.group, v.n, other)
        key, ref = next(iter(src.coeffs.items()))
        c = v.coeffs.get(key, self.group.ring.zero) / ref
        if v != src * c:
            raise BoxError("box is not a multiple of the unit")
        return dst * c

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "phi_minus": [[c.to_json() for c in row] for row in self.minus],
            "phi_plus": [[c.to_json() for c in row] for row in self.plus],
        }


def phi_from_chi(chi: Bicharacter, allow_degenerate: bool = False) -> SelfDuality:
    if not allow_degenerate and not chi.is_nondegenerate():
        raise BicharacterError("degenerate bicharacter: Phi_- would be singular")
    A = chi.group
    ring = A.ring
    inv_d = ring.delta_power(-1)
    T = chi.table
    return SelfDuality(A, [[ring.zeta(T[g][h]) * inv_d for h in range(A.order)] for g in range(A.order)])


def chi_from_phi(phi: SelfDuality) -> Bicharacter:
    """Read back chi(g, h) = d Tr(Phi_-(Q_g) P_h) and check it is a bicharacter."""
    A = phi.group
    ring = A.ring
    N = ring.N
    d = ring.delta
    exps = []
    for g in range(A.order):
        row = []
        for h in range(A.order):
            val = d * box_trace(TwoBox.basis(A, "+", A.elements[h]) * phi.minus[g][h])
            k = val.root_of_unity_exponent()
            if k is None:
                raise BicharacterError(f"chi{A.elements[g], A.elements[h]} = {val!r} is not a root of unity")
            row.append(k)
        exps.append(row)
    add = A.add_table
    for g1, g2, h in itertools.product(range(A.order), repeat=3):
        if exps[add[g1][g2]][h] != (exps[g1][h] + exps[g2][h]) % N:
            raise BicharacterError("extracted table is not multiplicative in the first slot")
        if exps[h][add[g1][g2]] != (exps[h][g1] + exps[h][g2]) % N:
            raise BicharacterError("extracted table is not multiplicative in the second slot")
    gens = [A.index(e) for e in A.generators()]
    chi = Bicharacter(A, [[Fraction(exps[a][b], N) for b in gens] for a in gens])
    if chi.table != exps:
        raise BicharacterError("extracted table is not determined by its generator values")
    return chi


@dataclass
class StarIsoReport:
    checks: dict  # name -> bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "failures": self.failures[:10]}


def verify_star_iso(phi: SelfDuality) -> StarIsoReport:
    """Adjoint, trace, contragredient, product and coproduct, on all Q-basis inputs."""
    A = phi.group
    Qb = [TwoBox.basis(A, "-", g) for g in A.elements]
    img = [phi.apply_minus(x) for x in Qb]
    checks = dict.fromkeys(("adjoint", "trace", "contragredient", "multiplication", "coproduct"), True)
    failures = []

    def fail(name, where):
        checks[name] = False
        failures.append(f"{name} fails at {where}")

    for g, x in enumerate(Qb):
        e = A.elements[g]
        if phi.apply_minus(adjoint(x)) != adjoint(img[g]):
            fail("adjoint", e)
        if box_trace(img[g]) != box_trace(x):
            fail("trace", e)
        if phi.apply_minus(contragredient(x)) != contragredient(img[g]):
            fail("contragredient", e)
    for g, h in itertools.product(range(A.order), repeat=2):
        pair = (A.elements[g], A.elements[h])
        if checks["multiplication"] and phi.apply_minus(box_mul(Qb[g], Qb[h])) != box_mul(img[g], img[h]):
            fail("multiplication", pair)
        if checks["coproduct"] and phi.apply_minus(box_coprod(Qb[g], Qb[h])) != box_coprod(img[g], img[h]):
            fail("coproduct", pair)
    return StarIsoReport(checks, failures)


def check_symmetric_duality(phi: SelfDuality) -> bool:
    """Whether (Phi_- FS)^2 equals FS^2 on every P_g."""
    A = phi.group
    for g in A.elements:
        x = TwoBox.basis(A, "+", g)
        y = phi.apply_minus(fourier(phi.apply_minus(fourier(x, "forward")), "forward"))
        if y != fs_power(x, 2):
            return False
    return True


def psi_identity_holds(phi: SelfDuality) -> bool:
    """Phi_- after Phi_+ is the identity on 2-boxes (what splicing a reversed disk needs)."""
    A = phi.group
    return all(
        phi.apply_minus(phi.apply_plus(TwoBox.basis(A, "+", g))) == TwoBox.basis(A, "+", g) for g in A.elements
    )


# ----------------------------------------------------------------------------
# lifting to unshaded tangles


def generator_terms() -> dict[str, Tangle]:
    """Library tangles and their variants with one or more stars moved one click."""
    out = {}
    for name, t in GENERATORS.items():
        ndisk = len(t.points)
        for shifts in itertools.product((0, 1), repeat=ndisk):
            if any(s and t.points[d] == 0 for d, s in enumerate(shifts)):
                continue
            label = name if not any(shifts) else name + "@" + "".join(map(str, shifts))
            arcs = [((a[0], (a[1] + shifts[a[0]]) % t.points[a[0]]), (b[0], (b[1] + shifts[b[0]]) % t.points[b[0]]))
                    for a, b in t.arcs]
            merges = []
            for r in t.regions:
                firsts = sorted({min(c) for c in t.cycles if t.region_of(c[0]) == r.index})
                if len(firsts) > 1:
                    merges.append([(d, (j + shifts[d]) % t.points[d] if t.points[d] else 0) for d, j in firsts])
            out[label] = Tangle(t.points, arcs, regions=merges, stars=shifts).require_valid()
    return out


def _require_symmetric(phi: SelfDuality) -> None:
    if not check_symmetric_duality(phi):
        raise BicharacterError("lifting requires a symmetric self-duality")


def _plus_basis(A: AbelianGroup, k: int) -> list:
    if k % 2:
        raise TangleError("odd box spaces of the lifted algebra are zero")
    if k == 4:
        return [TwoBox.basis(A, "+", g) for g in A.elements]
    if k in (0, 2):
        return [unit_box(A, k // 2, "+")]
    raise BoxError("lifting is materialized for boxes with at most 4 points")


def lift_action(U: Tangle, phi: SelfDuality, inputs: Sequence, *, check: bool = True):
    """unZ(U): shade U, apply Phi_+ on inputs whose disk sign is -, then evaluate."""
    if check:
        _require_symmetric(phi)
    if any(k % 2 for k in U.points):
        raise TangleError("odd-boundary tangle has no lift")
    S = shade(U)
    A = phi.group
    boxes = []
    for i, x in enumerate(inputs, 1):
        if x.side != "+":
            raise BoxError(f"input {i}: the lifted algebra takes side '+' boxes")
        boxes.append(phi.apply_plus(x) if S.sign(i) == "-" else x)
    w = calibrate(A).chosen
    out = state_sum_eval(S, [b.to_spin() if isinstance(b, TwoBox) else b for b in boxes], w, group=A)
    return out


@dataclass
class FunctorialityReport:
    case: str  # sign of disk i in sh(U)
    ok: bool
    checked: int
    failures: list = field(default_factory=list)


def check_functoriality(U: Tangle, V: Tangle, i: int, phi: SelfDuality, *, check: bool = True) -> FunctorialityReport:
    """Compare unZ(U o_i V) with unZ(U) o_i unZ(V) on every basis input."""
    if check:
        _require_symmetric(phi)
    A = phi.group
    W = compose(U, i, V)
    v = V.num_inputs
    bases = [_plus_basis(A, k) for k in W.points[1:]]
    inner_cache: dict = {}
    failures = []
    count = 0
    for tup in itertools.product(*(range(len(b)) for b in bases)):
        xs = [bases[d][j] for d, j in enumerate(tup)]
        lhs = lift_action(W, phi, xs, check=False)
        sub = tup[i - 1 : i - 1 + v]
        if sub not in inner_cache:
            inner_cache[sub] = lift_action(V, phi, xs[i - 1 : i - 1 + v], check=False)
        inner = inner_cache[sub]
        inner_box = inner.to_twobox() if inner.n == 2 else inner
        rhs = lift_action(U, phi, xs[: i - 1] + [inner_box] + xs[i - 1 + v :], check=False)
        count += 1
        if lhs != rhs:
            failures.append(tup)
    case = shade(U).sign(i)
    return FunctorialityReport(case, not failures, count, failures)


@dataclass
class SuiteReport:
    trials: int
    passed: int
    cases: dict  # sign -> count
    failures: list

    @property
    def ok(self) -> bool:
        return self.passed == self.trials and all(self.cases.get(s, 0) > 0 for s in "+-")

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "trials": self.trials,
            "passed": self.passed,
            "cases": dict(self.cases),
            "failures": self.failures[:10],
        }


def functoriality_suite(phi: SelfDuality, trials: int = 200, seed: int = 0) -> SuiteReport:
    """Random composable generator-term pairs, alternating the sign of the glued disk."""
    _require_symmetric(phi)
    rng = random.Random(seed)
    terms = generator_terms()
    names = sorted(terms)
    cases = {"+": 0, "-": 0}
    passed = 0
    failures = []
    done = 0
    signs = {n: shade(t).signs for n, t in terms.items()}
    while done < trials:
        # alternate the sign of the glued disk so both cases get equal coverage
        want = "+-"[done % 2]
        un, vn = rng.choice(names), rng.choice(names)
        U, V = terms[un], terms[vn]
        slots = [i for i in range(1, len(U.points)) if U.points[i] == V.k0 and signs[un][i] == want]
        if not slots:
            continue
        i = rng.choice(slots)
        rep = check_functoriality(U, V, i, phi, check=False)
        done += 1
        cases[rep.case] += 1
        if rep.ok:
            passed += 1
        else:
            failures.append({"U": un, "V": vn, "i": i, "case": rep.case})
    return SuiteReport(trials, passed, cases, failures)
