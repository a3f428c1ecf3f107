"""Combinatorial planar tangles and their checkerboard shadings.

A tangle is an output disk (disk 0) holding input disks 1..t, with strands
pairing all boundary points.  Points on every disk are numbered clockwise
starting just after the distinguished interval, so the distinguished interval
of every disk is interval 0.  Interval ``j`` sits between points ``j-1`` and
``j``.  A *corner* ``(d, j)`` names interval ``j`` of disk ``d``.

The planar embedding is carried by the rotation system (the clockwise order
of points around each disk).  Walking a face with the face on the left gives
the boundary cycles; pieces of the diagram not connected to each other are
glued into regions by an explicit region grouping, and closed strands are
recorded as loops separating two regions.  Validity is an Euler
characteristic check on the assembled sphere.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

__all__ = [
    "Tangle",
    "ShadedTangle",
    "Violation",
    "ValidationReport",
    "TangleError",
    "TangleParseError",
    "validate",
    "compose",
    "shade",
    "reverse_shading",
    "regions_and_signs",
    "forget",
    "parse_tangle",
    "random_tangle",
    "random_connected_tangle",
    "random_closure",
    "compose_shaded",
    "iter_all_colorings",
]


class TangleError(ValueError):
    pass


class TangleParseError(TangleError):
    def __init__(self, line: int, col: int, message: str):
        self.line, self.col = line, col
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True)
class Violation:
    kind: str  # "dangling", "repeated", "odd", "nonplanar", "disconnected", "bad-ref"
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Region:
    index: int
    corners: tuple  # sorted corners (disk, interval) on the region boundary
    n_cycles: int
    n_loop_sides: int

    @property
    def euler(self) -> int:
        return 2 - self.n_cycles - self.n_loop_sides


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def exit_corner(port, points) -> tuple[int, int]:
    """The corner whose face walk leaves along the strand at ``port``."""
    d, p = port
    if d == 0:
        return (0, (p + 1) % points[0])
    return (d, p)


class Tangle:
    """A planar tangle up to isotopy.

    Parameters
    ----------
    points:
        ``points[d]`` is the number of boundary points on disk ``d``.
    arcs:
        Pairs of ports ``((d, p), (d', p'))``.
    loops:
        Either a count of contractible loops sitting in the region of the
        output distinguished interval, or a sequence of ``(ref, ref)`` naming
        the two regions a loop separates.  A ref is a corner ``(d, j)`` or a
        string naming a region not touching any disk.
    regions:
        Groups of corners whose regions coincide; needed only when the
        diagram has several connected pieces.
    stars:
        Distinguished interval per disk.  Points are relabelled so that every
        star becomes interval 0.
    """

    def __init__(self, points, arcs=(), loops=0, regions=(), stars=None):
        points = tuple(int(k) for k in points)
        if not points:
            raise TangleError("a tangle needs an output disk")
        if any(k < 0 for k in points):
            raise TangleError("point counts must be non-negative")
        self.points = points
        shift = [0] * len(points)
        if stars is not None:
            stars = list(stars)
            if len(stars) != len(points):
                raise TangleError("one star per disk required")
            for d, s in enumerate(stars):
                shift[d] = s % points[d] if points[d] else 0

        def port(x):
            d, p = int(x[0]), int(x[1])
            if not 0 <= d < len(points):
                raise TangleError(f"disk {d} does not exist")
            if not 0 <= p < max(points[d], 1) or points[d] == 0:
                raise TangleError(f"point {d}.{p} does not exist")
            return (d, (p - shift[d]) % points[d])

        def corner(x):
            if isinstance(x, str):
                return x
            d, j = int(x[0]), int(x[1])
            if not 0 <= d < len(points):
                raise TangleError(f"disk {d} does not exist")
            k = points[d]
            if not 0 <= j < max(k, 1):
                raise TangleError(f"interval {d}.{j} does not exist")
            return (d, (j - shift[d]) % k if k else 0)

        self._raw_arcs = [(port(a), port(b)) for a, b in arcs]
        if isinstance(loops, int):
            self._raw_loops = [((0, 0), f"__loop{n}") for n in range(loops)]
        else:
            self._raw_loops = [(corner(a), corner(b)) for a, b in loops]
        self._raw_regions = [[corner(c) for c in grp] for grp in regions]

    # construction from already-normalized parts ---------------------------
    @classmethod
    def _from_parts(cls, points, partner, cycle_label, loop_labels):
        """Build from a full partner map, a labelling of corners by region
        label, and loops given as pairs of region labels."""
        t = cls.__new__(cls)
        t.points = tuple(points)
        seen = set()
        arcs = []
        for a, b in partner.items():
            if a not in seen:
                seen.add(a)
                seen.add(b)
                arcs.append((a, b))
        t._raw_arcs = arcs
        t._raw_loops = []
        t._raw_regions = []
        t._preset = (cycle_label, list(loop_labels))
        return t

    # basic data ------------------------------------------------------------
    @property
    def num_inputs(self) -> int:
        return len(self.points) - 1

    @property
    def k0(self) -> int:
        return self.points[0]

    def ports(self):
        for d, k in enumerate(self.points):
            for p in range(k):
                yield (d, p)

    def corners(self):
        for d, k in enumerate(self.points):
            for j in range(max(k, 1)):
                yield (d, j)

    @cached_property
    def _pairing(self):
        partner = {}
        problems = []
        for a, b in self._raw_arcs:
            if a == b:
                problems.append(Violation("repeated", f"arc joins {a} to itself"))
                continue
            for x in (a, b):
                if x in partner:
                    problems.append(Violation("repeated", f"point {x[0]}.{x[1]} lies on two arcs"))
            partner[a] = b
            partner[b] = a
        for x in self.ports():
            if x not in partner:
                problems.append(Violation("dangling", f"point {x[0]}.{x[1]} is not on any arc"))
        return partner, problems

    @property
    def partner(self) -> dict:
        partner, problems = self._pairing
        if problems:
            raise TangleError(problems[0].message)
        return partner

    @cached_property
    def arcs(self) -> tuple:
        return tuple(sorted(tuple(sorted((a, b))) for a, b in self.partner.items() if a < b))

    @cached_property
    def num_loops(self) -> int:
        return len(self._structure["loops"])

    # faces -------------------------------------------------------------------
    def next_corner(self, c) -> tuple[int, int]:
        d, j = c
        k = self.points[d]
        if k == 0:
            return c
        out = (0, (j - 1) % k) if d == 0 else (d, j)
        e, q = self.partner[out]
        if e == 0:
            return (0, q)
        return (e, (q + 1) % self.points[e])

    @cached_property
    def cycles(self) -> list[tuple]:
        seen = set()
        out = []
        for c in self.corners():
            if c in seen:
                continue
            cyc = []
            x = c
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.next_corner(x)
            out.append(tuple(cyc))
        return out

    @cached_property
    def _structure(self) -> dict:
        partner = self.partner
        cycles = self.cycles
        cycle_of = {c: i for i, cyc in enumerate(cycles) for c in cyc}
        preset = getattr(self, "_preset", None)
        uf = _UnionFind()
        for i in range(len(cycles)):
            uf.find(("c", i))
        bad = []
        if preset is not None:
            label_of, loop_labels = preset
            for i, cyc in enumerate(cycles):
                labels = {label_of(c) for c in cyc}
                if len(labels) != 1:
                    raise TangleError("inconsistent region labels on a boundary cycle")
                uf.union(("l", labels.pop()), ("c", i))
            loops = [(("l", a), ("l", b)) for a, b in loop_labels]
        else:

            def node(ref):
                if isinstance(ref, str):
                    return ("n", ref)
                return ("c", cycle_of[ref])

            for grp in self._raw_regions:
                nodes = [node(r) for r in grp]
                for n in nodes[1:]:
                    uf.union(nodes[0], n)
            loops = [(node(a), node(b)) for a, b in self._raw_loops]
        for a, b in loops:
            uf.find(a)
            uf.find(b)
        # number regions: anchored ones in order of first cycle, then the rest
        index = {}
        for i in range(len(cycles)):
            r = uf.find(("c", i))
            if r not in index:
                index[r] = len(index)
        for a, b in loops:
            for x in (a, b):
                r = uf.find(x)
                if r not in index:
                    index[r] = len(index)
        region_of_cycle = [index[uf.find(("c", i))] for i in range(len(cycles))]
        loop_regions = [(index[uf.find(a)], index[uf.find(b)]) for a, b in loops]
        nreg = len(index)
        corners = [[] for _ in range(nreg)]
        ncyc = [0] * nreg
        nside = [0] * nreg
        for i, cyc in enumerate(cycles):
            r = region_of_cycle[i]
            ncyc[r] += 1
            corners[r].extend(cyc)
        for a, b in loop_regions:
            nside[a] += 1
            nside[b] += 1
            if a == b:
                bad.append(Violation("bad-ref", "a loop has both sides in the same region"))
        regions = [Region(r, tuple(sorted(corners[r])), ncyc[r], nside[r]) for r in range(nreg)]
        region_of_corner = {c: region_of_cycle[cycle_of[c]] for c in cycle_of}
        return {
            "regions": regions,
            "region_of_corner": region_of_corner,
            "loops": loop_regions,
            "bad": bad,
        }

    @property
    def regions(self) -> list[Region]:
        return self._structure["regions"]

    @property
    def loops(self) -> list[tuple[int, int]]:
        return self._structure["loops"]

    def region_of(self, corner) -> int:
        return self._structure["region_of_corner"][corner]

    @property
    def root_region(self) -> int:
        return self.region_of((0, 0))

    def strand_sides(self):
        """Yield (left region, right region) for every arc and loop."""
        roc = self._structure["region_of_corner"]
        for a, b in self.arcs:
            yield roc[exit_corner(a, self.points)], roc[exit_corner(b, self.points)]
        yield from self.loops

    # validation --------------------------------------------------------------
    def validate(self) -> ValidationReport:
        report = ValidationReport()
        for d, k in enumerate(self.points):
            if k % 2:
                report.violations.append(Violation("odd", f"disk {d} has an odd number ({k}) of points"))
        _, problems = self._pairing
        if problems:
            report.violations.extend(problems)
            return report
        try:
            st = self._structure
        except KeyError as exc:
            report.violations.append(Violation("bad-ref", f"unknown corner {exc}"))
            return report
        report.violations.extend(st["bad"])
        regions = st["regions"]
        V = sum(self.points) + sum(1 for k in self.points if k == 0) + len(st["loops"])
        E = sum(self.points) // 2 + sum(max(k, 1) for k in self.points) + len(st["loops"])
        chi = V - E + len(self.points) + sum(r.euler for r in regions)
        uf = _UnionFind()
        for r in regions:
            uf.find(("r", r.index))
            for d, _ in r.corners:
                uf.union(("r", r.index), ("d", d))
        for a, b in self.strand_sides():
            uf.union(("r", a), ("r", b))
        roots = {uf.find(("r", r.index)) for r in regions}
        if len(roots) > 1:
            report.violations.append(
                Violation("disconnected", "pieces of the diagram are not placed in a common region")
            )
        elif chi != 2:
            report.violations.append(
                Violation("nonplanar", f"Euler characteristic {chi} != 2 (strands cross or nesting is inconsistent)")
            )
        return report

    @property
    def is_valid(self) -> bool:
        return self.validate().ok

    def require_valid(self) -> "Tangle":
        report = self.validate()
        if not report.ok:
            raise TangleError("invalid tangle: " + "; ".join(v.message for v in report.violations))
        return self

    # identity ------------------------------------------------------------------
    @cached_property
    def key(self):
        """Canonical isotopy invariant (disks, arcs, regions, loop nesting)."""
        st = self._structure
        regions = st["regions"]
        loops = st["loops"]
        at = {r.index: [] for r in regions}
        for n, (a, b) in enumerate(loops):
            at[a].append(n)
            at[b].append(n)

        def side(r, via):
            reg = regions[r]
            if reg.corners:
                return ("A", reg.corners[0])
            return ("U", tuple(sorted(side(other(n, r), n) for n in at[r] if n != via)))

        def other(n, r):
            a, b = loops[n]
            return b if a == r else a

        parts = []
        for reg in regions:
            if not reg.corners:
                continue
            forms = tuple(sorted(side(other(n, reg.index), n) for n in at[reg.index]))
            parts.append((reg.corners, forms))
        return (self.points, self.arcs, tuple(sorted(parts)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Tangle) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Tangle(points={self.points}, arcs={len(self.arcs)}, loops={self.num_loops})"

    # serialization -------------------------------------------------------------
    def _refs(self):
        regions = self.regions
        roc = self._structure["region_of_corner"]

        def ref(r):
            reg = regions[r]
            return list(reg.corners[0]) if reg.corners else f"@r{r}"

        merges = []
        for reg in regions:
            firsts = sorted(min(c) for c in self.cycles if roc[c[0]] == reg.index)
            if len(firsts) > 1:
                merges.append([list(c) for c in firsts])
        loops = [[ref(a), ref(b)] for a, b in self.loops]
        return merges, loops

    def to_json(self) -> dict:
        merges, loops = self._refs()
        return {
            "schema": "shadelift.tangle/1",
            "disks": [{"id": d, "points": k, "star": 0} for d, k in enumerate(self.points)],
            "arcs": [[list(a), list(b)] for a, b in self.arcs],
            "loops": loops,
            "regions": merges,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Tangle":
        disks = sorted(data["disks"], key=lambda x: x["id"])
        if [x["id"] for x in disks] != list(range(len(disks))):
            raise TangleError("disk ids must be 0..t")
        def ref(x):
            return x if isinstance(x, str) else tuple(x)
        loops = data.get("loops", [])
        if isinstance(loops, int):
            loops_arg = loops
        else:
            loops_arg = [(ref(a), ref(b)) for a, b in loops]
        return cls(
            [x["points"] for x in disks],
            [(tuple(a), tuple(b)) for a, b in data.get("arcs", [])],
            loops=loops_arg,
            regions=[[ref(c) for c in grp] for grp in data.get("regions", [])],
            stars=[x.get("star", 0) for x in disks],
        )

    def to_dsl(self) -> str:
        merges, loops = self._refs()
        lines = [f"disk {d} points {k} star 0" for d, k in enumerate(self.points)]
        lines += [f"arc {a[0]}.{a[1]} {b[0]}.{b[1]}" for a, b in self.arcs]

        def fmt(r):
            return r if isinstance(r, str) else f"{r[0]}.{r[1]}"

        lines += ["region " + " ".join(fmt(c) for c in grp) for grp in merges]
        lines += [f"loop {fmt(a)} {fmt(b)}" for a, b in loops]
        return "\n".join(lines) + "\n"


# -----------------------------------------------------------------------------
# shaded tangles


class ShadedTangle:
    """A tangle together with a checkerboard 2-colouring of its regions."""

    def __init__(self, base: Tangle, shades):
        self.base = base
        self.shades = tuple(bool(s) for s in shades)
        if len(self.shades) != len(base.regions):
            raise TangleError("one shade per region required")
        for a, b in base.strand_sides():
            if self.shades[a] == self.shades[b]:
                raise TangleError("regions on the two sides of a strand have the same shade")

    def sign(self, i: int) -> str:
        """'+' if the distinguished interval of disk i is unshaded, else '-'."""
        return "-" if self.shades[self.base.region_of((i, 0))] else "+"

    @property
    def signs(self) -> tuple[str, ...]:
        return tuple(self.sign(i) for i in range(len(self.base.points)))

    def shade_of(self, corner) -> bool:
        return self.shades[self.base.region_of(corner)]

    def op(self) -> "ShadedTangle":
        return ShadedTangle(self.base, [not s for s in self.shades])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ShadedTangle)
            and self.base == other.base
            and self.shades[self.base.root_region] == other.shades[other.base.root_region]
        )

    def __hash__(self) -> int:
        return hash((self.base, self.shades[self.base.root_region]))

    def __repr__(self) -> str:
        return f"ShadedTangle({self.base!r}, signs={''.join(self.signs)})"


def _checkerboard(t: Tangle, root_shade: bool = False) -> list[bool] | None:
    n = len(t.regions)
    adj = [[] for _ in range(n)]
    for a, b in t.strand_sides():
        adj[a].append(b)
        adj[b].append(a)
    shades: list = [None] * n
    root = t.root_region
    shades[root] = root_shade
    stack = [root]
    while stack:
        r = stack.pop()
        for s in adj[r]:
            if shades[s] is None:
                shades[s] = not shades[r]
                stack.append(s)
            elif shades[s] == shades[r]:
                return None
    if any(s is None for s in shades):
        return None
    return shades


def validate(t: Tangle) -> ValidationReport:
    return t.validate()


def shade(t: Tangle) -> ShadedTangle:
    """The checkerboard shading with the output distinguished interval unshaded."""
    t.require_valid()
    shades = _checkerboard(t)
    if shades is None:
        raise TangleError("tangle is not checkerboard shadeable")
    return ShadedTangle(t, shades)


def reverse_shading(s: ShadedTangle) -> ShadedTangle:
    return s.op()


def forget(s: ShadedTangle) -> Tangle:
    return s.base


def regions_and_signs(s: ShadedTangle):
    """Regions with their shades, and the sign vector (sign_0, ..., sign_t)."""
    regions = [(r, s.shades[r.index]) for r in s.base.regions]
    return regions, s.signs


# -----------------------------------------------------------------------------
# composition


def _compose_parts(U: Tangle, i: int, V: Tangle):
    U.require_valid()
    V.require_valid()
    if not 1 <= i <= U.num_inputs:
        raise TangleError(f"disk index {i} out of range 1..{U.num_inputs}")
    k = U.points[i]
    if V.k0 != k:
        raise TangleError(f"arity mismatch: disk {i} has {k} points, inserted tangle has {V.k0}")
    v = V.num_inputs

    def mapU(d):
        return d if d < i else d + v - 1

    def mapV(d):
        return d + i - 1

    points = list(U.points[:i]) + list(V.points[1:]) + list(U.points[i + 1 :])

    uf = _UnionFind()
    for j in range(max(k, 1)):
        uf.union(("U", U.region_of((i, j))), ("V", V.region_of((0, j))))

    def follow(src, port):
        """From ``port`` in tangle ``src`` walk along strands until a free end."""
        T = U if src == "U" else V
        while True:
            q = T.partner[port]
            if src == "U" and q[0] == i:
                src, port, T = "V", (0, q[1]), V
            elif src == "V" and q[0] == 0:
                src, port, T = "U", (i, q[1]), U
            else:
                return src, q

    def new_port(src, port):
        d, p = port
        return (mapU(d) if src == "U" else mapV(d), p)

    partner = {}
    for d in range(U.num_inputs + 1):
        if d == i:
            continue
        for p in range(U.points[d]):
            src, q = follow("U", (d, p))
            partner[new_port("U", (d, p))] = new_port(src, q)
    for d in range(1, v + 1):
        for p in range(V.points[d]):
            src, q = follow("V", (d, p))
            partner[new_port("V", (d, p))] = new_port(src, q)

    # closed strands created by gluing
    loops = []
    visited = set()
    for j in range(k):
        if j in visited:
            continue
        # j is a glued point; is it on a path reaching a free end?
        q = V.partner[(0, j)]
        path = [j]
        closed = True
        seen_here = {j}
        start = j
        cur = j
        while True:
            q = V.partner[(0, cur)]
            if q[0] != 0:
                closed = False
                break
            r = U.partner[(i, q[1])]
            if r[0] != i:
                closed = False
                break
            cur = r[1]
            if cur == start:
                break
            path.append(cur)
            seen_here.add(cur)
        if closed:
            visited |= seen_here
            for x in path:
                visited.add(V.partner[(0, x)][1])
            # sides of the V piece traversed from (0, start)
            q = V.partner[(0, start)]
            left = uf.find(("V", V.region_of(exit_corner((0, start), V.points))))
            right = uf.find(("V", V.region_of(exit_corner(q, V.points))))
            loops.append((left, right))
    for a, b in U.loops:
        loops.append((uf.find(("U", a)), uf.find(("U", b))))
    for a, b in V.loops:
        loops.append((uf.find(("V", a)), uf.find(("V", b))))

    def source_corner(c):
        d, j = c
        if d < i:
            return ("U", (d, j))
        if d < i + v:
            return ("V", (d - i + 1, j))
        return ("U", (d - v + 1, j))

    def label(c):
        src, sc = source_corner(c)
        T = U if src == "U" else V
        return uf.find((src, T.region_of(sc)))

    W = Tangle._from_parts(points, partner, label, loops)
    # provenance: old region -> new region index
    new_index = {}
    for reg in W.regions:
        if reg.corners:
            new_index[label(reg.corners[0])] = reg.index
    for n, (a, b) in enumerate(loops):
        la, lb = W.loops[n]
        new_index.setdefault(a, la)
        new_index.setdefault(b, lb)
    prov = {}
    for src, T in (("U", U), ("V", V)):
        for reg in T.regions:
            prov[(src, reg.index)] = new_index.get(uf.find((src, reg.index)))
    return W, prov


def compose(U: Tangle, i: int, V: Tangle) -> Tangle:
    """Insert ``V`` into input disk ``i`` of ``U``, stars aligned.

    Input disks of the result are U's 1..i-1, then V's 1..v, then U's
    i+1..u.
    """
    W, _ = _compose_parts(U, i, V)
    return W


def compose_shaded(S: ShadedTangle, i: int, T: ShadedTangle) -> ShadedTangle:
    """Glue shaded tangles; shadings must agree along the glued boundary."""
    k = S.base.points[i] if 1 <= i < len(S.base.points) else None
    if k is None:
        raise TangleError(f"disk index {i} out of range")
    for j in range(max(k, 1)):
        if T.base.k0 == k and S.shade_of((i, j)) != T.shade_of((0, j)):
            raise TangleError(f"shadings disagree on the boundary of disk {i}")
    W, prov = _compose_parts(S.base, i, T.base)
    shades: list = [None] * len(W.regions)
    for (src, r), nr in prov.items():
        if nr is None:
            continue
        s = (S if src == "U" else T).shades[r]
        if shades[nr] is None:
            shades[nr] = s
        elif shades[nr] != s:
            raise TangleError("glued regions carry different shades")
    if any(s is None for s in shades):
        raise TangleError("a region of the composite inherited no shade")
    return ShadedTangle(W, shades)


# -----------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\S+")


def parse_tangle(text: str) -> Tangle:
    """Parse the line-oriented tangle format.

    ::

        disk 0 points 4 star 0
        disk 1 points 4 star 0
        arc 0.0 1.0
        ...
        loops 1            # contractible loops at the output star
        loop 0.1 @x        # loop separating region of corner 0.1 from region @x
        region 0.0 1.2     # corners lying in one region
    """
    disks: dict[int, tuple[int, int]] = {}
    arcs, loops, regions = [], [], []
    nloops = 0

    def num(tok, lineno, col, what):
        try:
            return int(tok)
        except ValueError:
            raise TangleParseError(lineno, col, f"expected integer {what}, got {tok!r}") from None

    def dotted(tok, lineno, col):
        m = re.fullmatch(r"(\d+)\.(\d+)", tok)
        if not m:
            raise TangleParseError(lineno, col, f"expected <disk>.<index>, got {tok!r}")
        return (int(m.group(1)), int(m.group(2)))

    def ref(tok, lineno, col):
        if tok.startswith("@") and len(tok) > 1:
            return tok
        return dotted(tok, lineno, col)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not toks:
            continue
        head, col = toks[0]
        if head == "disk":
            if len(toks) != 6 or toks[2][0] != "points" or toks[4][0] != "star":
                raise TangleParseError(lineno, col, "expected 'disk <id> points <k> star <interval>'")
            d = num(toks[1][0], lineno, toks[1][1], "disk id")
            if d in disks:
                raise TangleParseError(lineno, toks[1][1], f"disk {d} declared twice")
            disks[d] = (num(toks[3][0], lineno, toks[3][1], "point count"), num(toks[5][0], lineno, toks[5][1], "star"))
        elif head == "arc":
            if len(toks) != 3:
                raise TangleParseError(lineno, col, "expected 'arc <disk.point> <disk.point>'")
            arcs.append((dotted(toks[1][0], lineno, toks[1][1]), dotted(toks[2][0], lineno, toks[2][1]), lineno))
        elif head == "loops":
            if len(toks) != 2:
                raise TangleParseError(lineno, col, "expected 'loops <n>'")
            nloops += num(toks[1][0], lineno, toks[1][1], "loop count")
        elif head == "loop":
            if len(toks) != 3:
                raise TangleParseError(lineno, col, "expected 'loop <ref> <ref>'")
            loops.append((ref(toks[1][0], lineno, toks[1][1]), ref(toks[2][0], lineno, toks[2][1])))
        elif head == "region":
            if len(toks) < 3:
                raise TangleParseError(lineno, col, "expected 'region <ref> <ref> ...'")
            regions.append([ref(t, lineno, c) for t, c in toks[1:]])
        else:
            raise TangleParseError(lineno, col, f"unknown directive {head!r}")
    if 0 not in disks:
        raise TangleParseError(1, 1, "missing output disk 0")
    ids = sorted(disks)
    if ids != list(range(len(ids))):
        raise TangleParseError(1, 1, f"disk ids must be 0..{len(ids) - 1}, got {ids}")
    points = [disks[d][0] for d in ids]
    stars = [disks[d][1] for d in ids]
    for a, b, lineno in arcs:
        for d, p in (a, b):
            if d not in disks or not 0 <= p < disks[d][0]:
                raise TangleParseError(lineno, 1, f"point {d}.{p} does not exist")
    loops = [((0, stars[0] if points[0] else 0), f"@__{n}") for n in range(nloops)] + loops
    return Tangle(points, [(a, b) for a, b, _ in arcs], loops=loops, regions=regions, stars=stars)


# -----------------------------------------------------------------------------
# random tangles


class _Builder:
    def __init__(self, points, partner):
        self.points = list(points)
        self.partner = dict(partner)

    def tangle(self) -> Tangle:
        seen, arcs = set(), []
        for a, b in self.partner.items():
            if a not in seen:
                seen |= {a, b}
                arcs.append((a, b))
        return Tangle(self.points, arcs)

    def insert_point(self, d, j) -> tuple[int, int]:
        """Insert a fresh point into interval j of disk d; it gets index j."""
        def bump(x):
            return (x[0], x[1] + 1) if x[0] == d and x[1] >= j else x

        self.partner = {bump(a): bump(b) for a, b in self.partner.items()}
        self.points[d] += 1
        return (d, j)

    def join(self, a, b):
        self.partner[a] = b
        self.partner[b] = a


def random_connected_tangle(rng: random.Random, max_disks: int = 4, max_points: int = 12,
                            steps: int | None = None) -> Tangle:
    """A random valid tangle whose strands connect all disks.

    Built from a single strand by inserting 2-point disks on strands and
    drawing new strands across faces, then relabelling stars at random.
    """
    while True:
        b = _Builder([2], {(0, 0): (0, 1), (0, 1): (0, 0)})
        nsteps = steps if steps is not None else rng.randint(1, 8)
        for _ in range(nsteps):
            if rng.random() < 0.35 and len(b.points) - 1 < max_disks and sum(b.points) + 2 <= max_points:
                a = rng.choice(sorted(b.partner))
                c = b.partner.pop(a)
                b.partner.pop(c)
                n = len(b.points)
                b.points.append(2)
                b.join(a, (n, 0))
                b.join((n, 1), c)
            elif sum(b.points) + 2 <= max_points:
                t = b.tangle()
                cyc = rng.choice(t.cycles)
                c1, c2 = rng.choice(cyc), rng.choice(cyc)
                if c1 == c2:
                    p = b.insert_point(*c1)
                    q = b.insert_point(c1[0], c1[1] + 1)
                    b.join(p, q)
                else:
                    if c1[0] == c2[0] and c1[1] > c2[1]:
                        c1, c2 = c2, c1
                    q = b.insert_point(*c2)
                    p = b.insert_point(*c1)
                    if p[0] == q[0]:
                        q = (q[0], q[1] + 1)
                    b.join(p, q)
        if any(k % 2 for k in b.points):
            continue
        t = b.tangle()
        stars = [rng.randrange(k) if k else 0 for k in b.points]
        arcs = [((a[0], (a[1] + stars[a[0]]) % b.points[a[0]]), (c[0], (c[1] + stars[c[0]]) % b.points[c[0]]))
                for a, c in t.arcs]
        out = Tangle(b.points, arcs, stars=stars)
        out.require_valid()
        return out


def random_closure(rng: random.Random, k: int) -> Tangle:
    """Output disk with no points around one k-point disk capped off planarly."""
    pts = list(range(k))
    arcs = []

    def match(seq):
        if not seq:
            return
        j = rng.randrange(1, len(seq), 2)
        arcs.append(((1, seq[0]), (1, seq[j])))
        match(seq[1:j])
        match(seq[j + 1 :])

    match(pts)
    base = Tangle([0, k], arcs)
    cyc = rng.choice([c for c in base.cycles if c[0][0] == 1])
    return Tangle([0, k], arcs, regions=[[(0, 0), cyc[0]]])


def random_tangle(rng: random.Random, max_disks: int = 4, max_points: int = 12) -> Tangle:
    """A random valid even tangle; sometimes a composite with loops or nesting."""
    for _ in range(1000):
        roll = rng.random()
        if roll < 0.5:
            return random_connected_tangle(rng, max_disks, max_points)
        U = random_connected_tangle(rng, max_disks, max_points)
        if roll < 0.7:
            W = compose(random_closure(rng, U.k0), 1, U) if U.k0 else U
        else:
            if U.num_inputs == 0:
                continue
            i = rng.randint(1, U.num_inputs)
            V = random_connected_tangle(rng, max_disks, max_points)
            if V.k0 != U.points[i]:
                continue
            W = compose(U, i, V)
        if W.num_inputs <= max_disks and sum(W.points) <= max_points:
            return W
    raise RuntimeError("could not sample a tangle within the bounds")


def iter_all_colorings(t: Tangle) -> Iterable[tuple[bool, ...]]:
    """Every 2-colouring of the regions (brute force, for cross-checks)."""
    n = len(t.regions)
    for mask in range(1 << n):
        yield tuple(bool(mask >> r & 1) for r in range(n))
