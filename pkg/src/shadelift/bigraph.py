"""Principal-graph codes such as ``bwd1v1v1p1p1v1x0x0p0x1x0duals1v1v2x1``.

Grammar::

    code   := "bwd" level ("v" level)* "duals" dlevel ("v" dlevel)*
    level  := vertex ("p" vertex)*        one level per depth 1, 2, ...
    vertex := int ("x" int)*              edge multiplicities to the previous level
    dlevel := int ("x" int)*              1-based dual images at depth 0, 2, 4, ...

Depth 0 is the single root vertex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = ["Bigraph", "BigraphParseError", "bigraph_parse", "bigraph_fp_norm"]


class BigraphParseError(ValueError):
    def __init__(self, pos: int, message: str):
        self.pos = pos
        super().__init__(f"position {pos}: {message}")


_INT = re.compile(r"\d+")


@dataclass(frozen=True)
class Bigraph:
    levels: tuple  # vertex count per depth, starting with depth 0
    adjacency: tuple  # adjacency[k][i][j]: edges from vertex i at depth k+1 to vertex j at depth k
    duals: tuple  # duals[m][i]: 0-based dual of vertex i at depth 2m

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def num_vertices(self) -> int:
        return sum(self.levels)

    def serialize(self) -> str:
        lv = ["p".join("x".join(str(m) for m in row) for row in mat) for mat in self.adjacency]
        du = ["x".join(str(j + 1) for j in block) for block in self.duals]
        return "bwd" + "v".join(lv) + "duals" + "v".join(du)

    __str__ = serialize

    def matrix(self) -> np.ndarray:
        """Symmetric adjacency matrix of the underlying graph."""
        offsets = np.cumsum((0,) + self.levels)
        n = int(offsets[-1])
        M = np.zeros((n, n))
        for k, mat in enumerate(self.adjacency):
            for i, row in enumerate(mat):
                for j, m in enumerate(row):
                    a, b = offsets[k + 1] + i, offsets[k] + j
                    M[a, b] = M[b, a] = m
        return M

    def is_connected(self) -> bool:
        M = self.matrix()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in np.nonzero(M[v])[0]:
                if int(w) not in seen:
                    seen.add(int(w))
                    stack.append(int(w))
        return len(seen) == M.shape[0]

    def to_dot(self, name: str = "bigraph") -> str:
        lines = [f"graph {name} {{", "  rankdir=LR;"]
        for k, size in enumerate(self.levels):
            names = " ".join(f'"{k}.{i}"' for i in range(size))
            lines.append(f"  {{ rank=same; {names} }}")
        for k, mat in enumerate(self.adjacency):
            for i, row in enumerate(mat):
                for j, m in enumerate(row):
                    for _ in range(m):
                        lines.append(f'  "{k}.{j}" -- "{k + 1}.{i}";')
        for m, block in enumerate(self.duals):
            for i, j in enumerate(block):
                if i < j:
                    lines.append(f'  "{2 * m}.{i}" -- "{2 * m}.{j}" [style=dashed, constraint=false];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _ints(text: str, start: int, sep: str) -> list[int]:
    out = []
    pos = start
    for k, tok in enumerate(text.split(sep)):
        if not _INT.fullmatch(tok):
            raise BigraphParseError(pos, f"expected an integer, got {tok!r}")
        out.append(int(tok))
        pos += len(tok) + 1
    return out


def bigraph_parse(code: str) -> Bigraph:
    if not code.startswith("bwd"):
        raise BigraphParseError(0, "code must start with 'bwd'")
    body = code[3:]
    cut = body.find("duals")
    if cut < 0:
        raise BigraphParseError(len(code), "missing 'duals' section")
    graph_part, dual_part = body[:cut], body[cut + 5 :]
    pos = 3
    levels = [1]
    adjacency = []
    for lvl in graph_part.split("v"):
        if not lvl:
            raise BigraphParseError(pos, "empty level")
        rows = []
        vpos = pos
        for vert in lvl.split("p"):
            row = _ints(vert, vpos, "x")
            if len(row) != levels[-1]:
                raise BigraphParseError(
                    vpos, f"vertex lists {len(row)} multiplicities but the previous level has {levels[-1]} vertices"
                )
            rows.append(tuple(row))
            vpos += len(vert) + 1
        adjacency.append(tuple(rows))
        levels.append(len(rows))
        pos += len(lvl) + 1
    pos = 3 + cut + 5
    duals = []
    for m, blk in enumerate(dual_part.split("v")):
        depth = 2 * m
        if depth >= len(levels):
            raise BigraphParseError(pos, f"dual data for depth {depth}, but the graph has depth {len(levels) - 1}")
        images = _ints(blk, pos, "x")
        size = levels[depth]
        if len(images) != size or sorted(images) != list(range(1, size + 1)):
            raise BigraphParseError(pos, f"duals at depth {depth} must permute 1..{size}")
        perm = tuple(j - 1 for j in images)
        if any(perm[perm[i]] != i for i in range(size)):
            raise BigraphParseError(pos, f"duals at depth {depth} are not an involution")
        duals.append(perm)
        pos += len(blk) + 1
    expected = (len(levels) - 1) // 2 + 1
    if len(duals) != expected:
        raise BigraphParseError(len(code), f"expected {expected} dual blocks, got {len(duals)}")
    return Bigraph(tuple(levels), tuple(adjacency), tuple(duals))


def bigraph_fp_norm(g: Bigraph, tol: float = 1e-12, max_iter: int = 100000) -> tuple[float, float]:
    """Perron-Frobenius eigenvalue of the graph and its square (the index).

    Power iteration on ``M + I`` sidesteps the +-lambda tie of bipartite graphs.
    """
    if not g.is_connected():
        raise ValueError("graph is not connected")
    M = g.matrix() + np.eye(g.num_vertices)
    v = np.ones(g.num_vertices)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = M @ v
        new = float(np.linalg.norm(w))
        w /= new
        if abs(new - lam) < tol and np.linalg.norm(w - v) < 1e-9:
            lam = new
            break
        v, lam = w, new
    norm = lam - 1.0
    return norm, norm * norm
