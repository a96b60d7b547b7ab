"""Directed labeled graphs for the quantization series.

A graph has n "aerial" vertices 1..n (each carrying a polyvector) and m
ordered "ground" vertices (the function slots), stored internally as
n+1..n+m and rendered as b1..bm.  Every edge starts at an aerial vertex,
short loops are forbidden, and the edges leaving vertex k are labeled
1..#Star(k).  Text form:  K(n,m)[1>2#1, 1>b1#2, 2>1#1, 2>b2#2]
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Edge:
    src: int
    dst: int
    label: int


def _sorted_edges(edges):
    return tuple(sorted(edges, key=lambda e: (e.src, e.label)))


class AdmissibleGraph:
    """Upper-half-plane graph with ordered boundary slots.

    Raises ValueError if the structural conditions fail:
    sources aerial, no short loops, per-vertex labels consecutive from 1,
    and 2n + 2 - m >= 0.
    """

    def __init__(self, n: int, m: int, edges):
        self.n = n
        self.m = m
        self.edges = _sorted_edges(Edge(*e) if not isinstance(e, Edge) else e
                                   for e in edges)
        self._validate()

    def _validate(self):
        n, m = self.n, self.m
        if n < 0 or m < 0:
            raise ValueError("negative vertex counts")
        if 2 * n + 2 - m < 0:
            raise ValueError(f"2n+2-m = {2*n+2-m} < 0")
        per_src = {}
        for e in self.edges:
            if not (1 <= e.src <= n):
                raise ValueError(f"edge source {e.src} is not aerial")
            if not (1 <= e.dst <= n + m):
                raise ValueError(f"edge target {e.dst} out of range")
            if e.dst == e.src:
                raise ValueError(f"short loop at vertex {e.src}")
            per_src.setdefault(e.src, []).append(e.label)
        for v, labels in per_src.items():
            if sorted(labels) != list(range(1, len(labels) + 1)):
                raise ValueError(f"labels at vertex {v} not 1..{len(labels)}")

    # -- queries ------------------------------------------------------

    def is_ground(self, v: int) -> bool:
        return v > self.n

    def star(self, v: int):
        """Edges leaving v, in label order."""
        return [e for e in self.edges if e.src == v]

    def out_degree(self, v: int) -> int:
        return sum(1 for e in self.edges if e.src == v)

    def in_degree(self, v: int) -> int:
        return sum(1 for e in self.edges if e.dst == v)

    def valence(self, v: int) -> int:
        return self.out_degree(v) + self.in_degree(v)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def dim_config(self) -> int:
        """Dimension of the quotient configuration space, 2n + m - 2."""
        return 2 * self.n + self.m - 2

    def unhit_ground(self):
        return [j for j in range(self.n + 1, self.n + self.m + 1)
                if self.in_degree(j) == 0]

    def __eq__(self, other):
        return (isinstance(other, AdmissibleGraph)
                and (self.n, self.m, self.edges) ==
                    (other.n, other.m, other.edges))

    def __hash__(self):
        return hash((self.n, self.m, self.edges))

    # -- serialization ------------------------------------------------

    def _dst_name(self, d: int) -> str:
        return f"b{d - self.n}" if d > self.n else str(d)

    def to_text(self) -> str:
        inner = ", ".join(f"{e.src}>{self._dst_name(e.dst)}#{e.label}"
                          for e in self.edges)
        return f"K({self.n},{self.m})[{inner}]"

    @classmethod
    def from_text(cls, s: str) -> "AdmissibleGraph":
        mat = re.fullmatch(r"\s*([KS])\((\d+),(\d+)\)\[(.*)\]\s*", s)
        if not mat:
            raise ValueError(f"cannot parse graph text {s!r}")
        kind, n, m, body = mat.group(1), int(mat.group(2)), int(mat.group(3)), mat.group(4)
        if kind != "K":
            raise ValueError("expected K(...) form")
        edges = _parse_edges(body, n)
        return cls(n, m, edges)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n, "m": self.m,
            "edges": [{"src": e.src, "dst": self._dst_name(e.dst),
                       "label": e.label} for e in self.edges],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "AdmissibleGraph":
        d = json.loads(s)
        n = d["n"]
        edges = [Edge(e["src"], _dst_from_name(e["dst"], n), e["label"])
                 for e in d["edges"]]
        return cls(n, d["m"], edges)

    def __repr__(self):
        return self.to_text()

    # -- canonical form -----------------------------------------------

    def relabel_aerial(self, perm) -> "AdmissibleGraph":
        """Apply permutation perm (dict old->new) to aerial vertices."""
        def mv(v):
            return perm[v] if v <= self.n else v
        return AdmissibleGraph(self.n, self.m,
                               [Edge(mv(e.src), mv(e.dst), e.label)
                                for e in self.edges])

    def canonical_form(self):
        """Minimal representative under aerial renaming and per-star edge
        relabeling.

        Both symmetries leave the weight integrand invariant up to the sign
        of the permutation they induce on the ordered edge list (the wedge
        of edge one-forms reorders).  Returns (graph, parity,
        parity_consistent): parity is that sign for the minimizing
        symmetry; if two minimizing symmetries induce opposite signs (an
        odd automorphism) parity_consistent is False and the weight
        vanishes identically.
        """
        best = None
        best_sig = None
        parities = set()
        base = list(self.edges)
        stars = {v: [i for i, e in enumerate(base) if e.src == v]
                 for v in range(1, self.n + 1)}
        label_pools = [list(itertools.permutations(range(len(stars[v]))))
                       for v in range(1, self.n + 1)]
        for p in itertools.permutations(range(1, self.n + 1)):
            perm = {i + 1: p[i] for i in range(self.n)}
            for combo in itertools.product(*label_pools):
                new_edges = []
                origin = {}
                for v in range(1, self.n + 1):
                    lp = combo[v - 1]
                    for pos, i in enumerate(stars[v]):
                        e = base[i]
                        dst = perm[e.dst] if e.dst <= self.n else e.dst
                        ne = Edge(perm[v], dst, lp[pos] + 1)
                        origin[(ne.src, ne.label)] = i
                        new_edges.append(ne)
                g2 = AdmissibleGraph(self.n, self.m, new_edges)
                sig = g2.to_text()
                if best_sig is not None and sig > best_sig:
                    continue
                order = [origin[(e.src, e.label)] for e in g2.edges]
                par = _perm_sign(order)
                if best_sig is None or sig < best_sig:
                    best, best_sig, parities = g2, sig, {par}
                else:
                    parities.add(par)
        return best, (1 if 1 in parities else -1), len(parities) == 1

    def canonical_key(self) -> str:
        g, _, _ = self.canonical_form()
        return g.to_text()


def _perm_sign(order):
    seen = [False] * len(order)
    sign = 1
    for i in range(len(order)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _parse_edges(body: str, n: int):
    edges = []
    body = body.strip()
    if not body:
        return edges
    for part in body.split(","):
        mat = re.fullmatch(r"\s*(\d+)>(b?\d+)#(\d+)\s*", part)
        if not mat:
            raise ValueError(f"cannot parse edge {part!r}")
        edges.append(Edge(int(mat.group(1)),
                          _dst_from_name(mat.group(2), n),
                          int(mat.group(3))))
    return edges


def _dst_from_name(name, n: int) -> int:
    if isinstance(name, int):
        return name
    if name.startswith("b"):
        return n + int(name[1:])
    return int(name)


# -- enumeration ------------------------------------------------------

def enumerate_graphs(n: int, m: int, out_degree: int,
                     allow_parallel: bool = False):
    """All labeled graphs with the given uniform aerial out-degree.

    The edge leaving vertex k with label j points at the j-th entry of the
    chosen target tuple.  With n = 0 the list is empty.
    """
    if n == 0:
        return []
    out = []
    per_vertex = []
    for v in range(1, n + 1):
        targets = [t for t in range(1, n + m + 1) if t != v]
        if allow_parallel:
            choices = list(itertools.product(targets, repeat=out_degree))
        else:
            choices = list(itertools.permutations(targets, out_degree))
        per_vertex.append(choices)
    for combo in itertools.product(*per_vertex):
        edges = [Edge(v + 1, dst, j + 1)
                 for v, tup in enumerate(combo)
                 for j, dst in enumerate(tup)]
        out.append(AdmissibleGraph(n, m, edges))
    return out


# -- named graphs -----------------------------------------------------

def fan_graph(m: int) -> AdmissibleGraph:
    """One aerial vertex pointing at all m ground slots in order."""
    return AdmissibleGraph(1, m, [Edge(1, 1 + j, j) for j in range(1, m + 1)])


def cycle_graph(n: int) -> AdmissibleGraph:
    """Aerial n-cycle 1 -> 2 -> ... -> n -> 1 with no ground vertices."""
    return AdmissibleGraph(n, 0, [Edge(k, k % n + 1, 1)
                                  for k in range(1, n + 1)])


def wheel_graph(n: int) -> AdmissibleGraph:
    """n-wheel: rim cycle 1..n plus hub n+1 with spokes to every rim vertex."""
    edges = [Edge(k, k % n + 1, 1) for k in range(1, n + 1)]
    edges += [Edge(n + 1, k, k) for k in range(1, n + 1)]
    return AdmissibleGraph(n + 1, 0, edges)


def graph1_left() -> AdmissibleGraph:
    """(2,2): both aerial vertices point at both ground slots."""
    return AdmissibleGraph(2, 2, [Edge(1, 3, 1), Edge(1, 4, 2),
                                  Edge(2, 3, 1), Edge(2, 4, 2)])


def graph1_right() -> AdmissibleGraph:
    """(2,2): vertex 2 points at vertex 1 and the second ground slot."""
    return AdmissibleGraph(2, 2, [Edge(1, 3, 1), Edge(1, 4, 2),
                                  Edge(2, 1, 1), Edge(2, 4, 2)])


def graph2() -> AdmissibleGraph:
    """(2,2): the mutual two-cycle, each aerial vertex also hits one slot.

    Labels put each vertex's ground edge within the star so that the wedge
    order is (1->b1, 1->2, 2->1, 2->b2); in the package orientation this
    labeling carries the positive weight +1/24 at the midpoint parameter.
    """
    return AdmissibleGraph(2, 2, [Edge(1, 2, 2), Edge(1, 3, 1),
                                  Edge(2, 1, 1), Edge(2, 4, 2)])


class ShoikhetGraph:
    """Disk-model graph: aerial vertices 1..n, boundary slots b1..bm on the
    unit circle with b1 pinned at 1, and a marked center.  Structural rules
    match AdmissibleGraph; the quotient dimension is 2n + m - 1."""

    def __init__(self, n: int, m: int, edges):
        self._g = AdmissibleGraph(n, m, edges)
        self.n, self.m, self.edges = n, m, self._g.edges

    def dim_config(self) -> int:
        return 2 * self.n + self.m - 1

    def to_text(self) -> str:
        return "S" + self._g.to_text()[1:]

    @classmethod
    def from_text(cls, s: str) -> "ShoikhetGraph":
        mat = re.fullmatch(r"\s*S\((\d+),(\d+)\)\[(.*)\]\s*", s)
        if not mat:
            raise ValueError(f"cannot parse disk graph text {s!r}")
        n, m = int(mat.group(1)), int(mat.group(2))
        return cls(n, m, _parse_edges(mat.group(3), n))

    def __eq__(self, other):
        return (isinstance(other, ShoikhetGraph)
                and (self.n, self.m, self.edges) ==
                    (other.n, other.m, other.edges))

    def __repr__(self):
        return self.to_text()
