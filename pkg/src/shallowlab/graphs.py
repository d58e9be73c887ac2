"""Colored graphs, graph states, and k-round measurement transcripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .pauli import ContradictionError, PauliString, StabilizerTableau, gate

GRAPH_FORMAT = "# shallowlab-graph v1"
TRANSCRIPT_FORMAT = "# shallowlab-transcript v1"


class MalformedTranscript(ValueError):
    """Transcript domains do not match the instance's coloring."""


@dataclass(frozen=True)
class ColoredGraph:
    num_vertices: int
    edges: Tuple[Tuple[int, int], ...]
    coloring: Tuple[int, ...]
    width: int = 0
    height: int = 0

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if len(self.coloring) != self.num_vertices:
            raise ValueError("coloring must cover every vertex")

    @classmethod
    def build(cls, num_vertices: int, edges: Iterable, coloring: Sequence[int], width=0, height=0):
        es = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        return cls(num_vertices, es, tuple(int(c) for c in coloring), width, height)

    def neighbors(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.neighbors()), default=0)

    def color_class(self, c: int) -> List[int]:
        return [v for v, col in enumerate(self.coloring) if col == c]

    def colors(self) -> set:
        return set(self.coloring)


def grid(width: int, height: int, round_of_column=None) -> ColoredGraph:
    """Plain ``width x height`` grid; vertex ``(r, c)`` has index ``r * width + c``.

    ``round_of_column(c)`` picks each column's round (default: everything in round 1).
    """
    edges = []
    for r in range(height):
        for c in range(width):
            v = r * width + c
            if c + 1 < width:
                edges.append((v, v + 1))
            if r + 1 < height:
                edges.append((v, v + width))
    if round_of_column is None:
        coloring = [1] * (width * height)
    else:
        coloring = [round_of_column(v % width) for v in range(width * height)]
    return ColoredGraph.build(width * height, edges, coloring, width, height)


def two_round_grid(width: int, height: int) -> ColoredGraph:
    """Grid whose last column is measured in round 2, the rest in round 1."""
    return grid(width, height, lambda c: 2 if c == width - 1 else 1)


@dataclass(frozen=True)
class GraphProblemInstance:
    graph: ColoredGraph
    k: int

    def __post_init__(self):
        if not self.graph.colors() <= set(range(1, self.k + 1)):
            raise ValueError("coloring uses colors outside 1..k")
        if self.graph.max_degree > 4 and self.graph.width:
            raise ValueError("grid instance exceeds degree bound 4")


@dataclass
class Transcript:
    bases: List[Dict[int, str]] = field(default_factory=list)
    outcomes: List[Dict[int, int]] = field(default_factory=list)

    def add_round(self, bases: Dict[int, str], outcomes: Dict[int, int]) -> None:
        self.bases.append(dict(bases))
        self.outcomes.append(dict(outcomes))

    def __eq__(self, other) -> bool:
        return isinstance(other, Transcript) and self.bases == other.bases and self.outcomes == other.outcomes


def build_graph_state(g: ColoredGraph) -> StabilizerTableau:
    t = StabilizerTableau.plus_state(g.num_vertices)
    for u, v in g.edges:
        t.apply(gate("CZ", u, v))
    return t


def graph_stabilizer(g: ColoredGraph, v: int) -> PauliString:
    x = np.zeros(g.num_vertices, np.uint8)
    z = np.zeros(g.num_vertices, np.uint8)
    x[v] = 1
    for u in g.neighbors()[v]:
        z[u] = 1
    return PauliString(g.num_vertices, x, z, 0)


def _basis_pauli(n: int, v: int, basis: str) -> PauliString:
    if basis not in ("X", "Y"):
        raise MalformedTranscript(f"basis must be X or Y, got {basis!r}")
    return PauliString.single(n, v, basis)


def check_transcript_shape(inst: GraphProblemInstance, t: Transcript) -> None:
    if len(t.bases) != inst.k or len(t.outcomes) != inst.k:
        raise MalformedTranscript(f"expected {inst.k} rounds")
    for i in range(inst.k):
        want = set(inst.graph.color_class(i + 1))
        if set(t.bases[i]) != want or set(t.outcomes[i]) != want:
            raise MalformedTranscript(f"round {i + 1} domain mismatch")
        for v, o in t.outcomes[i].items():
            if o not in (1, -1):
                raise MalformedTranscript(f"outcome for {v} must be +-1")


def verify_transcript(inst: GraphProblemInstance, t: Transcript, order=None) -> bool:
    """Accept iff forcing every recorded outcome on the graph state never hits
    a probability-zero branch. ``order`` optionally permutes vertices within rounds."""
    check_transcript_shape(inst, t)
    tab = build_graph_state(inst.graph)
    n = inst.graph.num_vertices
    for i in range(inst.k):
        vs = sorted(t.bases[i])
        if order is not None:
            vs = order(i, vs)
        for v in vs:
            try:
                tab.measure_pauli(_basis_pauli(n, v, t.bases[i][v]), forced=t.outcomes[i][v])
            except ContradictionError:
                return False
    return True


def honest_transcript(inst: GraphProblemInstance, bases_per_round: Sequence[Dict[int, str]],
                      rng: np.random.Generator) -> Transcript:
    """Measure the graph state honestly in the given bases, round by round."""
    tab = build_graph_state(inst.graph)
    n = inst.graph.num_vertices
    tr = Transcript()
    for bases in bases_per_round:
        outs = {}
        for v in sorted(bases):
            outs[v], _ = tab.measure_pauli(_basis_pauli(n, v, bases[v]), rng=rng)
        tr.add_round(bases, outs)
    return tr


def random_bases(inst: GraphProblemInstance, rng: np.random.Generator) -> List[Dict[int, str]]:
    out = []
    for i in range(inst.k):
        out.append({v: ("X", "Y")[int(rng.integers(2))] for v in inst.graph.color_class(i + 1)})
    return out


# -- text formats -----------------------------------------------------------

def dump_instance(inst: GraphProblemInstance) -> str:
    g = inst.graph
    lines = [GRAPH_FORMAT, f"{inst.k} {g.width} {g.height}", f"V {g.num_vertices}"]
    lines += [f"c {v} {c}" for v, c in enumerate(g.coloring)]
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> GraphProblemInstance:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0] != GRAPH_FORMAT:
        raise ValueError("missing graph format header")
    k, w, h = (int(v) for v in rows[1].split())
    nv = None
    coloring: Dict[int, int] = {}
    edges = []
    for ln in rows[2:]:
        tag, *vals = ln.split()
        if tag == "V":
            nv = int(vals[0])
        elif tag == "c":
            coloring[int(vals[0])] = int(vals[1])
        elif tag == "e":
            edges.append((int(vals[0]), int(vals[1])))
        else:
            raise ValueError(f"unknown line {ln!r}")
    if nv is None or sorted(coloring) != list(range(nv)):
        raise ValueError("vertex count and color lines disagree")
    g = ColoredGraph.build(nv, edges, [coloring[v] for v in range(nv)], w, h)
    return GraphProblemInstance(g, k)


def dump_transcript(t: Transcript) -> str:
    lines = [TRANSCRIPT_FORMAT]
    for i, (bases, outs) in enumerate(zip(t.bases, t.outcomes)):
        lines.append(f"round {i + 1}")
        lines += [f"{v} {bases[v]} {outs[v]:+d}" for v in sorted(bases)]
    return "\n".join(lines) + "\n"


def load_transcript(text: str) -> Transcript:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0] != TRANSCRIPT_FORMAT:
        raise ValueError("missing transcript format header")
    t = Transcript()
    for ln in rows[1:]:
        if ln.startswith("round"):
            t.add_round({}, {})
            continue
        v, b, o = ln.split()
        t.bases[-1][int(v)] = b
        t.outcomes[-1][int(v)] = int(o)
    return t
