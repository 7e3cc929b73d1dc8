"""Labeled bipartite graphs and their orientable embeddings as rotation systems.

An embedding assigns every vertex a cyclic order of its neighbours (the graph
is simple, so a dart ``u -> v`` is identified by its endpoints).  Rotations are
stored in canonical phase: each cycle starts at the smallest neighbour.

Faces are traced with the convention that the successor of the dart
``u -> v`` is the rotation-successor at ``v`` of the reverse dart ``v -> u``.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence


class EmbeddingError(ValueError):
    """Raised for malformed graphs, rotations and embedding text."""


class ParseError(EmbeddingError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Vertex(NamedTuple):
    side: str
    index: int

    def __str__(self) -> str:
        return f"{self.side}{self.index}"

    @classmethod
    def parse(cls, token: str) -> "Vertex":
        if len(token) < 2 or token[0] not in "xy" or not token[1:].isdigit():
            raise EmbeddingError(f"bad vertex label {token!r}")
        index = int(token[1:])
        if index < 1:
            raise EmbeddingError(f"bad vertex label {token!r}")
        return cls(token[0], index)


def x(i: int) -> Vertex:
    return Vertex("x", i)


def y(i: int) -> Vertex:
    return Vertex("y", i)


class Dart(NamedTuple):
    tail: Vertex
    head: Vertex

    def reverse(self) -> "Dart":
        return Dart(self.head, self.tail)

    def __str__(self) -> str:
        return f"{self.tail}->{self.head}"


@dataclass(frozen=True)
class Graph:
    """Bipartite graph on ``x1..xp`` and ``y1..yq``.

    ``edges`` holds ``(x_vertex, y_vertex)`` pairs.
    """

    p: int
    q: int
    edges: frozenset

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise EmbeddingError("part sizes must be non-negative")
        for edge in self.edges:
            if len(edge) != 2:
                raise EmbeddingError(f"bad edge {edge!r}")
            a, b = edge
            if a.side != "x" or b.side != "y":
                raise EmbeddingError(f"edge {a}{b} does not join the x side to the y side")
            if not (1 <= a.index <= self.p and 1 <= b.index <= self.q):
                raise EmbeddingError(f"edge {a}{b} uses a vertex outside the parts")

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(x(i) for i in range(1, self.p + 1)) + tuple(
            y(j) for j in range(1, self.q + 1)
        )

    @cached_property
    def adjacency(self) -> dict[Vertex, tuple[Vertex, ...]]:
        adj: dict[Vertex, list[Vertex]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def degree(self, v: Vertex) -> int:
        return len(self.adjacency[v])

    def has_vertex(self, v: Vertex) -> bool:
        return v in self.adjacency

    @property
    def n_vertices(self) -> int:
        return self.p + self.q

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def darts(self) -> list[Dart]:
        return [Dart(v, u) for v in self.vertices for u in self.adjacency[v]]

    @cached_property
    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        start = self.vertices[0]
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in self.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == len(self.vertices)

    def __str__(self) -> str:
        return f"bipartite({self.p},{self.q}; {self.n_edges} edges)"


def build_complete_bipartite(p: int, q: int) -> Graph:
    if p < 1 or q < 1:
        raise EmbeddingError(f"K_{{p,q}} needs p, q >= 1, got ({p}, {q})")
    return Graph(p, q, frozenset((x(i), y(j)) for i in range(1, p + 1) for j in range(1, q + 1)))


def _require_connected(g: Graph) -> None:
    if not g.is_connected:
        raise EmbeddingError(f"{g} is disconnected")


def betti(g: Graph) -> int:
    """Cycle rank m - n + 1 of a connected graph."""
    _require_connected(g)
    return g.n_edges - g.n_vertices + 1


def max_genus_upper_bound(g: Graph) -> int:
    return betti(g) // 2


def canonical_cycle(seq: Sequence[Vertex]) -> tuple[Vertex, ...]:
    """Rotate ``seq`` so it starts at its smallest element."""
    if not seq:
        return ()
    i = min(range(len(seq)), key=seq.__getitem__)
    return tuple(seq[i:]) + tuple(seq[:i])


@dataclass(frozen=True)
class Embedding:
    """A graph together with a rotation at every vertex.

    ``rotations`` is aligned with ``graph.vertices``.  Build instances with
    :meth:`from_rotations`, which validates and canonicalizes.
    """

    graph: Graph
    rotations: tuple[tuple[Vertex, ...], ...]

    @classmethod
    def from_rotations(cls, rotation: Mapping[Vertex, Sequence[Vertex]],
                       p: int | None = None, q: int | None = None) -> "Embedding":
        """Build an embedding from a vertex -> cyclic neighbour order mapping.

        The graph is read off the rotations; part sizes default to the largest
        index seen on each side.
        """
        if p is None:
            p = max((v.index for v in rotation if v.side == "x"), default=0)
        if q is None:
            q = max((v.index for v in rotation if v.side == "y"), default=0)
        edges = set()
        for v, nbrs in rotation.items():
            if len(set(nbrs)) != len(nbrs):
                raise EmbeddingError(f"rotation at {v} repeats a neighbour")
            for u in nbrs:
                if u.side == v.side:
                    raise EmbeddingError(f"rotation at {v} lists same-side vertex {u}")
                edges.add((v, u) if v.side == "x" else (u, v))
        g = Graph(p, q, frozenset(edges))
        return cls.on_graph(g, rotation)

    @classmethod
    def on_graph(cls, g: Graph, rotation: Mapping[Vertex, Sequence[Vertex]]) -> "Embedding":
        extra = set(rotation) - set(g.vertices)
        if extra:
            raise EmbeddingError(f"rotation names unknown vertices {sorted(map(str, extra))}")
        rots = []
        for v in g.vertices:
            seq = tuple(rotation.get(v, ()))
            if sorted(seq) != list(g.adjacency[v]):
                raise EmbeddingError(
                    f"rotation at {v} is {' '.join(map(str, seq))!r}, expected a cyclic order of "
                    f"{' '.join(map(str, g.adjacency[v]))!r}"
                )
            rots.append(canonical_cycle(seq))
        return cls(g, tuple(rots))

    @cached_property
    def _index(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.graph.vertices)}

    def rotation(self, v: Vertex) -> tuple[Vertex, ...]:
        try:
            return self.rotations[self._index[v]]
        except KeyError:
            raise EmbeddingError(f"unknown vertex {v}") from None

    def rotation_map(self) -> dict[Vertex, tuple[Vertex, ...]]:
        return dict(zip(self.graph.vertices, self.rotations))

    @cached_property
    def _successor(self) -> dict[Dart, Dart]:
        # face permutation: (u -> v)  |->  (v -> rot_v[pos(u) + 1])
        succ = {}
        for v, rot in zip(self.graph.vertices, self.rotations):
            d = len(rot)
            for i, u in enumerate(rot):
                succ[Dart(u, v)] = Dart(v, rot[(i + 1) % d])
        return succ

    def face_successor(self, d: Dart) -> Dart:
        return self._successor[d]

    @cached_property
    def faces(self) -> "FaceCensus":
        return trace_faces(self)

    @property
    def face_count(self) -> int:
        return self.faces.face_count

    @property
    def genus(self) -> int:
        return self.faces.genus

    def key(self) -> str:
        return serialize(self)

    def __str__(self) -> str:
        return serialize(self)


@dataclass(frozen=True)
class FaceCensus:
    walks: tuple[tuple[Dart, ...], ...]
    n_vertices: int
    n_edges: int

    @property
    def face_count(self) -> int:
        return len(self.walks)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.face_count

    @property
    def genus(self) -> int:
        chi = self.euler_characteristic
        if chi % 2 or chi > 2:
            raise EmbeddingError(f"Euler characteristic {chi} is not that of an orientable surface")
        return (2 - chi) // 2

    def corners(self) -> list[tuple[Vertex, Dart, Dart]]:
        """Face corners as ``(vertex, incoming dart, outgoing dart)`` triples."""
        out = []
        for walk in self.walks:
            for i, d in enumerate(walk):
                nxt = walk[(i + 1) % len(walk)]
                out.append((d.head, d, nxt))
        return out

    def corner_counts(self) -> Counter:
        return Counter(v for v, _, _ in self.corners())


def trace_faces(e: Embedding) -> FaceCensus:
    g = e.graph
    _require_connected(g)
    succ = e._successor
    seen: set[Dart] = set()
    walks = []
    for start in g.darts():
        if start in seen:
            continue
        walk = []
        d = start
        while d not in seen:
            seen.add(d)
            walk.append(d)
            d = succ[d]
        walks.append(tuple(walk))
    return FaceCensus(tuple(walks), g.n_vertices, g.n_edges)


def is_one_face(e: Embedding) -> bool:
    return e.face_count == 1


def is_upper_embeddable_witness(e: Embedding) -> bool:
    """True when the embedding has at most two faces."""
    return e.face_count <= 2


def mirror(e: Embedding) -> Embedding:
    rots = tuple(canonical_cycle(rot[::-1]) for rot in e.rotations)
    return Embedding(e.graph, rots)


# --- text format -----------------------------------------------------------

def serialize(e: Embedding) -> str:
    lines = [f"graph bipartite {e.graph.p} {e.graph.q}"]
    for v, rot in zip(e.graph.vertices, e.rotations):
        body = " ".join(map(str, rot))
        lines.append(f"rot {v}: {body}" if body else f"rot {v}:")
    return "\n".join(lines) + "\n"


def _parse_block(lines: list[tuple[int, str]]) -> Embedding:
    header_no, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[:2] != ["graph", "bipartite"]:
        raise ParseError(header_no, f"expected 'graph bipartite <p> <q>', got {header!r}")
    try:
        p, q = int(parts[2]), int(parts[3])
    except ValueError:
        raise ParseError(header_no, "part sizes must be integers") from None
    if p < 0 or q < 0:
        raise ParseError(header_no, "part sizes must be non-negative")

    rotation: dict[Vertex, tuple[Vertex, ...]] = {}
    where: dict[Vertex, int] = {}
    for lineno, line in lines[1:]:
        head, sep, body = line.partition(":")
        tokens = head.split()
        if not sep or len(tokens) != 2 or tokens[0] != "rot":
            raise ParseError(lineno, f"expected 'rot <vertex>: <neighbours>', got {line!r}")
        try:
            v = Vertex.parse(tokens[1])
            nbrs = tuple(Vertex.parse(t) for t in body.split())
        except EmbeddingError as exc:
            raise ParseError(lineno, str(exc)) from None
        for w in (v, *nbrs):
            limit = p if w.side == "x" else q
            if w.index > limit:
                raise ParseError(lineno, f"unknown vertex {w} (graph has p={p}, q={q})")
        if v in rotation:
            raise ParseError(lineno, f"second rotation for {v} (first on line {where[v]})")
        if len(set(nbrs)) != len(nbrs):
            dup = next(u for u in nbrs if nbrs.count(u) > 1)
            raise ParseError(lineno, f"rotation at {v} lists {dup} twice")
        for u in nbrs:
            if u.side == v.side:
                raise ParseError(lineno, f"rotation at {v} lists same-side vertex {u}")
        rotation[v] = nbrs
        where[v] = lineno

    # every listed dart must have its reverse
    for v, nbrs in rotation.items():
        for u in nbrs:
            if v not in rotation.get(u, ()):
                degree = sum(1 for w, ns in rotation.items() if v in ns)
                raise ParseError(
                    where[v],
                    f"rotation at {v} has length {len(nbrs)} but {v} has degree {degree} "
                    f"({u} does not list {v})",
                )
    g = Graph(p, q, frozenset((v, u) for v, ns in rotation.items() if v.side == "x" for u in ns))
    missing = [v for v in g.vertices if v not in rotation]
    if missing:
        raise ParseError(header_no, f"no rotation given for {', '.join(map(str, missing))}")
    return Embedding.on_graph(g, rotation)


def _blocks(text: str) -> Iterator[list[tuple[int, str]]]:
    block: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("graph"):
            if block:
                yield block
            block = [(lineno, line)]
        elif not block:
            raise ParseError(lineno, "rotation line before any 'graph' header")
        else:
            block.append((lineno, line))
    if block:
        yield block


def parse(text: str) -> Embedding:
    blocks = list(_blocks(text))
    if len(blocks) != 1:
        raise EmbeddingError(f"expected exactly one embedding, found {len(blocks)}")
    return _parse_block(blocks[0])


def parse_many(text: str) -> list[Embedding]:
    return [_parse_block(b) for b in _blocks(text)]


def serialize_many(embeddings: Iterable[Embedding]) -> str:
    return "\n".join(serialize(e) for e in embeddings)
