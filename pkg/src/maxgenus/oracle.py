"""Brute-force enumeration of every rotation system of a small graph.

This is the ground truth the constructive generator is checked against.  It
counts faces with its own integer dart arrays rather than going through
:func:`maxgenus.embedding.trace_faces`, so the two routes stay independent.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .embedding import Embedding, Graph, Vertex

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int, what: str = "rotation systems"):
        super().__init__(f"refusing to enumerate {count} {what} (budget {budget})")
        self.count = count
        self.budget = budget


def rotation_count(g: Graph) -> int:
    return math.prod(math.factorial(max(g.degree(v) - 1, 0)) for v in g.vertices)


def vertex_rotations(neighbours: Sequence[Vertex]) -> list[tuple[Vertex, ...]]:
    """All cyclic orders of ``neighbours`` in canonical phase, lexicographic."""
    ns = sorted(neighbours)
    if not ns:
        return [()]
    return [(ns[0],) + perm for perm in itertools.permutations(ns[1:])]


def designated_vertex(g: Graph) -> Vertex:
    """Vertex whose rotation partitions the enumeration (first of maximum degree)."""
    return max(g.vertices, key=lambda v: (g.degree(v), -g.vertices.index(v)))


def partitions(g: Graph) -> list[tuple[Vertex, ...]]:
    return vertex_rotations(g.adjacency[designated_vertex(g)])


def _check_budget(g: Graph, budget: int) -> int:
    total = rotation_count(g)
    if total > budget:
        raise BudgetExceeded(total, budget)
    return total


def _choices(g: Graph, fixed_rotation):
    choices = [vertex_rotations(g.adjacency[v]) for v in g.vertices]
    if fixed_rotation is not None:
        d = g.vertices.index(designated_vertex(g))
        fixed = tuple(fixed_rotation)
        if fixed not in choices[d]:
            raise ValueError(f"{fixed} is not a canonical rotation of {g.vertices[d]}")
        choices[d] = [fixed]
    return choices


def enumerate_embeddings(g: Graph, budget: int = DEFAULT_BUDGET,
                         fixed_rotation: Sequence[Vertex] | None = None) -> Iterator[Embedding]:
    """Yield every rotation system of ``g`` once, lexicographic in canonical rotations.

    ``fixed_rotation`` pins the rotation of :func:`designated_vertex`, selecting
    one partition of the stream.
    """
    _check_budget(g, budget)
    for rots in itertools.product(*_choices(g, fixed_rotation)):
        yield Embedding(g, rots)


# --- fast face counting ----------------------------------------------------

class _DartTables:
    def __init__(self, g: Graph, choices):
        # dart 2i is x->y along edge i, 2i+1 is y->x
        edges = sorted(g.edges)
        index = {}
        for i, (a, b) in enumerate(edges):
            index[(a, b)] = 2 * i
            index[(b, a)] = 2 * i + 1
        self.n = 2 * len(edges)
        self.options = []
        for v, rots in zip(g.vertices, choices):
            opts = []
            for rot in rots:
                k = len(rot)
                opts.append(tuple((index[(v, rot[j])], index[(v, rot[(j + 1) % k])])
                                  for j in range(k)))
            self.options.append(opts)


def _face_counts(g: Graph, choices) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(choice indices, face count)`` for every system in ``choices``."""
    tables = _DartTables(g, choices)
    n = tables.n
    sigma = [0] * n
    options = tables.options
    head, last = options[:-1], options[-1]
    ranges = [range(len(o)) for o in head]
    for idx in itertools.product(*ranges):
        for opts, i in zip(head, idx):
            for d, nxt in opts[i]:
                sigma[d] = nxt
        for j, pairs in enumerate(last):
            for d, nxt in pairs:
                sigma[d] = nxt
            seen = bytearray(n)
            faces = 0
            for s in range(n):
                if seen[s]:
                    continue
                faces += 1
                d = s
                while not seen[d]:
                    seen[d] = 1
                    d = sigma[d ^ 1]
            yield idx + (j,), faces


@dataclass(frozen=True)
class CensusReport:
    graph: str
    p: int
    q: int
    n_vertices: int
    n_edges: int
    total_systems: int
    by_face_count: dict
    elapsed: float = field(default=0.0, compare=False)

    @property
    def one_face(self) -> int:
        return self.by_face_count.get(1, 0)

    @property
    def min_faces(self) -> int:
        return min(self.by_face_count)

    @property
    def max_genus(self) -> int:
        return (2 - (self.n_vertices - self.n_edges + self.min_faces)) // 2

    @property
    def max_genus_count(self) -> int:
        return self.by_face_count[self.min_faces]

    def merge(self, other: "CensusReport") -> "CensusReport":
        if (self.p, self.q, self.n_edges) != (other.p, other.q, other.n_edges):
            raise ValueError("cannot merge censuses of different graphs")
        counts = dict(self.by_face_count)
        for k, c in other.by_face_count.items():
            counts[k] = counts.get(k, 0) + c
        return CensusReport(self.graph, self.p, self.q, self.n_vertices, self.n_edges,
                            self.total_systems + other.total_systems,
                            dict(sorted(counts.items())), self.elapsed + other.elapsed)

    def records(self) -> str:
        return "".join(f"faces={k} count={c}\n" for k, c in self.by_face_count.items())

    def table(self) -> str:
        rows = [("faces", "genus", "count")]
        for k, c in self.by_face_count.items():
            genus = (2 - (self.n_vertices - self.n_edges + k)) // 2
            rows.append((str(k), str(genus), str(c)))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [f"census of {self.graph}"]
        lines += ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
        lines.append(f"total systems: {self.total_systems}")
        lines.append(f"one-face systems: {self.one_face}")
        lines.append(f"maximum genus {self.max_genus}: {self.max_genus_count} systems")
        return "\n".join(lines) + "\n"


def _partial_census(g: Graph, fixed_rotation) -> CensusReport:
    t0 = time.perf_counter()
    counts: dict[int, int] = {}
    total = 0
    for _, faces in _face_counts(g, _choices(g, fixed_rotation)):
        counts[faces] = counts.get(faces, 0) + 1
        total += 1
    return CensusReport(str(g), g.p, g.q, g.n_vertices, g.n_edges, total,
                        dict(sorted(counts.items())), time.perf_counter() - t0)


def face_census(g: Graph, budget: int = DEFAULT_BUDGET, jobs: int = 1,
                parts: Sequence[int] | None = None) -> CensusReport:
    """Census of face counts over every rotation system of ``g``.

    The enumeration is split by the rotation of the designated vertex; ``parts``
    restricts to some of those partitions and ``jobs`` runs them in worker
    processes.  The merged report does not depend on either.
    """
    _check_budget(g, budget)
    if not g.is_connected:
        raise ValueError(f"{g} is disconnected")
    fixed = partitions(g)
    if parts is not None:
        fixed = [fixed[i] for i in parts]
    t0 = time.perf_counter()
    if jobs > 1 and len(fixed) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(fixed) // (4 * jobs))
            partials = list(pool.map(_partial_census, [g] * len(fixed), fixed, chunksize=chunk))
    else:
        partials = [_partial_census(g, f) for f in fixed]
    report = partials[0]
    for part in partials[1:]:
        report = report.merge(part)
    return CensusReport(report.graph, report.p, report.q, report.n_vertices, report.n_edges,
                        report.total_systems, report.by_face_count, time.perf_counter() - t0)


def count_max_genus(g: Graph, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> int:
    return face_census(g, budget, jobs).max_genus_count


def embeddings_with_faces(g: Graph, faces: int = 1,
                          budget: int = DEFAULT_BUDGET) -> Iterator[Embedding]:
    """Yield the rotation systems of ``g`` that have exactly ``faces`` faces."""
    _check_budget(g, budget)
    choices = _choices(g, None)
    for idx, k in _face_counts(g, choices):
        if k == faces:
            yield Embedding(g, tuple(c[i] for c, i in zip(choices, idx)))
