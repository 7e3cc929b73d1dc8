"""One-face embeddings of ``K_{n,n}`` built by inserting v-type-edges.

A v-type-edge ``V[j,i]`` is the 2-path ``y_{2i} x_j y_{2i+1}``.  Starting from a
one-face embedding of ``K_{2,3}`` the build proceeds in stages:

* ``c1k{k}`` (k = 2..s): add ``V[1,k]`` and ``V[2,k]`` together, growing ``K_{2,2k-1}``
  to ``K_{2,2k+1}``;
* ``x{k}s0`` (k = 3..n): add the edge ``y1 x_k`` and ``V[k,1]``, a new vertex ``x_k``;
* ``x{k}s{i}`` (i = 2..s): add ``V[k,i]``.

Every existing vertex touched by a stage receives all its new darts in one
chosen corner; the order of those darts, and the rotation of each new vertex,
is the *variant*.  Each stage enumerates every (corners, variant) pair, keeps
the one-face results, and checks that at least the expected number survive.
"""
from __future__ import annotations

import itertools
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .bounds import double_factorial
from .embedding import (
    Embedding,
    EmbeddingError,
    Vertex,
    build_complete_bipartite,
    is_one_face,
    max_genus_upper_bound,
    x,
    y,
)
from .oracle import BudgetExceeded, enumerate_embeddings, vertex_rotations

log = logging.getLogger(__name__)

DEFAULT_MATERIALIZE_BUDGET = 10**6


class ClaimViolation(AssertionError):
    """A stage produced fewer one-face completions than the construction requires."""

    def __init__(self, stage: str, observed: int, expected: int, embedding: Embedding | None = None):
        msg = f"stage {stage}: {observed} one-face completions, expected at least {expected}"
        if embedding is not None:
            msg += f"\ninput embedding:\n{embedding}"
        super().__init__(msg)
        self.stage = stage
        self.observed = observed
        self.expected = expected
        self.embedding = embedding


@dataclass(frozen=True, order=True)
class Corner:
    """Gap between ``rotation[position]`` and its cyclic successor at ``vertex``."""

    vertex: Vertex
    position: int


def corners_at(e: Embedding, v: Vertex) -> list[Corner]:
    rot = e.rotation(v)
    return [Corner(v, i) for i in range(len(rot))]


@dataclass(frozen=True)
class VTypeEdge:
    midpoint: Vertex
    endpoints: tuple[Vertex, Vertex]
    endpoints_new: tuple[bool, bool] = (False, False)
    midpoint_new: bool = False

    def __post_init__(self):
        a, b = self.endpoints
        if self.midpoint.side != "x" or a.side != "y" or b.side != "y":
            raise EmbeddingError("a v-type-edge has an x midpoint and y endpoints")
        if a == b:
            raise EmbeddingError("v-type-edge endpoints must differ")

    @classmethod
    def standard(cls, j: int, i: int, endpoints_new: bool = False,
                 midpoint_new: bool = False) -> "VTypeEdge":
        """``V[j,i] = y_{2i} x_j y_{2i+1}``."""
        return cls(x(j), (y(2 * i), y(2 * i + 1)), (endpoints_new, endpoints_new), midpoint_new)

    def edges(self) -> tuple[tuple[Vertex, Vertex], ...]:
        return tuple((self.midpoint, w) for w in self.endpoints)

    def new_vertices(self) -> dict[Vertex, bool]:
        a, b = self.endpoints
        return {self.midpoint: self.midpoint_new, a: self.endpoints_new[0], b: self.endpoints_new[1]}


@dataclass(frozen=True)
class PendantEdge:
    """A single edge ``x - y`` added alongside a v-type-edge."""

    x_vertex: Vertex
    y_vertex: Vertex
    x_new: bool = False
    y_new: bool = False

    def edges(self) -> tuple[tuple[Vertex, Vertex], ...]:
        return ((self.x_vertex, self.y_vertex),)

    def new_vertices(self) -> dict[Vertex, bool]:
        return {self.x_vertex: self.x_new, self.y_vertex: self.y_new}


@dataclass(frozen=True)
class InsertionChoice:
    corners: tuple[Corner, ...]
    variant: int = 0

    def record(self) -> str:
        return ",".join(str(c.position) for c in self.corners) + f"/{self.variant}"


class _Plan:
    """How a batch of additions lands on a given embedding."""

    def __init__(self, e: Embedding, batch: Sequence):
        g = e.graph
        present = set(v for v in g.vertices if g.degree(v) > 0)
        new_edges: list[tuple[Vertex, Vertex]] = []
        for item in batch:
            for v, flagged_new in item.new_vertices().items():
                if flagged_new and v in present:
                    raise EmbeddingError(f"{v} is flagged new but already in the embedding")
                if not flagged_new and v not in present:
                    raise EmbeddingError(f"{v} is not in the embedding but not flagged new")
            for edge in item.edges():
                if edge in g.edges or edge in new_edges:
                    raise EmbeddingError(f"edge {edge[0]}{edge[1]} added twice")
                new_edges.append(edge)
        self.embedding = e
        self.attach: dict[Vertex, list[Vertex]] = {}
        self.fresh: dict[Vertex, list[Vertex]] = {}
        for a, b in new_edges:
            for v, u in ((a, b), (b, a)):
                (self.attach if v in present else self.fresh).setdefault(v, []).append(u)
        self.p = max([g.p] + [v.index for v in self.fresh if v.side == "x"])
        self.q = max([g.q] + [v.index for v in self.fresh if v.side == "y"])
        self.options = [list(itertools.permutations(ns)) for ns in self.attach.values()]
        self.options += [vertex_rotations(ns) for ns in self.fresh.values()]
        self.variant_count = math.prod(len(o) for o in self.options)

    def all_choices(self) -> Iterator[InsertionChoice]:
        corner_lists = [corners_at(self.embedding, v) for v in self.attach]
        for corners in itertools.product(*corner_lists):
            for variant in range(self.variant_count):
                yield InsertionChoice(corners, variant)

    def random_choice(self, rng: random.Random) -> InsertionChoice:
        corners = tuple(Corner(v, rng.randrange(len(self.embedding.rotation(v)))) for v in self.attach)
        return InsertionChoice(corners, rng.randrange(self.variant_count))

    def apply(self, choice: InsertionChoice) -> Embedding:
        e = self.embedding
        if [c.vertex for c in choice.corners] != list(self.attach):
            raise EmbeddingError(
                f"choice gives corners at {[str(c.vertex) for c in choice.corners]}, "
                f"batch attaches at {[str(v) for v in self.attach]}"
            )
        if not 0 <= choice.variant < self.variant_count:
            raise EmbeddingError(f"variant {choice.variant} out of range ({self.variant_count})")
        picks = []
        rest = choice.variant
        for opts in reversed(self.options):
            rest, i = divmod(rest, len(opts))
            picks.append(opts[i])
        picks.reverse()

        rotation = e.rotation_map()
        for c, order in zip(choice.corners, picks):
            rot = rotation[c.vertex]
            if not 0 <= c.position < len(rot):
                raise EmbeddingError(f"stale corner {c.position} at {c.vertex} (degree {len(rot)})")
            rotation[c.vertex] = rot[: c.position + 1] + tuple(order) + rot[c.position + 1:]
        for v, order in zip(self.fresh, picks[len(self.attach):]):
            rotation[v] = tuple(order)
        return Embedding.from_rotations(rotation, self.p, self.q)


def insert_batch(e: Embedding, batch: Sequence, choice: InsertionChoice) -> Embedding:
    return _Plan(e, batch).apply(choice)


def insert_vtype(e: Embedding, vt: VTypeEdge, choice: InsertionChoice) -> Embedding:
    """Insert one v-type-edge at the chosen corners; any face count may result."""
    return insert_batch(e, (vt,), choice)


def variant_count(e: Embedding, batch: Sequence) -> int:
    return _Plan(e, batch).variant_count


def one_face_extensions(e: Embedding, batch: Sequence) -> list[tuple[InsertionChoice, Embedding]]:
    plan = _Plan(e, batch)
    out = []
    for choice in plan.all_choices():
        f = plan.apply(choice)
        if is_one_face(f):
            out.append((choice, f))
    return out


def valid_completions(e: Embedding, batch: Sequence) -> list[InsertionChoice]:
    """Every (corners, variant) insertion of ``batch`` that leaves a single face."""
    return [c for c, _ in one_face_extensions(e, batch)]


# --- staged construction ---------------------------------------------------

@dataclass(frozen=True)
class Stage:
    label: str
    batch: tuple
    factor: int
    claim: str


def claim1_batch(k: int) -> tuple:
    return (VTypeEdge.standard(1, k, endpoints_new=True), VTypeEdge.standard(2, k, endpoints_new=True))


def attach_batch(k: int, i: int) -> tuple:
    if i == 0:
        return (PendantEdge(x(k), y(1), x_new=True), VTypeEdge.standard(k, 1, midpoint_new=True))
    return (VTypeEdge.standard(k, i),)


def _claim_name(k: int) -> str:
    return {3: "claim2", 4: "claim3"}.get(k, "claim4")


def stage_plan(n: int, p: int | None = None) -> list[Stage]:
    """Stages building ``K_{p,n}`` (default ``p = n``) from the ``K_{2,3}`` base."""
    _require_odd(n)
    p = n if p is None else p
    s = (n - 1) // 2
    if n == 1:
        if p != 1:
            raise ValueError("n = 1 only admits K_{1,1}")
        return []
    if not 2 <= p <= n:
        raise ValueError(f"x-side size must lie in [2, {n}], got {p}")
    plan = [Stage(f"c1k{k}", claim1_batch(k), (2 * k - 1) ** 2 * 2, "claim1") for k in range(2, s + 1)]
    for k in range(3, p + 1):
        plan.append(Stage(f"x{k}s0", attach_batch(k, 0), (k - 1) ** 3, _claim_name(k)))
        for i in range(2, s + 1):
            plan.append(Stage(f"x{k}s{i}", attach_batch(k, i), (2 * i - 1) * (k - 1) ** 2, _claim_name(k)))
    return plan


def _require_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 1, got {n}")


def base_embeddings_k23() -> list[Embedding]:
    return [e for e in enumerate_embeddings(build_complete_bipartite(2, 3)) if is_one_face(e)]


def base_embeddings(n: int) -> list[Embedding]:
    if n == 1:
        return list(enumerate_embeddings(build_complete_bipartite(1, 1)))
    return base_embeddings_k23()


def run_stage(e: Embedding, stage: Stage, observed: dict | None = None) -> list[tuple[InsertionChoice, Embedding]]:
    found = one_face_extensions(e, stage.batch)
    if observed is not None:
        observed.setdefault(stage.label, []).append(len(found))
    if len(found) < stage.factor:
        raise ClaimViolation(stage.label, len(found), stage.factor, e)
    return found


def claim1_stage(e: Embedding, k: int, observed: dict | None = None) -> list[Embedding]:
    """One-face ``K_{2,2k+1}`` embeddings grown from a one-face ``K_{2,2k-1}``."""
    if k < 2:
        raise ValueError("claim-1 stages start at k = 2")
    stage = Stage(f"c1k{k}", claim1_batch(k), (2 * k - 1) ** 2 * 2, "claim1")
    return [f for _, f in run_stage(e, stage, observed)]


def attach_stage_factor(k: int, n: int) -> int:
    s = (n - 1) // 2
    return (k - 1) * double_factorial(2 * s - 1) * (k - 1) ** (2 * s)


def attach_x_stage(e: Embedding, k: int, n: int, observed: dict | None = None) -> list[Embedding]:
    """Fully attach ``x_k`` to ``y_1..y_n``, checking every substep count."""
    if not 3 <= k <= n:
        raise ValueError(f"attach stages need 3 <= k <= n, got k={k}, n={n}")
    stages = [s for s in stage_plan(n, k) if s.label.startswith(f"x{k}s")]
    frontier = [e]
    for stage in stages:
        frontier = [f for g in frontier for _, f in run_stage(g, stage, observed)]
    if len(frontier) < attach_stage_factor(k, n):
        raise ClaimViolation(f"x{k}", len(frontier), attach_stage_factor(k, n), e)
    return frontier


def predicted_count(n: int, p: int | None = None) -> int:
    """Product of the base count and every stage factor."""
    plan = stage_plan(n, p)
    base = 1 if n == 1 else 2
    return base * math.prod(s.factor for s in plan)


# --- provenance ------------------------------------------------------------

class Step(NamedTuple):
    label: str
    positions: tuple[int, ...]
    variant: int

    def record(self) -> str:
        return f"{self.label}=" + ",".join(map(str, self.positions)) + f"/{self.variant}"


@dataclass(frozen=True)
class ChoiceSequence:
    """Provenance of a generated embedding: base index plus one step per stage."""

    n: int
    p: int
    base: int
    steps: tuple[Step, ...] = ()

    def extend(self, label: str, choice: InsertionChoice) -> "ChoiceSequence":
        step = Step(label, tuple(c.position for c in choice.corners), choice.variant)
        return ChoiceSequence(self.n, self.p, self.base, self.steps + (step,))

    def record(self) -> str:
        return " ".join([f"n={self.n}", f"p={self.p}", f"base={self.base}"]
                        + [st.record() for st in self.steps])

    @classmethod
    def parse(cls, line: str) -> "ChoiceSequence":
        fields = line.split()
        try:
            head = dict(f.split("=", 1) for f in fields[:3])
            n, p, base = int(head["n"]), int(head["p"]), int(head["base"])
        except (KeyError, ValueError):
            raise ValueError(f"bad choice record {line!r}") from None
        plan = stage_plan(n, p)
        body = fields[3:]
        if len(body) != len(plan):
            raise ValueError(f"record has {len(body)} steps, K_{{{p},{n}}} needs {len(plan)}")
        steps = []
        for stage, item in zip(plan, body):
            label, _, value = item.partition("=")
            if label != stage.label:
                raise ValueError(f"expected step {stage.label}, got {label!r}")
            positions, _, variant = value.partition("/")
            try:
                steps.append(Step(label, tuple(int(c) for c in positions.split(",") if c), int(variant)))
            except ValueError:
                raise ValueError(f"bad step {item!r}") from None
        return cls(n, p, base, tuple(steps))


def replay(seq: ChoiceSequence) -> Embedding:
    """Rebuild the embedding a choice sequence describes."""
    e = base_embeddings(seq.n)[seq.base]
    for stage, step in zip(stage_plan(seq.n, seq.p), seq.steps):
        plan = _Plan(e, stage.batch)
        if len(step.positions) != len(plan.attach):
            raise EmbeddingError(f"step {step.label}: {len(step.positions)} corners for "
                                 f"{len(plan.attach)} vertices")
        corners = tuple(Corner(v, i) for v, i in zip(plan.attach, step.positions))
        e = plan.apply(InsertionChoice(corners, step.variant))
    return e


# --- generation ------------------------------------------------------------

def _expand(item, plan: list[Stage], depth: int) -> list[tuple[ChoiceSequence, Embedding]]:
    """Depth-first materialisation of the stage tree below ``item``."""
    seq, e = item
    if depth == len(plan):
        return [item]
    stage = plan[depth]
    out = []
    for choice, f in run_stage(e, stage):
        child = seq.extend(stage.label, choice)
        out.extend(_expand((child, f), plan, depth + 1))
    return out


def _roots(n: int, p: int) -> list[tuple[ChoiceSequence, Embedding]]:
    return [(ChoiceSequence(n, p, b), e) for b, e in enumerate(base_embeddings(n))]


def _expand_subtree(args):
    item, n, p = args
    return _expand(item, stage_plan(n, p), 1)


def generate_exhaustive(n: int, p: int | None = None, budget: int = DEFAULT_MATERIALIZE_BUDGET,
                        jobs: int = 1) -> Iterator[tuple[ChoiceSequence, Embedding]]:
    p = n if p is None else p
    plan = stage_plan(n, p)
    predicted = predicted_count(n, p)
    if predicted > budget:
        raise BudgetExceeded(predicted, budget, "embeddings")
    roots = _roots(n, p)
    if not plan:
        yield from roots
        return
    # subtrees below each first-stage choice are independent
    first = []
    for seq, e in roots:
        for choice, f in run_stage(e, plan[0]):
            first.append((seq.extend(plan[0].label, choice), f))
    if jobs > 1 and len(first) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_expand_subtree, [(item, n, p) for item in first], chunksize=4):
                yield from chunk
    else:
        for item in first:
            yield from _expand(item, plan, 1)


def _sample_stage(e: Embedding, stage: Stage, rng: random.Random,
                  max_tries: int = 100_000) -> tuple[InsertionChoice, Embedding]:
    # rejection sampling is uniform over the one-face completions
    plan = _Plan(e, stage.batch)
    for _ in range(max_tries):
        choice = plan.random_choice(rng)
        f = plan.apply(choice)
        if is_one_face(f):
            return choice, f
    raise ClaimViolation(stage.label, 0, stage.factor, e)


def sample_one(n: int, rng: random.Random, p: int | None = None) -> tuple[ChoiceSequence, Embedding]:
    p = n if p is None else p
    roots = _roots(n, p)
    seq, e = roots[rng.randrange(len(roots))]
    for stage in stage_plan(n, p):
        choice, e = _sample_stage(e, stage, rng)
        seq = seq.extend(stage.label, choice)
    return seq, e


def generate_sampled(n: int, count: int, seed: int = 0,
                     p: int | None = None) -> Iterator[tuple[ChoiceSequence, Embedding]]:
    rng = random.Random(seed)
    for _ in range(count):
        yield sample_one(n, rng, p)


def generate_all(n: int, mode: str = "exhaustive", *, seed: int = 0, count: int = 1000,
                 budget: int = DEFAULT_MATERIALIZE_BUDGET, jobs: int = 1,
                 p: int | None = None) -> Iterator[tuple[ChoiceSequence, Embedding]]:
    """Stream ``(provenance, embedding)`` pairs of one-face embeddings of ``K_{p,n}``.

    ``mode="exhaustive"`` walks the whole stage tree (refused above ``budget``
    predicted embeddings); ``mode="sampled"`` draws ``count`` seeded random paths.
    """
    if mode == "exhaustive":
        return generate_exhaustive(n, p, budget, jobs)
    if mode == "sampled":
        return generate_sampled(n, count, seed, p)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class DistinctReport:
    total: int = 0
    unique: int = 0
    collisions: list = field(default_factory=list)

    @property
    def injective(self) -> bool:
        """No two different choice sequences gave the same embedding."""
        return not any(a != b for _, a, b in self.collisions)

    @property
    def repeated_sequences(self) -> int:
        return sum(1 for _, a, b in self.collisions if a == b)

    def summary(self) -> str:
        return f"{self.unique} unique / {self.total}"


def verify_distinct(stream: Iterable[tuple[ChoiceSequence, Embedding]]) -> DistinctReport:
    report = DistinctReport()
    seen: dict[tuple, ChoiceSequence] = {}
    for seq, e in stream:
        report.total += 1
        key = (e.graph.p, e.graph.q, e.rotations)
        if key in seen:
            report.collisions.append((e, seen[key], seq))
        else:
            seen[key] = seq
    report.unique = len(seen)
    return report


def check_output(e: Embedding) -> bool:
    return is_one_face(e) and e.genus == max_genus_upper_bound(e.graph)


# --- claim verification ----------------------------------------------------

@dataclass
class ClaimRow:
    label: str
    claim: str
    factor: int
    inputs: int
    observed_min: int
    observed_max: int
    sampled: bool = False
    product: bool = False

    @property
    def passed(self) -> bool:
        return (self.product or self.inputs > 0) and self.observed_min >= self.factor


@dataclass
class ClaimsReport:
    n: int
    rows: list[ClaimRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def table(self) -> str:
        head = ("step", "claim", "factor", "inputs", "observed", "verdict")
        body = [head]
        for r in self.rows:
            obs = str(r.observed_min) if r.observed_min == r.observed_max else f"{r.observed_min}..{r.observed_max}"
            inputs = "-" if r.product else f"{r.inputs}{'*' if r.sampled else ''}"
            body.append((r.label, r.claim, str(r.factor), inputs, obs, "PASS" if r.passed else "FAIL"))
        widths = [max(len(row[i]) for row in body) for i in range(len(head))]
        lines = [f"claim verification for K_{{{self.n},{self.n}}}"]
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in body]
        if any(r.sampled for r in self.rows):
            lines.append("* inputs sampled from the previous stage's outputs")
        lines.append("product rows multiply the smallest count seen at each step")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"

    def records(self) -> str:
        return "".join(
            f"step={r.label} claim={r.claim} factor={r.factor} inputs={r.inputs} "
            f"min={r.observed_min} max={r.observed_max} sampled={int(r.sampled)} product={int(r.product)} "
            f"verdict={'PASS' if r.passed else 'FAIL'}\n"
            for r in self.rows
        )


def verify_claims(n: int, *, samples: int = 20, seed: int = 0,
                  frontier_budget: int = 500) -> ClaimsReport:
    """Check every stage factor, following all intermediates while they fit in
    ``frontier_budget`` and a seeded sample of ``samples`` of them afterwards.

    Stage and overall product rows use the smallest count seen at each step,
    so they bound every path from below.
    """
    _require_odd(n)
    rng = random.Random(seed)
    report = ClaimsReport(n)
    plan = stage_plan(n)
    s = (n - 1) // 2
    base = base_embeddings(n)
    base_factor = 1 if n == 1 else 2
    report.rows.append(ClaimRow("base", "claim1", base_factor, 1, len(base), len(base)))
    frontier = base
    sampled = False
    mins: dict[str, int] = {}
    for stage in plan:
        if len(frontier) > frontier_budget:
            frontier = rng.sample(frontier, samples)
            sampled = True
        counts = []
        nxt = []
        for e in frontier:
            found = one_face_extensions(e, stage.batch)
            counts.append(len(found))
            nxt.extend(f for _, f in found)
        row = ClaimRow(stage.label, stage.claim, stage.factor, len(frontier),
                       min(counts, default=0), max(counts, default=0), sampled)
        report.rows.append(row)
        mins[stage.label] = row.observed_min
        log.info("%s: factor %d, observed %d..%d over %d inputs", stage.label, stage.factor,
                 row.observed_min, row.observed_max, row.inputs)
        frontier = nxt
        if not frontier:
            break
    if n > 1:
        c1 = [st for st in plan if st.claim == "claim1"]
        prod = len(base) * math.prod(mins.get(st.label, 0) for st in c1)
        report.rows.append(ClaimRow("claim1-product", "claim1", 2 ** s * double_factorial(2 * s - 1) ** 2,
                                    0, prod, prod, product=True))
        for k in range(3, n + 1):
            sub = [st for st in plan if st.label.startswith(f"x{k}s")]
            prod = math.prod(mins.get(st.label, 0) for st in sub)
            report.rows.append(ClaimRow(f"x{k}-product", _claim_name(k), attach_stage_factor(k, n),
                                        0, prod, prod, sampled, product=True))
    total = (len(base) if n > 1 else 1) * math.prod(mins.get(st.label, 0) for st in plan)
    report.rows.append(ClaimRow("overall", "theoremA", predicted_count(n), 0, total, total, sampled,
                                product=True))
    return report
