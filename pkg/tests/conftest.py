import itertools
import random

import pytest
from hypothesis import strategies as st

from maxgenus.embedding import Embedding, build_complete_bipartite, x, y


def count_faces_by_hand(rotation):
    """Independent face count for a ``{vertex: [neighbours]}`` rotation.

    Walks darts as (u, v) pairs, stepping to (v, w) where w follows u in the
    rotation at v.  Shares no code with the package.
    """
    todo = {(v, u) for v, ns in rotation.items() for u in ns}
    faces = 0
    while todo:
        start = todo.pop()
        faces += 1
        u, v = start
        while True:
            rot = list(rotation[v])
            w = rot[(rot.index(u) + 1) % len(rot)]
            d = (v, w)
            if d == start:
                break
            todo.remove(d)
            u, v = d
    return faces


def all_rotation_maps(p, q):
    """Every rotation system of K_{p,q} as plain dicts, by brute force."""
    verts = [x(i) for i in range(1, p + 1)] + [y(j) for j in range(1, q + 1)]
    nbrs = {v: ([y(j) for j in range(1, q + 1)] if v.side == "x" else [x(i) for i in range(1, p + 1)])
            for v in verts}
    per_vertex = [[(nbrs[v][0],) + perm for perm in itertools.permutations(nbrs[v][1:])] for v in verts]
    for combo in itertools.product(*per_vertex):
        yield dict(zip(verts, combo))


def random_embedding(p, q, rng):
    g = build_complete_bipartite(p, q)
    rot = {}
    for v in g.vertices:
        ns = list(g.adjacency[v])
        rng.shuffle(ns)
        rot[v] = ns
    return Embedding.on_graph(g, rot)


@st.composite
def embeddings(draw, max_p=4, max_q=4):
    p = draw(st.integers(1, max_p))
    q = draw(st.integers(1, max_q))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_embedding(p, q, random.Random(seed))


@pytest.fixture
def k23_systems():
    return [Embedding.on_graph(build_complete_bipartite(2, 3), r) for r in all_rotation_maps(2, 3)]


# --- acceptance reporting --------------------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if rep.when == "setup" and rep.outcome == "failed":
            verdict = "ERROR"
        number, title = marker.args
        detail = ""
        if rep.outcome == "skipped" and isinstance(rep.longrepr, tuple):
            detail = f" ({rep.longrepr[2]})"
        _ACCEPTANCE.append((str(number), title, verdict, rep.duration, detail))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, duration, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{number:>2}] {title:<58} {verdict} ({duration:.2f}s){detail}")
