import itertools
import random
from collections import defaultdict

import pytest

from maxgenus.bounds import f1
from maxgenus.embedding import (
    Embedding,
    EmbeddingError,
    build_complete_bipartite,
    is_one_face,
    max_genus_upper_bound,
    mirror,
    x,
    y,
)
from maxgenus.oracle import BudgetExceeded, embeddings_with_faces
from maxgenus.vtype import (
    ChoiceSequence,
    ClaimViolation,
    Corner,
    InsertionChoice,
    PendantEdge,
    Stage,
    VTypeEdge,
    attach_batch,
    attach_x_stage,
    base_embeddings_k23,
    check_output,
    claim1_batch,
    claim1_stage,
    corners_at,
    generate_all,
    insert_batch,
    insert_vtype,
    predicted_count,
    replay,
    run_stage,
    stage_plan,
    valid_completions,
    variant_count,
    verify_claims,
    verify_distinct,
)


@pytest.fixture(scope="module")
def base():
    return base_embeddings_k23()


@pytest.fixture(scope="module")
def k25(base):
    return [f for e in base for f in claim1_stage(e, 2)]


def test_base_has_two_mirror_images(base):
    assert len(base) == 2
    assert all(is_one_face(e) for e in base)
    assert mirror(base[0]) == base[1]


def test_corners(base, k25):
    assert len(corners_at(base[0], x(1))) == 3
    assert len(corners_at(k25[0], y(1))) == 2
    star = Embedding.from_rotations({x(1): [y(1)], y(1): [x(1)]})
    assert corners_at(star, y(1)) == [Corner(y(1), 0)]
    with pytest.raises(EmbeddingError):
        corners_at(base[0], x(9))


def test_vtype_edge_shape():
    v = VTypeEdge.standard(3, 2)
    assert v.midpoint == x(3) and v.endpoints == (y(4), y(5))
    with pytest.raises(EmbeddingError):
        VTypeEdge(y(1), (y(2), y(3)))
    with pytest.raises(EmbeddingError):
        VTypeEdge(x(1), (y(2), y(2)))


def test_claim1_step_counts(base):
    for e in base:
        assert variant_count(e, claim1_batch(2)) == 4
        assert len(valid_completions(e, claim1_batch(2))) == 18


def test_claim1_step_two_of_four_variants_per_corner_pair(base):
    # for every corner pair, exactly the 2 surviving orders stay one-face
    e = base[0]
    for c1, c2 in itertools.product(range(3), repeat=2):
        corners = (Corner(x(1), c1), Corner(x(2), c2))
        faces = [insert_batch(e, claim1_batch(2), InsertionChoice(corners, v)).face_count
                 for v in range(4)]
        assert sorted(faces)[:2] == [1, 1]
        assert all(f > 1 for f in sorted(faces)[2:])


def test_insert_vtype_single_edge_preserves_one_face_when_tree_like():
    star = Embedding.from_rotations({x(1): [y(1)], y(1): [x(1)]})
    vt = VTypeEdge(x(1), (y(2), y(3)), endpoints_new=(True, True))
    results = [insert_vtype(star, vt, InsertionChoice((Corner(x(1), 0),), v)) for v in range(2)]
    assert {r.face_count for r in results} == {1}
    assert any(r.face_count <= star.face_count for r in results)
    assert results[0] != results[1]


def test_insert_new_midpoint_into_k11():
    star = Embedding.from_rotations({x(1): [y(1)], y(1): [x(1)]})
    vt = VTypeEdge(x(2), (y(1), y(2)), endpoints_new=(False, True), midpoint_new=True)
    out = insert_vtype(star, vt, InsertionChoice((Corner(y(1), 0),), 0))
    assert out.graph.n_edges == 3 and out.face_count == 1


def test_claim2_substep0_counts(k25):
    for e in k25:
        assert len(valid_completions(e, attach_batch(3, 0))) == 8


def test_claim3_substep0_count(k25):
    e = k25[0]
    after = attach_x_stage(e, 3, 5)
    assert len(valid_completions(after[0], attach_batch(4, 0))) == 27


def test_stale_corner_rejected(base):
    e = base[0]
    bad = InsertionChoice((Corner(x(1), 3), Corner(x(2), 0)), 0)
    with pytest.raises(EmbeddingError, match="stale"):
        insert_batch(e, claim1_batch(2), bad)


def test_variant_out_of_range(base):
    choice = InsertionChoice((Corner(x(1), 0), Corner(x(2), 0)), 4)
    with pytest.raises(EmbeddingError):
        insert_batch(base[0], claim1_batch(2), choice)


def test_new_flags_checked(base):
    e = base[0]
    present = VTypeEdge(x(1), (y(2), y(3)), endpoints_new=(True, True))
    with pytest.raises(EmbeddingError, match="flagged new"):
        insert_vtype(e, present, InsertionChoice((Corner(x(1), 0),), 0))
    absent = VTypeEdge(x(1), (y(4), y(5)))
    with pytest.raises(EmbeddingError, match="not flagged new"):
        insert_vtype(e, absent, InsertionChoice((Corner(x(1), 0),), 0))
    with pytest.raises(EmbeddingError):
        insert_batch(e, (PendantEdge(x(1), y(1)),), InsertionChoice((Corner(x(1), 0), Corner(y(1), 0))))


def test_claim1_stage_k2_and_k3(base, k25):
    observed = {}
    outs = claim1_stage(base[0], 2, observed)
    assert len(outs) >= 18 and all(is_one_face(f) for f in outs)
    assert observed == {"c1k2": [18]}
    assert len(claim1_stage(k25[0], 3)) >= 50


def test_claim_violation_carries_provenance(base):
    greedy = Stage("c1k2", claim1_batch(2), 19, "claim1")
    with pytest.raises(ClaimViolation) as info:
        run_stage(base[0], greedy)
    assert info.value.observed == 18 and info.value.expected == 19
    assert info.value.embedding == base[0]
    assert "c1k2" in str(info.value) and "rot x1" in str(info.value)


def test_attach_stage_n3(base):
    observed = {}
    outs = attach_x_stage(base[0], 3, 3, observed)
    assert len(outs) == 8
    assert observed == {"x3s0": [8]}


def test_attach_stage_k3_n5(k25):
    observed = {}
    outs = attach_x_stage(k25[0], 3, 5, observed)
    assert observed["x3s0"] == [8]
    assert set(observed["x3s2"]) == {12}
    assert len(outs) == 96 == 2 * 3 * 2**4


def test_attach_stage_k4_n5(k25):
    k35 = attach_x_stage(k25[5], 3, 5)[7]
    outs = attach_x_stage(k35, 4, 5)
    assert len(outs) == 3 * 3 * 3**4 == 729
    assert all(check_output(f) for f in outs)


def test_stage_plan_n5():
    plan = stage_plan(5)
    assert [s.label for s in plan] == ["c1k2", "x3s0", "x3s2", "x4s0", "x4s2", "x5s0", "x5s2"]
    assert [s.factor for s in plan] == [18, 8, 12, 27, 27, 64, 48]


@pytest.mark.parametrize("n", [1, 3, 5, 7, 9, 11])
def test_predicted_count_identity(n):
    assert predicted_count(n) == f1(n)


def test_predicted_count_values():
    assert predicted_count(3) == 16
    assert predicted_count(5) == 7739670528
    assert predicted_count(5, p=2) == 36
    assert predicted_count(7, p=2) == 1800
    assert predicted_count(5, p=3) == 3456


def test_generate_n1():
    items = list(generate_all(1))
    assert len(items) == 1
    seq, e = items[0]
    assert seq.steps == () and e.graph == build_complete_bipartite(1, 1)


def test_generate_n3_exhaustive_matches_oracle():
    items = list(generate_all(3))
    report = verify_distinct(items)
    assert (report.total, report.unique) == (16, 16) and report.injective
    oracle_set = set(embeddings_with_faces(build_complete_bipartite(3, 3), 1))
    assert {e for _, e in items} <= oracle_set
    assert all(e.genus == max_genus_upper_bound(e.graph) for _, e in items)


def test_generate_k25_exhaustive():
    items = list(generate_all(5, p=2))
    assert verify_distinct(items).unique == 36


def test_generate_parallel_same_order():
    serial = list(generate_all(5, p=3))
    parallel = list(generate_all(5, p=3, jobs=2))
    assert [s.record() for s, _ in serial] == [s.record() for s, _ in parallel]


def test_generate_refuses_full_n5():
    with pytest.raises(BudgetExceeded) as info:
        next(iter(generate_all(5)))
    assert info.value.count == f1(5)


def test_generate_rejects_even_n():
    with pytest.raises(ValueError):
        list(generate_all(4))


def test_sampled_reproducible_and_valid():
    a = [(s.record(), e) for s, e in generate_all(5, "sampled", seed=11, count=30)]
    b = [(s.record(), e) for s, e in generate_all(5, "sampled", seed=11, count=30)]
    assert a == b
    assert all(check_output(e) for _, e in a)
    assert all(e.graph == build_complete_bipartite(5, 5) for _, e in a)


def test_sampling_is_spread_over_completions(base):
    # rejection sampling should hit every one of the 18 completions
    counts = defaultdict(int)
    rng = random.Random(0)
    from maxgenus.vtype import _sample_stage
    stage = stage_plan(5)[0]
    for _ in range(900):
        choice, _ = _sample_stage(base[0], stage, rng)
        counts[choice] += 1
    assert len(counts) == 18
    assert min(counts.values()) > 20


def test_choice_record_round_trip_and_replay():
    for seq, e in list(generate_all(5, p=3))[::97]:
        line = seq.record()
        back = ChoiceSequence.parse(line)
        assert back == seq
        assert replay(back) == e


@pytest.mark.parametrize("line", [
    "n=3 p=3 base=0",
    "n=3 p=3 base=0 c1k2=0,0/0",
    "n=3 base=0 x3s0=0,0,0/0",
    "n=3 p=3 base=0 x3s0=a/0",
])
def test_choice_record_rejects_malformed(line):
    with pytest.raises(ValueError):
        ChoiceSequence.parse(line)


def test_verify_distinct_reports_planted_duplicates():
    items = list(generate_all(3))
    seq0, e0 = items[0]
    report = verify_distinct(items + [items[0]])
    assert report.total == 17 and report.unique == 16
    assert len(report.collisions) == 1 and report.repeated_sequences == 1
    assert report.injective

    forged = ChoiceSequence(3, 3, 1, seq0.steps)
    report = verify_distinct(items + [(forged, e0)])
    assert not report.injective
    _, first, second = report.collisions[0]
    assert first == seq0 and second == forged


def test_verify_claims_n3():
    report = verify_claims(3)
    rows = {r.label: r for r in report.rows}
    assert rows["base"].observed_min == 2
    assert rows["x3s0"].observed_min == 8
    assert rows["overall"].observed_min == 16
    assert report.passed
    assert "overall: PASS" in report.table()
    assert "step=x3s0 claim=claim2 factor=8" in report.records()
