import numpy as np
from hypothesis import given, strategies as st

from hodgesolve import generators
from hodgesolve.collapse import CollapsingSequence, greedy_collapse, normalize, validate
from hodgesolve.complex import EmbeddedComplex


def test_tet_standard_sequence(tet):
    seq = CollapsingSequence.from_refs(tet.collapses)
    assert len(seq) == 7
    assert seq.tags == ["tet-tri"] + ["tri-edge"] * 3 + ["edge-vertex"] * 3
    assert validate(tet, seq).ok


def test_swapped_pairs_fail_at_index(tet):
    pairs = CollapsingSequence.from_refs(tet.collapses).pairs.copy()
    pairs[[0, 1]] = pairs[[1, 0]]
    r = validate(tet, CollapsingSequence(pairs))
    assert not r.ok and r.index == 0


def test_empty_sequence_single_vertex():
    cx = EmbeddedComplex([7], np.zeros((1, 3)), [None, None, None, None])
    assert validate(cx, CollapsingSequence([])).ok


def test_incomplete_sequence(tet):
    seq = CollapsingSequence(CollapsingSequence.from_refs(tet.collapses).pairs[:-1])
    r = validate(tet, seq)
    assert not r.ok and r.index == 6


def test_normalize_examples(tet):
    seq = CollapsingSequence.from_refs(tet.collapses)
    assert normalize(tet, seq) is seq
    # interleave: tri-edge pair first, then the tet-tri pair
    sub = generators.tetrahedron()
    p = seq.pairs
    # collapse the tet first into a free facet pair, then reorder a lower pair ahead of it
    inter = CollapsingSequence(np.vstack([p[0], p[4], p[1:4], p[5:]]))
    assert not inter.is_normalized()
    out = normalize(sub, inter)
    assert out.is_normalized() and out.tags[0] == "tet-tri" and validate(sub, out).ok


def test_no_tet_pairs_unchanged(pd2):
    present = [m.copy() for m in pd2.in_K]
    seq, _ = greedy_collapse(pd2, present=present)
    assert np.all(seq.pairs[:, 0] < 3)
    n = normalize(pd2, seq, check=False)
    assert np.array_equal(n.pairs[:, 0], np.sort(seq.pairs[:, 0])[::-1])


@given(st.integers(1, 40), st.integers(0, 10 ** 6))
def test_generated_balls_have_valid_normalized_sequences(k, seed):
    cx = generators.ball(k, seed)
    seq = CollapsingSequence.from_refs(cx.collapses)
    assert seq.is_normalized() and validate(cx, seq).ok


def test_grid_ball_sequence(pd2):
    cx = generators.grid_ball(4, np.random.default_rng(0))
    assert cx.counts() == (125, 604, 864, 384)
    assert validate(cx, CollapsingSequence.from_refs(cx.collapses)).ok
