import pytest
from hypothesis import given, strategies as st

from ballgames.model import (
    GameConfig,
    HiddenColoring,
    QueryKind,
    Target,
    classify_ball,
    dump_coloring,
    largest_classes,
    load_coloring,
)


def test_classify_majority_example():
    col = HiddenColoring([0, 0, 1])
    st_ = classify_ball(col, {0, 1, 2}, 0)
    assert st_.majority and st_.non_minority and st_.plurality and st_.almost_plurality


def test_classify_exact_half_two_colors():
    # the one shape that is almost-plurality without being plurality
    col = HiddenColoring([0, 1])
    st_ = classify_ball(col, {0, 1}, 0)
    assert not st_.majority
    assert st_.non_minority
    assert not st_.plurality
    assert st_.almost_plurality


def test_classify_three_singletons():
    col = HiddenColoring([0, 1, 2])
    st_ = classify_ball(col, {0, 1, 2}, 0)
    assert not (st_.majority or st_.non_minority or st_.plurality or st_.almost_plurality)


def test_classify_requires_membership():
    col = HiddenColoring([0, 0, 1])
    with pytest.raises(ValueError):
        classify_ball(col, {0, 1}, 2)


def test_largest_classes_examples():
    assert largest_classes(HiddenColoring([0, 0, 1]), {0, 1, 2}) == {0}
    assert largest_classes(HiddenColoring([0, 1]), {0, 1}) == {0, 1}
    assert largest_classes(HiddenColoring([0, 0, 1, 1, 2]), range(5)) == {0, 1}


def test_largest_classes_empty_subset():
    with pytest.raises(ValueError):
        largest_classes(HiddenColoring([0]), set())


@given(
    st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=12),
    st.data(),
)
def test_status_implications(colors, data):
    col = HiddenColoring(colors)
    subset = data.draw(
        st.sets(st.integers(min_value=0, max_value=len(colors) - 1), min_size=1)
    )
    ball = data.draw(st.sampled_from(sorted(subset)))
    s = classify_ball(col, subset, ball)
    if s.majority:
        assert s.non_minority
    if s.non_minority or s.plurality:
        assert s.almost_plurality
    assert s.almost_plurality == (s.plurality or s.non_minority)


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=2, max_size=12))
def test_two_colors_majority_is_plurality(colors):
    col = HiddenColoring(colors)
    subset = set(range(len(colors)))
    for b in subset:
        s = classify_ball(col, subset, b)
        assert s.majority == s.plurality
        assert s.non_minority == s.almost_plurality


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=14))
def test_two_colors_nonminority_exists(colors):
    col = HiddenColoring(colors)
    subset = set(range(len(colors)))
    assert any(classify_ball(col, subset, b).non_minority for b in subset)


def test_config_validation():
    with pytest.raises(ValueError):
        GameConfig(n=2, q=3, c=2)
    with pytest.raises(ValueError):
        GameConfig(n=5, q=3, c=1)
    cfg = GameConfig(n=10, q=5, c=3, query_kind=QueryKind.PLURALITY)
    assert cfg.k == 2 and cfg.q_odd
    assert GameConfig(n=10, q=4, c=2).k == 2


def test_coloring_file_roundtrip():
    col = HiddenColoring([0, 2, 1, 0])
    text = dump_coloring(col, 3)
    back, c = load_coloring(text)
    assert back == col and c == 3


def test_coloring_file_rejects_mismatch():
    with pytest.raises(ValueError):
        load_coloring("3 2\n0 1")
    with pytest.raises(ValueError):
        load_coloring("3 2\n0 1 2")
