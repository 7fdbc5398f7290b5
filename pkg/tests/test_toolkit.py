import itertools
import random

import pytest

from ballgames.model import GameConfig, HiddenColoring, QueryKind, largest_classes
from ballgames.oracle import OracleSession, make_policy
from ballgames.toolkit import (
    ComparisonOutcome,
    Completed,
    HaltedAtNo,
    InferenceError,
    ambiguous_median,
    find_opposite_k_sets,
    solve_small_nonminority,
    winner_out,
)
from ballgames.harness import (
    simulate_median_colors,
    valid_comparison_outcomes,
    _ball_branches,
)


def _session(colors, q, kind=QueryKind.MAJORITY, policy="first", c=None):
    c = c if c is not None else max(2, len(set(colors)))
    cfg = GameConfig(n=len(colors), q=q, c=c, query_kind=kind)
    return OracleSession(cfg, HiddenColoring(colors), make_policy(policy))


# -- winner_out --------------------------------------------------------------


def test_winner_out_frozen_trace():
    # colors A A A B B with First policy: answers 0, 1, 3; survivors 2 and 4
    ses = _session([0, 0, 0, 1, 1], 3)
    out = winner_out(ses, range(5))
    assert isinstance(out, Completed)
    assert out.survivors == frozenset({2, 4})
    assert out.answer_balls == (0, 1, 3)


def test_winner_out_monochromatic_property():
    ses = _session([0] * 8, 3)
    out = winner_out(ses, range(8))
    assert isinstance(out, Completed)
    assert len(out.survivors) == 2
    assert len(out.answer_balls) == 8 - 3 + 1
    # every ball outside the survivors is in a largest class of them
    assert largest_classes(ses.coloring, out.survivors) == {0}


def test_winner_out_halts_on_no():
    ses = _session([0, 1, 2, 0, 1, 2], 3, c=3)
    out = winner_out(ses, range(6), stop_on_no=True)
    assert isinstance(out, HaltedAtNo)
    assert out.no_query == (0, 1, 2)
    assert out.prior_query is None and out.prior_answer_ball is None


def test_winner_out_start_query_not_reasked():
    ses = _session([0, 0, 1, 1, 0], 4)
    out = winner_out(ses, range(5), stop_on_no=True, start=(0, 1, 2, 4), start_presented=0)
    # only the follow-up query gets asked
    assert ses.transcript.rows[0][0] == (1, 2, 3, 4)
    assert isinstance(out, (Completed, HaltedAtNo))


def test_winner_out_pool_too_small():
    ses = _session([0, 0, 1], 3)
    with pytest.raises(ValueError):
        winner_out(ses, [0, 1])


def test_winner_out_property_random_trials():
    rng = random.Random(2024)
    for _ in range(120):
        n = rng.randrange(6, 40)
        q = rng.choice([3, 4, 5])
        c = rng.choice([2, 3])
        if q > n:
            continue
        kind = rng.choice([QueryKind.MAJORITY, QueryKind.PLURALITY])
        colors = [rng.randrange(c) for _ in range(n)]
        ses = _session(colors, q, kind=kind, c=c,
                       policy=rng.choice(["first", "rotating", "greedy", "random:3"]))
        out = winner_out(ses, range(n), stop_on_no=True)
        if isinstance(out, Completed):
            top = largest_classes(ses.coloring, out.survivors)
            for b in set(range(n)) - out.survivors:
                assert colors[b] in top


# -- solve_small_nonminority --------------------------------------------------


def test_small_nonminority_basic():
    ses = _session([0, 0, 1], 3)
    got = solve_small_nonminority(ses, [0, 1, 2])
    assert got in {0, 1}


def test_small_nonminority_monochromatic():
    ses = _session([0] * 5, 3)
    got = solve_small_nonminority(ses, range(5))
    assert got in range(5)


def test_small_nonminority_balanced_four():
    # both classes have size 2 = |T|/2, so every ball qualifies; just check
    # the certificate holds for the hidden coloring
    colors = [0, 0, 1, 1]
    ses = _session(colors, 3)
    got = solve_small_nonminority(ses, range(4))
    assert sum(1 for c in colors if c == colors[got]) * 2 >= 4


def test_small_nonminority_verified_over_random_trials():
    rng = random.Random(99)
    for _ in range(60):
        n = rng.randrange(3, 13)
        colors = [rng.randrange(2) for _ in range(n)]
        ses = _session(colors, 3, c=2,
                       policy=rng.choice(["first", "rotating", "greedy", "random:1"]))
        got = solve_small_nonminority(ses, range(n))
        own = sum(1 for c in colors if c == colors[got])
        assert 2 * own >= n


def test_small_nonminority_cap():
    from ballgames.model import CapacityError

    ses = _session([0] * 30, 3)
    with pytest.raises(CapacityError):
        solve_small_nonminority(ses, range(25))


# -- find_opposite_k_sets ------------------------------------------------------


def test_opposite_pair_two_two():
    colors = [0, 0, 1, 1]
    ses = _session(colors, 3)
    A, B = find_opposite_k_sets(ses, range(4), 1)
    assert len(A) == len(B) == 1
    assert colors[A[0]] != colors[B[0]]


def test_opposite_pair_k2_exact_classes():
    colors = [0, 1, 0, 1]
    ses = _session(colors, 3)
    A, B = find_opposite_k_sets(ses, range(4), 2)
    assert {colors[a] for a in A} != {colors[b] for b in B}
    assert len({colors[a] for a in A}) == 1
    assert len({colors[b] for b in B}) == 1


def test_opposite_pair_monochromatic_fails():
    ses = _session([0, 0, 0, 0], 3)
    with pytest.raises(InferenceError):
        find_opposite_k_sets(ses, range(4), 1)


def test_opposite_pair_correct_for_hidden_over_balanced_trials():
    # the certificate presumes a balanced T; under that premise it must be
    # right for the hidden coloring, whatever the policy does
    rng = random.Random(5)
    for _ in range(40):
        n = rng.choice([4, 6, 8, 10])
        k = rng.choice([1, 2]) if n >= 6 else 1
        colors = [0] * (n // 2) + [1] * (n // 2)
        rng.shuffle(colors)
        ses = _session(colors, 3, c=2,
                       policy=rng.choice(["first", "rotating", "greedy", "random:8"]))
        try:
            A, B = find_opposite_k_sets(ses, range(n), k)
        except InferenceError:
            continue  # allowed: certification is not guaranteed, only soundness
        assert len({colors[a] for a in A}) == 1
        assert len({colors[b] for b in B}) == 1
        assert colors[A[0]] != colors[B[0]]


def test_opposite_pair_rejects_odd_sets():
    ses = _session([0, 0, 1, 1, 1], 3)
    with pytest.raises(ValueError):
        find_opposite_k_sets(ses, range(5), 1)


# -- ambiguous_median ----------------------------------------------------------


def test_median_single_item():
    assert ambiguous_median(lambda x, y: ComparisonOutcome.LE, [7]) == 7


def test_median_two_items_any_answer():
    for out in ComparisonOutcome:
        got = ambiguous_median(lambda x, y, o=out: o, [3, 4])
        assert got in {3, 4}


def _compare_from_colors(colors, rng):
    def compare(x, y):
        return rng.choice(valid_comparison_outcomes(colors[x], colors[y]))

    return compare


def test_median_randomized_adversary_trials():
    rng = random.Random(31)
    for _ in range(300):
        n = rng.randrange(1, 12)
        colors = [rng.randrange(2) for _ in range(n)]
        got = ambiguous_median(_compare_from_colors(colors, rng), list(range(n)))
        own = sum(1 for c in colors if c == colors[got])
        assert 2 * own >= n


def test_median_real_matches_color_model():
    # the exhaustive checker proves properties of the color-level mirror;
    # this pins the real implementation to that mirror, choice for choice
    rng = random.Random(77)
    for _ in range(200):
        n = rng.randrange(1, 11)
        colors = [rng.randrange(2) for _ in range(n)]
        seed = rng.randrange(10**9)

        r1 = random.Random(seed)
        calls = []

        def compare(x, y):
            valid = valid_comparison_outcomes(colors[x], colors[y])
            pick = valid[r1.randrange(len(valid))]
            calls.append(pick)
            return pick

        got = ambiguous_median(compare, list(range(n)))

        r2 = random.Random(seed)
        comps, out_color = simulate_median_colors(
            colors, lambda valid: valid[r2.randrange(len(valid))]
        )
        assert comps == len(calls)
        if out_color is None:
            assert colors.count(colors[got]) * 2 >= n
        else:
            assert colors[got] == out_color


def test_median_model_matches_branch_walker():
    # every (comparisons, final chain) pair reachable by the single-path
    # mirror equals the branch enumeration the exhaustive checker walks
    for n in range(1, 6):
        for colors in itertools.product([0, 1], repeat=n):

            def all_single_path_outcomes():
                results = set()

                def dfs(prefix):
                    it = iter(prefix)
                    need_more = []

                    def chooser(valid):
                        nxt = next(it, None)
                        if nxt is None:
                            need_more.append(len(valid))
                            raise StopIteration
                        return valid[nxt]

                    try:
                        results.add(simulate_median_colors(colors, chooser))
                    except (StopIteration, RuntimeError):
                        for i in range(need_more[0]):
                            dfs(prefix + [i])

                dfs([])
                return results

            def all_branch_outcomes():
                results = set()

                def walk(chain, i, comps):
                    if i == len(colors):
                        mid = None if not chain else chain[(len(chain) - 1) // 2]
                        results.add((comps, mid))
                        return
                    for extra, nxt in _ball_branches(chain, colors[i]):
                        walk(nxt, i + 1, comps + extra)

                walk((), 0, 0)
                return results

            assert all_single_path_outcomes() == all_branch_outcomes()
