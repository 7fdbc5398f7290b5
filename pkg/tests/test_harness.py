import json
import random
from pathlib import Path

import pytest

from ballgames.algorithms import SolveResult
from ballgames.harness import (
    CSV_HEADER,
    ExperimentRecord,
    exhaustive_adversary_check,
    planted_coloring,
    replay_bundle,
    run_experiment,
    run_single,
    trial_coloring,
    verify,
    write_replay_bundle,
)
from ballgames.model import (
    GameConfig,
    HiddenColoring,
    QueryKind,
    Target,
    Transcript,
)
from ballgames.oracle import OracleSession, make_policy


def test_verify_found_claims():
    cfg = GameConfig(n=4, q=3, c=2)
    col = HiddenColoring([0, 0, 1, 1])
    t = Transcript()
    good = verify(col, cfg, SolveResult.found(0, Target.NON_MINORITY), t)
    assert good.correct  # class of ball 0 has size n/2
    cfg3 = GameConfig(n=4, q=3, c=3)
    col3 = HiddenColoring([0, 1, 1, 2])
    bad = verify(col3, cfg3, SolveResult.found(0, Target.NON_MINORITY), t)
    assert not bad.correct


def test_verify_none_exists():
    cfg = GameConfig(n=6, q=3, c=3, target=Target.ALMOST_PLURALITY)
    col = HiddenColoring([0, 0, 1, 1, 2, 2])
    t = Transcript()
    v = verify(col, cfg, SolveResult.none_exists({}), t)
    assert v.correct
    col2 = HiddenColoring([0, 0, 0, 1, 1, 2])
    v2 = verify(col2, cfg, SolveResult.none_exists({}), t)
    assert not v2.correct


def test_verify_rejects_invalid_transcript_row():
    cfg = GameConfig(n=4, q=3, c=2)
    col = HiddenColoring([0, 0, 1, 1])
    t = Transcript()
    t.append((0, 1, 2), 2)  # ball 2 is in the minority of this query
    v = verify(col, cfg, SolveResult.found(0, Target.NON_MINORITY), t)
    assert not v.correct and "row 0" in v.detail


def test_verify_unknown_legitimacy():
    # below threshold and genuinely ambiguous: unknown is legitimate
    cfg = GameConfig(n=9, q=3, c=3)
    col = HiddenColoring([0, 1, 2] * 3)
    ses = OracleSession(cfg, col, make_policy("first"))
    from ballgames.algorithms import brute_force_fallback

    res = brute_force_fallback(ses)
    v = verify(col, cfg, res, ses.transcript)
    assert v.correct

    # unknown at comfortable size is never legitimate
    cfg_big = GameConfig(n=500, q=3, c=2)
    col_big = HiddenColoring([0] * 500)
    v2 = verify(col_big, cfg_big, SolveResult.unknown(), Transcript())
    assert not v2.correct


def test_planted_shapes():
    mono = planted_coloring("mono", 30, 3)
    assert len(mono.distinct_colors()) == 1
    half = planted_coloring("half", 30, 2)
    assert half.class_size(0) == 15 and half.class_size(1) == 15
    tied = planted_coloring("tied", 30, 3)
    counts = sorted(tied.class_counts().values())
    assert counts[-1] == counts[-2]
    huge = planted_coloring("huge", 40, 3)
    assert max(huge.class_counts().values()) >= 30
    single = planted_coloring("singletons", 30, 3)
    assert sorted(single.class_counts().values()) == [1, 1, 28]
    with pytest.raises(ValueError):
        planted_coloring("nope", 10, 2)


def test_trial_coloring_planted_prefix_then_uniform():
    a = trial_coloring(0, 40, 2, seed=7)
    assert len(a.distinct_colors()) == 1  # first planted shape is mono
    b = trial_coloring(25, 40, 2, seed=7)
    c = trial_coloring(25, 40, 2, seed=7)
    assert b == c
    d = trial_coloring(26, 40, 2, seed=7)
    assert b != d


def test_run_experiment_counts_and_determinism(tmp_path):
    grid = [GameConfig(n=60, q=3, c=2), GameConfig(n=60, q=2, c=2)]
    p1 = tmp_path / "one.csv"
    p2 = tmp_path / "two.csv"
    recs = run_experiment(grid, 5, ["first", "greedy"], seed=3, csv_path=p1)
    assert len(recs) == 2 * 5 * 2
    assert all(r.verified for r in recs)
    run_experiment(grid, 5, ["first", "greedy"], seed=3, csv_path=p2)
    assert p1.read_bytes() == p2.read_bytes()
    text = p1.read_text().splitlines()
    assert text[0] == CSV_HEADER
    assert len(text) == len(recs) + 1


def test_run_experiment_policy_rotation():
    grid = [GameConfig(n=60, q=3, c=2)]
    recs = run_experiment(grid, 4, ["first", "greedy"], seed=3, cross_policies=False)
    assert [r.policy for r in recs] == ["first", "greedy", "first", "greedy"]


def test_replay_bundle_roundtrip(tmp_path):
    cfg = GameConfig(n=90, q=3, c=2)
    col = planted_coloring("half", 90, 2, seed=1)
    result, verdict, session, name = run_single(cfg, col, "rotating")
    path = tmp_path / "bundle.json"
    write_replay_bundle(path, cfg, col, "rotating", 1, name, result, session.transcript)
    replayed, v = replay_bundle(path)
    assert replayed == result
    assert v.correct == verdict.correct
    payload = json.loads(path.read_text())
    assert payload["algorithm"] == "mb_odd_two_colors"


def test_adversary_check_dispatch():
    assert exhaustive_adversary_check(component="median", u_size=5)
    cfg = GameConfig(n=4, q=3, c=2)
    assert exhaustive_adversary_check(cfg, component="fallback")
    assert exhaustive_adversary_check(cfg, component="oracle")
    with pytest.raises(ValueError):
        exhaustive_adversary_check(cfg, component="nope")
    from ballgames.model import CapacityError

    with pytest.raises(CapacityError):
        exhaustive_adversary_check(component="median", u_size=10)


def test_cli_solve_and_replay(tmp_path, capsys):
    from ballgames.cli import main

    coloring_file = tmp_path / "col.txt"
    coloring_file.write_text("6 2\n0 0 0 1 1 0\n")
    rc = main(
        [
            "solve",
            "--n", "6", "--q", "3", "--c", "2",
            "--coloring", f"file:{coloring_file}",
            "--policy", "first",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0 and "verified:  True" in out

    csv_path = tmp_path / "r.csv"
    rc = main(
        [
            "experiment",
            "--n", "64", "--q", "3", "--c", "2",
            "--trials", "4", "--policy", "first,greedy",
            "--csv", str(csv_path), "--seed", "5",
        ]
    )
    assert rc == 0
    assert csv_path.read_text().splitlines()[0] == CSV_HEADER

    rc = main(["adversary-check", "--component", "median", "--u-size", "6"])
    assert rc == 0
