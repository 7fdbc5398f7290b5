"""Verification against hidden colorings, adversary exploration, and
experiment grids with query counting.

The verifier is the safety net: solvers may run on silently violated
assumptions, so every claim is checked here against the ground truth, and
every recorded answer is re-validated against the query semantics.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .algorithms import (
    FOUND,
    NONE_EXISTS,
    UNKNOWN,
    AlgorithmParams,
    FallbackMachine,
    SolveResult,
    brute_force_fallback,
    fallback_feasible,
    mb_even_c_colors,
    mb_odd_c_colors,
    mb_odd_two_colors,
    operative_threshold,
    plurality_solve,
    route_solver,
)
from .consistency import (
    CapacityError,
    count_canonical_colorings,
    enumerate_canonical_colorings,
    filter_by_answer,
    target_ball_flags,
)
from .model import (
    GameConfig,
    HiddenColoring,
    QueryKind,
    Target,
    Transcript,
    classify_ball,
    dump_coloring,
    load_coloring,
    target_satisfied,
)
from .oracle import (
    OracleSession,
    ScriptedSession,
    enumerate_valid_answers,
    make_policy,
)
from .toolkit import ComparisonOutcome

_SOLVER_FUNCS: dict[str, Callable[..., SolveResult]] = {
    "mb_odd_two_colors": mb_odd_two_colors,
    "mb_odd_c_colors": mb_odd_c_colors,
    "mb_even_c_colors": mb_even_c_colors,
    "plurality_solve": plurality_solve,
}


@dataclass(frozen=True)
class Verdict:
    correct: bool
    claim_checked: str
    queries_used: int
    detail: str


def revalidate_transcript(
    coloring: HiddenColoring, config: GameConfig, transcript: Transcript
) -> int | None:
    """Index of the first transcript row whose answer falls outside the
    valid answer set, or None when every answer checks out."""
    rows = transcript.rows
    if not rows:
        return None
    q = config.q
    queries = np.array([r[0] for r in rows], dtype=np.int64)
    presented = np.array([-1 if r[1] is None else r[1] for r in rows], dtype=np.int64)
    colors = np.array(coloring.colors, dtype=np.int64)
    sub = colors[queries]  # (N, q)
    c = config.c
    counts = np.empty((len(rows), c), dtype=np.int32)
    for col in range(c):
        counts[:, col] = (sub == col).sum(axis=1)
    mx = counts.max(axis=1)
    is_no = presented < 0
    if config.query_kind is QueryKind.MAJORITY:
        no_ok = 2 * mx <= q
    else:
        no_ok = (counts == mx[:, None]).sum(axis=1) >= 2
    own = counts[np.arange(len(rows)), colors[np.where(is_no, queries[:, 0], presented)]]
    if config.query_kind is QueryKind.MAJORITY:
        yes_ok = 2 * own > q
    else:
        yes_ok = (own == mx) & ((counts == mx[:, None]).sum(axis=1) == 1)
    ok = np.where(is_no, no_ok, yes_ok)
    # a presented ball must also belong to the query
    in_query = (queries == presented[:, None]).any(axis=1) | is_no
    ok &= in_query
    if ok.all():
        return None
    return int(np.argmin(ok))


def _unknown_legitimate(
    coloring: HiddenColoring,
    config: GameConfig,
    transcript: Transcript,
    params: AlgorithmParams,
) -> tuple[bool, str]:
    if config.n >= operative_threshold(config, params):
        return False, "unknown above the operative threshold"
    if count_canonical_colorings(config.n, config.c) > (1 << 21):
        return True, "below threshold; indeterminacy check skipped (too large)"
    colorings = enumerate_canonical_colorings(config.n, config.c)
    for query, presented in transcript.rows:
        colorings = filter_by_answer(
            colorings, config.c, query, presented, config.query_kind
        )
    flags = target_ball_flags(colorings, config.c, config.target)
    if flags.all(axis=0).any():
        return False, "a ball was certifiable but the solver said unknown"
    if not flags.any():
        return False, "absence was certifiable but the solver said unknown"
    return True, "indeterminacy confirmed by consistency enumeration"


def verify(
    coloring: HiddenColoring,
    config: GameConfig,
    result: SolveResult,
    transcript: Transcript,
    params: AlgorithmParams | None = None,
) -> Verdict:
    """Check a solver's claim against the hidden coloring and re-validate
    every recorded oracle answer."""
    params = params or AlgorithmParams()
    queries = transcript.query_count
    bad = revalidate_transcript(coloring, config, transcript)
    if bad is not None:
        return Verdict(False, result.kind, queries, f"invalid oracle answer at row {bad}")
    everything = range(config.n)
    if result.kind == FOUND:
        assert result.ball is not None and result.claim is not None
        status = classify_ball(coloring, everything, result.ball)
        ok = target_satisfied(status, result.claim)
        detail = "" if ok else f"ball {result.ball} fails {result.claim.value}"
        return Verdict(ok, result.claim.value, queries, detail)
    if result.kind == NONE_EXISTS:
        offender = next(
            (
                b
                for b in everything
                if target_satisfied(classify_ball(coloring, everything, b), config.target)
            ),
            None,
        )
        ok = offender is None
        detail = "" if ok else f"ball {offender} satisfies the target"
        return Verdict(ok, NONE_EXISTS, queries, detail)
    ok, detail = _unknown_legitimate(coloring, config, transcript, params)
    return Verdict(ok, UNKNOWN, queries, detail)


# -- coloring generators -----------------------------------------------------

PLANTED_SHAPES = ("mono", "half", "tied", "huge", "singletons")


def planted_coloring(shape: str, n: int, c: int, seed: int = 0) -> HiddenColoring:
    """Adversarial shapes the proofs care about: monochromatic input, an
    exact even split, all classes tied, one dominant class, and a big
    class beside c-1 singletons."""
    rng = random.Random(f"planted:{shape}:{n}:{c}:{seed}")
    if shape == "mono":
        colors = [0] * n
    elif shape == "half":
        colors = [0] * math.ceil(n / 2) + [1] * (n // 2)
    elif shape == "tied":
        a = math.ceil(n / 3) if c >= 3 else n // 2
        if c >= 3:
            colors = [0] * a + [1] * a + [2] * (n - 2 * a)
        else:
            colors = [0] * a + [1] * (n - a)
    elif shape == "huge":
        big = 3 * n // 4
        colors = [0] * big + [1 + i % (c - 1) for i in range(n - big)]
    elif shape == "singletons":
        colors = [0] * (n - (c - 1)) + list(range(1, c))
    else:
        raise ValueError(f"unknown planted shape {shape!r}")
    rng.shuffle(colors)
    return HiddenColoring(colors)


def random_coloring(n: int, c: int, rng: random.Random) -> HiddenColoring:
    return HiddenColoring([rng.randrange(c) for _ in range(n)])


def trial_coloring(trial: int, n: int, c: int, seed: int, planted: int = 3) -> HiddenColoring:
    """Trials below `planted` get adversarial shapes, the rest are uniform."""
    if trial < planted:
        shape = PLANTED_SHAPES[trial % len(PLANTED_SHAPES)]
        return planted_coloring(shape, n, c, seed * 1009 + trial)
    return random_coloring(n, c, random.Random(f"uniform:{seed}:{trial}:{n}:{c}"))


# -- experiments -------------------------------------------------------------

CSV_HEADER = "run_id,algorithm,n,q,c,query_kind,policy,seed,queries,outcome,verified"


@dataclass(frozen=True)
class ExperimentRecord:
    run_id: str
    algorithm: str
    n: int
    q: int
    c: int
    query_kind: str
    policy: str
    seed: int
    queries: int
    outcome: str
    verified: bool

    def csv_row(self) -> str:
        return ",".join(
            [
                self.run_id,
                self.algorithm,
                str(self.n),
                str(self.q),
                str(self.c),
                self.query_kind,
                self.policy,
                str(self.seed),
                str(self.queries),
                self.outcome,
                "true" if self.verified else "false",
            ]
        )


def run_single(
    config: GameConfig,
    coloring: HiddenColoring,
    policy_spec: str,
    params: AlgorithmParams | None = None,
) -> tuple[SolveResult, Verdict, OracleSession, str]:
    params = params or AlgorithmParams()
    session = OracleSession(config, coloring, make_policy(policy_spec))
    name = route_solver(config, params)
    if name == "brute_force_fallback":
        result = brute_force_fallback(session, params)
    else:
        result = _SOLVER_FUNCS[name](session, params)
    verdict = verify(coloring, config, result, session.transcript, params)
    return result, verdict, session, name


def run_experiment(
    grid: Sequence[GameConfig],
    trials: int,
    policies: Sequence[str],
    seed: int,
    params: AlgorithmParams | None = None,
    csv_path: str | Path | None = None,
    bundle_dir: str | Path | None = None,
    planted: int = 3,
    cross_policies: bool = True,
) -> list[ExperimentRecord]:
    """Deterministic experiment sweep: every (config, trial, policy) makes
    one verified record.  With cross_policies=False the policies rotate
    over trials instead of multiplying them."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    params = params or AlgorithmParams()
    records: list[ExperimentRecord] = []
    idx = 0
    for cfg in grid:
        for trial in range(trials):
            coloring = trial_coloring(trial, cfg.n, cfg.c, seed, planted)
            if cross_policies:
                chosen = list(policies)
            else:
                chosen = [policies[trial % len(policies)]]
            for pol in chosen:
                result, verdict, session, name = run_single(cfg, coloring, pol, params)
                rec = ExperimentRecord(
                    run_id=f"{idx:06d}",
                    algorithm=name,
                    n=cfg.n,
                    q=cfg.q,
                    c=cfg.c,
                    query_kind=cfg.query_kind.value,
                    policy=pol,
                    seed=seed,
                    queries=verdict.queries_used,
                    outcome=result.kind,
                    verified=verdict.correct,
                )
                records.append(rec)
                idx += 1
                if not verdict.correct and bundle_dir is not None:
                    write_replay_bundle(
                        Path(bundle_dir) / f"fail-{rec.run_id}.json",
                        cfg,
                        coloring,
                        pol,
                        seed,
                        name,
                        result,
                        session.transcript,
                    )
    records.sort(key=lambda r: r.run_id)
    if csv_path is not None:
        write_csv(records, csv_path)
    return records


def write_csv(records: Iterable[ExperimentRecord], path: str | Path) -> None:
    lines = [CSV_HEADER] + [r.csv_row() for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


# -- replay bundles ----------------------------------------------------------


def write_replay_bundle(
    path: str | Path,
    config: GameConfig,
    coloring: HiddenColoring,
    policy: str,
    seed: int,
    algorithm: str,
    result: SolveResult,
    transcript: Transcript,
) -> None:
    payload = {
        "config": {
            "n": config.n,
            "q": config.q,
            "c": config.c,
            "query_kind": config.query_kind.value,
            "target": config.target.value,
        },
        "policy": policy,
        "seed": seed,
        "algorithm": algorithm,
        "outcome": result.kind,
        "ball": result.ball,
        "coloring": dump_coloring(coloring, config.c),
        "transcript": [
            [list(balls), presented] for balls, presented in transcript.rows
        ],
    }
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(payload, indent=1))


def replay_bundle(path: str | Path) -> tuple[SolveResult, Verdict]:
    """Re-drive the recorded solver with the recorded answers and verify
    the reproduced claim against the recorded coloring."""
    payload = json.loads(Path(path).read_text())
    cfg = GameConfig(
        n=payload["config"]["n"],
        q=payload["config"]["q"],
        c=payload["config"]["c"],
        query_kind=QueryKind(payload["config"]["query_kind"]),
        target=Target(payload["config"]["target"]),
    )
    coloring, _ = load_coloring(payload["coloring"])
    rows = [(tuple(balls), presented) for balls, presented in payload["transcript"]]
    session = ScriptedSession(cfg, rows)
    name = payload["algorithm"]
    if name == "brute_force_fallback":
        result = FallbackMachine(cfg).run(session)  # type: ignore[arg-type]
    else:
        result = _SOLVER_FUNCS[name](session)  # type: ignore[arg-type]
    verdict = verify(coloring, cfg, result, session.transcript)
    return result, verdict


# -- exhaustive adversary checks ----------------------------------------------


def _canonical_coloring_tuples(n: int, c: int) -> list[tuple[int, ...]]:
    return [tuple(row) for row in enumerate_canonical_colorings(n, c)]


def exhaustive_oracle_check(config: GameConfig) -> bool:
    """Every policy-emitted answer sits in the valid answer set, and the
    valid set itself matches a direct count over the definition."""
    if config.n > 7:
        raise CapacityError("oracle exactness scan is capped at n <= 7")
    n, q, c = config.n, config.q, config.c
    for colors in _canonical_coloring_tuples(n, c):
        coloring = HiddenColoring(colors)
        for balls in itertools.combinations(range(n), q):
            valid = enumerate_valid_answers(coloring, balls, config.query_kind)
            counts: dict[int, int] = {}
            for b in balls:
                counts[colors[b]] = counts.get(colors[b], 0) + 1
            top = max(counts.values())
            if config.query_kind is QueryKind.MAJORITY:
                winner = top * 2 > q
            else:
                winner = sum(1 for v in counts.values() if v == top) == 1
            expected_no = not winner
            got_no = any(a.presented is None for a in valid)
            if expected_no != got_no or (expected_no and len(valid) != 1):
                return False
            if winner:
                expect = {
                    b for b in balls if counts[colors[b]] == top
                }
                if {a.presented for a in valid} != expect:
                    return False
            for spec in ("first", "rotating", "greedy", "random:3", "random:11"):
                session = OracleSession(config, coloring, make_policy(spec))
                got = session.ask(balls)
                if got not in {a.presented for a in valid}:
                    return False
    return True


def exhaustive_fallback_check(config: GameConfig) -> bool:
    """Walk every coloring and every valid answer branch of the fallback
    machine; Found/NoneExists must be right for the hidden coloring and
    Unknown must only appear at genuine indeterminacy."""
    if config.n > 8:
        raise CapacityError("fallback adversary walk is capped at n <= 8")
    everything = range(config.n)
    for colors in _canonical_coloring_tuples(config.n, config.c):
        coloring = HiddenColoring(colors)
        truth_ball = {
            b: target_satisfied(
                classify_ball(coloring, everything, b), config.target
            )
            for b in everything
        }
        any_target = any(truth_ball.values())
        memo: dict[tuple, bool] = {}

        def walk(machine: FallbackMachine) -> bool:
            verdict = machine.verdict()
            if verdict is not None:
                if verdict.kind == FOUND:
                    return truth_ball[verdict.ball]
                if verdict.kind == NONE_EXISTS:
                    return not any_target
                return True
            query = machine.next_query()
            if query is None:
                # exhausted: Unknown; legitimate since neither side certified
                return True
            for answer in sorted(
                enumerate_valid_answers(coloring, query, config.query_kind),
                key=lambda a: (-2 if a.presented is None else a.presented),
            ):
                child = machine.copy()
                child.feed(query, answer.presented)
                key = child.state_key()
                got = memo.get(key)
                if got is None:
                    got = walk(child)
                    memo[key] = got
                if not got:
                    return False
            return True

        if not walk(FallbackMachine(config)):
            return False
    return True


# -- median adversary: color-level mirror of ambiguous_median -----------------

_LE = ComparisonOutcome.LE
_GE = ComparisonOutcome.GE
_NEQ = ComparisonOutcome.NEQ


def valid_comparison_outcomes(a: int, b: int) -> tuple[ComparisonOutcome, ...]:
    """True statements available to the adversary about colors (a, b)."""
    if a == b:
        return (_LE, _GE)
    if a < b:
        return (_LE, _NEQ)
    return (_GE, _NEQ)


def simulate_median_colors(
    colors: Sequence[int],
    chooser: Callable[[tuple[ComparisonOutcome, ...]], ComparisonOutcome],
) -> tuple[int, int | None]:
    """Single-path color-level mirror of ambiguous_median; returns the
    comparison count and the output color (None = empty chain)."""
    chain: list[int] = []
    comps = 0
    for b in colors:
        if not chain:
            chain.append(b)
            continue
        out = chooser(valid_comparison_outcomes(chain[-1], b))
        comps += 1
        if out is _NEQ:
            chain.pop()
        elif out is _LE:
            chain.append(b)
        else:
            lo, hi = -1, len(chain) - 1
            spliced = False
            while hi - lo > 1:
                mid = (lo + hi) // 2
                out2 = chooser(valid_comparison_outcomes(chain[mid], b))
                comps += 1
                if out2 is _LE:
                    lo = mid
                elif out2 is _GE:
                    hi = mid
                else:
                    chain.pop(mid)
                    spliced = True
                    break
            if not spliced:
                chain.insert(hi, b)
    if not chain:
        return comps, None
    return comps, chain[(len(chain) - 1) // 2]


def _bsearch_branches(
    chain: tuple[int, ...], b: int, lo: int, hi: int
) -> list[tuple[int, tuple[int, ...]]]:
    if hi - lo <= 1:
        return [(0, chain[:hi] + (b,) + chain[hi:])]
    mid = (lo + hi) // 2
    out: list[tuple[int, tuple[int, ...]]] = []
    for o in valid_comparison_outcomes(chain[mid], b):
        if o is _LE:
            out.extend((c + 1, ch) for c, ch in _bsearch_branches(chain, b, mid, hi))
        elif o is _GE:
            out.extend((c + 1, ch) for c, ch in _bsearch_branches(chain, b, lo, mid))
        else:
            out.append((1, chain[:mid] + chain[mid + 1 :]))
    return out


def _ball_branches(chain: tuple[int, ...], b: int) -> list[tuple[int, tuple[int, ...]]]:
    """All (comparisons, next chain) continuations for one new ball."""
    if not chain:
        return [(0, (b,))]
    out: list[tuple[int, tuple[int, ...]]] = []
    for o in valid_comparison_outcomes(chain[-1], b):
        if o is _NEQ:
            out.append((1, chain[:-1]))
        elif o is _LE:
            out.append((1, chain + (b,)))
        else:
            out.extend(
                (c + 1, ch) for c, ch in _bsearch_branches(chain, b, -1, len(chain) - 1)
            )
    return out


def exhaustive_median_check(u_size: int) -> tuple[bool, int]:
    """All color splits, all arrival orders, all adversary choices: the
    output color class must cover at least half, within the comparison
    budget.  Returns (ok, worst comparisons seen)."""
    if u_size > 9:
        raise CapacityError("median adversary walk is capped at |U| <= 9")
    if u_size < 1:
        raise ValueError("u_size must be >= 1")
    worst = 0
    ok = True
    for n1 in range(u_size + 1):
        n0 = u_size - n1
        memo: dict[tuple, tuple[int, bool]] = {}

        def explore(chain: tuple[int, ...], r0: int, r1: int) -> tuple[int, bool]:
            key = (chain, r0, r1)
            hit = memo.get(key)
            if hit is not None:
                return hit
            if r0 == 0 and r1 == 0:
                if not chain:
                    res = (0, True)
                else:
                    mid = chain[(len(chain) - 1) // 2]
                    cls = n0 if mid == 0 else n1
                    res = (0, 2 * cls >= u_size)
            else:
                deep = 0
                fine = True
                for b, nr0, nr1 in ((0, r0 - 1, r1), (1, r0, r1 - 1)):
                    if (b == 0 and r0 == 0) or (b == 1 and r1 == 0):
                        continue
                    for comps, ch in _ball_branches(chain, b):
                        sub_c, sub_ok = explore(ch, nr0, nr1)
                        deep = max(deep, comps + sub_c)
                        fine = fine and sub_ok
                res = (deep, fine)
            memo[key] = res
            return res

        comps, good = explore((), n0, n1)
        worst = max(worst, comps)
        ok = ok and good
    bound = u_size * (2 + math.ceil(math.log2(u_size)) if u_size > 1 else 2)
    return ok and worst <= bound, worst


def exhaustive_adversary_check(
    config: GameConfig | None = None,
    component: str = "fallback",
    u_size: int | None = None,
) -> bool:
    """Dispatch for the exhaustive checks: full answer-branch backtracking
    for the fallback solver, the all-splits median walk, or the oracle
    exactness scan."""
    if component == "median":
        if u_size is None:
            raise ValueError("median check needs u_size")
        ok, _ = exhaustive_median_check(u_size)
        return ok
    if config is None:
        raise ValueError(f"{component} check needs a config")
    if component == "fallback":
        return exhaustive_fallback_check(config)
    if component == "oracle":
        return exhaustive_oracle_check(config)
    raise ValueError(f"unknown component {component!r}")
