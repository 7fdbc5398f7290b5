"""Oracles answering majority/plurality queries against a hidden coloring.

A query of size q is answered NO when no majority (resp. plurality) ball
exists in it; otherwise YES together with one ball of the winning class.
Which valid ball gets presented is the oracle's only freedom; presentation
policies fill it.  Algorithms must be correct for every policy.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .model import (
    Answer,
    GameConfig,
    HiddenColoring,
    Query,
    QueryError,
    QueryKind,
    Transcript,
)


class PresentationPolicy:
    """Rule for choosing which valid ball to present on a YES answer."""

    name = "abstract"

    def choose(self, valid: Sequence[int]) -> int:
        raise NotImplementedError

    def spec(self) -> str:
        return self.name


class FirstPolicy(PresentationPolicy):
    """Lowest ball id among the valid ones."""

    name = "first"

    def choose(self, valid: Sequence[int]) -> int:
        return valid[0]


class RotatingPolicy(PresentationPolicy):
    """Cycles through the valid class by id order across calls."""

    name = "rotating"

    def __init__(self) -> None:
        self._calls = 0

    def choose(self, valid: Sequence[int]) -> int:
        pick = valid[self._calls % len(valid)]
        self._calls += 1
        return pick


class GreedyRepeatPolicy(PresentationPolicy):
    """Prefers balls it has presented before, keeping new information low."""

    name = "greedy"

    def __init__(self) -> None:
        self._shown: set[int] = set()

    def choose(self, valid: Sequence[int]) -> int:
        for b in valid:
            if b in self._shown:
                self._shown.add(b)
                return b
        self._shown.add(valid[0])
        return valid[0]


class RandomSeededPolicy(PresentationPolicy):
    """Uniform choice over the valid class from a per-session generator."""

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    @property
    def name(self) -> str:  # type: ignore[override]
        return f"random:{self.seed}"

    def choose(self, valid: Sequence[int]) -> int:
        return valid[self._rng.randrange(len(valid))]


def make_policy(spec: str) -> PresentationPolicy:
    """Build a fresh policy from a spec string like "first" or "random:7"."""
    if spec == "first":
        return FirstPolicy()
    if spec == "rotating":
        return RotatingPolicy()
    if spec == "greedy":
        return GreedyRepeatPolicy()
    if spec.startswith("random:"):
        return RandomSeededPolicy(int(spec.split(":", 1)[1]))
    if spec == "random":
        return RandomSeededPolicy(0)
    raise ValueError(f"unknown policy spec {spec!r}")


def _winning_color(
    colors: Sequence[int], balls: tuple[int, ...], kind: QueryKind
) -> int | None:
    """Color of the majority/plurality class in `balls`, or None."""
    counts: dict[int, int] = {}
    for b in balls:
        c = colors[b]
        counts[c] = counts.get(c, 0) + 1
    best = -1
    win = -1
    tied = False
    for c, v in counts.items():
        if v > best:
            best, win, tied = v, c, False
        elif v == best:
            tied = True
    if kind is QueryKind.MAJORITY:
        return win if 2 * best > len(balls) else None
    return win if not tied else None


class OracleSession:
    """One game: a hidden coloring plus a policy, answering and recording.

    Sessions are single-threaded; every accepted query appends exactly one
    transcript row.  Malformed queries raise QueryError and are not
    recorded.
    """

    def __init__(
        self,
        config: GameConfig,
        coloring: HiddenColoring,
        policy: PresentationPolicy | None = None,
    ):
        if coloring.n != config.n:
            raise ValueError("coloring size does not match config.n")
        if len(coloring.distinct_colors()) > config.c:
            raise ValueError("coloring uses more colors than config.c")
        self.config = config
        self.coloring = coloring
        self.policy = policy if policy is not None else FirstPolicy()
        self.transcript = Transcript()
        self._colors = coloring.colors
        self._kind = config.query_kind
        # with two colors majority and plurality answers coincide, and the
        # winner falls out of a plain bit sum; this path carries the bulk
        # of the experiment load
        self._binary = max(coloring.colors) <= 1

    @property
    def query_count(self) -> int:
        return self.transcript.query_count

    def _validate(self, balls: tuple[int, ...]) -> None:
        if len(balls) != self.config.q:
            raise QueryError(f"query size {len(balls)} != q={self.config.q}")
        n = self.config.n
        prev = -1
        for b in balls:
            if b <= prev:
                raise QueryError("query balls must be distinct")
            prev = b
        if balls[-1] >= n or balls[0] < 0:
            raise QueryError("ball id out of range")

    def ask(self, balls: Iterable[int]) -> int | None:
        """Answer one query; returns the presented ball id or None for NO."""
        q = tuple(sorted(balls))
        self._validate(q)
        colors = self._colors
        if self._binary:
            ones = 0
            for b in q:
                ones += colors[b]
            qlen = len(q)
            if 2 * ones > qlen:
                win = 1
            elif 2 * (qlen - ones) > qlen:
                win = 0
            else:
                self.transcript.append(q, None)
                return None
        else:
            win = _winning_color(colors, q, self._kind)
            if win is None:
                self.transcript.append(q, None)
                return None
        valid = [b for b in q if colors[b] == win]
        pick = self.policy.choose(valid)
        self.transcript.append(q, pick)
        return pick

    def ask_query(self, query: Query) -> Answer:
        return Answer(self.ask(query.balls))


def answer_majority(session: OracleSession, query: Query) -> Answer:
    """Answer a majority query through the session (validates and records)."""
    if session.config.query_kind is not QueryKind.MAJORITY:
        raise QueryError("session is not configured for majority queries")
    return session.ask_query(query)


def answer_plurality(session: OracleSession, query: Query) -> Answer:
    if session.config.query_kind is not QueryKind.PLURALITY:
        raise QueryError("session is not configured for plurality queries")
    return session.ask_query(query)


def enumerate_valid_answers(
    coloring: HiddenColoring, query: Query | Iterable[int], kind: QueryKind
) -> frozenset[Answer]:
    """The exact set of answers the definition permits for this query."""
    balls = query.balls if isinstance(query, Query) else tuple(sorted(query))
    win = _winning_color(coloring.colors, balls, kind)
    if win is None:
        return frozenset({Answer(None)})
    return frozenset(Answer(b) for b in balls if coloring.colors[b] == win)


class ScriptedSession:
    """Session stand-in replaying recorded answers; used by replay bundles.

    Feeds back the recorded answer for each query and insists the query
    sequence matches the recording, so a replayed solver run is exact.
    """

    def __init__(self, config: GameConfig, rows: Sequence[tuple[tuple[int, ...], int | None]]):
        self.config = config
        self._rows = rows
        self.transcript = Transcript()

    @property
    def query_count(self) -> int:
        return self.transcript.query_count

    def ask(self, balls: Iterable[int]) -> int | None:
        q = tuple(sorted(balls))
        idx = self.transcript.query_count
        if idx >= len(self._rows):
            raise QueryError("replay script exhausted")
        rec_q, rec_a = self._rows[idx]
        if tuple(rec_q) != q:
            raise QueryError(
                f"replay diverged at step {idx}: asked {q}, recorded {tuple(rec_q)}"
            )
        self.transcript.append(q, rec_a)
        return rec_a
