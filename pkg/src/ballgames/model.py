"""Ground-truth data model: balls, colorings, queries, transcripts.

Balls and colors are dense small integers.  The hidden coloring is known
only to the oracle and the verifier; solvers see ball identities, never
colors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class QueryKind(enum.Enum):
    MAJORITY = "majority"
    PLURALITY = "plurality"


class Target(enum.Enum):
    NON_MINORITY = "nonminority"
    ALMOST_PLURALITY = "almostplurality"


class GameError(Exception):
    """Base error for contract violations in a game."""


class QueryError(GameError):
    """Malformed query: wrong size, duplicate or out-of-range balls."""


class CapacityError(GameError):
    """An enumeration-backed operation was asked to exceed its cap."""


@dataclass(frozen=True)
class GameConfig:
    """Instance parameters: n balls, queries of size q, at most c colors."""

    n: int
    q: int
    c: int
    query_kind: QueryKind = QueryKind.MAJORITY
    target: Target = Target.NON_MINORITY

    def __post_init__(self) -> None:
        if not (self.n >= self.q >= 2):
            raise ValueError(f"need n >= q >= 2, got n={self.n} q={self.q}")
        if self.c < 2:
            raise ValueError(f"need c >= 2, got c={self.c}")

    @property
    def k(self) -> int:
        return self.q // 2

    @property
    def q_odd(self) -> bool:
        return self.q % 2 == 1


@dataclass(frozen=True)
class AlgorithmParams:
    """Tunables for the solvers.

    m is the number of WINNER-OUT rounds in the odd/2-color solver; None
    means the proof value 8*k^4, reduced so the survivor union fits under
    small_set_cap (the bound for consistency enumeration).
    """

    m: int | None = None
    small_set_cap: int = 20
    n0_override: int | None = None
    k_budget: float | None = None

    def __post_init__(self) -> None:
        if self.m is not None and self.m < 1:
            raise ValueError("m must be >= 1")

    def resolve_m(self, k: int) -> int:
        if self.m is not None:
            return self.m
        proof = 8 * k**4
        if 2 * k * proof <= self.small_set_cap:
            return proof
        return max(2, self.small_set_cap // (2 * k))


class HiddenColoring:
    """Assignment of one color to each of n balls."""

    __slots__ = ("colors",)

    def __init__(self, colors: Sequence[int]):
        if not colors:
            raise ValueError("coloring must cover at least one ball")
        if any(c < 0 for c in colors):
            raise ValueError("colors are nonnegative integers")
        self.colors = tuple(colors)

    @property
    def n(self) -> int:
        return len(self.colors)

    def color_of(self, ball: int) -> int:
        return self.colors[ball]

    def distinct_colors(self) -> set[int]:
        return set(self.colors)

    def class_size(self, color: int, subset: Iterable[int] | None = None) -> int:
        if subset is None:
            return sum(1 for c in self.colors if c == color)
        return sum(1 for b in subset if self.colors[b] == color)

    def class_counts(self, subset: Iterable[int] | None = None) -> dict[int, int]:
        counts: dict[int, int] = {}
        balls = range(self.n) if subset is None else subset
        for b in balls:
            c = self.colors[b]
            counts[c] = counts.get(c, 0) + 1
        return counts

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HiddenColoring) and self.colors == other.colors

    def __hash__(self) -> int:
        return hash(self.colors)

    def __repr__(self) -> str:
        return f"HiddenColoring({list(self.colors)!r})"


@dataclass(frozen=True)
class Query:
    """A size-q set of balls submitted to the oracle."""

    balls: tuple[int, ...]

    @staticmethod
    def of(balls: Iterable[int]) -> "Query":
        return Query(tuple(sorted(balls)))


@dataclass(frozen=True)
class Answer:
    """Oracle reply: NO, or YES plus one presented ball from the query."""

    presented: int | None

    @property
    def is_yes(self) -> bool:
        return self.presented is not None


NO_ANSWER = Answer(None)


class Transcript:
    """Append-only record of (query, answer) pairs in ask order.

    Rows are stored raw as (sorted ball tuple, presented-or-None) to keep
    the oracle hot path cheap; `entries` materializes the dataclasses.
    """

    __slots__ = ("rows",)

    def __init__(self) -> None:
        self.rows: list[tuple[tuple[int, ...], int | None]] = []

    @property
    def query_count(self) -> int:
        return len(self.rows)

    def append(self, balls: tuple[int, ...], presented: int | None) -> None:
        self.rows.append((balls, presented))

    def entries(self) -> Iterator[tuple[Query, Answer]]:
        for balls, presented in self.rows:
            yield Query(balls), Answer(presented)

    def rows_within(
        self, balls: Iterable[int], start: int = 0
    ) -> list[tuple[tuple[int, ...], int | None]]:
        """Rows from index `start` on whose query lies entirely in `balls`."""
        allowed = set(balls)
        out = []
        for row in self.rows[start:]:
            query = row[0]
            if all(b in allowed for b in query):
                out.append(row)
        return out


@dataclass(frozen=True)
class BallStatus:
    majority: bool
    non_minority: bool
    plurality: bool
    almost_plurality: bool


def classify_ball(
    coloring: HiddenColoring, subset: Iterable[int], ball: int
) -> BallStatus:
    """Exact status of `ball` within `subset` by counting color classes."""
    members = list(subset)
    if ball not in members:
        raise ValueError(f"ball {ball} not in subset")
    counts = coloring.class_counts(members)
    size = len(members)
    own = counts[coloring.color_of(ball)]
    best_other = max(
        (v for c, v in counts.items() if c != coloring.color_of(ball)), default=0
    )
    majority = 2 * own > size
    non_minority = 2 * own >= size
    plurality = own > best_other
    return BallStatus(
        majority=majority,
        non_minority=non_minority,
        plurality=plurality,
        almost_plurality=plurality or non_minority,
    )


def largest_classes(coloring: HiddenColoring, subset: Iterable[int]) -> set[int]:
    """Colors whose class size within `subset` attains the maximum."""
    counts = coloring.class_counts(list(subset))
    if not counts:
        raise ValueError("subset must be non-empty")
    top = max(counts.values())
    return {c for c, v in counts.items() if v == top}


def target_satisfied(status: BallStatus, target: Target) -> bool:
    if target is Target.NON_MINORITY:
        return status.non_minority
    return status.almost_plurality


def load_coloring(text: str) -> tuple[HiddenColoring, int]:
    """Parse the coloring file format: n, c, then n color ids."""
    fields = text.split()
    if len(fields) < 2:
        raise ValueError("coloring file needs at least n and c")
    n, c = int(fields[0]), int(fields[1])
    colors = [int(f) for f in fields[2:]]
    if len(colors) != n:
        raise ValueError(f"expected {n} colors, got {len(colors)}")
    coloring = HiddenColoring(colors)
    if len(coloring.distinct_colors()) > c:
        raise ValueError("coloring uses more than c colors")
    return coloring, c


def dump_coloring(coloring: HiddenColoring, c: int) -> str:
    head = f"{coloring.n} {c}\n"
    return head + " ".join(str(x) for x in coloring.colors) + "\n"


def floor_half(n: int) -> int:
    return n // 2


def ceil_half(n: int) -> int:
    return math.ceil(n / 2)
