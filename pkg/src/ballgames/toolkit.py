"""Subroutines shared by the solvers.

Algorithm WINNER-OUT (slide a query through the pool, replacing each
presented ball with a fresh one), small-set inference backed by
consistency enumeration, and median finding under ambiguous pairwise
comparisons.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .consistency import ConsistencyTable
from .model import CapacityError, GameError
from .oracle import OracleSession


class InferenceError(GameError):
    """Certified inference was impossible within budget; an upstream
    assumption (balancedness, color count) is likely violated."""


@dataclass(frozen=True)
class Completed:
    """WINNER-OUT used the whole pool with only YES answers."""

    survivors: frozenset[int]
    answer_balls: tuple[int, ...]


@dataclass(frozen=True)
class HaltedAtNo:
    """WINNER-OUT hit a NO; carries the NO query and its predecessor."""

    no_query: tuple[int, ...]
    prior_query: tuple[int, ...] | None
    prior_answer_ball: int | None


WinnerOutOutcome = Completed | HaltedAtNo


def winner_out(
    session: OracleSession,
    pool: Sequence[int],
    stop_on_no: bool = False,
    start: Sequence[int] | None = None,
    start_presented: int | None = None,
) -> WinnerOutOutcome:
    """Run Algorithm WINNER-OUT over `pool` in the given order.

    Starts from `start` (default: the first q balls of the pool); if
    `start_presented` is given the start query counts as already answered
    YES with that ball.  Fresh balls are drawn in pool order.  On a NO the
    run halts; with stop_on_no=False a NO violates the caller's
    precondition and raises.
    """
    q = session.config.q
    pool = list(pool)
    if len(pool) < q:
        raise ValueError(f"pool of {len(pool)} balls cannot host queries of size {q}")
    if start is None:
        current = sorted(pool[:q])
        fresh = pool[q:]
    else:
        current = sorted(start)
        in_start = set(current)
        if len(current) != q or not in_start.issubset(pool):
            raise ValueError("start must be a q-subset of the pool")
        fresh = [b for b in pool if b not in in_start]

    answers: list[int] = []
    prev_query: tuple[int, ...] | None = None
    prev_answer: int | None = None
    idx = 0

    if start_presented is not None:
        if start_presented not in current:
            raise ValueError("start_presented must lie in the start query")
        answers.append(start_presented)
        prev_query = tuple(current)
        prev_answer = start_presented
        if not fresh:
            return Completed(frozenset(set(current) - {start_presented}), tuple(answers))
        current.remove(start_presented)
        current.append(fresh[idx])
        idx += 1

    while True:
        query = tuple(sorted(current))
        presented = session.ask(query)
        if presented is None:
            if not stop_on_no:
                raise GameError("unexpected NO during WINNER-OUT")
            return HaltedAtNo(query, prev_query, prev_answer)
        answers.append(presented)
        prev_query, prev_answer = query, presented
        if idx >= len(fresh):
            return Completed(frozenset(set(current) - {presented}), tuple(answers))
        current.remove(presented)
        current.append(fresh[idx])
        idx += 1


def _seed_table(
    table: ConsistencyTable,
    session: OracleSession,
    since: int,
) -> set[tuple[int, ...]]:
    """Feed all transcript rows inside the table's ball set into it; returns
    the set of already-asked queries inside the set."""
    asked: set[tuple[int, ...]] = set()
    for query, presented in session.transcript.rows_within(table.balls, start=since):
        table.apply(query, presented)
        asked.add(query)
    return asked


def _subset_order(balls: Sequence[int], size: int) -> list[tuple[int, ...]]:
    """Deterministic pseudo-shuffled enumeration of subsets, so consecutive
    probes spread over the whole set instead of sharing a lex prefix."""
    subs = list(itertools.combinations(sorted(balls), size))
    random.Random(0x5EED ^ len(subs)).shuffle(subs)
    return subs


def solve_small_nonminority(
    session: OracleSession,
    T: Iterable[int],
    since: int = 0,
) -> int:
    """A ball non-minority in T under every 2-coloring of T consistent with
    the transcript restricted to T.

    Asks q-subsets of T adaptively until some ball is certified; if the
    subsets run out uncertified (or the constraint set empties, which can
    only happen when the two-color assumption is violated upstream), falls
    back to the ball that is non-minority most often.  Total.
    """
    balls = sorted(set(T))
    q = session.config.q
    cap = 20
    if len(balls) > cap:
        raise CapacityError(f"|T|={len(balls)} exceeds small-set cap {cap}")
    if len(balls) < q:
        raise ValueError("T must admit at least one query")
    table = ConsistencyTable(balls)
    asked = _seed_table(table, session, since)
    found = table.certify_nonminority()
    if found is not None:
        return found
    for sub in _subset_order(balls, q):
        if sub in asked:
            continue
        presented = session.ask(sub)
        table.apply(sub, presented)
        if table.is_empty:
            return balls[0]
        found = table.certify_nonminority()
        if found is not None:
            return found
    return table.best_effort_nonminority()


def find_opposite_k_sets(
    session: OracleSession,
    T: Iterable[int],
    k: int,
    padding: Sequence[int] = (),
    since: int = 0,
) -> tuple[list[int], list[int]]:
    """Two disjoint k-sets of T certified oppositely monochromatic in every
    consistent balanced 2-coloring of T.

    The caller vouches that T holds k balls of each of two colors; the
    uses here all arise from balanced survivor sets, so the enumeration is
    restricted to even splits (for a monochromatic T it therefore empties,
    surfacing the violated assumption).  Without padding, asks q-subsets
    of T.  With padding (q-3 balls assumed split evenly), asks
    padding+triple queries and reads answers inside the triple as size-3
    majority answers; answers landing in the padding carry no information
    about T and are skipped.  Raises InferenceError when no pair can be
    certified within the |T|^3 query budget.
    """
    balls = sorted(set(T))
    q = session.config.q
    if len(balls) > 20:
        raise CapacityError(f"|T|={len(balls)} exceeds small-set cap")
    if 2 * k > len(balls):
        raise InferenceError(f"T of size {len(balls)} cannot hold two {k}-sets")
    if len(balls) % 2 != 0:
        raise ValueError("find_opposite_k_sets expects an even-sized T")
    table = ConsistencyTable(balls)
    table.restrict_min_class(len(balls) // 2)
    asked = _seed_table(table, session, since)

    budget = len(balls) ** 3

    def certified() -> tuple[list[int], list[int]] | None:
        return table.certified_opposite_split(k)

    if not padding:
        probes = _subset_order(balls, q)
    else:
        if len(padding) != q - 3:
            raise ValueError("padding must bring triples up to query size")
        probes = _subset_order(balls, 3)

    pad = tuple(padding)
    pad_set = set(pad)
    # small sets get the full probe sweep before certifying, mirroring the
    # ask-all-queries subroutine this realizes; an emptied balanced set then
    # reliably exposes a violated premise instead of a premature certificate
    exhaustive = len(balls) <= 8

    if not exhaustive:
        split = certified()
        if split is not None:
            return split
    queries_used = 0
    since_check = 0
    for sub in probes:
        if queries_used >= budget:
            break
        if not padding:
            if sub in asked:
                continue
            presented = session.ask(sub)
            queries_used += 1
            table.apply(sub, presented)
        else:
            presented = session.ask(pad + sub)
            queries_used += 1
            if presented in pad_set:
                continue
            table.apply_triple_majority(sub, presented)
        if table.is_empty:
            raise InferenceError("no balanced coloring fits the answers")
        if exhaustive:
            continue
        since_check += 1
        # pair-relation scans cost O(|T|^2 N); defer them while N is large
        if len(table) > 4096 and since_check < 16:
            continue
        since_check = 0
        split = certified()
        if split is not None:
            return split
    split = certified()
    if split is not None:
        return split
    raise InferenceError("no certified opposite pair within budget")


class ComparisonOutcome(enum.Enum):
    LE = "le"  # x <= y
    GE = "ge"  # y <= x
    NEQ = "neq"  # x != y


def ambiguous_median(
    compare: Callable[[int, int], ComparisonOutcome], items: Sequence[int]
) -> int:
    """Element of the larger color half under adversarial comparisons.

    compare(x, y) must return a true statement about the two hidden binary
    colors.  Maintains a chain sorted by color; a NEQ discards the probed
    chain element together with the new item as a balanced pair.  The
    middle of the final chain lies in a class of size >= len(items)/2.
    """
    if not items:
        raise ValueError("need at least one item")
    chain: list[int] = []
    for u in items:
        if not chain:
            chain.append(u)
            continue
        out = compare(chain[-1], u)
        if out is ComparisonOutcome.NEQ:
            chain.pop()
        elif out is ComparisonOutcome.LE:
            chain.append(u)
        else:
            # u <= chain end: binary search for a slot, discarding on NEQ
            lo, hi = -1, len(chain) - 1
            spliced = False
            while hi - lo > 1:
                mid = (lo + hi) // 2
                out2 = compare(chain[mid], u)
                if out2 is ComparisonOutcome.LE:
                    lo = mid
                elif out2 is ComparisonOutcome.GE:
                    hi = mid
                else:
                    chain.pop(mid)
                    spliced = True
                    break
            if not spliced:
                chain.insert(hi, u)
    if not chain:
        # everything paired off evenly; both classes hold exactly half
        return items[0]
    return chain[(len(chain) - 1) // 2]
