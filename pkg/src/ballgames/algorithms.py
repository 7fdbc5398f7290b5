"""The four linear-query solvers, the small-n fallback, and dispatch.

Solvers consume an OracleSession and return a SolveResult.  They never
see colors: every conclusion is drawn from presented balls and NO
answers.  Class labels in results are solver-internal integers with no
relation to the hidden color ids.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .consistency import (
    certified_same_columns,
    count_canonical_colorings,
    enumerate_canonical_colorings,
    filter_by_answer,
    filter_window_answer,
    target_ball_flags,
)
from .model import (
    AlgorithmParams,
    CapacityError,
    GameConfig,
    GameError,
    QueryKind,
    Target,
    ceil_half,
)
from .oracle import OracleSession
from .toolkit import (
    Completed,
    ComparisonOutcome,
    HaltedAtNo,
    InferenceError,
    ambiguous_median,
    find_opposite_k_sets,
    solve_small_nonminority,
    winner_out,
)

FOUND = "found"
NONE_EXISTS = "none_exists"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveResult:
    """A solver's claim: a ball with status, a certified absence, or
    Unknown (permitted only below the solver's operative threshold)."""

    kind: str
    ball: int | None = None
    claim: Target | None = None
    identified_classes: tuple[tuple[int, tuple[int, ...]], ...] | None = None

    @staticmethod
    def found(ball: int, claim: Target) -> "SolveResult":
        return SolveResult(FOUND, ball=ball, claim=claim)

    @staticmethod
    def none_exists(classes: dict[int, Iterable[int]]) -> "SolveResult":
        frozen = tuple(
            (label, tuple(sorted(balls))) for label, balls in sorted(classes.items())
        )
        return SolveResult(NONE_EXISTS, identified_classes=frozen)

    @staticmethod
    def unknown() -> "SolveResult":
        return SolveResult(UNKNOWN)

    def classes_dict(self) -> dict[int, frozenset[int]]:
        if self.identified_classes is None:
            return {}
        return {label: frozenset(balls) for label, balls in self.identified_classes}


@dataclass
class _Outcome:
    """Solver result plus internal facts needed when a caller lifts the
    answer from a sub-universe into a larger one."""

    result: SolveResult
    classes: dict[int, frozenset[int]] | None = None  # exact full classes
    residue: int = 0  # unidentified balls; each hidden class there is <= this
    dominant: int = 0  # found ball's class has at least this many balls


# -- operative thresholds ---------------------------------------------------


def threshold_mb_odd_two(q: int, params: AlgorithmParams) -> int:
    m = params.resolve_m(q // 2)
    return m * (q - 1) + q + 2


def threshold_mb_even(q: int, c: int) -> int:
    k = q // 2
    return max(c * c * k, c * k + 1 + q, 2 * q - 1, 2 * c * k + 2, c * k * (c + 1) + 1)


def threshold_mb_odd_c(q: int, c: int, params: AlgorithmParams) -> int:
    k = q // 2
    # margin making the all-parts-same-color class a certified majority
    gamma = -(-2 * q * (c * k + c + k) // (c + 2 * k)) + q
    return max(
        q + 2 * c * q,
        gamma,
        (c + 1) * c * k + 1,
        threshold_mb_odd_two(q, params) + q - 1,
    )


def _threshold_c2(q: int, params: AlgorithmParams) -> int:
    if q % 2 == 1:
        return threshold_mb_odd_two(q, params)
    return threshold_mb_even(q, 2)


def threshold_plurality(q: int, c: int, params: AlgorithmParams) -> int:
    if c <= 2:
        return _threshold_c2(q, params)
    if q == 2:
        return threshold_mb_even(2, c)
    return max(
        q * c + (c - 1) * ceil_half(q) + 1,
        2 * c * q,
        c * q * (c + 2),
        q + threshold_plurality(q, c - 1, params),
        (q - 1) + _threshold_c2(q, params),
    )


def operative_threshold(config: GameConfig, params: AlgorithmParams) -> int:
    if params.n0_override is not None:
        return params.n0_override
    if config.query_kind is QueryKind.PLURALITY:
        return threshold_plurality(config.q, config.c, params)
    if config.q % 2 == 1:
        if config.c == 2:
            return threshold_mb_odd_two(config.q, params)
        return threshold_mb_odd_c(config.q, config.c, params)
    return threshold_mb_even(config.q, config.c)


# -- shared helpers ---------------------------------------------------------


def _universe_list(session: OracleSession, universe: Sequence[int] | None) -> list[int]:
    if universe is None:
        return list(range(session.config.n))
    return sorted(universe)


def _claim(session: OracleSession) -> Target:
    return session.config.target


def _decide_from_classes(
    classes: dict[int, frozenset[int]],
    residue: int,
    n: int,
    target: Target,
) -> _Outcome:
    """Final verdict once every large class is fully identified and at most
    `residue` balls (all of strictly smaller classes) remain unknown."""
    sizes = [(len(v), min(v), k) for k, v in classes.items()]
    sizes.sort(key=lambda t: (-t[0], t[1]))
    s1, ball1, _ = sizes[0]
    s2 = sizes[1][0] if len(sizes) > 1 else 0
    if s1 <= residue:
        raise GameError("identification stopped while a hidden class could win")
    result: SolveResult
    if 2 * s1 >= n:
        result = SolveResult.found(ball1, target)
    elif target is Target.NON_MINORITY:
        result = SolveResult.none_exists(classes)
    elif s1 > s2:
        result = SolveResult.found(ball1, target)
    else:
        result = SolveResult.none_exists(classes)
    return _Outcome(result, classes=dict(classes), residue=residue)


# -- MB(n, 2k+1, 2): odd queries, two colors --------------------------------


def _mb_odd_two_impl(
    session: OracleSession, params: AlgorithmParams, universe: Sequence[int] | None
) -> _Outcome:
    cfg = session.config
    q, k = cfg.q, cfg.q // 2
    X = _universe_list(session, universe)
    n = len(X)
    m = params.resolve_m(k)
    n0 = params.n0_override if params.n0_override is not None else m * (q - 1) + q + 2
    if n < n0:
        return _Outcome(SolveResult.unknown())

    # phase 1: m rounds of WINNER-OUT, peeling q-1 survivors each time
    rounds: list[list[int]] = []
    pool = X
    for _ in range(m):
        out = winner_out(session, pool)
        assert isinstance(out, Completed)
        rounds.append(sorted(out.survivors))
        survivors = out.survivors
        pool = [b for b in pool if b not in survivors]

    S = sorted(itertools.chain.from_iterable(rounds))
    phase2_start = session.transcript.query_count
    zeros, ones = _pair_hunt(session, rounds, S, k, phase2_start)

    ball = _median_phase(session, zeros, ones, pool, k)
    return _Outcome(SolveResult.found(ball, _claim(session)))


def _pair_hunt(
    session: OracleSession,
    rounds: list[list[int]],
    S: list[int],
    k: int,
    since: int,
) -> tuple[list[int], list[int]]:
    """Phase 2: k balls of each color out of S, assuming every round set is
    balanced.  If the assumption is false any output works, because then
    all balls outside S share the majority color."""
    if k == 1:
        x = S[0]
        y = solve_small_nonminority(session, [b for b in S if b != x], since=since)
        return [y], [x]

    # pairing graph: each ball gets a partner of (assumed) opposite color
    adj: dict[int, set[int]] = {b: set() for b in S}
    for x in S:
        y = solve_small_nonminority(session, [b for b in S if b != x], since=since)
        if y != x:
            adj[x].add(y)
            adj[y].add(x)

    try:
        hub = next(x for x in S if len(adj[x]) > 2 * k * k)
    except StopIteration:
        hub = None
    if hub is not None:
        try:
            return _pair_case1(session, rounds, S, adj, hub, k, since)
        except (InferenceError, ValueError):
            pass
    else:
        try:
            return _pair_case2(session, rounds, S, adj, k, since)
        except (InferenceError, ValueError):
            pass
    # last resort: certify a split over all of S directly
    try:
        A, B = find_opposite_k_sets(session, S, k, since=since)
        return A, B
    except InferenceError:
        # proceed uncertified; correct whenever the balance assumption broke
        return S[:k], S[-k:]


def _round_of(rounds: list[list[int]], ball: int) -> list[int]:
    for r in rounds:
        if ball in r:
            return r
    raise ValueError(f"ball {ball} not in any round set")


def _pair_case1(
    session: OracleSession,
    rounds: list[list[int]],
    S: list[int],
    adj: dict[int, set[int]],
    hub: int,
    k: int,
    since: int,
) -> tuple[list[int], list[int]]:
    """High-degree ball: its neighbors give one color class, repeated
    pair-finding in shrinking survivor unions gives the other."""
    dropped = set(_round_of(rounds, hub))
    rest = [b for b in S if b not in dropped]
    same = [hub]
    for _ in range(k - 1):
        nbrs = [y for y in sorted(adj[hub]) if y in rest]
        if not nbrs:
            raise InferenceError("hub neighbors exhausted")
        y_i = nbrs[0]
        pool = [b for b in rest if b != y_i]
        if len(pool) < session.config.q:
            raise InferenceError("survivor pool too small for case 1")
        x_i = solve_small_nonminority(session, pool, since=since)
        same.append(x_i)
        gone = set(_round_of(rounds, x_i))
        rest = [b for b in rest if b not in gone]
    others = [y for y in sorted(adj[hub]) if y not in same][:k]
    if len(set(same)) < k or len(others) < k:
        raise InferenceError("case 1 produced too few distinct balls")
    return same[:k], others


def _pair_case2(
    session: OracleSession,
    rounds: list[list[int]],
    S: list[int],
    adj: dict[int, set[int]],
    k: int,
    since: int,
) -> tuple[list[int], list[int]]:
    """All degrees small: bipartite components, then the padded-triple
    cases over pairs of untouched round sets."""
    comps = _bipartite_components(adj)
    for side0, side1 in comps:
        if len(side0) >= k and len(side1) >= k:
            return sorted(side0)[:k], sorted(side1)[:k]
    if len(comps) < k - 1:
        raise InferenceError("too few components for case 2")
    picked = []
    for side0, side1 in comps[: k - 1]:
        picked.append((min(side0), min(side1)))
    A = sorted(b for e in picked for b in e)
    a_set = set(A)
    avail = [r for r in rounds if not a_set & set(r)]
    pairs = [(avail[i], avail[i + 1]) for i in range(0, len(avail) - 1, 2)]
    if not pairs:
        raise InferenceError("no untouched round-set pairs for case 2")
    hits: dict[int, list[tuple[int, ...]]] = {a: [] for a in A}
    for r1, r2 in pairs:
        T = sorted(r1 + r2)
        all_inside = True
        for triple in itertools.combinations(T, 3):
            p = session.ask(tuple(A) + triple)
            if p in a_set:
                hits[p].append(triple)
                all_inside = False
        if all_inside:
            # case 2.1: effective size-3 majority answers inside r1+r2
            return find_opposite_k_sets(session, T, k, padding=A, since=since)
    # case 2.2: the A-ball presented most often shares a color with most
    # of the triple balls it answered for
    x = max(A, key=lambda a: (len(hits[a]), -a))
    if not hits[x]:
        raise InferenceError("no answers landed in A")
    B_pool = sorted({b for t in hits[x] for b in t})
    same = [x]
    for _ in range(k - 1):
        if len(B_pool) < session.config.q:
            raise InferenceError("case 2.2 pool too small")
        y = solve_small_nonminority(session, B_pool, since=since)
        same.append(y)
        B_pool.remove(y)
    nbr_pool = sorted(set().union(*(adj[s] for s in same if s in adj)) - set(same))
    if len(nbr_pool) < k:
        raise InferenceError("case 2.2 neighborhood too small")
    return same[:k], nbr_pool[:k]


def _bipartite_components(
    adj: dict[int, set[int]]
) -> list[tuple[list[int], list[int]]]:
    """Connected components split by BFS parity, largest min-side first.
    Components with odd cycles (impossible when all pairs are truly
    opposite-colored) are skipped."""
    seen: set[int] = set()
    comps = []
    for root in sorted(adj):
        if root in seen:
            continue
        side = {root: 0}
        queue = [root]
        ok = True
        while queue:
            u = queue.pop()
            for v in adj[u]:
                if v not in side:
                    side[v] = side[u] ^ 1
                    queue.append(v)
                elif side[v] == side[u]:
                    ok = False
        seen.update(side)
        if ok:
            s0 = sorted(b for b, s in side.items() if s == 0)
            s1 = sorted(b for b, s in side.items() if s == 1)
            comps.append((s0, s1))
    comps.sort(key=lambda c: (-min(len(c[0]), len(c[1])), c[0][0]))
    return comps


def _median_phase(
    session: OracleSession,
    zeros: Sequence[int],
    ones: Sequence[int],
    U: Sequence[int],
    k: int,
) -> int:
    """Phase 3: turn double queries into ambiguous comparisons and take the
    chain median over the balls outside S."""
    if len(U) == 1:
        return U[0]
    z_k = tuple(zeros[:k])
    z_k1 = tuple(zeros[: k - 1])
    o_k = tuple(ones[:k])
    o_k1 = tuple(ones[: k - 1])
    zset = set(zeros)

    def compare(x: int, y: int) -> ComparisonOutcome:
        p1 = session.ask((x, y) + z_k + o_k1)
        if p1 == x:
            return ComparisonOutcome.LE
        if p1 == y:
            return ComparisonOutcome.GE
        if p1 not in zset:
            # presented a one-filler: both x and y carry color one
            return ComparisonOutcome.LE
        p2 = session.ask((x, y) + z_k1 + o_k)
        if p2 == x:
            return ComparisonOutcome.GE
        if p2 == y:
            return ComparisonOutcome.LE
        if p2 in zset:
            # both carry color zero
            return ComparisonOutcome.LE
        return ComparisonOutcome.NEQ

    return ambiguous_median(compare, list(U))


def mb_odd_two_colors(
    session: OracleSession,
    params: AlgorithmParams | None = None,
    universe: Sequence[int] | None = None,
) -> SolveResult:
    """Non-minority ball for odd query size over two colors."""
    cfg = session.config
    if cfg.q % 2 != 1:
        raise ValueError("mb_odd_two_colors requires odd q")
    return _mb_odd_two_impl(session, params or AlgorithmParams(), universe).result


# -- MB(n, 2k+1, c): odd queries, many colors -------------------------------


def _partition_chunks(items: list[int], size: int) -> list[list[int]]:
    """Split into chunks of at least `size`, at most 2*size-1 balls."""
    t = max(1, len(items) // size)
    base, extra = divmod(len(items), t)
    out = []
    i = 0
    for j in range(t):
        ln = base + (1 if j < extra else 0)
        out.append(items[i : i + ln])
        i += ln
    return out


def _part_classes(
    session: OracleSession, ground: list[int], Q: tuple[int, ...], q: int, k: int
) -> list[list[int]]:
    """Exact color classes of size >= k+1 inside ground = A_i + Q, from all
    q-subset answers (a (k+1)-set is monochromatic iff no query containing
    it lacks a majority)."""
    q_set = frozenset(Q)
    no_sets: list[frozenset[int]] = [q_set]
    for sub in itertools.combinations(ground, q):
        fs = frozenset(sub)
        if fs == q_set:
            continue  # the NO query itself, already answered
        if session.ask(sub) is None:
            no_sets.append(fs)
    parent = {b: b for b in ground}

    def find(b: int) -> int:
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        return b

    for block in itertools.combinations(ground, k + 1):
        bs = frozenset(block)
        if any(bs <= ns for ns in no_sets):
            continue
        root = find(block[0])
        for b in block[1:]:
            rb = find(b)
            if rb != root:
                parent[max(root, rb)] = min(root, rb)
                root = min(root, rb)
    groups: dict[int, list[int]] = {}
    for b in ground:
        groups.setdefault(find(b), []).append(b)
    classes = [sorted(g) for g in groups.values() if len(g) >= k + 1]
    classes.sort(key=lambda g: (-len(g), g[0]))
    return classes


def _compare_part_classes(
    session: OracleSession,
    B1: list[int],
    B2: list[int],
    Q: tuple[int, ...],
    k: int,
) -> tuple[list[int], list[int], int] | None:
    """None when the two part classes share a color; otherwise k balls of
    each plus a third-color ball from Q (the k+k+1 configuration)."""
    if set(B1) & set(B2):
        return None  # classes are exact, so any shared ball means same color
    b1 = sorted(B1)[:k]
    b2 = sorted(B2)[:k]
    spare = [z for z in Q if z not in set(B1) and z not in set(B2)]
    z = spare[0]
    p = session.ask(tuple(b1) + tuple(b2) + (z,))
    if p is None:
        return b1, b2, z
    return None


def _membership_test(
    session: OracleSession,
    x: int,
    main: Sequence[int],
    other: Sequence[int],
    third: int,
    k: int,
) -> bool:
    """Is x in main's class?  Query k main + (k-1) other + third + x; for
    k=1 the third-color class can also reach majority, so a second query
    disambiguates a presented x."""
    if k >= 2:
        p = session.ask((x,) + tuple(main[:k]) + tuple(other[: k - 1]) + (third,))
        return p is not None
    p1 = session.ask((x, main[0], third))
    if p1 == main[0]:
        return True
    if p1 is None or p1 == third:
        return False
    p2 = session.ask((x, main[0], other[0]))
    if p2 is None or p2 == other[0]:
        return False
    return True


def _mb_odd_c_impl(
    session: OracleSession, params: AlgorithmParams, universe: Sequence[int] | None
) -> _Outcome:
    cfg = session.config
    q, k, c = cfg.q, cfg.q // 2, cfg.c
    X = _universe_list(session, universe)
    n = len(X)
    n0 = (
        params.n0_override
        if params.n0_override is not None
        else threshold_mb_odd_c(q, c, params)
    )
    if n < n0:
        return _Outcome(SolveResult.unknown())

    out = winner_out(session, X, stop_on_no=True)
    if isinstance(out, Completed):
        # all YES: the survivors absorb one ball of each outside color per
        # color class, so a non-minority ball of the rest is one of X
        rest = [b for b in X if b not in out.survivors]
        sub = _mb_odd_two_impl(session, params, rest)
        if sub.result.kind != FOUND:
            raise GameError("two-color subsolve below threshold")
        return _Outcome(SolveResult.found(sub.result.ball, _claim(session)))

    Q = out.no_query  # no majority: every color has at most k balls here
    q_balls = set(Q)
    others = [b for b in X if b not in q_balls]
    config_kk1: tuple[list[int], list[int], int] | None = None
    first_single: list[int] | None = None
    for part in _partition_chunks(others, c * q):
        ground = sorted(part + list(Q))
        classes = _part_classes(session, ground, Q, q, k)
        if not classes:
            raise GameError("no k+1 class in a part, impossible by pigeonhole")
        if len(classes) >= 2:
            b1 = classes[0][:k]
            b2 = classes[1][:k]
            spare = [z for z in Q if z not in set(classes[0]) and z not in set(classes[1])]
            config_kk1 = (b1, b2, spare[0])
            break
        if first_single is None:
            first_single = classes[0]
        else:
            config_kk1 = _compare_part_classes(session, first_single, classes[0], Q, k)
            if config_kk1 is not None:
                break
    if config_kk1 is None:
        # every part is dominated by one color and all of them agree: that
        # color covers well over half of X
        assert first_single is not None
        return _Outcome(SolveResult.found(min(first_single), _claim(session)))

    blue_k, red_k, green = config_kk1
    classes_found, residue_balls = _identify_odd_c(
        session, X, blue_k, red_k, green, c, k
    )
    return _decide_from_classes(
        classes_found, len(residue_balls), n, session.config.target
    )


def _identify_odd_c(
    session: OracleSession,
    X: list[int],
    blue_k: list[int],
    red_k: list[int],
    green: int,
    c: int,
    k: int,
) -> tuple[dict[int, frozenset[int]], list[int]]:
    """Phase 3: identify whole color classes until fewer than (c-2)k+1
    balls remain unlabeled."""
    blue = set(blue_k)
    known = set(blue_k) | set(red_k) | {green}
    for x in X:
        if x in known:
            continue
        if _membership_test(session, x, blue_k, red_k, green, k):
            blue.add(x)
    red = set(red_k)
    for x in X:
        if x in known or x in blue:
            continue
        if _membership_test(session, x, red_k, blue_k, green, k):
            red.add(x)
    # green's class is discovered by the generic loop below
    classes: dict[int, frozenset[int]] = {0: frozenset(blue), 1: frozenset(red)}
    identified = blue | red
    U = [b for b in X if b not in identified]
    stop = (c - 2) * k + 1
    while len(U) >= stop and len(classes) < c:
        R = U[:stop]
        mono: tuple[int, ...] | None = None
        for sub in itertools.combinations(R, k + 1):
            if session.ask(tuple(blue_k) + sub) is not None:
                mono = sub
                break
        if mono is None:
            break  # more colors left than the pigeonhole bound allows
        new_k = list(mono)[:k]
        cls = set(mono)
        red_one = min(red)
        for x in U:
            if x in cls:
                continue
            if _membership_test(session, x, new_k, blue_k, red_one, k):
                cls.add(x)
        classes[len(classes)] = frozenset(cls)
        U = [b for b in U if b not in cls]
    return classes, U


def mb_odd_c_colors(
    session: OracleSession,
    params: AlgorithmParams | None = None,
    universe: Sequence[int] | None = None,
) -> SolveResult:
    """Non-minority / almost-plurality verdict for odd q, any color count."""
    cfg = session.config
    if cfg.q % 2 != 1:
        raise ValueError("mb_odd_c_colors requires odd q")
    return _mb_odd_c_impl(session, params or AlgorithmParams(), universe).result


# -- MB(n, 2k, c): even queries ---------------------------------------------


def _mb_even_impl(
    session: OracleSession,
    params: AlgorithmParams,
    universe: Sequence[int] | None,
    c_eff: int | None = None,
) -> _Outcome:
    cfg = session.config
    q, k = cfg.q, cfg.q // 2
    c = c_eff if c_eff is not None else cfg.c
    X = _universe_list(session, universe)
    n = len(X)
    n0 = (
        params.n0_override
        if params.n0_override is not None
        else threshold_mb_even(q, c)
    )
    if n < n0:
        return _Outcome(SolveResult.unknown())

    # a YES exists among the 2k-subsets of any ck+1 balls
    window = X[: c * k + 1]
    q0: tuple[int, ...] | None = None
    p0: int | None = None
    for sub in itertools.combinations(window, q):
        p = session.ask(sub)
        if p is not None:
            q0, p0 = sub, p
            break
    if q0 is None:
        raise GameError("no YES in the pigeonhole window")

    out = winner_out(session, X, stop_on_no=True, start=q0, start_presented=p0)
    if isinstance(out, Completed):
        # consecutive answer balls must share a color, so the single answer
        # color covers all n-q+1 answers: a certified majority
        ball = min(out.answer_balls)
        return _Outcome(
            SolveResult.found(ball, _claim(session)), dominant=n - q + 1
        )

    prior = list(out.prior_query or ())
    x = out.prior_answer_ball
    assert x is not None and prior
    z = next(b for b in out.no_query if b not in set(prior))
    # prior holds exactly k+1 balls of x's color ("blue"); z is not blue
    base = tuple(b for b in prior if b != x)
    blue = {x}
    prior_set = set(prior)
    for y in X:
        if y in prior_set or y == z:
            continue
        if session.ask(base + (y,)) is not None:
            blue.add(y)
    for x2 in prior:
        if x2 == x:
            continue
        swapped = tuple(b for b in prior if b != x2) + (z,)
        if session.ask(swapped) is None:
            blue.add(x2)

    classes: dict[int, frozenset[int]] = {0: frozenset(blue)}
    U = [b for b in X if b not in blue]
    blue_sorted = sorted(blue)
    fill = tuple(blue_sorted[: k - 1])
    while len(U) >= c * k + 1 and len(classes) < c:
        window = U[: c * k + 1]
        mono = None
        for sub in itertools.combinations(window, k + 1):
            if session.ask(sub + fill) is not None:
                mono = sub
                break
        if mono is None:
            break
        new_k = tuple(mono[:k])
        cls = set(mono)
        for u in U:
            if u in cls:
                continue
            if session.ask(new_k + fill + (u,)) is not None:
                cls.add(u)
        classes[len(classes)] = frozenset(cls)
        U = [b for b in U if b not in cls]
    return _decide_from_classes(classes, len(U), n, session.config.target)


def mb_even_c_colors(
    session: OracleSession,
    params: AlgorithmParams | None = None,
    universe: Sequence[int] | None = None,
) -> SolveResult:
    """Non-minority / almost-plurality verdict for even query sizes."""
    cfg = session.config
    if cfg.q % 2 != 0:
        raise ValueError("mb_even_c_colors requires even q")
    return _mb_even_impl(session, params or AlgorithmParams(), universe).result


# -- PB/PC(n, q, c): plurality queries --------------------------------------


def _c2_subsolve(
    session: OracleSession, params: AlgorithmParams, universe: Sequence[int]
) -> _Outcome:
    if session.config.q % 2 == 1:
        return _mb_odd_two_impl(session, params, universe)
    return _mb_even_impl(session, params, universe, c_eff=2)


def _plurality_identify_blue(
    session: OracleSession, work: list[int], Q: tuple[int, ...], x: int, q: int
) -> set[int]:
    """Phase 2: Q was answered NO and x (outside Q) lies in one of its tied
    largest classes.  Swapping x in pins the blue balls of Q; a ball y is
    blue exactly when its NO set over swaps matches them."""
    blue_in_q: set[int] = set()
    for z in Q:
        swapped = tuple(b for b in Q if b != z) + (x,)
        if session.ask(swapped) is None:
            blue_in_q.add(z)
    blue = {x} | blue_in_q
    q_set = set(Q)
    for y in work:
        if y in q_set or y == x:
            continue
        nos = set()
        for z in Q:
            swapped = tuple(b for b in Q if b != z) + (y,)
            if session.ask(swapped) is None:
                nos.add(z)
        if nos == blue_in_q:
            blue.add(y)
    return blue


def _plurality_class_in_window(
    session: OracleSession,
    Z: list[int],
    blue_sorted: list[int],
    q: int,
    colors_bound: int,
) -> list[int]:
    """Phase 3: a certified set of >= floor(q/2) same-colored balls inside
    Z (all non-blue, at most colors_bound colors), via subset queries
    padded with floor(q/2) blue balls and consistency filtering."""
    t_size = ceil_half(q)
    fill_len = q // 2
    fill = tuple(blue_sorted[:fill_len])
    need = max(1, q // 2)
    col_of = {b: i for i, b in enumerate(Z)}
    colorings = enumerate_canonical_colorings(len(Z), colors_bound, cap=1 << 20)

    def certified() -> list[int] | None:
        groups = certified_same_columns(colorings)
        if groups and len(groups[0]) >= need:
            return [Z[i] for i in groups[0][:need]]
        return None

    got = certified()
    if got is not None:
        return got
    for sub in itertools.combinations(Z, t_size):
        p = session.ask(sub + fill)
        cols = [col_of[b] for b in sub]
        if p is None:
            colorings = filter_window_answer(
                colorings, colors_bound, cols, fill_len, None, False, QueryKind.PLURALITY
            )
        elif p in set(sub):
            colorings = filter_window_answer(
                colorings, colors_bound, cols, fill_len, col_of[p], False, QueryKind.PLURALITY
            )
        else:
            colorings = filter_window_answer(
                colorings, colors_bound, cols, fill_len, None, True, QueryKind.PLURALITY
            )
        if len(colorings) == 0:
            raise InferenceError("window enumeration emptied")
        got = certified()
        if got is not None:
            return got
    raise InferenceError("no certified class in the window")


def _plurality_identify_class(
    session: OracleSession,
    U: list[int],
    seed: list[int],
    blue_sorted: list[int],
    q: int,
) -> set[int]:
    """Phase 4: extend a certified red seed to the full red class.  For odd
    q a YES means red; for even q the tie flips it to NO means red."""
    red_fill = tuple(seed[: ceil_half(q) - 1])
    blue_fill = tuple(blue_sorted[: q // 2])
    cls = set(seed)
    odd = q % 2 == 1
    for x in U:
        if x in cls:
            continue
        p = session.ask(red_fill + blue_fill + (x,))
        is_red = (p is not None) if odd else (p is None)
        if is_red:
            cls.add(x)
    return cls


def _lift_exact(
    sub: _Outcome,
    t: int,
    d_classes: dict[int, frozenset[int]],
    n_level: int,
    target: Target,
) -> _Outcome:
    """Turn exact sub-universe classes into a verdict one level up: each
    color of the sub-universe gains exactly t balls inside the dropped
    query, while the dropped query's own colors stay far below the top."""
    assert sub.classes is not None
    sizes = sorted((len(v) for v in sub.classes.values()), reverse=True)
    s1 = sizes[0] + t
    s2 = (sizes[1] + t) if len(sizes) > 1 else 0
    top_label = max(
        sub.classes, key=lambda lab: (len(sub.classes[lab]), -min(sub.classes[lab]))
    )
    ball = min(sub.classes[top_label])
    if 2 * s1 >= n_level:
        return _Outcome(SolveResult.found(ball, target))
    certificate = dict(sub.classes)
    for balls in d_classes.values():
        certificate[len(certificate)] = balls
    if target is Target.NON_MINORITY:
        return _Outcome(SolveResult.none_exists(certificate))
    if s1 > s2:
        return _Outcome(SolveResult.found(ball, target))
    return _Outcome(SolveResult.none_exists(certificate))


def _plurality_impl(
    session: OracleSession,
    params: AlgorithmParams,
    universe: Sequence[int] | None,
    c_eff: int,
    depth: int = 0,
) -> _Outcome:
    cfg = session.config
    q = cfg.q
    if depth > cfg.c - 1:
        raise GameError("plurality recursion exceeded c-1 levels")
    X = _universe_list(session, universe)
    n = len(X)
    if c_eff <= 2:
        return _c2_subsolve(session, params, X)
    if q == 2:
        # a pair has a plurality ball exactly when it has a majority ball,
        # so the even-query majority algorithm applies verbatim
        return _mb_even_impl(session, params, X, c_eff=c_eff)
    n0 = (
        params.n0_override
        if params.n0_override is not None
        else threshold_plurality(q, c_eff, params)
    )
    if n < n0:
        return _Outcome(SolveResult.unknown())

    target = session.config.target
    deleted: dict[int, frozenset[int]] = {}
    work = X
    blue_cls: set[int] | None = None
    for _ in range(c_eff):
        got = _plurality_phase1(session, params, work, q, c_eff, depth, deleted)
        if isinstance(got, _Outcome):
            return got
        Q, x = got
        cls = _plurality_identify_blue(session, work, Q, x, q)
        if len(cls) >= ceil_half(q):
            blue_cls = cls
            break
        deleted[-len(deleted) - 1] = frozenset(cls)
        work = [b for b in work if b not in cls]
    if blue_cls is None:
        raise GameError("no class of ceil(q/2) balls surfaced; below threshold?")

    blue_sorted = sorted(blue_cls)
    classes: dict[int, frozenset[int]] = {0: frozenset(blue_cls)}
    U = [b for b in work if b not in blue_cls]
    while len(U) >= c_eff * q and len(classes) < c_eff:
        window = U[: c_eff * q]
        bound = max(1, c_eff - len(classes))
        seed = _plurality_class_in_window(session, window, blue_sorted, q, bound)
        cls2 = _plurality_identify_class(session, U, seed, blue_sorted, q)
        classes[len(classes)] = frozenset(cls2)
        U = [b for b in U if b not in cls2]
    all_classes = dict(classes)
    for lab, balls in deleted.items():
        all_classes[lab] = balls
    return _decide_from_classes(all_classes, len(U), n, target)


def _plurality_phase1(
    session: OracleSession,
    params: AlgorithmParams,
    work: list[int],
    q: int,
    c_eff: int,
    depth: int,
    deleted: dict[int, frozenset[int]],
) -> tuple[tuple[int, ...], int] | _Outcome:
    """Find a NO query plus a ball of one of its largest classes, or settle
    the instance through one of the two early exits."""
    window = work[: q * c_eff]
    q0 = p0 = None
    for sub in itertools.combinations(window, q):
        p = session.ask(sub)
        if p is not None:
            q0, p0 = sub, p
            break
    if q0 is None:
        raise GameError("no YES among the window subsets")
    out = winner_out(session, work, stop_on_no=True, start=q0, start_presented=p0)
    if isinstance(out, HaltedAtNo):
        assert out.prior_answer_ball is not None
        return out.no_query, out.prior_answer_ball

    S = sorted(out.survivors)
    y = out.answer_balls[-1]
    Q1 = tuple(sorted(S + [y]))
    q1_set = set(Q1)
    no_query: tuple[int, ...] | None = None
    blue_out: int | None = None
    for u in work:
        if u in q1_set:
            continue
        all_yes = True
        for v in Q1:
            query = tuple(b for b in Q1 if b != v) + (u,)
            p = session.ask(query)
            if p is None:
                all_yes = False
                if no_query is None:
                    no_query = tuple(sorted(query))
                break
        if all_yes and blue_out is None:
            blue_out = u
        if no_query is not None and blue_out is not None:
            break

    n_level = len(work) + sum(len(v) for v in deleted.values())
    target = session.config.target

    if no_query is None:
        # every swap keeps a plurality: at most two colors outside S, tied
        # inside S (odd q, delta=0, so a non-minority ball of work minus S
        # sits exactly at half of work), or one single color outside
        rest = [b for b in work if b not in set(S)]
        sub = _c2_subsolve(session, params, rest)
        if sub.result.kind != FOUND:
            raise GameError("two-color subsolve failed in plurality phase 1")
        return _Outcome(SolveResult.found(sub.result.ball, target))

    if blue_out is None:
        # no blue ball outside Q1: drop Q1 and recurse with one fewer
        # color; every color outside Q1 holds exactly t balls inside it,
        # and q-1 >= 3t plus a largest blue class forces t=1 for q <= 6
        rest = [b for b in work if b not in q1_set]
        sub = _plurality_impl(session, params, rest, c_eff - 1, depth + 1)
        if sub.result.kind == UNKNOWN:
            raise GameError("recursive plurality call below threshold")
        if sub.classes is not None:
            return _lift_exact(sub, 1, deleted, n_level, target)
        # count-free sub answers only arise from the c=2 base; at c_eff=3
        # and q<=5 the outside balls are then provably one single color
        assert sub.result.kind == FOUND
        return _Outcome(SolveResult.found(sub.result.ball, target))

    return no_query, blue_out


def plurality_solve(
    session: OracleSession,
    params: AlgorithmParams | None = None,
    universe: Sequence[int] | None = None,
) -> SolveResult:
    """Almost-plurality / non-minority verdict under plurality queries,
    by induction on the number of colors."""
    cfg = session.config
    if cfg.query_kind is not QueryKind.PLURALITY:
        raise ValueError("plurality_solve requires a plurality session")
    return _plurality_impl(
        session, params or AlgorithmParams(), universe, cfg.c
    ).result


# -- brute-force fallback ----------------------------------------------------


class FallbackMachine:
    """Adaptive consistency solver for tiny instances, exposed as an
    explicit state machine so the exhaustive adversary checker can walk
    every answer branch of exactly the production logic."""

    def __init__(self, config: GameConfig):
        self.config = config
        self.colorings = enumerate_canonical_colorings(config.n, config.c)
        self.queries = list(itertools.combinations(range(config.n), config.q))
        self.pos = 0

    def copy(self) -> "FallbackMachine":
        dup = object.__new__(FallbackMachine)
        dup.config = self.config
        dup.colorings = self.colorings
        dup.queries = self.queries
        dup.pos = self.pos
        return dup

    def state_key(self) -> tuple:
        return (self.pos, self.colorings.shape[0], self.colorings.tobytes())

    def verdict(self) -> SolveResult | None:
        flags = target_ball_flags(self.colorings, self.config.c, self.config.target)
        common = flags.all(axis=0)
        if common.any():
            ball = int(common.argmax())
            return SolveResult.found(ball, self.config.target)
        if not flags.any():
            return SolveResult.none_exists(self._certified_groups())
        return None

    def _certified_groups(self) -> dict[int, frozenset[int]]:
        n = self.config.n
        cols = self.colorings
        groups: dict[int, frozenset[int]] = {}
        seen: set[int] = set()
        label = 0
        for i in range(n):
            if i in seen:
                continue
            grp = [i]
            for j in range(i + 1, n):
                if j in seen:
                    continue
                if bool(((cols[:, i] == cols[:, j])).all()):
                    grp.append(j)
            if len(grp) > 1:
                seen.update(grp)
                groups[label] = frozenset(grp)
                label += 1
        return groups

    def next_query(self) -> tuple[int, ...] | None:
        if self.pos >= len(self.queries):
            return None
        return self.queries[self.pos]

    def feed(self, query: tuple[int, ...], presented: int | None) -> None:
        self.pos += 1
        self.colorings = filter_by_answer(
            self.colorings, self.config.c, query, presented, self.config.query_kind
        )

    def run(self, session: OracleSession) -> SolveResult:
        while True:
            v = self.verdict()
            if v is not None:
                return v
            query = self.next_query()
            if query is None:
                return SolveResult.unknown()
            presented = session.ask(query)
            self.feed(query, presented)


def fallback_feasible(config: GameConfig, params: AlgorithmParams) -> bool:
    return (
        config.n <= params.small_set_cap
        and count_canonical_colorings(config.n, config.c) <= (1 << 21)
    )


def brute_force_fallback(
    session: OracleSession, params: AlgorithmParams | None = None
) -> SolveResult:
    """Ask q-subsets until the consistency set settles the target: a ball
    certified in every consistent coloring, a certified absence, or
    Unknown when all queries are spent and both remain possible."""
    params = params or AlgorithmParams()
    if not fallback_feasible(session.config, params):
        raise CapacityError(
            f"n={session.config.n}, c={session.config.c} too large to enumerate"
        )
    return FallbackMachine(session.config).run(session)


# -- dispatch ----------------------------------------------------------------


def route_solver(config: GameConfig, params: AlgorithmParams | None = None) -> str:
    params = params or AlgorithmParams()
    if fallback_feasible(config, params):
        return "brute_force_fallback"
    if config.query_kind is QueryKind.PLURALITY:
        return "plurality_solve"
    if config.q % 2 == 1:
        return "mb_odd_two_colors" if config.c == 2 else "mb_odd_c_colors"
    return "mb_even_c_colors"


_SOLVERS = {
    "mb_odd_two_colors": mb_odd_two_colors,
    "mb_odd_c_colors": mb_odd_c_colors,
    "mb_even_c_colors": mb_even_c_colors,
    "plurality_solve": plurality_solve,
}


def solve(
    config: GameConfig,
    session: OracleSession,
    params: AlgorithmParams | None = None,
) -> SolveResult:
    """Dispatch to the right solver for the config; small instances go to
    the brute-force fallback."""
    if session.config != config:
        raise ValueError("session was built for a different config")
    params = params or AlgorithmParams()
    name = route_solver(config, params)
    if name == "brute_force_fallback":
        return brute_force_fallback(session, params)
    return _SOLVERS[name](session, params)
