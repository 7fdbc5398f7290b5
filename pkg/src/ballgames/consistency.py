"""Consistency enumeration: all colorings compatible with a transcript.

Two flavors.  ConsistencyTable enumerates 2-colorings of a small ball set
as bitmasks (one numpy row per coloring, up to color swap) and supports
the certifications the toolkit needs.  The canonical-coloring helpers
enumerate general <=c colorings for the brute-force fallback and the
verifier's indeterminacy checks.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .model import CapacityError, QueryKind, Target

_POPCOUNT = np.bitwise_count


class ConsistencyTable:
    """All 2-colorings of a fixed small ball set, filtered by answers.

    Ball order[0] is pinned to color 0, halving the space; every filter
    rule used here is color-symmetric so nothing is lost.  Queries must
    lie entirely inside the ball set.
    """

    def __init__(self, balls: Sequence[int], max_bits: int = 24):
        self.balls = tuple(sorted(balls))
        L = len(self.balls)
        if L > max_bits:
            raise CapacityError(f"{L} balls exceed the enumeration cap")
        self.pos = {b: i for i, b in enumerate(self.balls)}
        # ball 0 of the order carries bit 0, pinned to color 0
        self.masks = np.arange(0, 1 << L, 2, dtype=np.uint32)
        self._ones_total = _POPCOUNT(self.masks).astype(np.int8)

    def __len__(self) -> int:
        return len(self.masks)

    @property
    def is_empty(self) -> bool:
        return len(self.masks) == 0

    def _keep(self, keep: np.ndarray) -> None:
        if not keep.all():
            self.masks = self.masks[keep]
            self._ones_total = self._ones_total[keep]

    def _query_mask(self, query: Iterable[int]) -> tuple[int, int]:
        m = 0
        ln = 0
        for b in query:
            m |= 1 << self.pos[b]
            ln += 1
        return m, ln

    def apply(self, query: Iterable[int], presented: int | None) -> None:
        """Filter by one majority/plurality answer (same rule at 2 colors:
        YES(p) iff p's class strictly exceeds half the query, NO iff tie)."""
        qmask, qlen = self._query_mask(query)
        sub_ones = _POPCOUNT(self.masks & np.uint32(qmask)).astype(np.int8)
        if presented is None:
            self._keep(2 * sub_ones == qlen)
            return
        pbit = (self.masks >> np.uint32(self.pos[presented])) & np.uint32(1)
        own = np.where(pbit.astype(bool), sub_ones, qlen - sub_ones)
        self._keep(2 * own > qlen)

    def apply_triple_majority(self, triple: Sequence[int], presented: int) -> None:
        """Filter by "presented matches >=2 of this 3-ball set" (the
        effective size-3 semantics of padded queries)."""
        qmask, qlen = self._query_mask(triple)
        sub_ones = _POPCOUNT(self.masks & np.uint32(qmask)).astype(np.int8)
        pbit = (self.masks >> np.uint32(self.pos[presented])) & np.uint32(1)
        own = np.where(pbit.astype(bool), sub_ones, qlen - sub_ones)
        self._keep(2 * own > qlen)

    def apply_with_external(
        self,
        query_part: Iterable[int],
        external: int,
        presented: int | None,
        presented_external: bool,
        kind: QueryKind,
    ) -> None:
        """Filter by an answer to (query_part + `external` balls of one
        known class disjoint from the table's two colors)."""
        qmask, qlen = self._query_mask(query_part)
        ones = _POPCOUNT(self.masks & np.uint32(qmask)).astype(np.int32)
        zeros = qlen - ones
        total = qlen + external
        if presented is None:
            if kind is QueryKind.MAJORITY:
                top = np.maximum(np.maximum(ones, zeros), external)
                self._keep(2 * top <= total)
            else:
                top = np.maximum(np.maximum(ones, zeros), external)
                ties = (
                    (ones == top).astype(np.int8)
                    + (zeros == top).astype(np.int8)
                    + np.int8(external == top)
                )
                self._keep(ties >= 2)
            return
        if presented_external:
            own = np.full(len(self.masks), external, dtype=np.int32)
            others = np.maximum(ones, zeros)
        else:
            assert presented is not None
            pbit = ((self.masks >> np.uint32(self.pos[presented])) & np.uint32(1)).astype(
                bool
            )
            own = np.where(pbit, ones, zeros)
            others = np.maximum(np.where(pbit, zeros, ones), external)
        if kind is QueryKind.MAJORITY:
            self._keep(2 * own > total)
        else:
            self._keep(own > others)

    # -- certifications ----------------------------------------------------

    def certify_nonminority(self) -> int | None:
        """Lowest ball that is non-minority in every remaining coloring."""
        if self.is_empty:
            return None
        L = len(self.balls)
        ones = self._ones_total
        for i, b in enumerate(self.balls):
            bit = ((self.masks >> np.uint32(i)) & np.uint32(1)).astype(bool)
            ok = np.where(bit, 2 * ones >= L, 2 * (L - ones) >= L)
            if ok.all():
                return b
        return None

    def best_effort_nonminority(self) -> int:
        """Ball non-minority in the most remaining colorings (fallback)."""
        if self.is_empty:
            return self.balls[0]
        L = len(self.balls)
        ones = self._ones_total
        best_b, best_score = self.balls[0], -1
        for i, b in enumerate(self.balls):
            bit = ((self.masks >> np.uint32(i)) & np.uint32(1)).astype(bool)
            score = int(np.where(bit, 2 * ones >= L, 2 * (L - ones) >= L).sum())
            if score > best_score:
                best_b, best_score = b, score
        return best_b

    def restrict_min_class(self, kmin: int) -> None:
        """Keep only colorings where both color classes have >= kmin balls."""
        L = len(self.balls)
        ones = self._ones_total
        self._keep((ones >= kmin) & (L - ones >= kmin))

    def _pair_relations(self) -> tuple[np.ndarray, np.ndarray]:
        """(always_same, always_diff) boolean matrices over ball indices."""
        L = len(self.balls)
        N = len(self.masks)
        same = np.zeros((L, L), dtype=bool)
        diff = np.zeros((L, L), dtype=bool)
        for i in range(L):
            bi = (self.masks >> np.uint32(i)) & np.uint32(1)
            for j in range(i + 1, L):
                bj = (self.masks >> np.uint32(j)) & np.uint32(1)
                agree = int((bi == bj).sum())
                same[i, j] = same[j, i] = agree == N
                diff[i, j] = diff[j, i] = agree == 0
        return same, diff

    def certified_opposite_split(self, k: int) -> tuple[list[int], list[int]] | None:
        """Two disjoint k-sets, monochromatic and oppositely colored in
        every remaining coloring, or None."""
        if self.is_empty:
            return None
        same, diff = self._pair_relations()
        L = len(self.balls)
        comp = list(range(L))

        def find(x: int) -> int:
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for i in range(L):
            for j in range(i + 1, L):
                if same[i, j]:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        comp[max(ri, rj)] = min(ri, rj)
        groups: dict[int, list[int]] = {}
        for i in range(L):
            groups.setdefault(find(i), []).append(i)
        roots = sorted(groups)
        for a_idx, ra in enumerate(roots):
            ga = groups[ra]
            if len(ga) < k:
                continue
            for rb in roots[a_idx + 1:]:
                gb = groups[rb]
                if len(gb) < k:
                    continue
                if diff[ga[0], gb[0]]:
                    A = [self.balls[i] for i in ga[:k]]
                    B = [self.balls[i] for i in gb[:k]]
                    return A, B
        return None

    def certified_same_groups(self) -> list[list[int]]:
        """Maximal groups of balls pairwise same-colored in every remaining
        coloring, sorted largest first then by lowest ball id."""
        if self.is_empty:
            return []
        same, _ = self._pair_relations()
        L = len(self.balls)
        seen = [False] * L
        groups = []
        for i in range(L):
            if seen[i]:
                continue
            grp = [i]
            seen[i] = True
            for j in range(i + 1, L):
                if not seen[j] and same[i, j]:
                    grp.append(j)
                    seen[j] = True
            groups.append(sorted(self.balls[x] for x in grp))
        groups.sort(key=lambda g: (-len(g), g[0]))
        return groups


# -- general <=c colorings for small instances ----------------------------


def count_canonical_colorings(n: int, c: int) -> int:
    """Number of colorings of n balls with <= c colors, up to renaming."""
    # DP over (balls placed, colors used)
    row = [0] * (c + 1)
    row[1] = 1
    for _ in range(n - 1):
        nxt = [0] * (c + 1)
        for used in range(1, c + 1):
            if row[used] == 0:
                continue
            nxt[used] += row[used] * used
            if used < c:
                nxt[used + 1] += row[used]
        row = nxt
    return sum(row)


def enumerate_canonical_colorings(
    n: int, c: int, cap: int = 1 << 22
) -> np.ndarray:
    """All colorings of n balls with <= c colors, up to color renaming
    (first occurrences get increasing labels).  Shape (N, n) uint8."""
    if count_canonical_colorings(n, c) > cap:
        raise CapacityError(f"too many colorings for n={n}, c={c}")
    out: list[list[int]] = []
    cur = [0] * n

    def rec(i: int, used: int) -> None:
        if i == n:
            out.append(cur.copy())
            return
        for col in range(min(used + 1, c)):
            cur[i] = col
            rec(i + 1, max(used, col + 1))

    rec(1, 1)
    return np.array(out, dtype=np.uint8)


def class_count_matrix(colorings: np.ndarray, c: int) -> np.ndarray:
    """(N, c) class sizes per coloring row."""
    N, _ = colorings.shape
    counts = np.empty((N, c), dtype=np.int32)
    for col in range(c):
        counts[:, col] = (colorings == col).sum(axis=1)
    return counts


def filter_by_answer(
    colorings: np.ndarray,
    c: int,
    query: Sequence[int],
    presented: int | None,
    kind: QueryKind,
) -> np.ndarray:
    """Rows of `colorings` consistent with one recorded answer."""
    sub = colorings[:, list(query)]
    q = len(query)
    counts = class_count_matrix(sub, c)
    mx = counts.max(axis=1)
    if presented is None:
        if kind is QueryKind.MAJORITY:
            keep = 2 * mx <= q
        else:
            keep = (counts == mx[:, None]).sum(axis=1) >= 2
    else:
        own_color = colorings[:, presented].astype(np.int64)
        own = counts[np.arange(len(counts)), own_color]
        if kind is QueryKind.MAJORITY:
            keep = 2 * own > q
        else:
            keep = (own == mx) & ((counts == mx[:, None]).sum(axis=1) == 1)
    return colorings[keep]


def filter_window_answer(
    colorings: np.ndarray,
    c: int,
    sub_cols: Sequence[int],
    external: int,
    presented_col: int | None,
    presented_external: bool,
    kind: QueryKind,
) -> np.ndarray:
    """Filter window colorings by an answer to (window subset + `external`
    filler balls of a known class foreign to the window)."""
    sub = colorings[:, list(sub_cols)]
    counts = class_count_matrix(sub, c)
    part_top = counts.max(axis=1)
    total = len(sub_cols) + external
    if presented_external:
        if kind is QueryKind.MAJORITY:
            keep = 2 * external > total
            return colorings if keep else colorings[:0]
        return colorings[external > part_top]
    if presented_col is None:
        top = np.maximum(part_top, external)
        if kind is QueryKind.MAJORITY:
            return colorings[2 * top <= total]
        at_top = (counts == top[:, None]).sum(axis=1) + (external == top)
        return colorings[at_top >= 2]
    own_color = colorings[:, presented_col].astype(np.int64)
    own = counts[np.arange(len(counts)), own_color]
    if kind is QueryKind.MAJORITY:
        return colorings[2 * own > total]
    # presented ball's class must strictly beat every other class and the filler
    strict = (own == part_top) & ((counts == part_top[:, None]).sum(axis=1) == 1)
    return colorings[strict & (own > external)]


def certified_same_columns(colorings: np.ndarray) -> list[list[int]]:
    """Groups of columns equal in every row, largest first."""
    n = colorings.shape[1]
    seen: set[int] = set()
    groups = []
    for i in range(n):
        if i in seen:
            continue
        grp = [i]
        seen.add(i)
        for j in range(i + 1, n):
            if j not in seen and bool((colorings[:, i] == colorings[:, j]).all()):
                grp.append(j)
                seen.add(j)
        groups.append(grp)
    groups.sort(key=lambda g: (-len(g), g[0]))
    return groups


def target_ball_flags(
    colorings: np.ndarray, c: int, target: Target
) -> np.ndarray:
    """(N, n) booleans: ball satisfies the target under each coloring."""
    N, n = colorings.shape
    counts = class_count_matrix(colorings, c)
    rows = np.arange(N)
    own = counts[rows[:, None], colorings.astype(np.int64)]
    non_minority = 2 * own >= n
    if target is Target.NON_MINORITY:
        return non_minority
    mx = counts.max(axis=1)
    unique_top = (counts == mx[:, None]).sum(axis=1) == 1
    plurality = (own == mx[:, None]) & unique_top[:, None]
    return plurality | non_minority
