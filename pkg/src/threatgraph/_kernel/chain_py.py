"""Pure-Python chain-search kernel.

Reference implementation of the hot inner loops; the compiled twin in
``chain_cy.pyx`` must produce identical output. Alerts arrive as parallel
integer arrays, already sorted chronologically and filtered to the ones the
threat graph matched. Index ``j`` may follow index ``i`` in a chain iff:

* ``i`` precedes ``j`` in the sorted order (i < j);
* the pivot holds: ``dest[i] == src[j]`` with ``src[i] != dest[i]`` (a
  self-looping alert may close a chain but never pivots onward);
* the time gap ``ts[j] - ts[i]`` is within ``max_gap_ms`` when nonzero;
* the tactic constraint holds (0 = off, 1 = non-decreasing, 2 = strict).

A chain is an index tuple of length 2..max_len whose consecutive pairs all
satisfy the transition rule, starting at an anchored alert when anchoring
is required.
"""

from __future__ import annotations

from typing import Sequence

EMIT_ALL = 0
EMIT_UNEXTENDABLE = 1


def _successors(
    src: Sequence[int],
    dest: Sequence[int],
    ts: Sequence[int],
    tactic: Sequence[int],
    max_gap_ms: int,
    tactic_mode: int,
) -> list[list[int]]:
    n = len(src)
    succ: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        if src[i] == dest[i]:
            continue
        for j in range(i + 1, n):
            if src[j] != dest[i]:
                continue
            if max_gap_ms > 0 and ts[j] - ts[i] > max_gap_ms:
                continue
            if tactic_mode == 1 and tactic[j] < tactic[i]:
                continue
            if tactic_mode == 2 and tactic[j] <= tactic[i]:
                continue
            succ[i].append(j)
    return succ


def find_chains(
    src: Sequence[int],
    dest: Sequence[int],
    ts: Sequence[int],
    tactic: Sequence[int],
    max_gap_ms: int,
    tactic_mode: int,
    max_len: int,
    anchor_required: bool,
    external_idx: int,
    emit_mode: int,
) -> list[tuple[int, ...]]:
    """Enumerate valid chains as index tuples, in DFS preorder.

    ``EMIT_ALL`` yields every valid chain. ``EMIT_UNEXTENDABLE`` yields only
    chains that cannot grow by one alert at either end and still be valid:
    a superset of the subsequence-maximal chains (detour-containment is
    settled afterwards by :func:`filter_maximal`), and every valid chain is
    a subsequence of some emitted one.
    """
    src = list(src)
    dest = list(dest)
    ts = list(ts)
    tactic = list(tactic)
    n = len(src)
    succ = _successors(src, dest, ts, tactic, max_gap_ms, tactic_mode)

    can_start = [not anchor_required or src[i] == external_idx for i in range(n)]
    # has_pred[j]: some alert that may head a chain transitions into j, so
    # any chain starting at j and shorter than max_len can be prepended to.
    has_pred = [False] * n
    if emit_mode == EMIT_UNEXTENDABLE:
        for i in range(n):
            if can_start[i]:
                for j in succ[i]:
                    has_pred[j] = True

    out: list[tuple[int, ...]] = []
    path: list[int] = []

    def grow(i: int, prependable: bool) -> None:
        path.append(i)
        depth = len(path)
        if depth >= 2:
            if emit_mode == EMIT_ALL:
                out.append(tuple(path))
            elif depth == max_len or (not prependable and not succ[i]):
                out.append(tuple(path))
        if depth < max_len:
            for j in succ[i]:
                grow(j, prependable)
        path.pop()

    for i in range(n):
        if not can_start[i]:
            continue
        grow(i, has_pred[i])
    return out


def filter_maximal(chains: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Drop every chain that is a proper subsequence of a longer chain.

    Processes chains longest first; a chain is only ever compared against
    strictly longer kept chains (equal lengths cannot contain each other),
    and containment is transitive, so comparing against kept ones suffices.
    """
    order = sorted(range(len(chains)), key=lambda k: len(chains[k]), reverse=True)
    keep = [True] * len(chains)
    longer: list[tuple[int, ...]] = []
    group: list[tuple[int, ...]] = []
    group_len = -1
    for k in order:
        chain = chains[k]
        if len(chain) != group_len:
            longer.extend(group)
            group = []
            group_len = len(chain)
        for other in longer:
            if _is_subsequence(chain, other):
                keep[k] = False
                break
        if keep[k]:
            group.append(chain)
    return [chains[k] for k in range(len(chains)) if keep[k]]


def _is_subsequence(needle: tuple[int, ...], haystack: tuple[int, ...]) -> bool:
    pos = 0
    for value in haystack:
        if value == needle[pos]:
            pos += 1
            if pos == len(needle):
                return True
    return False
