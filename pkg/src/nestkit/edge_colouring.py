"""Proper edge colouring with at most max_degree + 1 colours.

Strongifying the pairs constructions reduces to edge colouring: the
graph on the old points whose edges are the pairs still nested at old
points gets a proper colouring, then each colour class is redirected to
one fresh point.  Vizing's theorem promises max_degree + 1 colours
always suffice, and the constructive Misra-Gries procedure below finds
such a colouring in O(V * E).

The result is never trusted blind.  is_proper_edge_colouring rebuilds
incidence lists from scratch and re-checks every adjacency, sharing no
state with the colouring routine, so a bug here fails loudly in the
callers that re-verify.

Vertices are 0..n-1, edges are unordered pairs stored as sorted tuples.
Colours are 0..max_degree.  Simple graphs only; loops and repeated
edges are rejected.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping

__all__ = ["edge_colour", "is_proper_edge_colouring", "max_degree", "colours_used"]

Edge = tuple[int, int]


def _normalize(n: int, edges: Iterable[Edge]) -> list[Edge]:
    out = []
    seen = set()
    for a, b in edges:
        if a == b:
            raise ValueError(f"loop at vertex {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"edge ({a},{b}) outside vertex range 0..{n - 1}")
        e = (a, b) if a < b else (b, a)
        if e in seen:
            raise ValueError(f"repeated edge {e}")
        seen.add(e)
        out.append(e)
    return sorted(out)


def max_degree(n: int, edges: Iterable[Edge]) -> int:
    deg = [0] * n
    for a, b in _normalize(n, edges):
        deg[a] += 1
        deg[b] += 1
    return max(deg, default=0)


def colours_used(colouring: Mapping[Edge, int]) -> int:
    return len(set(colouring.values()))


def edge_colour(n: int, edges: Iterable[Edge]) -> dict[Edge, int]:
    """Misra-Gries: proper colouring with colours in 0..max_degree."""
    edge_list = _normalize(n, edges)
    delta = max_degree(n, edge_list)
    col: dict[Edge, int] = {}
    # at[x] maps colour -> neighbour across the edge of that colour at x
    at: list[dict[int, int]] = [{} for _ in range(n)]

    def ekey(a: int, b: int) -> Edge:
        return (a, b) if a < b else (b, a)

    def assign(a: int, b: int, c: int) -> None:
        col[ekey(a, b)] = c
        at[a][c] = b
        at[b][c] = a

    def unassign(a: int, b: int) -> int:
        c = col.pop(ekey(a, b))
        del at[a][c]
        del at[b][c]
        return c

    def free(x: int) -> int:
        for c in range(delta + 1):
            if c not in at[x]:
                return c
        raise AssertionError("no free colour below delta+1")

    def invert_path(u: int, c: int, d: int) -> None:
        # walk the maximal path from u alternating d, c, d, ...; a proper
        # colouring makes the next step unique, and u is an endpoint of
        # its c/d component because c is free on u, so the walk is finite
        path = []
        x, want = u, d
        while want in at[x]:
            y = at[x][want]
            path.append((x, y))
            x, want = y, (c if want == d else d)
        # clear the whole path before recolouring: flipping edges one at
        # a time lets a transient clash overwrite incidence entries of
        # edges that merely touch the path
        flipped = []
        for a, b in path:
            old = unassign(a, b)
            flipped.append((a, b, c if old == d else d))
        for a, b, cc in flipped:
            assign(a, b, cc)

    for u, v in edge_list:
        # maximal fan out of u starting at the uncoloured edge's far end
        fan = [v]
        in_fan = {v}
        while True:
            last = fan[-1]
            nxt = None
            for c in sorted(at[u]):
                w = at[u][c]
                if w not in in_fan and c not in at[last]:
                    nxt = w
                    break
            if nxt is None:
                break
            fan.append(nxt)
            in_fan.add(nxt)

        c = free(u)
        d = free(fan[-1])
        if c != d:
            invert_path(u, c, d)

        # the inversion may have recoloured fan edges; rescan for the
        # first prefix of the fan, still valid under current colours,
        # whose tip has d free (Misra-Gries prove one exists)
        w_idx = None
        for i, f in enumerate(fan):
            if i > 0:
                cc = col.get(ekey(u, fan[i]))
                if cc is None or cc in at[fan[i - 1]]:
                    break
            if d not in at[f]:
                w_idx = i
                break
        if w_idx is None:
            raise AssertionError("fan rotation target not found; algorithm invariant broken")

        for m in range(w_idx):
            cc = unassign(u, fan[m + 1])
            assign(u, fan[m], cc)
        assign(u, fan[w_idx], d)

    return col


def is_proper_edge_colouring(
    n: int, edges: Iterable[Edge], colouring: Mapping[Edge, int]
) -> bool:
    """Independent recheck: total, and no two touching edges share a colour."""
    edge_list = _normalize(n, edges)
    if set(colouring) != set(edge_list):
        return False
    seen_at: dict[int, set[int]] = {}
    for a, b in edge_list:
        c = colouring[(a, b)]
        if not isinstance(c, int) or c < 0:
            return False
        for x in (a, b):
            bucket = seen_at.setdefault(x, set())
            if c in bucket:
                return False
            bucket.add(c)
    return True
