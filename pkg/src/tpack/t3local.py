"""Transitive-triangle factors under the per-vertex two-thirds degree condition.

Pipeline: strip arcs down to a locally minimal subdigraph that still satisfies
the condition, take a perfect triangle packing of the underlying graph as a
mixed seed, then convert cyclic elements into transitive ones by local swap
moves that rebuild six vertices as two transitive triangles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Digraph,
    DomainError,
    Embedding,
    InvariantViolation,
    Tournament,
    bits,
    ceil_frac,
    mask_of,
    spans_copy,
)
from .solver import (
    DEFAULT_BUDGET,
    PACKED,
    Packing,
    find_perfect_packing,
)

_T3 = Tournament.transitive(3)
_C3 = Tournament.cyclic_triangle()
_C3_KEY = tuple(_C3.out_mask(v) for v in range(3))


def two_thirds_threshold(n: int) -> int:
    """Smallest integer degree meeting the 2n/3 bound."""
    return ceil_frac(2 * n, 3)


def satisfies_out_or_in(g: Digraph, t: int | None = None) -> bool:
    """Every vertex has outdegree >= t or indegree >= t (default t = ceil(2n/3))."""
    if t is None:
        t = two_thirds_threshold(g.n)
    return all(max(g.d_out(v), g.d_in(v)) >= t for v in range(g.n))


def minimize_arcs_two_thirds(g: Digraph) -> Digraph:
    """Greedy arc removal to a local minimum preserving the two-thirds condition.

    Scans arcs in lexicographic order, removing any arc whose removal keeps
    every vertex at outdegree or indegree >= 2n/3, and repeats until a full
    pass removes nothing.  The output satisfies the condition and no single
    remaining arc is removable.
    """
    n = g.n
    t = two_thirds_threshold(n)
    if not satisfies_out_or_in(g, t):
        raise DomainError("input violates the two-thirds out-or-in condition")
    rows = [g.out_mask(v) for v in range(n)]
    dout = [g.d_out(v) for v in range(n)]
    din = [g.d_in(v) for v in range(n)]
    changed = True
    while changed:
        changed = False
        for u in range(n):
            for v in list(bits(rows[u])):
                if max(dout[u] - 1, din[u]) >= t and max(dout[v], din[v] - 1) >= t:
                    rows[u] ^= 1 << v
                    dout[u] -= 1
                    din[v] -= 1
                    changed = True
    return Digraph(n, rows)


def _element_is_cyclic(e: Embedding) -> bool:
    return tuple(e.pattern.out_mask(v) for v in range(e.pattern.n)) == _C3_KEY


def _embed_triple(h: Digraph, triple) -> Embedding:
    """Triple to a transitive element if possible, else cyclic."""
    e = spans_copy(h, triple, _T3)
    if e is None:
        e = spans_copy(h, triple, _C3)
    if e is None:
        raise InvariantViolation(f"triple {tuple(triple)} spans no triangle tournament")
    return e


@dataclass(frozen=True)
class SwapStep:
    rule: str
    removed: tuple[Embedding, ...]
    inserted: tuple[Embedding, ...]


@dataclass(frozen=True)
class SwapTrace:
    steps: tuple[SwapStep, ...]


class SwapNotFound(InvariantViolation):
    """No cyclic element admits a move; the two-thirds precondition should rule this out."""


def _transitive_count(elements) -> int:
    return sum(0 if _element_is_cyclic(e) else 1 for e in elements)


def swap_c3(g: Digraph, packing: Packing, idx: int) -> tuple[Packing, SwapStep] | None:
    """One local move removing the cyclic element at idx, or None if stuck.

    Either the element's own triple spans a transitive triangle in g, or some
    other element exchanges vertices with it: an element whose triple trades
    at least 7 arcs with the cycle yields a vertex fully joined to it plus a
    common neighbour for the remaining two, letting the six vertices be
    rebuilt as two transitive triangles.
    """
    if not 0 <= idx < len(packing.elements):
        raise DomainError(f"element index {idx} out of range")
    cyc = packing.elements[idx]
    if not _element_is_cyclic(cyc):
        raise DomainError(f"element {idx} is not a cyclic triangle")
    triple = tuple(sorted(cyc.image))

    direct = spans_copy(g, triple, _T3)
    if direct is not None:
        elements = list(packing.elements)
        elements[idx] = direct
        step = SwapStep("in-place", (cyc,), (direct,))
        return Packing(g.n, tuple(elements)), step

    for j, other in enumerate(packing.elements):
        if j == idx:
            continue
        omask = other.vertex_mask
        sent = sum(g.d_out_to(x, omask) for x in triple)
        received = sum(g.d_in_from(x, omask) for x in triple)
        for mode, count in (("out", sent), ("in", received)):
            if count < 7:
                continue
            rebuilt = _rebuild_pair(g, triple, tuple(sorted(bits(omask))), mode)
            if rebuilt is None:
                continue
            elements = [e for k, e in enumerate(packing.elements) if k not in (idx, j)]
            elements.extend(rebuilt)
            step = SwapStep(f"rebuild-{mode}", (cyc, other), tuple(rebuilt))
            return Packing(g.n, tuple(elements)), step
    return None


def _rebuild_pair(g: Digraph, triple, tverts, mode: str):
    """Split the six vertices into two transitive triangles, lowest indices first."""
    tmask = mask_of(tverts)
    for x in triple:
        if mode == "out":
            if g.d_out_to(x, tmask) != 3:
                continue
        else:
            if g.d_in_from(x, tmask) != 3:
                continue
        y, z = (w for w in triple if w != x)
        for tstar in tverts:
            if mode == "out":
                joined = g.arc(y, tstar) and g.arc(z, tstar)
            else:
                joined = g.arc(tstar, y) and g.arc(tstar, z)
            if not joined:
                continue
            rest = tuple(w for w in tverts if w != tstar)
            first = spans_copy(g, (y, z, tstar), _T3)
            second = spans_copy(g, (x,) + rest, _T3)
            if first is not None and second is not None:
                return (first, second)
    return None


def t3_pack(g: Digraph, budget: int = DEFAULT_BUDGET) -> tuple[Packing, SwapTrace]:
    """Perfect transitive-triangle packing under the two-thirds condition.

    Raises SwapNotFound if the swap loop ever sticks, which the degree
    argument rules out for valid inputs; treat an occurrence as a bug report.
    """
    n = g.n
    if n % 3:
        raise DomainError(f"3 must divide the host order, got {n}")
    if not satisfies_out_or_in(g):
        raise DomainError("input violates the two-thirds out-or-in condition")
    if n == 0:
        return Packing(0, ()), SwapTrace(())

    h = minimize_arcs_two_thirds(g)
    under = h.underlying()
    if under.min_degree() < two_thirds_threshold(n):
        raise InvariantViolation("minimized digraph lost the underlying degree bound")
    seed_cert = find_perfect_packing(under.as_digraph(), Digraph.complete(3), budget)
    if seed_cert.verdict != PACKED:
        raise InvariantViolation(
            f"no perfect triangle packing of the underlying graph ({seed_cert.verdict})"
        )

    elements = [_embed_triple(h, sorted(e.image)) for e in seed_cert.packing.elements]
    steps: list[SwapStep] = []
    packing = Packing(n, tuple(elements))
    guard = n
    while True:
        cyc_idx = next(
            (i for i, e in enumerate(packing.elements) if _element_is_cyclic(e)), None
        )
        if cyc_idx is None:
            break
        before = _transitive_count(packing.elements)
        moved = swap_c3(h, packing, cyc_idx)
        if moved is None:
            raise SwapNotFound(
                f"cyclic element {sorted(packing.elements[cyc_idx].image)} admits no move"
            )
        packing, step = moved
        steps.append(step)
        if _transitive_count(packing.elements) <= before:
            raise InvariantViolation("swap did not increase the transitive count")
        guard -= 1
        if guard < 0:
            raise InvariantViolation("swap loop exceeded its step bound")
    return packing, SwapTrace(tuple(steps))
