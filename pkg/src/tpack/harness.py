"""Threshold sweeps over digraph families, tightness checks, and reports.

Sweeps either enumerate every host meeting a degree condition (via the
complement, feasible when each vertex misses at most one arc per direction)
or sample seeded random hosts.  Each host is solved exactly; failures are
kept as replayable counterexample payloads.  Reports are pure functions of
their parameters and seed, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .core import (
    Digraph,
    DomainError,
    InvariantViolation,
    Tournament,
    all_tournaments,
    ceil_frac,
    digraph_to_text,
    k3_minus_pattern,
    load_digraph_text,
    min_semidegree,
    total_min_degree,
)
from .constructions import (
    make_c3_blowup,
    make_k3minus_example,
    make_near_independent_extremal,
    make_near_tournament_extremal,
    make_source_counterexample,
    random_digraph_min_semidegree,
    random_digraph_out_or_in,
    random_digraph_total_min_degree,
)
from .solver import (
    BUDGET_EXCEEDED,
    DEFAULT_BUDGET,
    EXHAUSTED_NONE,
    PACKED,
    find_perfect_family_packing,
    normalize_patterns,
    verify_packing,
)
from .t3local import SwapNotFound, t3_pack

__all__ = [
    "Counterexample",
    "SweepReport",
    "TightnessEntry",
    "TightnessReport",
    "iter_min_semidegree_hosts",
    "iter_out_or_in_hosts",
    "sweep_semidegree",
    "sweep_out_or_in",
    "sweep_total_degree_kr",
    "sweep_total_degree_c3",
    "tightness_suite",
    "replay_counterexample",
]

REPORT_SCHEMA = "tpack-report/1"

SCOPE_ALL_ORDERS = "all-orders"
SCOPE_ASYMPTOTIC = "asymptotic"
SCOPE_CONJECTURED = "conjectured"


# ---------------------------------------------------------------------------
# report types


@dataclass(frozen=True)
class Counterexample:
    """A host that defeated the sweep's claim, with everything needed to replay."""

    edge_list: str
    verdict: str
    nodes: int
    label: str
    patterns: tuple[str, ...]


@dataclass(frozen=True)
class SweepReport:
    kind: str
    params: tuple[tuple[str, object], ...]
    claim_scope: str
    examined: int
    packed: int
    budget_exceeded: int
    counterexamples: tuple[Counterexample, ...]
    elapsed: float

    def __post_init__(self):
        total = self.packed + self.budget_exceeded + len(self.counterexamples)
        if total != self.examined:
            raise InvariantViolation(
                f"tally {total} disagrees with {self.examined} examined"
            )

    @property
    def verdict(self) -> str:
        return "counterexample" if self.counterexamples else "consistent"

    def params_dict(self) -> dict:
        return dict(self.params)

    def to_dict(self, include_elapsed: bool = False) -> dict:
        out = {
            "schema": REPORT_SCHEMA,
            "kind": self.kind,
            "params": self.params_dict(),
            "claim_scope": self.claim_scope,
            "examined": self.examined,
            "packed": self.packed,
            "budget_exceeded": self.budget_exceeded,
            "verdict": self.verdict,
            "counterexamples": [
                {
                    "edge_list": c.edge_list,
                    "verdict": c.verdict,
                    "nodes": c.nodes,
                    "label": c.label,
                    "patterns": list(c.patterns),
                }
                for c in self.counterexamples
            ],
        }
        if include_elapsed:
            out["elapsed"] = self.elapsed
        return out

    def to_json(self, include_elapsed: bool = False) -> str:
        """Canonical form; wall time is excluded so reruns compare equal."""
        return json.dumps(self.to_dict(include_elapsed), sort_keys=True)


# ---------------------------------------------------------------------------
# exhaustive complement enumeration


def _partial_injections(n: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """All loop-free partial injections on n points, as (v, f(v)) arc tuples.

    These are exactly the complement digraphs with at most one missing arc
    per vertex per direction.
    """
    chosen: list[tuple[int, int]] = []

    def place(v: int, used: int) -> Iterator[tuple[tuple[int, int], ...]]:
        if v == n:
            yield tuple(chosen)
            return
        yield from place(v + 1, used)
        for w in range(n):
            if w != v and not (used >> w) & 1:
                chosen.append((v, w))
                yield from place(v + 1, used | (1 << w))
                chosen.pop()

    yield from place(0, 0)


def iter_min_semidegree_hosts(n: int, dmin: int) -> Iterator[Digraph]:
    """Every digraph on n vertices with min semidegree at least dmin.

    Feasible only when each vertex may miss at most one arc per direction
    (dmin at least n-2); larger deficiencies are refused.
    """
    if n < 1:
        raise DomainError("need at least one vertex")
    slack = n - 1 - dmin
    if slack < 0:
        return
    if slack == 0:
        yield Digraph.complete(n)
        return
    if slack > 1:
        raise DomainError(
            f"exhaustive enumeration needs deficiency at most 1 per direction, "
            f"got {slack}; lower n or raise the threshold, or use random mode"
        )
    complete = Digraph.complete(n)
    for arcs in _partial_injections(n):
        yield complete.minus_arcs(arcs)


def _row_masks(n: int, v: int, low: int, high: int) -> list[int]:
    pool = [w for w in range(n) if w != v]
    out = []
    for mask in range(1 << len(pool)):
        pc = mask.bit_count()
        if low <= pc <= high:
            real = 0
            m = mask
            while m:
                b = m & -m
                real |= 1 << pool[b.bit_length() - 1]
                m ^= b
            out.append(real)
    return sorted(out)


def _disjunction_complements(n: int, cap: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """All arc sets where every vertex has out-degree <= cap or in-degree <= cap.

    Cases are split by the exact witness set W = vertices with out-degree
    at most cap; rows outside W must exceed cap and keep in-degree at most
    cap, which the backtracking prunes as soon as it is violated.
    """
    light = [_row_masks(n, v, 0, cap) for v in range(n)]
    heavy = [_row_masks(n, v, cap + 1, n - 1) for v in range(n)]
    indeg = [0] * n
    rows: list[int] = []

    for wmask in range(1 << n):

        def place(v: int) -> Iterator[tuple[tuple[int, int], ...]]:
            if v == n:
                yield tuple(
                    (u, w)
                    for u, row in enumerate(rows)
                    for w in range(n)
                    if (row >> w) & 1
                )
                return
            options = light[v] if (wmask >> v) & 1 else heavy[v]
            for row in options:
                ok = True
                m = row
                while m:
                    b = m & -m
                    w = b.bit_length() - 1
                    indeg[w] += 1
                    if not (wmask >> w) & 1 and indeg[w] > cap:
                        # roll back this partial row
                        indeg[w] -= 1
                        mm = row & (b - 1)
                        while mm:
                            bb = mm & -mm
                            indeg[bb.bit_length() - 1] -= 1
                            mm ^= bb
                        ok = False
                        break
                    m ^= b
                if not ok:
                    continue
                rows.append(row)
                yield from place(v + 1)
                rows.pop()
                m = row
                while m:
                    b = m & -m
                    indeg[b.bit_length() - 1] -= 1
                    m ^= b

        yield from place(0)


def iter_out_or_in_hosts(n: int, t: int) -> Iterator[Digraph]:
    """Every digraph where each vertex has out-degree >= t or in-degree >= t.

    Same feasibility rule as iter_min_semidegree_hosts: the complement may
    carry at most one arc per direction per vertex on the relevant side.
    """
    if n < 1:
        raise DomainError("need at least one vertex")
    cap = n - 1 - t
    if cap < 0:
        return
    if cap > 1:
        raise DomainError(
            f"exhaustive enumeration needs deficiency at most 1 per direction, "
            f"got {cap}; lower n or raise the threshold, or use random mode"
        )
    complete = Digraph.complete(n)
    for arcs in _disjunction_complements(n, cap):
        yield complete.minus_arcs(arcs)


# ---------------------------------------------------------------------------
# sweep core


def _pattern_name(p: Digraph) -> str:
    try:
        t = Tournament.from_digraph(p)
    except DomainError:
        return f"digraph-{p.n}v-{p.num_arcs}a"
    if t == Tournament.transitive(t.n):
        return f"t{t.n}"
    if t.n == 3:
        return "c3"
    return f"tournament-{t.n}v"


def _derived_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def _run_sweep(
    kind: str,
    params: dict,
    scope: str,
    instances: Iterable[tuple[str, Digraph]],
    solve: Callable[[Digraph], tuple[str, int]],
    patterns_text: tuple[str, ...],
    family,
    budget: int,
) -> SweepReport:
    start = time.perf_counter()
    examined = packed = over = 0
    cexs: list[Counterexample] = []
    for label, g in instances:
        examined += 1
        outcome, nodes = solve(g)
        if outcome == PACKED:
            packed += 1
        elif outcome == BUDGET_EXCEEDED:
            over += 1
        else:
            reloaded = load_digraph_text(digraph_to_text(g))
            recheck = find_perfect_family_packing(reloaded, family, budget)
            if recheck.verdict != EXHAUSTED_NONE:
                raise InvariantViolation(
                    f"counterexample did not replay: got {recheck.verdict}"
                )
            cexs.append(
                Counterexample(
                    edge_list=digraph_to_text(g),
                    verdict=EXHAUSTED_NONE,
                    nodes=nodes,
                    label=label,
                    patterns=patterns_text,
                )
            )
    return SweepReport(
        kind=kind,
        params=tuple(sorted(params.items())),
        claim_scope=scope,
        examined=examined,
        packed=packed,
        budget_exceeded=over,
        counterexamples=tuple(cexs),
        elapsed=time.perf_counter() - start,
    )


def _solver_only(family, budget: int) -> Callable[[Digraph], tuple[str, int]]:
    def solve(g: Digraph) -> tuple[str, int]:
        cert = find_perfect_family_packing(g, family, budget)
        if cert.verdict == PACKED and not verify_packing(
            g, family, cert.packing, require_perfect=True
        ):
            raise InvariantViolation("solver produced an invalid packing")
        return cert.verdict, cert.nodes

    return solve


def sweep_semidegree(
    r: int,
    pattern: Digraph,
    n: int,
    mode: str = "random",
    samples: int = 100,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> SweepReport:
    """Solve every (or a sample of) host with min semidegree >= ceil((1-1/r)n)."""
    if r < 2:
        raise DomainError("pattern order must be at least 2")
    if n < r or n % r:
        raise DomainError(f"{r} must divide the host order {n}")
    tour = Tournament.from_digraph(pattern)
    if tour.n != r:
        raise DomainError(f"pattern has {tour.n} vertices, expected {r}")
    dmin = ceil_frac((r - 1) * n, r)
    family = normalize_patterns(pattern)
    params = {
        "r": r,
        "n": n,
        "pattern": _pattern_name(pattern),
        "threshold": dmin,
        "mode": mode,
        "samples": samples if mode == "random" else 0,
        "seed": seed if mode == "random" else 0,
    }
    if mode == "exhaustive":
        instances = (
            (f"enum:{i}", g) for i, g in enumerate(iter_min_semidegree_hosts(n, dmin))
        )
    elif mode == "random":
        instances = (
            (f"sample:{i}", random_digraph_min_semidegree(n, dmin, _derived_seed(seed, i)))
            for i in range(samples)
        )
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return _run_sweep(
        "semidegree",
        params,
        SCOPE_ASYMPTOTIC,
        instances,
        _solver_only(family, budget),
        (digraph_to_text(pattern),),
        family,
        budget,
    )


def _spans_transitive_triple(g: Digraph, a: int, b: int, c: int) -> bool:
    for x, y, z in (
        (a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a),
    ):
        if g.arc(x, y) and g.arc(x, z) and g.arc(y, z):
            return True
    return False


def _t3_first_fit(g: Digraph, node_cap: int = 256) -> bool:
    """Cheap existence probe: first-fit the lowest vertex into a transitive
    triple, backtracking under a small node budget.  True proves a perfect
    packing exists; False only means the probe gave up."""
    n = g.n
    nodes = 0

    def place(avail: int) -> bool:
        nonlocal nodes
        if not avail:
            return True
        nodes += 1
        if nodes > node_cap:
            return False
        a = (avail & -avail).bit_length() - 1
        rest = [v for v in range(a + 1, n) if (avail >> v) & 1]
        for i, b in enumerate(rest):
            for c in rest[i + 1:]:
                if _spans_transitive_triple(g, a, b, c):
                    if place(avail & ~((1 << a) | (1 << b) | (1 << c))):
                        return True
        return False

    return place((1 << n) - 1)


def sweep_out_or_in(
    r: int,
    n: int,
    mode: str = "random",
    samples: int = 100,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> SweepReport:
    """Hosts where each vertex has out- or in-degree >= ceil((1-1/r)n), solved
    for perfect transitive packings.

    For r = 3 a first-fit probe confirms most near-complete hosts straight
    from the arc bits, the dedicated local-search packer handles what the
    probe misses, and the exact solver settles anything left; only the exact
    solver can declare non-existence.
    """
    if r < 2:
        raise DomainError("pattern order must be at least 2")
    if n < r or n % r:
        raise DomainError(f"{r} must divide the host order {n}")
    t = ceil_frac((r - 1) * n, r)
    pattern = Tournament.transitive(r)
    family = normalize_patterns(pattern)
    params = {
        "r": r,
        "n": n,
        "pattern": _pattern_name(pattern),
        "threshold": t,
        "mode": mode,
        "samples": samples if mode == "random" else 0,
        "seed": seed if mode == "random" else 0,
    }
    solver_fallback = _solver_only(family, budget)

    def solve(g: Digraph) -> tuple[str, int]:
        if r == 3:
            if _t3_first_fit(g):
                return PACKED, 0
            try:
                packing, _ = t3_pack(g, budget)
            except SwapNotFound:
                return solver_fallback(g)
            if not verify_packing(g, pattern, packing, require_perfect=True):
                raise InvariantViolation("local-search packing failed verification")
            return PACKED, 0
        return solver_fallback(g)

    if mode == "exhaustive":
        instances = (
            (f"enum:{i}", g) for i, g in enumerate(iter_out_or_in_hosts(n, t))
        )
    elif mode == "random":
        instances = (
            (f"sample:{i}", random_digraph_out_or_in(n, _derived_seed(seed, i), t))
            for i in range(samples)
        )
    else:
        raise DomainError(f"unknown mode {mode!r}")
    scope = SCOPE_ALL_ORDERS if r == 3 else SCOPE_CONJECTURED
    return _run_sweep(
        "out-or-in",
        params,
        scope,
        instances,
        solve,
        (digraph_to_text(pattern),),
        family,
        budget,
    )


def sweep_total_degree_kr(
    r: int,
    n: int,
    samples: int = 100,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> SweepReport:
    """Sampled hosts with total degree >= (2-1/r)n - 1, solved for perfect
    complete-digraph packings (equivalently, cliques of mutual arc pairs)."""
    if r < 2:
        raise DomainError("pattern order must be at least 2")
    if n < r or n % r:
        raise DomainError(f"{r} must divide the host order {n}")
    t = ceil_frac((2 * r - 1) * n - r, r)
    pattern = Digraph.complete(r)
    family = normalize_patterns(pattern)
    params = {
        "r": r,
        "n": n,
        "pattern": f"k{r}",
        "threshold": t,
        "mode": "random",
        "samples": samples,
        "seed": seed,
    }
    instances = (
        (f"sample:{i}", random_digraph_total_min_degree(n, t, _derived_seed(seed, i)))
        for i in range(samples)
    )
    return _run_sweep(
        "kr-total",
        params,
        SCOPE_ALL_ORDERS,
        instances,
        _solver_only(family, budget),
        (digraph_to_text(pattern),),
        family,
        budget,
    )


def sweep_total_degree_c3(
    n: int,
    samples: int = 100,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> SweepReport:
    """Sampled hosts with total degree >= ceil((3n-3)/2), solved for perfect
    cyclic-triangle packings."""
    if n < 3 or n % 3:
        raise DomainError(f"3 must divide the host order {n}")
    t = ceil_frac(3 * n - 3, 2)
    pattern = Tournament.cyclic_triangle()
    family = normalize_patterns(pattern)
    params = {
        "r": 3,
        "n": n,
        "pattern": "c3",
        "threshold": t,
        "mode": "random",
        "samples": samples,
        "seed": seed,
    }
    instances = (
        (f"sample:{i}", random_digraph_total_min_degree(n, t, _derived_seed(seed, i)))
        for i in range(samples)
    )
    return _run_sweep(
        "c3-total",
        params,
        SCOPE_ALL_ORDERS,
        instances,
        _solver_only(family, budget),
        (digraph_to_text(pattern),),
        family,
        budget,
    )


def replay_counterexample(cex: Counterexample, budget: int = DEFAULT_BUDGET) -> bool:
    """Reload a persisted counterexample and confirm the non-existence verdict."""
    g = load_digraph_text(cex.edge_list)
    family = [load_digraph_text(p) for p in cex.patterns]
    cert = find_perfect_family_packing(g, family, budget)
    return cert.verdict == cex.verdict


# ---------------------------------------------------------------------------
# tightness suite


@dataclass(frozen=True)
class TightnessEntry:
    family: str
    statistic: str
    expected: int
    actual: int
    checks: tuple[tuple[str, str, int], ...]  # (pattern name, verdict, nodes)


@dataclass(frozen=True)
class TightnessReport:
    r: int
    n: int
    entries: tuple[TightnessEntry, ...]

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "kind": "tightness",
            "r": self.r,
            "n": self.n,
            "entries": [
                {
                    "family": e.family,
                    "statistic": e.statistic,
                    "expected": e.expected,
                    "actual": e.actual,
                    "checks": [
                        {"pattern": p, "verdict": v, "nodes": k}
                        for p, v, k in e.checks
                    ],
                }
                for e in self.entries
            ],
        }


def _expect_none(g: Digraph, pattern: Digraph, name: str, budget: int):
    cert = find_perfect_family_packing(g, [pattern], budget)
    if cert.verdict != EXHAUSTED_NONE:
        raise InvariantViolation(
            f"{name}: expected no perfect packing, solver said {cert.verdict}"
        )
    return (name, cert.verdict, cert.nodes)


def tightness_suite(r: int, n: int, budget: int = DEFAULT_BUDGET) -> TightnessReport:
    """Build each extremal family applicable at (r, n), assert its advertised
    degree statistic exactly, and prove the advertised non-packability by
    exhaustive search.  Any mismatch raises; success returns the report."""
    if r < 2:
        raise DomainError("pattern order must be at least 2")
    if n < r or n % r:
        raise DomainError(f"{r} must divide the host order {n}")
    entries: list[TightnessEntry] = []

    g = make_near_independent_extremal(n, r)
    expected = n - n // r - 1
    actual = min_semidegree(g)
    if actual != expected:
        raise InvariantViolation(
            f"near-independent: min semidegree {actual}, expected {expected}"
        )
    checks = []
    for t in all_tournaments(r):
        checks.append(_expect_none(g, t, _pattern_name(t), budget))
    entries.append(
        TightnessEntry(
            "near-independent", "min-semidegree", expected, actual, tuple(checks)
        )
    )

    gt = make_near_tournament_extremal(n, r)
    expected = 2 * n - n // r - 2
    actual = total_min_degree(gt)
    if actual != expected:
        raise InvariantViolation(
            f"near-tournament: total min degree {actual}, expected {expected}"
        )
    checks = (_expect_none(gt, Digraph.complete(r), f"k{r}", budget),)
    entries.append(
        TightnessEntry("near-tournament", "total-min-degree", expected, actual, checks)
    )

    if r == 3:
        if n >= 9:
            ex1, _ = make_c3_blowup(n, 1)
            expected = 2 * n // 3 - 2
            actual = min_semidegree(ex1)
            if actual != expected:
                raise InvariantViolation(
                    f"shifted-blow-up: min semidegree {actual}, expected {expected}"
                )
            checks = [
                _expect_none(ex1, Tournament.cyclic_triangle(), "c3", budget)
            ]
            mixed = find_perfect_family_packing(
                ex1, all_tournaments(3), budget
            )
            if mixed.verdict != PACKED:
                raise InvariantViolation(
                    "shifted-blow-up: expected a mixed-triangle packing, got "
                    + mixed.verdict
                )
            checks.append(("t3+c3", mixed.verdict, mixed.nodes))
            entries.append(
                TightnessEntry(
                    "shifted-blow-up",
                    "min-semidegree",
                    expected,
                    actual,
                    tuple(checks),
                )
            )

        src = make_source_counterexample(n)
        expected = n - 2
        actual = min(src.d_out(v) for v in range(n))
        if actual != expected:
            raise InvariantViolation(
                f"source: min out-degree {actual}, expected {expected}"
            )
        checks = (_expect_none(src, Tournament.cyclic_triangle(), "c3", budget),)
        entries.append(
            TightnessEntry("source", "min-out-degree", expected, actual, checks)
        )

        if n >= 15 and (n - 3) % 2 == 0 and ((n - 3) // 2) % 6 == 0:
            m = (n - 3) // 2
            gk = make_k3minus_example(m)
            expected = (3 * n - 5) // 4
            actual = min_semidegree(gk)
            if actual != expected:
                raise InvariantViolation(
                    f"k3-minus-extremal: min semidegree {actual}, expected {expected}"
                )
            checks = (_expect_none(gk, k3_minus_pattern(), "k3-minus", budget),)
            entries.append(
                TightnessEntry(
                    "k3-minus-extremal", "min-semidegree", expected, actual, checks
                )
            )

    return TightnessReport(r, n, tuple(entries))
