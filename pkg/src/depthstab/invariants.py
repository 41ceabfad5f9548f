"""Depth-stability invariants of edge ideals and the checks built on them.

The central routine is depth_sequence: for a connected graph with at least
two edges, dstab(I_G) < l(I_G), so depths of S/I^k for k = 1..l-1 already
determine dstab.  The limit depth is known in advance (0 for non-bipartite
graphs, 1 for bipartite ones), which turns the finite loop into a checkable
statement rather than a guess.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

import networkx as nx

from .errors import DepthStabError, PreconditionError, ResourceLimitError
from .graphs import (
    Graph,
    broom_parameters,
    distance_two_condition,
    graph_metrics,
    incidence_matrix,
)
from .homology import BOX_CAP, depth, socle_depth_zero_oracle
from .ideals import (
    GENERATOR_CAP,
    MonomialIdeal,
    edge_ideal,
    exponent_matrix,
    format_monomial,
    localize,
    power,
    powers,
    substitute,
    substitute_monomial,
)
from .linalg import QQ, Field

log = logging.getLogger(__name__)

ASS_MAX_VARS = 14


# ---------------------------------------------------------------------------
# linear relation graph, analytic spread, bounds

@dataclass(frozen=True)
class RelationGraphStats:
    gamma: Graph
    r: int
    s: int

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.gamma.edges for v in e}))


def linear_relation_graph(ideal: MonomialIdeal) -> RelationGraphStats:
    """Graph joining i, j when x_i u = x_j v for two minimal generators u, v."""
    if not ideal.is_single_degree():
        raise PreconditionError("linear relation graph needs generators of a single degree")
    buckets: dict[tuple[int, ...], set[int]] = {}
    for u in ideal.gens:
        for i in range(ideal.n):
            key = u[:i] + (u[i] + 1,) + u[i + 1:]
            buckets.setdefault(key, set()).add(i + 1)
    edges = set()
    for vars_ in buckets.values():
        for i, j in combinations(sorted(vars_), 2):
            edges.add((i, j))
    gamma = Graph(ideal.n, tuple(sorted(edges)))
    verts = {v for e in edges for v in e}
    g = nx.Graph(list(edges))
    s = nx.number_connected_components(g) if verts else 0
    return RelationGraphStats(gamma, len(verts), s)


def analytic_spread(g: Graph, check: bool = True) -> int:
    """l(I_G) as the rank of the vertex-edge incidence matrix over Q."""
    if not g.edges:
        raise PreconditionError("analytic spread needs at least one edge")
    ell = incidence_matrix(g).rank(QQ)
    if check:
        other = analytic_spread_ideal(edge_ideal(g))
        if other != ell:
            raise AssertionError(f"incidence rank {ell} != exponent rank {other}")
        m = graph_metrics(g)
        if m.connected:
            closed = g.n - 1 if m.bipartite else g.n
            if closed != ell:
                raise AssertionError(f"incidence rank {ell} != closed form {closed}")
    return ell


def analytic_spread_ideal(ideal: MonomialIdeal) -> int:
    """Rank of the exponent matrix; equals l(I) for single-degree monomial ideals."""
    if not ideal.is_single_degree():
        raise PreconditionError("exponent-matrix rank gives the analytic spread only in a single degree")
    return exponent_matrix(ideal).rank(QQ)


def depth_upper_bound(ideal: MonomialIdeal, t: int, stats: RelationGraphStats | None = None) -> int:
    """n - t - 1, claimed as an upper bound for depth S/I^t when 1 <= t <= r - s."""
    stats = stats or linear_relation_graph(ideal)
    if not 1 <= t <= stats.r - stats.s:
        raise PreconditionError(f"bound holds for 1 <= t <= r-s = {stats.r - stats.s}, got t={t}")
    return ideal.n - t - 1


def spread_lower_bound(ideal: MonomialIdeal, stats: RelationGraphStats | None = None) -> int:
    stats = stats or linear_relation_graph(ideal)
    return stats.r - stats.s + 1


# ---------------------------------------------------------------------------
# depth sequence

@dataclass
class DepthProfile:
    depths: list[int]
    horizon: int
    limit: int
    dstab: int
    spread: int
    certified: bool
    bipartite: bool
    expected_limit: int | None
    field: str
    extra_depths: dict[int, int] = field(default_factory=dict)

    @property
    def limit_matches(self) -> bool:
        return self.expected_limit is None or self.limit == self.expected_limit

    def depth_at(self, k: int) -> int:
        if 1 <= k <= len(self.depths):
            return self.depths[k - 1]
        return self.extra_depths[k]


def dstab_from_depths(depths: list[int]) -> int:
    """1 + the last index (1-based, before the end) whose depth differs from the final one."""
    limit = depths[-1]
    off = [k for k in range(1, len(depths)) if depths[k - 1] != limit]
    return off[-1] + 1 if off else 1


def _require_connected(g: Graph):
    m = graph_metrics(g)
    if not g.edges:
        raise PreconditionError("graph has no edges")
    if not m.connected:
        raise PreconditionError("depth stability analysis requires a connected graph")
    return m


def depth_sequence(g: Graph, field: Field = QQ, overshoot: int = 0,
                   gen_cap: int = GENERATOR_CAP, box_cap: int = BOX_CAP) -> DepthProfile:
    """depth S/I_G^k for k up to the certified horizon l(I_G) - 1.

    ``overshoot`` computes that many further powers as a spot check that
    the limit has really been reached.
    """
    metrics = _require_connected(g)
    ideal = edge_ideal(g)
    ell = analytic_spread(g)
    if len(g.edges) == 1:
        horizon, expected = 1, None
    else:
        horizon = ell - 1
        expected = 0 if not metrics.bipartite else 1
    depths: list[int] = []
    extra: dict[int, int] = {}
    for k, J in powers(ideal, horizon + overshoot, cap=gen_cap):
        d = depth(J, field, box_cap=box_cap).depth
        if k <= horizon:
            depths.append(d)
        else:
            extra[k] = d
    limit = depths[-1]
    profile = DepthProfile(
        depths=depths,
        horizon=horizon,
        limit=limit,
        dstab=dstab_from_depths(depths),
        spread=ell,
        certified=True,
        bipartite=metrics.bipartite,
        expected_limit=expected,
        field=str(field),
        extra_depths=extra,
    )
    if not profile.limit_matches:
        log.warning("limit depth %s differs from the proven value %s for %s", limit, expected, g)
    return profile


# ---------------------------------------------------------------------------
# associated primes and astab

def associated_primes(ideal: MonomialIdeal, max_vars: int = ASS_MAX_VARS,
                      box_cap: int = BOX_CAP) -> list[frozenset[int]]:
    """Associated monomial primes of S/I, each given by its set of variables.

    P_A is associated iff, after setting x_j = 1 for j outside A, the
    maximal ideal of K[x_A] is associated, which the socle search decides.
    """
    if ideal.n > max_vars:
        raise ResourceLimitError("variables for the associated-prime scan", max_vars, ideal.n)
    supp = sorted(ideal.support())
    found = []
    for r in range(1, len(supp) + 1):
        for A in combinations(supp, r):
            local, _ = localize(ideal, A)
            if local is None or len(local.support()) != r:
                continue
            if socle_depth_zero_oracle(local, box_cap=box_cap):
                found.append(frozenset(A))
    return sorted(found, key=lambda a: (len(a), sorted(a)))


@dataclass
class AssProfile:
    ass_per_power: list[list[frozenset[int]]]
    astab: int
    horizon: int
    monotone: bool
    bipartite: bool
    verified: bool | None = None

    def as_lists(self) -> list[list[list[int]]]:
        return [[sorted(p) for p in ps] for ps in self.ass_per_power]


def astab(g: Graph, verify: bool = False, gen_cap: int = GENERATOR_CAP) -> AssProfile:
    """First power from which Ass(S/I_G^k) stays constant.

    Bipartite graphs give 1 outright (with ``verify`` the first two powers
    are compared).  For non-bipartite graphs the chain is computed up to
    max(n - m, 1) powers, m the number of leaves, which bounds astab there.
    """
    metrics = _require_connected(g)
    ideal = edge_ideal(g)
    if metrics.bipartite:
        chain = []
        verified = None
        if verify:
            chain = [associated_primes(J) for _, J in powers(ideal, 2, cap=gen_cap)]
            verified = chain[0] == chain[1]
        return AssProfile(chain, 1, 2 if verify else 0, True, True, verified)
    horizon = max(g.n - metrics.m, 1)
    chain = [associated_primes(J) for _, J in powers(ideal, horizon, cap=gen_cap)]
    monotone = all(set(a) <= set(b) for a, b in zip(chain, chain[1:]))
    last = set(chain[-1])
    first = next(k for k in range(1, horizon + 1) if set(chain[k - 1]) == last)
    return AssProfile(chain, first, horizon, monotone, False)


# ---------------------------------------------------------------------------
# tree bounds

def _tree_data(g: Graph):
    m = graph_metrics(g)
    if not m.is_tree:
        raise PreconditionError("operation needs a tree")
    if len(g.edges) < 2:
        raise PreconditionError("operation needs a tree with at least two edges")
    return m


def morey_lower_bound(g: Graph, k: int, reading: str = "max") -> int:
    """Lower bound ceil((diameter - k + q) / 3), floored at 1 (``max``) or capped at 1 (``min``)."""
    m = _tree_data(g)
    if k < 1:
        raise PreconditionError("k must be at least 1")
    value = math.ceil((m.diameter - k + m.q) / 3)
    if reading == "max":
        return max(value, 1)
    if reading == "min":
        return min(value, 1)
    raise ValueError(f"unknown reading {reading!r}")


@dataclass
class WitnessReport:
    relabeling: dict[int, int]
    inner_edges: list[tuple[int, int]]
    power: int
    witness: str
    witness_image: str
    count_ok: bool
    not_member: bool
    socle_ok: bool
    failing_variables: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.count_ok and self.not_member and self.socle_ok


def socle_witness_check(g: Graph, gen_cap: int = GENERATOR_CAP) -> WitnessReport:
    """Check the explicit depth-zero witness of S/(I^(n-m), x1 - x2) for a tree.

    The tree is relabeled so that 1 is a leaf and 2 its neighbour.  Working
    modulo x1 - x2 amounts to substituting x2 -> x1, so everything reduces to
    monomial membership in the substituted power.
    """
    m = _tree_data(g)
    n = g.n
    leaf = min(m.free_vertices)
    (nb,) = g.neighbors()[leaf]
    rest = [v for v in range(1, n + 1) if v not in (leaf, nb)]
    mapping = {leaf: 1, nb: 2}
    mapping.update({v: i + 3 for i, v in enumerate(rest)})
    h = g.relabel(mapping)
    hm = graph_metrics(h)
    free = set(hm.free_vertices)
    inner = [e for e in h.edges if e[0] not in free and e[1] not in free]
    k = n - hm.m
    w = [0] * n
    w[0] = 1
    for u, v in inner:
        w[u - 1] += 1
        w[v - 1] += 1
    w = tuple(w)
    bar = substitute(power(edge_ideal(h), k, cap=gen_cap), 2, 1)
    w_bar = substitute_monomial(w, 2, 1)
    failing = []
    for i in range(1, n + 1):
        xi = [0] * n
        xi[i - 1] = 1
        prod = substitute_monomial(tuple(a + b for a, b in zip(w_bar, xi)), 2, 1)
        if prod not in bar:
            failing.append(i)
    return WitnessReport(
        relabeling=mapping,
        inner_edges=inner,
        power=k,
        witness=format_monomial(w),
        witness_image=format_monomial(w_bar),
        count_ok=len(inner) == n - hm.m - 1,
        not_member=w_bar not in bar,
        socle_ok=not failing,
        failing_variables=failing,
    )


# ---------------------------------------------------------------------------
# report

PASS, VIOLATED, SKIPPED = "pass", "violated", "skipped"
CHECK_IDS = (
    "lemma_1_1", "ineq_1", "ineq_2", "thm_1_2", "remark_1_3",
    "thm_2_1a", "thm_2_1b", "claim_delta", "morey", "cor_2_2",
)


@dataclass
class CheckResult:
    status: str
    hypotheses: bool
    conclusion: bool | None = None
    witness: dict = field(default_factory=dict)

    @classmethod
    def evaluate(cls, hypotheses: bool, conclusion, **witness) -> "CheckResult":
        if not hypotheses:
            return cls(SKIPPED, False, None, witness)
        ok = bool(conclusion)
        return cls(PASS if ok else VIOLATED, True, ok, witness)


@dataclass
class TheoremReport:
    graph: str
    n: int
    m: int
    bipartite: bool
    is_tree: bool
    field: str
    r: int | None = None
    s: int | None = None
    spread: int | None = None
    depths: list[int] = field(default_factory=list)
    dstab: int | None = None
    astab: int | None = None
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def violations(self) -> list[str]:
        return [k for k, c in self.checks.items() if c.status == VIOLATED]

    @property
    def resource_skips(self) -> list[str]:
        return [k for k, c in self.checks.items() if c.status.startswith("skipped: resources")]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["checks"] = {k: asdict(v) for k, v in self.checks.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TheoremReport":
        d = dict(d)
        d["checks"] = {k: CheckResult(**v) for k, v in d["checks"].items()}
        return cls(**d)


def _skip_resources(exc: Exception) -> CheckResult:
    return CheckResult(f"{SKIPPED}: resources", False, None, {"error": str(exc)})


def verify_paper(g: Graph, field: Field = QQ, overshoot: int = 0,
                 gen_cap: int = GENERATOR_CAP, box_cap: int = BOX_CAP,
                 ass: bool = True) -> TheoremReport:
    """Evaluate every check on one connected graph.

    A check is ``violated`` only when its hypotheses hold and its conclusion
    fails.  Resource exhaustion marks the affected checks as skipped.
    """
    metrics = _require_connected(g)
    n, edges = g.n, len(g.edges)
    ideal = edge_ideal(g)
    report = TheoremReport(
        graph=g.encode(), n=n, m=metrics.m, bipartite=metrics.bipartite,
        is_tree=metrics.is_tree, field=str(field),
    )
    checks = report.checks
    stats = linear_relation_graph(ideal)
    report.r, report.s = stats.r, stats.s
    ell = analytic_spread(g)
    report.spread = ell

    if metrics.bipartite:
        rs_hyp, expected_rs = not metrics.is_star, (n, 2)
    else:
        rs_hyp, expected_rs = True, (n, 1)
    checks["lemma_1_1"] = CheckResult.evaluate(
        rs_hyp, (stats.r, stats.s) == expected_rs,
        r=stats.r, s=stats.s, expected=list(expected_rs),
        case="non-bipartite" if not metrics.bipartite else "bipartite non-star",
    )
    checks["ineq_2"] = CheckResult.evaluate(
        True, ell >= stats.r - stats.s + 1, spread=ell, bound=stats.r - stats.s + 1,
    )

    try:
        profile = depth_sequence(g, field, overshoot=overshoot, gen_cap=gen_cap, box_cap=box_cap)
    except ResourceLimitError as exc:
        for cid in CHECK_IDS:
            checks.setdefault(cid, _skip_resources(exc))
        return report
    report.depths = profile.depths
    report.dstab = profile.dstab

    span = stats.r - stats.s
    ts = [t for t in range(1, span + 1) if t <= len(profile.depths)]
    bad = [t for t in ts if profile.depths[t - 1] > n - t - 1]
    checks["ineq_1"] = CheckResult.evaluate(
        span >= 1, not bad, checked_t=ts, unchecked_t=list(range(len(ts) + 1, span + 1)), failing_t=bad,
    )

    stays_zero = True
    if not metrics.bipartite and 0 in profile.depths:
        first0 = profile.depths.index(0)
        stays_zero = all(d == 0 for d in profile.depths[first0:])
    overshoot_ok = all(d == profile.limit for d in profile.extra_depths.values())
    checks["thm_1_2"] = CheckResult.evaluate(
        edges >= 2,
        profile.dstab < ell and profile.limit_matches and stays_zero and overshoot_ok
        and profile.limit == n - ell,
        dstab=profile.dstab, spread=ell, limit=profile.limit,
        expected_limit=profile.expected_limit,
        extra_depths={str(k): d for k, d in profile.extra_depths.items()},
    )

    if ass:
        try:
            ap = astab(g, verify=True, gen_cap=gen_cap)
            report.astab = ap.astab
            if metrics.bipartite:
                checks["remark_1_3"] = CheckResult.evaluate(
                    True, ap.astab == 1 and ap.astab <= profile.dstab and ap.verified is not False,
                    astab=ap.astab, dstab=profile.dstab, ass_equal_first_two=ap.verified,
                )
            else:
                first_max = None
                for k, J in powers(ideal, profile.horizon, cap=gen_cap):
                    if socle_depth_zero_oracle(J, box_cap=box_cap):
                        first_max = k
                        break
                checks["remark_1_3"] = CheckResult.evaluate(
                    True,
                    profile.dstab <= ap.astab and first_max == profile.dstab and ap.monotone,
                    astab=ap.astab, dstab=profile.dstab, first_power_with_max_ideal=first_max,
                    ass_monotone=ap.monotone, ass=ap.as_lists(),
                )
        except ResourceLimitError as exc:
            checks["remark_1_3"] = _skip_resources(exc)
    else:
        checks["remark_1_3"] = CheckResult(SKIPPED, False, None, {"reason": "associated primes not requested"})

    tree2 = metrics.is_tree and edges >= 2
    if tree2:
        nm = n - metrics.m
        wr = socle_witness_check(g, gen_cap=gen_cap)
        checks["thm_2_1a"] = CheckResult.evaluate(
            True, profile.dstab <= nm and wr.passed and profile.depth_at(nm) == 1,
            dstab=profile.dstab, n_minus_m=nm, witness=wr.witness, witness_passed=wr.passed,
            depth_at_n_minus_m=profile.depth_at(nm),
        )
        some, every = distance_two_condition(g)
        checks["thm_2_1b"] = CheckResult.evaluate(
            some, profile.dstab == nm,
            dstab=profile.dstab, n_minus_m=nm, hypothesis_some_path=some, hypothesis_every_path=every,
        )
        value = metrics.diameter - nm + metrics.q
        checks["claim_delta"] = CheckResult.evaluate(
            some and metrics.diameter >= 3, value == 3,
            value=value, diameter=metrics.diameter, q=metrics.q,
            excluded_small_diameter=some and metrics.diameter < 3,
        )
        bounds_max = {k: morey_lower_bound(g, k, "max") for k in range(1, profile.horizon + 1)}
        bounds_min = {k: morey_lower_bound(g, k, "min") for k in range(1, profile.horizon + 1)}
        fail_max = [k for k, b in bounds_max.items() if profile.depths[k - 1] < b]
        fail_min = [k for k, b in bounds_min.items() if profile.depths[k - 1] < b]
        checks["morey"] = CheckResult.evaluate(
            True, not fail_max, bounds_max={str(k): b for k, b in bounds_max.items()}, failing_k_max=fail_max,
            min_reading_holds=not fail_min, failing_k_min=fail_min,
        )
    else:
        for cid in ("thm_2_1a", "thm_2_1b", "claim_delta", "morey"):
            checks[cid] = CheckResult(SKIPPED, False, None, {"reason": "not a tree with at least two edges"})

    params = broom_parameters(g)
    checks["cor_2_2"] = CheckResult.evaluate(
        params is not None,
        params is not None and profile.dstab == params[0] and ell == params[1],
        a=params[0] if params else None, b=params[1] if params else None,
        dstab=profile.dstab, spread=ell,
    )
    report.checks = {cid: checks[cid] for cid in CHECK_IDS}
    return report


def _verify_task(args) -> tuple[str, dict | None, str | None]:
    encoded, char, kwargs = args
    g = Graph.decode(encoded)
    try:
        return encoded, verify_paper(g, Field(char), **kwargs).to_dict(), None
    except (ResourceLimitError, MemoryError) as exc:
        return encoded, None, f"skipped: resources ({exc})"
    except DepthStabError as exc:
        return encoded, None, f"error: {exc}"


def worker_count() -> int:
    env = os.environ.get("DEPTHSTAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def verify_many(graphs: Iterable[Graph], field: Field = QQ, workers: int | None = None,
                **kwargs) -> Iterator[tuple[Graph, TheoremReport | None, str | None]]:
    """Verify a stream of graphs, yielding results in input order."""
    workers = worker_count() if workers is None else workers
    tasks = ((g.encode(), field.characteristic, kwargs) for g in graphs)
    if workers <= 1:
        results = map(_verify_task, tasks)
        for enc, rep, err in results:
            yield Graph.decode(enc), TheoremReport.from_dict(rep) if rep else None, err
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for enc, rep, err in pool.map(_verify_task, tasks, chunksize=4):
            yield Graph.decode(enc), TheoremReport.from_dict(rep) if rep else None, err
