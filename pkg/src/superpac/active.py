"""The active clustering loop: certain sets, oracles, exploration, and the
margin-driven query strategy.

The loop alternates spectral clustering, per-cluster PCA, minimum-margin test
point selection, and pairwise queries against certain-set representatives,
imputing each resulting constraint into the affinity matrix before
re-clustering. ``explore`` seeds one small certain set per cluster first;
``random_baseline`` replaces the margin strategy with uniform random pairs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .affinity import Affinity, impute, normalize_max2
from .evaluation import misclassification_rate
from .geometry import fit_pca, residual
from .margin import margin_table, max_margin_point, min_margin_from_table
from .spectral import Labeling, spectral_clustering


class BudgetError(ValueError):
    """Raised when a query budget cannot be satisfied at all."""


# ---------------------------------------------------------------------------
# Certain sets


@dataclass
class CertainSets:
    """Disjoint groups of point indices; membership in one group means
    must-link to every other member and cannot-link to every other group."""

    sets: list = field(default_factory=list)

    def __post_init__(self):
        seen: set[int] = set()
        norm = []
        for s in self.sets:
            s = [int(i) for i in s]
            if not s:
                raise ValueError("certain sets must be nonempty")
            if seen & set(s):
                raise ValueError("certain sets must be disjoint")
            seen |= set(s)
            norm.append(s)
        self.sets = norm

    @property
    def n_sets(self) -> int:
        return len(self.sets)

    def members(self) -> set:
        return {i for s in self.sets for i in s}

    def set_of(self, i: int):
        for k, s in enumerate(self.sets):
            if i in s:
                return k
        return None

    def add_to(self, k: int, i: int) -> None:
        if self.set_of(i) is not None:
            raise ValueError(f"point {i} already belongs to a certain set")
        self.sets[k].append(int(i))

    def new_set(self, i: int) -> int:
        if self.set_of(i) is not None:
            raise ValueError(f"point {i} already belongs to a certain set")
        self.sets.append([int(i)])
        return len(self.sets) - 1


# ---------------------------------------------------------------------------
# Oracles and the query log


class SimulatedOracle:
    """Answers pairwise queries from ground-truth labels."""

    def __init__(self, truth):
        self.truth = np.asarray(truth, dtype=int)

    def answer(self, i: int, j: int) -> bool:
        return bool(self.truth[i] == self.truth[j])


class ReplayOracle:
    """Answers queries from a recorded log, in order; raises if the run asks
    for a pair the recording does not contain next."""

    def __init__(self, entries):
        self.entries = list(entries)
        self.pos = 0

    def answer(self, i: int, j: int) -> bool:
        if self.pos >= len(self.entries):
            raise ValueError("replay log exhausted")
        ri, rj, ans = self.entries[self.pos]
        if {ri, rj} != {i, j}:
            raise ValueError(
                f"replay mismatch: recorded pair ({ri},{rj}), requested ({i},{j})"
            )
        self.pos += 1
        return bool(ans)


@dataclass
class QueryLog:
    """Ordered record of answered pairwise queries, with memoization: a pair
    is never asked (or charged) twice."""

    entries: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, j, ans in self.entries:
            self._cache[(min(i, j), max(i, j))] = bool(ans)

    @property
    def count(self) -> int:
        return len(self.entries)

    def query(self, oracle, i: int, j: int) -> bool:
        key = (min(i, j), max(i, j))
        if key in self._cache:
            return self._cache[key]
        ans = bool(oracle.answer(i, j))
        self._cache[key] = ans
        self.entries.append((int(i), int(j), ans))
        return ans

    def save_jsonl(self, path) -> None:
        with open(path, "w") as f:
            for i, j, ans in self.entries:
                f.write(json.dumps({"i": i, "j": j, "must_link": ans}) + "\n")

    @classmethod
    def load_jsonl(cls, path) -> "QueryLog":
        entries = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                entries.append((int(rec["i"]), int(rec["j"]), bool(rec["must_link"])))
        return cls(entries=entries)


# ---------------------------------------------------------------------------
# Run traces


@dataclass(frozen=True)
class TraceRecord:
    queries_used: int
    labels: np.ndarray
    error: float | None
    cost: float


@dataclass
class RunTrace:
    records: list = field(default_factory=list)

    def append(self, queries_used, labels, error, cost) -> None:
        if self.records and queries_used < self.records[-1].queries_used:
            raise ValueError("queries_used must be nondecreasing")
        self.records.append(
            TraceRecord(int(queries_used), np.asarray(labels, dtype=int),
                        None if error is None else float(error), float(cost))
        )

    @property
    def final_labels(self) -> np.ndarray:
        return self.records[-1].labels

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("queries,error,cost\n")
            for r in self.records:
                err = "" if r.error is None else f"{r.error:.10g}"
                f.write(f"{r.queries_used},{err},{r.cost:.10g}\n")


# ---------------------------------------------------------------------------
# Cost and smoothing


def ksubspaces_cost(X, labeling, d: int) -> float:
    """Total squared residual of every point to the PCA subspace of its
    assigned cluster; empty clusters contribute 0."""
    labels = labeling.labels if isinstance(labeling, Labeling) else np.asarray(labeling)
    pts = np.asarray(getattr(X, "points", X), dtype=float)
    total = 0.0
    for k in np.unique(labels):
        members = np.where(labels == k)[0]
        S = fit_pca(pts[:, members], d)
        block = pts[:, members]
        res = block - S.basis @ (S.basis.T @ block)
        total += float(np.sum(res ** 2))
    return total


def smoothing_accept(prev: Labeling, prev_cost: float, new: Labeling, X, d: int):
    """Keep the new labeling only if it strictly decreases the cost."""
    new_cost = ksubspaces_cost(X, new, d)
    if new_cost < prev_cost:
        return new, new_cost
    return prev, prev_cost


# ---------------------------------------------------------------------------
# Assignment of a test point to a certain set


def cluster_subspaces(X, labeling: Labeling, d: int):
    """PCA subspace of every nonempty estimated cluster; returns a dict
    cluster id -> Subspace."""
    pts = X.points
    out = {}
    for k in range(labeling.K):
        members = labeling.members(k)
        if members.size:
            out[k] = fit_pca(pts[:, members], d)
    return out


def assign_to_certain_set(x_T, Z: CertainSets, labeling: Labeling, X, d: int,
                          oracle, log: QueryLog, table) -> int:
    """Place a test point into a certain set through pairwise queries.

    Each set's representative is its maximum-margin member; the sets are
    queried in ascending order of the test point's residual to the PCA
    subspace of the representative's estimated cluster. The first must-link
    wins; if all answers are cannot-link the point becomes a new singleton
    set. Returns the index of the set the point ended up in.
    """
    if Z.set_of(x_T) is not None:
        raise ValueError(f"test point {x_T} already belongs to a certain set")
    pts = X.points
    x = pts[:, x_T]
    sub_cache = {}
    order = []
    for k, s in enumerate(Z.sets):
        rep = max_margin_point(s, table)
        lbl = int(labeling.labels[rep])
        if lbl not in sub_cache:
            sub_cache[lbl] = fit_pca(pts[:, labeling.members(lbl)], d)
        order.append((residual(x, sub_cache[lbl]), k, rep))
    order.sort(key=lambda t: (t[0], t[1]))
    for _, k, rep in order:
        if log.query(oracle, x_T, rep):
            Z.add_to(k, x_T)
            return k
    return Z.new_set(x_T)


# ---------------------------------------------------------------------------
# Exploration


def uos_explore(X, K: int, d: int, A, max_queries: int, oracle, seed,
                labeling: Labeling | None = None, log: QueryLog | None = None):
    """Build up to K small certain sets, one per cluster, cheaply.

    Seeds the first set with the overall maximum-margin point, then repeatedly
    assigns the maximum-margin point whose estimated label differs from every
    current certain-set member (falling back to a random unassigned point when
    no such candidate exists). Stops once K sets exist or the budget is spent.
    """
    if K < 2:
        raise ValueError("exploration requires K >= 2")
    if labeling is None:
        labeling = spectral_clustering(A, K, seed)
    log = log if log is not None else QueryLog()
    rng = np.random.default_rng(seed)
    subspaces = [S for _, S in sorted(cluster_subspaces(X, labeling, d).items())]
    table = margin_table(X, subspaces)
    seed_point = int(np.argmax(table.margins))
    Z = CertainSets([[seed_point]])
    while Z.n_sets < K and log.count < max_queries:
        members = Z.members()
        member_labels = {int(labeling.labels[i]) for i in members}
        candidates = [
            i for i in range(X.n)
            if i not in members and int(labeling.labels[i]) not in member_labels
        ]
        if candidates:
            vals = table.margins[candidates]
            x_T = candidates[int(np.argmax(vals))]
        else:
            unassigned = [i for i in range(X.n) if i not in members]
            if not unassigned:
                break
            x_T = int(unassigned[int(rng.integers(len(unassigned)))])
        assign_to_certain_set(x_T, Z, labeling, X, d, oracle, log, table)
    return Z, log


# ---------------------------------------------------------------------------
# Main loop


@dataclass(frozen=True)
class LoopOptions:
    smoothing: bool = False
    explore_budget: int | None = None  # default 2K, capped by the total budget


def active_clustering(X, K: int, d: int, A, max_queries: int, oracle, seed,
                      options: LoopOptions | None = None,
                      observer=None) -> RunTrace:
    """Margin-driven pairwise-constrained clustering.

    Runs exploration with a budget of 2K queries (capped by ``max_queries``),
    then loops: cluster, fit per-cluster subspaces, query the minimum-margin
    unassigned point against certain-set representatives, impute the resulting
    constraints, re-cluster. One trace record is appended per iteration; a
    completed assignment episode may overshoot the budget by up to the number
    of certain sets before the loop stops.

    ``observer(event, **state)`` is invoked at phase changes and after every
    iteration; used by the interactive server to surface progress.
    """
    if max_queries < 0:
        raise ValueError("max_queries must be >= 0")
    options = options or LoopOptions()
    A = A if isinstance(A, Affinity) else Affinity(np.asarray(A, dtype=float))
    A_cur = normalize_max2(A)
    truth = getattr(X, "truth", None)

    def err(labeling):
        if truth is None:
            return None
        return misclassification_rate(labeling, truth).misclassification_rate

    trace = RunTrace()
    log = QueryLog()
    labeling = spectral_clustering(A_cur, K, seed)
    cost = ksubspaces_cost(X, labeling, d)
    trace.append(0, labeling.labels, err(labeling), cost)
    if observer:
        observer("exploring", trace=trace, labeling=labeling, log=log, Z=None)
    if max_queries == 0:
        if observer:
            observer("done", trace=trace, labeling=labeling, log=log, Z=None)
        return trace

    explore_budget = options.explore_budget if options.explore_budget is not None else 2 * K
    Z, log = uos_explore(X, K, d, A_cur, min(explore_budget, max_queries),
                         oracle, seed, labeling=labeling, log=log)
    A_cur = impute(A_cur, Z)
    if observer:
        observer("querying", trace=trace, labeling=labeling, log=log, Z=Z)

    while log.count < max_queries:
        subs = cluster_subspaces(X, labeling, d)
        if len(subs) < 2:
            break
        subspaces = [S for _, S in sorted(subs.items())]
        table = margin_table(X, subspaces)
        members = Z.members()
        if len(members) >= X.n:
            break
        x_T = min_margin_from_table(table, excluded=members)
        assign_to_certain_set(x_T, Z, labeling, X, d, oracle, log, table)
        A_cur = impute(A_cur, Z)
        new_labeling = spectral_clustering(A_cur, K, seed)
        if options.smoothing:
            labeling, cost = smoothing_accept(labeling, cost, new_labeling, X, d)
        else:
            labeling = new_labeling
            cost = ksubspaces_cost(X, labeling, d)
        trace.append(log.count, labeling.labels, err(labeling), cost)
        if observer:
            observer("iteration", trace=trace, labeling=labeling, log=log, Z=Z)
    if observer:
        observer("done", trace=trace, labeling=labeling, log=log, Z=Z)
    return trace


def random_baseline(X, K: int, A, max_queries: int, oracle, seed,
                    stop_below_error: float | None = None,
                    d: int | None = None,
                    log: QueryLog | None = None) -> RunTrace:
    """Uniform random pairwise constraints, imputed one query at a time.

    Pairs are drawn uniformly without replacement from all unordered pairs;
    each answer is written straight into the affinity matrix (1 for
    must-link, 0 for cannot-link) and the data is re-clustered after every
    query. ``stop_below_error`` allows cutting the run short once the trace
    error drops to or below the threshold.
    """
    N = X.n
    total_pairs = N * (N - 1) // 2
    if max_queries > total_pairs:
        raise BudgetError(
            f"budget {max_queries} exceeds the number of unordered pairs {total_pairs}"
        )
    A = A if isinstance(A, Affinity) else Affinity(np.asarray(A, dtype=float))
    A_cur = normalize_max2(A)
    truth = getattr(X, "truth", None)
    cost_dim = d if d is not None else 1

    def err(labeling):
        if truth is None:
            return None
        return misclassification_rate(labeling, truth).misclassification_rate

    rng = np.random.default_rng(seed)
    order = rng.permutation(total_pairs)[:max_queries]
    trace = RunTrace()
    log = log if log is not None else QueryLog()
    labeling = spectral_clustering(A_cur, K, seed)
    e = err(labeling)
    trace.append(0, labeling.labels, e, ksubspaces_cost(X, labeling, cost_dim))
    if stop_below_error is not None and e is not None and e <= stop_below_error:
        return trace
    # map a flat pair id to (i, j), i < j
    ii, jj = np.triu_indices(N, k=1)
    V = A_cur.values
    for pid in order:
        i, j = int(ii[pid]), int(jj[pid])
        ans = log.query(oracle, i, j)
        V[i, j] = V[j, i] = 1.0 if ans else 0.0
        (A_cur.imputed_one if ans else A_cur.imputed_zero).add((i, j))
        labeling = spectral_clustering(A_cur, K, seed)
        e = err(labeling)
        trace.append(log.count, labeling.labels, e,
                     ksubspaces_cost(X, labeling, cost_dim))
        if stop_below_error is not None and e is not None and e <= stop_below_error:
            break
    return trace
