"""Community detection on the directed weighted retweet graph.

Two objectives are implemented. Directed weighted modularity compares
within-community weight against a strength-product null,

    Q = (1/w) * sum_ij (A_ij - gamma * win_i * wout_j / w) [c_i == c_j],

and is optimized by a Louvain scheme whose node-sweep gains come from the
symmetrized modularity matrix B + B', which optimizes the directed Q
exactly. The two-level map equation scores a partition by the description
length of a damped random walk, evaluated at teleportation-smoothed visit
rates; teleportation steps are not encoded, so module exits count link
flow only. Both optimizers move nodes greedily, aggregate communities into
supernodes, and repeat until the objective stops improving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .errors import DegenerateInputError, InputError
from .graph import RetweetGraph
from .centrality import stationary_visit_rates
from .rng import derive_seed, generator

#: default resolution grid for the sweep
DEFAULT_GAMMA_GRID = (0.01, 0.05, 0.1, 1.0, 5.0, 10.0)

#: minimum objective gain for a greedy move to be accepted
GAIN_EPS = 1e-10


@dataclass(frozen=True)
class ModularityParams:
    gamma: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise InputError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class MapEquationParams:
    tau: float = 0.15
    tol: float = 1e-12
    max_iters: int = 100_000

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise InputError(f"tau must lie in (0, 1), got {self.tau}")


@dataclass(frozen=True, eq=False)
class Partition:
    """Community assignment per node; ids are contiguous 0..k-1."""

    assignment: np.ndarray
    k: int

    def __post_init__(self):
        arr = np.asarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", arr)
        if arr.size:
            if arr.min() < 0 or arr.max() != self.k - 1:
                raise InputError("community ids must be contiguous from 0")
            if len(np.unique(arr)) != self.k:
                raise InputError("community ids must be contiguous from 0")
        elif self.k != 0:
            raise InputError("empty assignment must have k = 0")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Compact arbitrary labels by first appearance in node order."""
        remap: dict[int, int] = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            lab = int(lab)
            if lab not in remap:
                remap[lab] = len(remap)
            out[i] = remap[lab]
        return cls(assignment=out, k=len(remap))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)


@dataclass(frozen=True)
class CommunityProfile:
    community: int
    size: int
    n_left: int
    n_right: int
    mean_score: float | None
    shannon: float | None


def modularity(g: RetweetGraph, partition: Partition,
               params: ModularityParams = ModularityParams()) -> float:
    """Directed weighted modularity of a partition, computed sparsely."""
    if g.w == 0:
        raise DegenerateInputError("modularity is undefined on a graph with no edges")
    a = partition.assignment
    if a.shape != (g.n,):
        raise InputError("partition does not cover the graph")
    within = int(g.counts[a[g.targets] == a[g.sources]].sum())
    win = np.bincount(a, weights=g.in_strength, minlength=partition.k)
    wout = np.bincount(a, weights=g.out_strength, minlength=partition.k)
    w = float(g.w)
    return within / w - params.gamma * float(win @ wout) / (w * w)


def shannon_diversity(n_left: int, n_right: int) -> float | None:
    """Shannon index of the left/right split, natural log, 0 log 0 = 0."""
    total = n_left + n_right
    if total == 0:
        return None
    h = 0.0
    for count in (n_left, n_right):
        if count > 0:
            p = count / total
            h -= p * math.log(p)
    return h


# ---------------------------------------------------------------------------
# Louvain on the symmetrized modularity matrix
# ---------------------------------------------------------------------------


def _visit_orders(seed: int | None, visit_order: Sequence[int] | None,
                  tag: int, level: int) -> Callable[[int, int], np.ndarray]:
    """Per-pass node visit order factory for one optimizer level.

    With an explicit order the same sequence is used every pass (fixed
    order mode, used at level 0 only); otherwise a fresh shuffle is drawn
    from a (seed, tag, level, pass) derived stream.
    """
    if visit_order is not None:
        fixed = np.asarray(visit_order, dtype=np.int64)

        def fixed_fn(pass_idx: int, n: int) -> np.ndarray:
            if fixed.size != n:
                return np.arange(n, dtype=np.int64)
            return fixed

        return fixed_fn

    def seeded_fn(pass_idx: int, n: int) -> np.ndarray:
        rng = generator(derive_seed(seed if seed is not None else 0,
                                    tag, level, pass_idx))
        return rng.permutation(n)

    return seeded_fn


def _compact_by_order(labels: np.ndarray, order: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel communities by first appearance along a visit order."""
    remap: dict[int, int] = {}
    for v in order:
        lab = int(labels[v])
        if lab not in remap:
            remap[lab] = len(remap)
    out = np.array([remap[int(lab)] for lab in labels], dtype=np.int64)
    return out, len(remap)


def _aggregate_edges(targets: np.ndarray, sources: np.ndarray,
                     weights: np.ndarray, labels: np.ndarray,
                     k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    key = labels[targets] * k + labels[sources]
    uniq, inv = np.unique(key, return_inverse=True)
    agg = np.bincount(inv, weights=weights)
    return (uniq // k).astype(np.int64), (uniq % k).astype(np.int64), agg


def _symmetric_neighbors(n: int, targets: np.ndarray, sources: np.ndarray,
                         weights: np.ndarray) -> sparse.csr_matrix:
    a = sparse.coo_matrix((weights, (targets, sources)), shape=(n, n))
    s = (a + a.T).tocsr()
    s.setdiag(0)
    s.eliminate_zeros()
    return s


def _louvain_level(n: int, targets: np.ndarray, sources: np.ndarray,
                   weights: np.ndarray, w: float, gamma: float,
                   orders: Callable[[int, int], np.ndarray],
                   ) -> tuple[np.ndarray, np.ndarray, bool]:
    """One level of node sweeps; returns raw labels, pass-0 order, moved flag."""
    sym = _symmetric_neighbors(n, targets, sources, weights)
    indptr, indices, data = sym.indptr, sym.indices, sym.data
    win = np.bincount(targets, weights=weights, minlength=n)
    wout = np.bincount(sources, weights=weights, minlength=n)
    comm = np.arange(n, dtype=np.int64)
    acc_in = win.copy()
    acc_out = wout.copy()
    gamma_w = gamma / w
    first_order = orders(0, n)
    # tie-break key per community: position of its founding node in the
    # pass-0 visit order, so renumbering nodes cannot change the outcome
    rank = np.empty(n, dtype=np.int64)
    rank[first_order] = np.arange(n)
    moved_any = False
    pass_idx = 0
    while True:
        order = first_order if pass_idx == 0 else orders(pass_idx, n)
        moved = 0
        for v in order:
            v = int(v)
            cv = int(comm[v])
            iv = win[v]
            ov = wout[v]
            acc_in[cv] -= iv
            acc_out[cv] -= ov
            kvc: dict[int, float] = {}
            for e in range(indptr[v], indptr[v + 1]):
                c = int(comm[indices[e]])
                kvc[c] = kvc.get(c, 0.0) + data[e]
            best_c = cv
            best_gain = kvc.get(cv, 0.0) - gamma_w * (iv * acc_out[cv] + ov * acc_in[cv])
            for c in sorted(kvc, key=lambda cid: rank[cid]):
                if c == cv:
                    continue
                gain = kvc[c] - gamma_w * (iv * acc_out[c] + ov * acc_in[c])
                if gain > best_gain + GAIN_EPS:
                    best_gain = gain
                    best_c = c
            comm[v] = best_c
            acc_in[best_c] += iv
            acc_out[best_c] += ov
            if best_c != cv:
                moved += 1
        if moved:
            moved_any = True
        pass_idx += 1
        if moved == 0:
            break
    return comm, first_order, moved_any


def louvain(g: RetweetGraph, params: ModularityParams = ModularityParams(),
            seed: int | None = 0,
            visit_order: Sequence[int] | None = None) -> Partition:
    """Greedy directed-modularity optimization, Louvain style.

    Starts from singletons, so the returned partition never scores below
    the singleton baseline. `visit_order` fixes the level-0 node sweep
    sequence and disables the seeded shuffle (deterministic mode).
    """
    if g.w == 0:
        raise DegenerateInputError("cannot optimize modularity on a graph with no edges")
    membership = np.arange(g.n, dtype=np.int64)
    targets = g.targets.copy()
    sources = g.sources.copy()
    weights = g.counts.astype(np.float64)
    n = g.n
    w = float(g.w)
    level = 0
    while True:
        orders = _visit_orders(seed, visit_order if level == 0 else None,
                               tag=0, level=level)
        labels, first_order, moved = _louvain_level(
            n, targets, sources, weights, w, params.gamma, orders)
        if not moved:
            break
        labels, k = _compact_by_order(labels, first_order)
        membership = labels[membership]
        if k == n:
            break
        targets, sources, weights = _aggregate_edges(targets, sources,
                                                     weights, labels, k)
        n = k
        level += 1
    return Partition.from_labels(membership)


# ---------------------------------------------------------------------------
# Two-level map equation and its greedy optimizer
# ---------------------------------------------------------------------------


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def _build_flows(g: RetweetGraph, params: MapEquationParams,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Visit rates, per-edge link flows, and per-node unrecorded dangling rates.

    Link flow on edge (t, s) is p_s * (1 - tau) * count / out_strength_s,
    the rate at which encoded steps traverse that edge. Dangling nodes
    spread their non-teleport rate uniformly; those steps are unrecorded
    but still leave their module, so the rate is tracked separately.
    """
    p = stationary_visit_rates(g, 1.0 - params.tau, params.tol, params.max_iters)
    out = g.out_strength.astype(np.float64)
    flows = np.zeros(g.n_edges)
    if g.n_edges:
        flows = p[g.sources] * (1.0 - params.tau) * g.counts / out[g.sources]
    dangling = np.zeros(g.n)
    mask = out == 0
    dangling[mask] = p[mask] * (1.0 - params.tau)
    return p, flows, dangling


def _description_length(n_orig: int, p_total: np.ndarray, qlink: np.ndarray,
                        umass: np.ndarray, sizes: np.ndarray,
                        node_term: float) -> float:
    """Two-level codelength from per-module aggregates, in bits.

    Uses the algebraic form L = plogp(q) - 2 sum plogp(q_m)
    + sum plogp(q_m + p_m) - sum_alpha plogp(p_alpha); the last sum is the
    partition-independent `node_term`.
    """
    q_m = qlink + umass * (n_orig - sizes) / n_orig
    q = float(q_m.sum())
    total = _plogp(q) - node_term
    for qm, pm in zip(q_m, p_total):
        total += -2.0 * _plogp(float(qm)) + _plogp(float(qm + pm))
    return total


def map_equation(g: RetweetGraph, partition: Partition,
                 params: MapEquationParams = MapEquationParams()) -> float:
    """Description length (bits) of the partition under the damped walk."""
    a = partition.assignment
    if a.shape != (g.n,):
        raise InputError("partition does not cover the graph")
    p, flows, dangling = _build_flows(g, params)
    k = partition.k
    cross = a[g.targets] != a[g.sources]
    qlink = np.bincount(a[g.sources[cross]], weights=flows[cross], minlength=k)
    p_total = np.bincount(a, weights=p, minlength=k)
    umass = np.bincount(a, weights=dangling, minlength=k)
    sizes = np.bincount(a, minlength=k).astype(np.float64)
    node_term = float(sum(_plogp(float(x)) for x in p))
    return _description_length(g.n, p_total, qlink, umass, sizes, node_term)


class _FlowLevel:
    """Supernode flow state for one aggregation level of the map equation.

    Each supernode carries its visit mass, its unrecorded dangling rate,
    and the number of original nodes it stands for; link flows between
    supernodes are held in CSR/CSC form with self-flows split out.
    """

    def __init__(self, n_orig: int, p: np.ndarray, umass: np.ndarray,
                 sizes: np.ndarray, from_idx: np.ndarray, to_idx: np.ndarray,
                 flow: np.ndarray):
        self.n_orig = n_orig
        self.n = p.size
        self.p = p
        self.umass = umass
        self.sizes = sizes
        off = from_idx != to_idx
        self.self_flow = np.zeros(self.n)
        np.add.at(self.self_flow, from_idx[~off], flow[~off])
        mat = sparse.csr_matrix((flow[off], (from_idx[off], to_idx[off])),
                                shape=(self.n, self.n))
        mat.sum_duplicates()
        self.out_mat = mat
        self.in_mat = mat.T.tocsr()
        self.out_total = np.asarray(mat.sum(axis=1)).ravel()

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        coo = self.out_mat.tocoo()
        frm = np.concatenate([coo.row, np.arange(self.n)])
        to = np.concatenate([coo.col, np.arange(self.n)])
        fl = np.concatenate([coo.data, self.self_flow])
        keep = fl > 0
        return frm[keep], to[keep], fl[keep]


def _infomap_level(level: _FlowLevel,
                   orders: Callable[[int, int], np.ndarray],
                   ) -> tuple[np.ndarray, np.ndarray, bool]:
    """One level of greedy map-equation sweeps over supernodes."""
    n = level.n
    n_orig = level.n_orig
    comm = np.arange(n, dtype=np.int64)
    p_tot = level.p.copy()
    u_tot = level.umass.copy()
    s_tot = level.sizes.astype(np.float64).copy()
    qlink = level.out_total.copy()
    next_id = n

    def q_of(ql: float, um: float, sz: float) -> float:
        return ql + um * (n_orig - sz) / n_orig

    def term(qm: float, pm: float) -> float:
        return -2.0 * _plogp(qm) + _plogp(qm + pm)

    q_m = {c: q_of(qlink[c], u_tot[c], s_tot[c]) for c in range(n)}
    q_total = float(sum(q_m.values()))
    out_ptr, out_idx, out_dat = (level.out_mat.indptr, level.out_mat.indices,
                                 level.out_mat.data)
    in_ptr, in_idx, in_dat = (level.in_mat.indptr, level.in_mat.indices,
                              level.in_mat.data)
    acc = {c: [qlink[c], u_tot[c], s_tot[c], p_tot[c]] for c in range(n)}

    first_order = orders(0, n)
    # tie-break key per community: founding position in the pass-0 visit
    # order; ids minted for isolation moves rank after all originals in
    # creation order, and the isolation pseudo-candidate goes last
    rank = np.empty(n, dtype=np.int64)
    rank[first_order] = np.arange(n)

    def comm_key(cid: int) -> int:
        return int(rank[cid]) if cid < n else cid
    moved_any = False
    pass_idx = 0
    while True:
        order = first_order if pass_idx == 0 else orders(pass_idx, n)
        moved = 0
        for v in order:
            v = int(v)
            cv = int(comm[v])
            # link flow between v and each neighbouring module
            to_mod: dict[int, float] = {}
            from_mod: dict[int, float] = {}
            for e in range(out_ptr[v], out_ptr[v + 1]):
                c = int(comm[out_idx[e]])
                to_mod[c] = to_mod.get(c, 0.0) + out_dat[e]
            for e in range(in_ptr[v], in_ptr[v + 1]):
                c = int(comm[in_idx[e]])
                from_mod[c] = from_mod.get(c, 0.0) + in_dat[e]
            out_v = float(level.out_total[v])
            p_v = float(level.p[v])
            u_v = float(level.umass[v])
            sz_v = float(level.sizes[v])

            ql_a, um_a, sz_a, pm_a = acc[cv]
            q_a = q_m[cv]
            # state of the current module once v is taken out
            ql_a2 = ql_a - (out_v - to_mod.get(cv, 0.0)) + from_mod.get(cv, 0.0)
            um_a2 = um_a - u_v
            sz_a2 = sz_a - sz_v
            pm_a2 = pm_a - p_v
            lone = sz_a2 <= 0.5  # v was alone; leaving changes nothing
            q_a2 = 0.0 if lone else q_of(ql_a2, um_a2, sz_a2)
            removal_term = (0.0 if lone else term(q_a2, pm_a2)) - term(q_a, pm_a)

            candidates = sorted(set(to_mod) | set(from_mod),
                                key=comm_key) + [-1]
            best_c = cv
            best_delta = 0.0
            for c in candidates:
                if c == cv:
                    continue
                if c == -1:
                    if lone:
                        continue
                    ql_b, um_b, sz_b, pm_b = 0.0, 0.0, 0.0, 0.0
                    q_b = 0.0
                else:
                    ql_b, um_b, sz_b, pm_b = acc[c]
                    q_b = q_m[c]
                ql_b2 = ql_b + (out_v - to_mod.get(c, 0.0)) - from_mod.get(c, 0.0)
                q_b2 = q_of(ql_b2, um_b + u_v, sz_b + sz_v)
                q_tot2 = q_total - q_a - q_b + q_a2 + q_b2
                delta = (_plogp(q_tot2) - _plogp(q_total) + removal_term
                         + term(q_b2, pm_b + p_v) - term(q_b, pm_b))
                if delta < best_delta - GAIN_EPS:
                    best_delta = delta
                    best_c = c
            if best_c != cv:
                if best_c == -1:
                    best_c = next_id
                    next_id += 1
                    acc[best_c] = [0.0, 0.0, 0.0, 0.0]
                    q_m[best_c] = 0.0
                ql_b, um_b, sz_b, pm_b = acc[best_c]
                ql_b2 = ql_b + (out_v - to_mod.get(best_c, 0.0)) - from_mod.get(best_c, 0.0)
                q_b2 = q_of(ql_b2, um_b + u_v, sz_b + sz_v)
                q_total += -q_a - q_m[best_c] + q_a2 + q_b2
                acc[cv] = [ql_a2, um_a2, sz_a2, pm_a2]
                q_m[cv] = q_a2
                acc[best_c] = [ql_b2, um_b + u_v, sz_b + sz_v, pm_b + p_v]
                q_m[best_c] = q_b2
                comm[v] = best_c
                moved += 1
        if moved:
            moved_any = True
        pass_idx += 1
        if moved == 0:
            break
    return comm, first_order, moved_any


def infomap(g: RetweetGraph, params: MapEquationParams = MapEquationParams(),
            seed: int | None = 0,
            visit_order: Sequence[int] | None = None) -> Partition:
    """Greedy two-level map-equation minimization.

    Starts from singletons and only takes moves that shorten the
    description length, so the result never codes worse than singletons.
    `visit_order` fixes the level-0 sweep sequence (deterministic mode).
    """
    if g.n == 0:
        raise InputError("graph has no nodes")
    p, flows, dangling = _build_flows(g, params)
    level_state = _FlowLevel(g.n, p, dangling, np.ones(g.n),
                             g.sources.copy(), g.targets.copy(), flows)
    membership = np.arange(g.n, dtype=np.int64)
    level = 0
    while True:
        orders = _visit_orders(seed, visit_order if level == 0 else None,
                               tag=1, level=level)
        labels, first_order, moved = _infomap_level(level_state, orders)
        if not moved:
            break
        labels, k = _compact_by_order(labels, first_order)
        membership = labels[membership]
        if k == level_state.n:
            break
        frm, to, fl = level_state.edge_arrays()
        p2 = np.bincount(labels, weights=level_state.p, minlength=k)
        u2 = np.bincount(labels, weights=level_state.umass, minlength=k)
        s2 = np.bincount(labels, weights=level_state.sizes, minlength=k)
        level_state = _FlowLevel(level_state.n_orig, p2, u2, s2,
                                 labels[frm], labels[to], fl)
        level += 1
    return Partition.from_labels(membership)


# ---------------------------------------------------------------------------
# Community characterization
# ---------------------------------------------------------------------------


def community_profiles(partition: Partition, node_scores: np.ndarray,
                       zero_band: float = 1e-12) -> list[CommunityProfile]:
    """Size, left/right composition, mean score, and Shannon index per community.

    `node_scores` is aligned to node indices with NaN for unscored nodes.
    Communities with no scored member get None for mean and Shannon.
    """
    scores = np.asarray(node_scores, dtype=np.float64)
    if scores.shape != partition.assignment.shape:
        raise InputError("node scores are not aligned to the partition")
    profiles = []
    for c in range(partition.k):
        members = np.flatnonzero(partition.assignment == c)
        vals = scores[members]
        vals = vals[~np.isnan(vals)]
        n_left = int((vals < -zero_band).sum())
        n_right = int((vals > zero_band).sum())
        mean = float(vals.mean()) if vals.size else None
        profiles.append(CommunityProfile(
            community=c, size=int(members.size), n_left=n_left,
            n_right=n_right, mean_score=mean,
            shannon=shannon_diversity(n_left, n_right)))
    return profiles


def resolution_sweep(g: RetweetGraph, node_scores: np.ndarray,
                     gammas: Sequence[float] = DEFAULT_GAMMA_GRID,
                     seed: int = 0, size_floor: int = 1000,
                     ) -> list[tuple[float, list[tuple[int, int, float | None]]]]:
    """Louvain at each resolution; report (community, size, mean score)
    for communities larger than the size floor.

    Each gamma gets its own seed derived from (seed, gamma index), so
    entries can be recomputed independently.
    """
    if len(gammas) == 0:
        raise InputError("resolution sweep needs at least one gamma")
    out = []
    for gi, gamma in enumerate(gammas):
        part = louvain(g, ModularityParams(gamma=float(gamma)),
                       seed=derive_seed(seed, 2, gi))
        entries = []
        for prof in community_profiles(part, node_scores):
            if prof.size > size_floor:
                entries.append((prof.community, prof.size, prof.mean_score))
        out.append((float(gamma), entries))
    return out
