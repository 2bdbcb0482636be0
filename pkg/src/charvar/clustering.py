"""Grouping solution samples into connected components.

Proximity alone cannot join samples scattered over a sphere or a three-sphere,
so two samples are also declared connected when either

* they are simultaneously conjugate (a conjugation path from the identity stays
  inside the solution set, which is conjugation invariant), or
* a geodesic between them, projected back onto the solution set point by
  point, moves in small consecutive steps (a discrete continuation path).

Both certificates only ever merge; components found disconnected may still be
under-sampled, which the dimension flags help diagnose.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from .conjugacy import quaternion_conjugacy_residual, unitary_conjugacy_residual
from .lm import QuaternionGroup, levenberg_marquardt, rank_from_singular_values

ISOLATED = "isolated"
SPHERE = "sphere"
THREE_SPHERE = "three-sphere-like"
OTHER = "other"

SIGNATURE_TOL = 1e-8


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # the smaller index stays root so labels are order independent
            if rj < ri:
                ri, rj = rj, ri
            self.parent[rj] = ri
        return ri


def flatten(group, X) -> np.ndarray:
    n = X.shape[0]
    return np.asarray(group.flat(X)).reshape(n, -1)


def signatures(group, X) -> np.ndarray:
    """Traces of every slot: real for quaternions, complex for matrices."""
    if isinstance(group, QuaternionGroup):
        return 2.0 * X[..., 0]
    return np.trace(X, axis1=-2, axis2=-1)


def conjugacy_residuals(group, x, Ys, cfg) -> np.ndarray:
    if isinstance(group, QuaternionGroup):
        return quaternion_conjugacy_residual(x, Ys)
    return unitary_conjugacy_residual(group, x, Ys, tol=cfg.converge_tol)


def geodesic_points(group, A, B, n_steps):
    """Interior points ``A exp(t log(A^-1 B))`` for ``t = 1/n .. (n-1)/n``."""
    t = np.arange(1, n_steps) / n_steps
    V = group.log(group.mul(group.inv(A), B))
    steps = t[:, None, None] * V[None]
    return group.normalize(group.mul(A[None], group.exp(steps)))


def path_connected(system, pairs, cfg) -> np.ndarray:
    """Continuation certificate for each ``(A, B)`` pair of solution tuples."""
    group = system.group
    if not pairs:
        return np.zeros(0, bool)
    chunks, sizes = [], []
    for A, B in pairs:
        dist = float(np.linalg.norm(flatten(group, (A - B)[None])))
        n = max(2, int(np.ceil(dist / cfg.path_step)))
        pts = geodesic_points(group, A, B, n)
        chunks.append(pts)
        sizes.append(pts.shape[0])
    P = np.concatenate(chunks)
    from .solver import run_batched

    out = run_batched(system, P, cfg, tol=cfg.path_tol)
    ok = np.zeros(len(pairs), bool)
    start = 0
    for e, (A, B) in enumerate(pairs):
        k = sizes[e]
        conv = out.converged[start:start + k]
        chain = np.concatenate([A[None], out.X[start:start + k], B[None]])
        start += k
        if not conv.all():
            continue
        steps = np.linalg.norm(flatten(group, chain[1:] - chain[:-1]), axis=1)
        ok[e] = bool(np.all(steps <= cfg.path_jump))
    return ok


@dataclass
class Component:
    dimension: int
    classification: str
    trace_signature: list
    signature_constant: bool
    indices: np.ndarray
    sample_array: np.ndarray
    kernel_dims: np.ndarray
    multiplicity: int
    ambiguous: bool = False
    tangent_estimate: Optional[int] = None

    @property
    def samples(self):
        if self.sample_array.ndim == 3 and self.sample_array.shape[-1] == 4 and not np.iscomplexobj(self.sample_array):
            from .moduli import RepresentationPoint

            return [RepresentationPoint.from_array(x) for x in self.sample_array]
        return list(self.sample_array)

    def __len__(self):
        return self.sample_array.shape[0]


@dataclass
class ComponentReport:
    components: list
    solutions: object
    warnings: list = field(default_factory=list)
    rank: Optional[int] = None
    punctures: Optional[np.ndarray] = None

    @property
    def dims(self) -> list[int]:
        return sorted(c.dimension for c in self.components)

    def count(self, classification: str) -> int:
        return sum(1 for c in self.components if c.classification == classification)

    def betti_heuristic(self) -> int:
        """1 per isolated point plus 2 per two-sphere."""
        return self.count(ISOLATED) + 2 * self.count(SPHERE)


def _gram_invariants(X) -> np.ndarray:
    """Pairwise inner products of imaginary parts: unchanged by simultaneous conjugation."""
    v = X[..., 1:]
    G = np.einsum("nsi,nti->nst", v, v)
    iu = np.triu_indices(X.shape[1])
    return G[:, iu[0], iu[1]]


def _conjugacy_merge(uf, group, X, kernel, sig, cfg):
    n = X.shape[0]
    visited = kernel == 0
    # cheap necessary conditions before the exact alignment test
    gram = _gram_invariants(X) if isinstance(group, QuaternionGroup) and X.shape[1] else None
    for i in range(n):
        if visited[i]:
            continue
        visited[i] = True
        diff = np.max(np.abs(sig - sig[i]), axis=1) if sig.shape[1] else np.zeros(n)
        ok = diff <= cfg.conjugacy_tol
        if gram is not None:
            ok &= np.max(np.abs(gram - gram[i]), axis=1) <= 10.0 * cfg.conjugacy_tol
        cand = np.nonzero(~visited & (kernel == kernel[i]) & ok)[0]
        if cand.size == 0:
            continue
        res = conjugacy_residuals(group, X[i], X[cand], cfg)
        for j in cand[res <= cfg.conjugacy_tol]:
            uf.union(i, int(j))
            visited[j] = True


def _candidate_edges(flat, kernel, cfg, k=10, always=3):
    """k-nearest-neighbour pairs within ``path_radius``; the ``always`` nearest
    neighbours of each sample are kept regardless of distance so sparse
    samples of high-dimensional components still get candidates."""
    edges = set()
    for kd in sorted(set(kernel.tolist())):
        if kd == 0:
            continue
        idx = np.nonzero(kernel == kd)[0]
        if idx.size < 2:
            continue
        tree = cKDTree(flat[idx])
        kk = min(k + 1, idx.size)
        dist, nb = tree.query(flat[idx], k=kk)
        for a in range(idx.size):
            for rank, (dd, b) in enumerate(zip(dist[a][1:], nb[a][1:])):
                if dd <= cfg.path_radius or rank < always:
                    i, j = sorted((int(idx[a]), int(idx[b])))
                    edges.add((float(dd), i, j))
    return sorted(edges)


def _path_merge(uf, system, X, edges, cfg, batch=256, attempts=3):
    failures = Counter()
    pending = edges
    while pending:
        chosen, rest, keys = [], [], set()
        for e in pending:
            _, i, j = e
            ri, rj = uf.find(i), uf.find(j)
            if ri == rj:
                continue
            key = (min(ri, rj), max(ri, rj))
            if failures[key] >= attempts:
                continue
            if key in keys or len(chosen) >= batch:
                rest.append(e)
                continue
            keys.add(key)
            chosen.append((e, key))
        if not chosen:
            break
        ok = path_connected(system, [(X[i], X[j]) for (_, i, j), _ in chosen], cfg)
        for ((_, i, j), key), good in zip(chosen, ok):
            if good:
                uf.union(i, j)
            else:
                failures[key] += 1
        pending = rest


def _bridge_merge(uf, system, X, flat, kernel, cfg, max_clusters=40):
    """Try one continuation path between the closest samples of each pair of clusters."""
    tried = set()
    while True:
        roots = {}
        for i in range(X.shape[0]):
            if kernel[i] > 0:
                roots.setdefault(uf.find(i), []).append(i)
        by_dim = {}
        for r, members in roots.items():
            by_dim.setdefault(int(kernel[r]), []).append((r, members))
        pairs = []
        for kd, clusters in by_dim.items():
            if len(clusters) < 2 or len(clusters) > max_clusters:
                continue
            trees = {r: cKDTree(flat[m]) for r, m in clusters}
            for a in range(len(clusters)):
                for b in range(a + 1, len(clusters)):
                    ra, ma = clusters[a]
                    rb, mb = clusters[b]
                    key = (tuple(ma), tuple(mb))
                    if key in tried:
                        continue
                    tried.add(key)
                    dist, nb = trees[rb].query(flat[ma], k=1)
                    a_i = int(np.argmin(dist))
                    if dist[a_i] > 2.0 * cfg.path_radius:
                        continue
                    pairs.append((ma[a_i], mb[int(nb[a_i])]))
        if not pairs:
            return
        ok = path_connected(system, [(X[i], X[j]) for i, j in pairs], cfg)
        merged = False
        for (i, j), good in zip(pairs, ok):
            if good and uf.find(i) != uf.find(j):
                uf.union(i, j)
                merged = True
        if not merged:
            return


def tangent_rank(system, x, cfg, seed) -> int:
    """Rank of displacements after re-projecting small random tangent kicks."""
    group = system.group
    rng = np.random.default_rng(seed)
    k = cfg.tangent_probes
    V = rng.standard_normal((k, system.n_cols))
    V *= cfg.tangent_scale / np.linalg.norm(V, axis=1, keepdims=True)
    base = np.broadcast_to(x, (k,) + x.shape).copy()
    out = levenberg_marquardt(system, system.retract(base, V), tol=cfg.converge_tol, max_iter=cfg.max_iterations)
    if not out.converged.any():
        return -1
    Y = out.X[out.converged]
    disp = group.log(group.mul(group.inv(base[out.converged]), Y))
    D = np.concatenate([disp[:, s] for s in system.free], axis=1) if system.free else np.zeros((Y.shape[0], 0))
    if D.shape[1] == 0:
        return 0
    s = np.linalg.svd(D, compute_uv=False)
    return rank_from_singular_values(s, 1e-2, 1e-2 * cfg.tangent_scale)


def classify(dim: int, constant: bool) -> str:
    if dim == 0:
        return ISOLATED
    if dim == 2 and constant:
        return SPHERE
    if dim == 3:
        return THREE_SPHERE
    return OTHER


def _sig_key(sig):
    out = []
    for v in sig:
        v = complex(v)
        out.extend([round(v.real, 6), round(v.imag, 6)])
    return tuple(out)


def cluster_components(s, cfg=None) -> ComponentReport:
    """Connected components of a solution set with dimension and shape labels."""
    cfg = cfg or s.cfg
    X = s.X
    n = X.shape[0]
    group = s.group
    system = s.system
    warnings = []
    if n == 0:
        return ComponentReport([], s, ["no converged solutions"])
    flat = flatten(group, X)
    kernel = np.asarray(s.kernel_dims)
    sig = signatures(group, X)
    uf = UnionFind(n)

    if flat.shape[1]:
        tree = cKDTree(flat)
        for i, j in sorted(tree.query_pairs(cfg.cluster_radius)):
            uf.union(i, j)
    else:
        for i in range(1, n):
            uf.union(0, i)
    _conjugacy_merge(uf, group, X, kernel, sig, cfg)
    _path_merge(uf, system, X, _candidate_edges(flat, kernel, cfg), cfg)
    _bridge_merge(uf, system, X, flat, kernel, cfg)

    groups = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)

    comps = []
    for root, members in groups.items():
        members = np.array(sorted(members))
        kd = kernel[members]
        mode, count = Counter(kd.tolist()).most_common(1)[0]
        ambiguous = count < 0.9 * members.size
        lead = members[0]
        constant = bool(np.all(np.abs(sig[members] - sig[lead]) <= SIGNATURE_TOL))
        trank = tangent_rank(system, X[lead], cfg, seed=[cfg.seed, int(s.start_indices[lead])]) if mode > 0 else 0
        c = Component(
            dimension=int(mode),
            classification=classify(int(mode), constant),
            trace_signature=[float(v) if np.isrealobj(sig) else complex(v) for v in sig[lead]],
            signature_constant=constant,
            indices=members,
            sample_array=X[members],
            kernel_dims=kd,
            multiplicity=int(np.sum(s.multiplicities[members])),
            ambiguous=ambiguous,
            tangent_estimate=int(trank),
        )
        if ambiguous:
            warnings.append(f"ambiguous component at sample {lead}: kernel dimensions {sorted(Counter(kd.tolist()).items())}")
        if trank != mode:
            warnings.append(f"component at sample {lead}: kernel dimension {mode} but tangent sampling rank {trank}")
        comps.append(c)
    comps.sort(key=lambda c: (c.dimension, _sig_key(c.trace_signature), int(c.indices[0])))
    return ComponentReport(comps, s, warnings)  # rank/punctures filled in by the SU(r) solver


# -- matching between reports -------------------------------------------------

@dataclass
class Matching:
    pairs: list
    unmatched_first: list
    unmatched_second: list
    details: list = field(default_factory=list)

    @property
    def perfect(self) -> bool:
        return not self.unmatched_first and not self.unmatched_second


def embed_samples(group, X, n_slots: int, generator_map: dict) -> np.ndarray:
    """Carry tuples into another slot layout; unmapped target slots get the identity."""
    Y = group.identity((X.shape[0], n_slots))
    for src, dst in generator_map.items():
        Y[:, dst - 1] = X[:, src - 1]
    return Y


def locate(report: ComponentReport, Y: np.ndarray, cfg) -> list:
    """For each tuple in ``Y`` (already solutions of ``report``'s system), the
    index of the component containing it, or ``None``."""
    s = report.solutions
    group = s.group
    out = []
    for y in Y:
        found = None
        # proximity first, then conjugacy, then a continuation path
        for ci, comp in enumerate(report.components):
            d = np.linalg.norm(flatten(group, comp.sample_array - y[None]), axis=1)
            if d.min() <= cfg.cluster_radius:
                found = ci
                break
        if found is None:
            for ci, comp in enumerate(report.components):
                res = conjugacy_residuals(group, y, comp.sample_array, cfg)
                if res.min() <= cfg.conjugacy_tol:
                    found = ci
                    break
        if found is None:
            cands = []
            for ci, comp in enumerate(report.components):
                if comp.dimension == 0:
                    continue
                d = np.linalg.norm(flatten(group, comp.sample_array - y[None]), axis=1)
                order = np.argsort(d, kind="stable")[:3]
                for j in order:
                    if d[j] <= 2.0 * cfg.path_radius:
                        cands.append((ci, comp.sample_array[j]))
            if cands:
                ok = path_connected(s.system, [(y, b) for _, b in cands], cfg)
                for (ci, _), good in zip(cands, ok):
                    if good:
                        found = ci
                        break
        out.append(found)
    return out


def match_reports(r1: ComponentReport, r2: ComponentReport, generator_map: Optional[dict] = None,
                  cfg=None, per_component: int = 3) -> Matching:
    """Bipartite matching of components after carrying samples of ``r1`` into ``r2``'s slots."""
    cfg = cfg or r2.solutions.cfg
    s1, s2 = r1.solutions, r2.solutions
    group = s2.group
    if generator_map is None:
        common = min(s1.system.n_slots, s2.system.n_slots)
        generator_map = {k: k for k in range(1, common + 1)}
    details = []
    m, n = len(r1.components), len(r2.components)
    cost = np.ones((m, n))
    for a, comp in enumerate(r1.components):
        Y = embed_samples(group, comp.sample_array[:per_component], s2.system.n_slots, generator_map)
        res = s2.system.norms(Y)
        bad = res > 1e-9
        if bad.any():
            fix = levenberg_marquardt(s2.system, Y[bad], tol=cfg.converge_tol, max_iter=cfg.max_iterations)
            moved = np.linalg.norm(flatten(group, fix.X - Y[bad]), axis=1)
            Y[bad] = fix.X
            if not (fix.converged.all() and np.all(moved <= 1e-6)):
                details.append(f"component {a}: mapped samples are not solutions of the second system")
                continue
        hits = locate(r2, Y, cfg)
        for b in set(h for h in hits if h is not None):
            if r2.components[b].dimension == comp.dimension:
                cost[a, b] = 0.0
    rows, cols = linear_sum_assignment(cost) if m and n else (np.zeros(0, int), np.zeros(0, int))
    pairs = [(int(a), int(b)) for a, b in zip(rows, cols) if cost[a, b] == 0.0]
    left = sorted(set(range(m)) - {a for a, _ in pairs})
    right = sorted(set(range(n)) - {b for _, b in pairs})
    return Matching(pairs, left, right, details)
