"""Multistart solver for ``L_alpha ∩ L_beta`` in pinned gauge.

With the punctures fixed at ``(i, j, -k)`` the puncture product is 1, so a
point of the intersection is a handle tuple with every alpha and beta word
trivial and ``prod [A_j, B_j] = 1``.  The residual stacks the three blocks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidParameterError, ShapeError
from .lm import LMResult, QuaternionGroup, WordSystem, levenberg_marquardt, rank_from_singular_values
from .moduli import RepresentationPoint
from .quaternion import ONE, random_unit
from .words import HeegaardDiagram


@dataclass
class SolverConfig:
    starts: Optional[int] = None  # None means 500 * 2**genus
    seed: int = 0
    converge_tol: float = 1e-12
    dedup_radius: float = 1e-6
    cluster_radius: float = 1e-3
    rank_tol: float = 1e-6
    max_iterations: int = 200
    chunk_size: int = 512
    threads: Optional[int] = None
    fd_step: float = 1e-6
    conjugacy_tol: float = 1e-6
    path_radius: float = 1.2
    path_step: float = 0.03
    path_jump: float = 0.15
    path_tol: float = 1e-10
    tangent_probes: int = 20
    tangent_scale: float = 1e-4

    def __post_init__(self):
        for name in ("converge_tol", "dedup_radius", "cluster_radius", "rank_tol", "fd_step",
                     "conjugacy_tol", "path_radius", "path_step", "path_jump", "path_tol", "tangent_scale"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")
        for name in ("max_iterations", "chunk_size", "tangent_probes"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be positive")
        if self.starts is not None and self.starts < 1:
            raise InvalidParameterError("starts must be positive")
        if self.threads is not None and self.threads < 1:
            raise InvalidParameterError("threads must be positive")

    def n_starts(self, genus: int) -> int:
        return self.starts if self.starts is not None else 500 * 2**genus

    def n_threads(self) -> int:
        n = self.threads or os.cpu_count() or 1
        cap = os.environ.get("CHARVAR_THREADS")
        if cap:
            try:
                n = min(n, max(1, int(cap)))
            except ValueError:
                pass
        return n


QUATERNIONS = QuaternionGroup()


def diagram_system(d: HeegaardDiagram, group=QUATERNIONS) -> WordSystem:
    """Words alpha_1..alpha_g, beta_1..beta_g, then the commutator relator."""
    return WordSystem(group, [w.letters for w in d.constraint_words()], d.n_slots)


def _as_array(d: HeegaardDiagram, p: RepresentationPoint) -> np.ndarray:
    if len(p.handles) != d.n_slots:
        raise ShapeError(f"point has {len(p.handles)} handle entries, diagram needs {d.n_slots}")
    return p.handle_array()[None]


def residual(d: HeegaardDiagram, p: RepresentationPoint) -> float:
    X = _as_array(d, p)
    return float(diagram_system(d).norms(X)[0])


def run_batched(system: WordSystem, X0: np.ndarray, cfg: SolverConfig, tol: Optional[float] = None) -> LMResult:
    """LM on fixed-size chunks; the output never depends on the thread count."""
    tol = cfg.converge_tol if tol is None else tol
    N = X0.shape[0]
    bounds = [(a, min(a + cfg.chunk_size, N)) for a in range(0, N, cfg.chunk_size)]

    def work(b):
        return levenberg_marquardt(system, X0[b[0]:b[1]], tol=tol, max_iter=cfg.max_iterations)

    threads = min(cfg.n_threads(), len(bounds))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    if not parts:
        shape = (0,) + X0.shape[1:]
        return LMResult(np.zeros(shape, X0.dtype), np.zeros(0), np.zeros(0, bool), np.zeros(0, int))
    return LMResult(
        np.concatenate([p.X for p in parts]),
        np.concatenate([p.residual for p in parts]),
        np.concatenate([p.converged for p in parts]),
        np.concatenate([p.iterations for p in parts]),
    )


@dataclass
class RefineResult:
    point: RepresentationPoint
    residual: float
    converged: bool
    iterations: int


def refine(d: HeegaardDiagram, p: RepresentationPoint, cfg: Optional[SolverConfig] = None) -> RefineResult:
    cfg = cfg or SolverConfig()
    X = _as_array(d, p)
    out = levenberg_marquardt(diagram_system(d), X, tol=cfg.converge_tol, max_iter=cfg.max_iterations)
    return RefineResult(RepresentationPoint.from_array(out.X[0]), float(out.residual[0]),
                        bool(out.converged[0]), int(out.iterations[0]))


def kernel_dims(system: WordSystem, X: np.ndarray, cfg: SolverConfig, analytic: bool = False) -> np.ndarray:
    """``cols - rank`` of the constraint Jacobian at each row of ``X``."""
    if X.shape[0] == 0:
        return np.zeros(0, dtype=int)
    if system.n_cols == 0:
        return np.zeros(X.shape[0], dtype=int)
    out = np.empty(X.shape[0], dtype=int)
    for a in range(0, X.shape[0], cfg.chunk_size):
        Xc = X[a:a + cfg.chunk_size]
        J = system.jacobian(Xc) if analytic else system.numeric_jacobian(Xc, cfg.fd_step)
        s = np.linalg.svd(J, compute_uv=False)
        out[a:a + cfg.chunk_size] = [system.n_cols - rank_from_singular_values(row, cfg.rank_tol, 1e-9) for row in s]
    return out


def jacobian_kernel_dim(d: HeegaardDiagram, p: RepresentationPoint, cfg: Optional[SolverConfig] = None) -> int:
    cfg = cfg or SolverConfig()
    return int(kernel_dims(diagram_system(d), _as_array(d, p), cfg)[0])


def jacobian_discrepancy(d: HeegaardDiagram, p: RepresentationPoint, step: float = 1e-6) -> float:
    """Largest entrywise gap between the central-difference and Fox-derivative Jacobians."""
    system = diagram_system(d)
    X = _as_array(d, p)
    if system.n_cols == 0:
        return 0.0
    return float(np.max(np.abs(system.numeric_jacobian(X, step) - system.jacobian(X))))


def greedy_dedup(X: np.ndarray, radius: float):
    """Merge points within ``radius`` of an earlier representative, in index order.

    Returns ``(keep, multiplicity)`` with ``keep`` indices into ``X``.
    """
    n = X.shape[0]
    if n == 0:
        return np.zeros(0, int), np.zeros(0, int)
    flat = X.reshape(n, -1)
    if np.iscomplexobj(flat):
        flat = np.concatenate([flat.real, flat.imag], axis=1)
    if flat.shape[1] == 0:
        return np.array([0]), np.array([n])
    tree = cKDTree(flat)
    owner = np.full(n, -1)
    keep, mult = [], []
    for i in range(n):
        if owner[i] >= 0:
            continue
        nbrs = [j for j in tree.query_ball_point(flat[i], radius) if owner[j] < 0]
        owner[nbrs] = i
        keep.append(i)
        mult.append(len(nbrs))
    return np.array(keep), np.array(mult)


@dataclass
class SolutionSet:
    """Distinct converged solutions of one constraint system, in start order."""

    X: np.ndarray
    residuals: np.ndarray
    kernel_dims: np.ndarray
    multiplicities: np.ndarray
    start_indices: np.ndarray
    system: WordSystem
    n_starts: int
    n_converged: int
    diagram: Optional[HeegaardDiagram] = None
    cfg: SolverConfig = field(default_factory=SolverConfig)

    @property
    def group(self):
        return self.system.group

    def __len__(self):
        return self.X.shape[0]

    @property
    def points(self) -> list[RepresentationPoint]:
        return [RepresentationPoint.from_array(x) for x in self.X]


def solve_system(system: WordSystem, X0: np.ndarray, cfg: SolverConfig, diagram=None) -> SolutionSet:
    out = run_batched(system, X0, cfg)
    conv = np.nonzero(out.converged)[0]
    Xc = out.X[conv]
    keep, mult = greedy_dedup(Xc, cfg.dedup_radius)
    Xk = Xc[keep] if keep.size else Xc[:0]
    return SolutionSet(
        X=Xk,
        residuals=out.residual[conv][keep] if keep.size else np.zeros(0),
        kernel_dims=kernel_dims(system, Xk, cfg),
        multiplicities=mult,
        start_indices=conv[keep] if keep.size else np.zeros(0, int),
        system=system,
        n_starts=X0.shape[0],
        n_converged=int(conv.size),
        diagram=diagram,
        cfg=cfg,
    )


def starting_points(genus: int, cfg: SolverConfig) -> np.ndarray:
    """Start 0 is the trivial tuple; the rest are Haar-random handle tuples."""
    n = cfg.n_starts(genus)
    rng = np.random.default_rng(cfg.seed)
    X0 = random_unit(rng, (n, 2 * genus))
    X0[0] = ONE
    return X0


def solve_intersection(d: HeegaardDiagram, cfg: Optional[SolverConfig] = None) -> SolutionSet:
    cfg = cfg or SolverConfig()
    system = diagram_system(d)
    sols = solve_system(system, starting_points(d.genus, cfg), cfg, diagram=d)
    theta = np.broadcast_to(ONE, sols.X.shape[1:])
    assert any(np.linalg.norm(x - theta) <= cfg.dedup_radius for x in sols.X), "trivial representation lost"
    return sols


# clustering lives in its own module; re-export the public entry points
from .clustering import ComponentReport, cluster_components, match_reports  # noqa: E402,F401

__all__ = ["SolverConfig", "SolutionSet", "residual", "refine", "jacobian_kernel_dim", "solve_intersection",
           "ComponentReport", "cluster_components", "match_reports"]
