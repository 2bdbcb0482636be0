"""Simultaneous-conjugacy tests for tuples of group elements."""
from __future__ import annotations

import numpy as np

from .lm import UnitaryGroup, WordSystem, levenberg_marquardt, project_su
from .quaternion import kabsch_residual


def quaternion_conjugacy_residual(x, Ys):
    """Minimal ``sqrt(sum_s |M x_s M^-1 - y_s|^2)`` for each ``y`` in ``Ys``.

    Closed form: conjugation fixes real parts and rotates imaginary parts, so
    the optimum is an orthogonal Procrustes (Kabsch) problem.
    """
    Ys = np.asarray(Ys, dtype=float)
    Xs = np.broadcast_to(np.asarray(x, dtype=float), Ys.shape)
    res, _ = kabsch_residual(Xs, Ys)
    return res


def conjugation_system(group, S: int) -> WordSystem:
    """Slot 1 is the conjugator ``M``; slots ``2..S+1`` hold ``x``, ``S+2..2S+1`` hold ``y``.

    The word ``M x_s M^-1 y_s^-1`` has the same residual norm as
    ``M x_s M^-1 - y_s`` because right multiplication by ``y_s^-1`` is an isometry.
    """
    words = [[(1, 1), (2 + s, 1), (1, -1), (2 + S + s, -1)] for s in range(S)]
    return WordSystem(group, words, 1 + 2 * S, free=[0])


def refine_conjugator(group, X, Y, M0, tol=1e-12, max_iter=100):
    """Batched least squares over the conjugator; returns ``(M, residual)``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    N, S = X.shape[:2]
    system = conjugation_system(group, S)
    state = np.concatenate([np.asarray(M0)[:, None], X, Y], axis=1)
    out = levenberg_marquardt(system, state, tol=tol, max_iter=max_iter)
    return out.X[:, 0], out.residual


def _hermitian_probe(T):
    """A fixed Hermitian combination of a tuple; equivariant under conjugation."""
    S = T.shape[-3]
    coef = np.cos(1.0 + np.arange(S) * 0.7318)[:, None, None]
    coef2 = np.sin(0.4 + np.arange(S) * 1.1931)[:, None, None]
    Th = np.conj(np.swapaxes(T, -1, -2))
    H = np.sum(coef * (T + Th) + 1j * coef2 * (T - Th), axis=-3)
    return 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))


def eigen_guess(x, Ys):
    """Conjugator guesses ``V_y V_x^H`` from eigenbases of an equivariant probe."""
    _, Vx = np.linalg.eigh(_hermitian_probe(np.asarray(x)))
    _, Vy = np.linalg.eigh(_hermitian_probe(np.asarray(Ys)))
    return project_su(Vy @ np.conj(Vx.T))


def traces(T):
    return np.trace(T, axis1=-2, axis2=-1)


def unitary_conjugacy_residual(group: UnitaryGroup, x, Ys, tol=1e-12):
    """Best conjugation residual per ``y`` from a single eigenbasis-seeded solve."""
    Ys = np.asarray(Ys)
    Xs = np.broadcast_to(np.asarray(x), Ys.shape).copy()
    M0 = eigen_guess(x, Ys)
    _, res = refine_conjugator(group, Xs, Ys, M0, tol=tol)
    return res


def unitary_conjugacy_search(group: UnitaryGroup, x, y, restarts=50, seed=0, tol=1e-12):
    """Multistart search for ``M`` with ``M x M^H = y``; returns ``(M, residual)``.

    Start 0 is the eigenbasis guess, start 1 the identity, the rest Haar random.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    starts = [eigen_guess(x, y[None])[0], group.identity(())]
    if restarts > 2:
        starts.extend(group.random(rng, (restarts - 2,)))
    M0 = np.array(starts[:max(restarts, 1)])
    k = M0.shape[0]
    X = np.broadcast_to(x, (k,) + x.shape).copy()
    Y = np.broadcast_to(y, (k,) + y.shape).copy()
    M, res = refine_conjugator(group, X, Y, M0, tol=tol)
    best = int(np.argmin(res))
    return M[best], float(res[best])
