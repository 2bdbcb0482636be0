"""Batched Levenberg-Marquardt over products of compact Lie groups.

A :class:`WordSystem` asks that a list of words evaluate to the identity.
Variables are group elements in ``slots``; some slots may be frozen (their
values ride along in the state array but never move).  Steps live in the
tangent space at each slot and are applied by right multiplication with the
exponential, so iterates never leave the group.

Two group backends share the code: unit quaternions for SU(2) and complex
matrices for SU(r).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MalformedWordError
from .quaternion import BASIS, ONE, qexp, qinv, qlog, qmul, qnormalize


class QuaternionGroup:
    """SU(2) as unit quaternions, arrays of shape ``(..., 4)``."""

    tangent_dim = 3
    flat_dim = 4
    elem_shape = (4,)
    dtype = float

    def __init__(self):
        self.basis = BASIS.copy()

    def identity(self, lead=()):
        return np.broadcast_to(ONE, tuple(lead) + (4,)).copy()

    def mul(self, a, b):
        return qmul(a, b)

    def inv(self, a):
        return qinv(a)

    def flat(self, a):
        return a

    def exp(self, v):
        return qexp(v)

    def log(self, a):
        return qlog(a)

    def normalize(self, a):
        return qnormalize(a)

    def random(self, rng, lead):
        return qnormalize(rng.standard_normal(tuple(lead) + (4,)))


def su_basis(r: int) -> np.ndarray:
    """Orthonormal basis of su(r) for ``<X, Y> = Re tr(X^H Y)``; shape ``(r^2-1, r, r)``."""
    out = []
    for a in range(r):
        for b in range(a + 1, r):
            m = np.zeros((r, r), complex)
            m[a, b], m[b, a] = 1.0, -1.0
            out.append(m / np.sqrt(2.0))
            m = np.zeros((r, r), complex)
            m[a, b], m[b, a] = 1j, 1j
            out.append(m / np.sqrt(2.0))
    for k in range(1, r):
        d = np.zeros(r)
        d[:k] = 1.0
        d[k] = -k
        out.append(np.diag(1j * d / np.linalg.norm(d)))
    return np.array(out)


def expm_skew(Z):
    """exp of (batched) skew-Hermitian matrices via the Hermitian eigendecomposition."""
    H = -1j * Z
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * w)[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def logm_unitary(U):
    """Principal logarithm of (batched) unitary matrices; skew-Hermitian output."""
    w, V = np.linalg.eig(U)
    ang = np.angle(w)
    # eig of a normal matrix with repeated eigenvalues may give a non-unitary V
    Q, _ = np.linalg.qr(V)
    L = (Q * (1j * ang)[..., None, :]) @ np.conj(np.swapaxes(Q, -1, -2))
    if np.allclose(Q @ (np.exp(1j * ang)[..., :, None] * np.conj(np.swapaxes(Q, -1, -2))), U, atol=1e-8):
        return L
    # degenerate fallback: the Schur form of a normal matrix is diagonal
    from scipy.linalg import schur

    flat = U.reshape(-1, *U.shape[-2:])
    res = []
    for u in flat:
        T, Z = schur(u, output="complex")
        d = np.angle(np.diag(T))
        res.append(Z @ np.diag(1j * d) @ Z.conj().T)
    return np.array(res).reshape(U.shape)


def project_su(U):
    """Nearest special unitary matrix (polar factor, then fix the determinant phase)."""
    W, _, Vh = np.linalg.svd(U)
    P = W @ Vh
    r = P.shape[-1]
    det = np.linalg.det(P)
    phase = np.exp(-1j * np.angle(det) / r)
    return P * phase[..., None, None]


class UnitaryGroup:
    """SU(r) as complex ``r x r`` matrices, arrays of shape ``(..., r, r)``."""

    dtype = complex

    def __init__(self, r: int):
        self.r = r
        self.basis = su_basis(r)
        self.tangent_dim = r * r - 1
        self.flat_dim = 2 * r * r
        self.elem_shape = (r, r)

    def identity(self, lead=()):
        return np.broadcast_to(np.eye(self.r, dtype=complex), tuple(lead) + (self.r, self.r)).copy()

    def mul(self, a, b):
        return a @ b

    def inv(self, a):
        return np.conj(np.swapaxes(a, -1, -2))

    def flat(self, a):
        a = a.reshape(a.shape[:-2] + (self.r * self.r,))
        return np.concatenate([a.real, a.imag], axis=-1)

    def exp(self, v):
        Z = np.tensordot(v, self.basis, axes=([-1], [0]))
        return expm_skew(Z)

    def log(self, a):
        L = logm_unitary(a)
        return np.real(np.einsum("...ij,cij->...c", L, np.conj(self.basis)))

    def normalize(self, a):
        return project_su(a)

    def random(self, rng, lead):
        """Haar measure via QR of a complex Gaussian (phases corrected)."""
        lead = tuple(lead)
        Z = (rng.standard_normal(lead + (self.r, self.r)) + 1j * rng.standard_normal(lead + (self.r, self.r))) / np.sqrt(2)
        Q, R = np.linalg.qr(Z)
        d = np.diagonal(R, axis1=-2, axis2=-1)
        Q = Q * (d / np.abs(d))[..., None, :]
        det = np.linalg.det(Q)
        return Q * np.exp(-1j * np.angle(det) / self.r)[..., None, None]


def _compile(word, n_slots):
    letters = []
    for index, sign in word:
        if not 1 <= index <= n_slots:
            raise MalformedWordError(f"generator {index} outside 1..{n_slots}")
        letters.append((index - 1, 1 if sign > 0 else -1))
    return tuple(letters)


class WordSystem:
    """Constraint system ``hol(w) = 1`` for each word ``w``.

    ``words`` use 1-based slot indices.  ``free`` lists the 0-based slots that
    move; all others are frozen at whatever value the state carries.
    """

    def __init__(self, group, words: Sequence, n_slots: int, free: Sequence[int] | None = None):
        self.group = group
        self.n_slots = n_slots
        self.words = [_compile(w, n_slots) for w in words]
        self.free = list(range(n_slots)) if free is None else sorted(set(int(s) for s in free))
        self._col = {s: k for k, s in enumerate(self.free)}
        self.n_rows = len(self.words) * group.flat_dim
        self.n_cols = len(self.free) * group.tangent_dim

    def _factor(self, X, slot, sign):
        q = X[:, slot]
        return q if sign > 0 else self.group.inv(q)

    def holonomies(self, X):
        G = self.group
        out = []
        for word in self.words:
            acc = G.identity((X.shape[0],))
            for slot, sign in word:
                acc = G.mul(acc, self._factor(X, slot, sign))
            out.append(acc)
        return out

    def residuals(self, X) -> np.ndarray:
        G = self.group
        ident = G.flat(G.identity(()))
        parts = [G.flat(h) - ident for h in self.holonomies(X)]
        if not parts:
            return np.zeros((X.shape[0], 0))
        return np.concatenate(parts, axis=-1)

    def norms(self, X) -> np.ndarray:
        return np.linalg.norm(self.residuals(X), axis=-1)

    def jacobian(self, X) -> np.ndarray:
        """Analytic (Fox-derivative) Jacobian, shape ``(N, rows, cols)``.

        For ``w = F_1 ... F_L`` and the step ``X_s -> X_s exp(v)``, a letter
        ``X_s`` at position ``m`` contributes ``P_m e_c S_{m+1}`` and a letter
        ``X_s^-1`` contributes ``-P_{m-1} e_c S_m`` (``P``/``S`` prefix and
        suffix products).
        """
        G = self.group
        N = X.shape[0]
        fd = G.flat_dim
        td = G.tangent_dim
        J = np.zeros((N, self.n_rows, self.n_cols))
        basis = G.basis
        for w, word in enumerate(self.words):
            L = len(word)
            if L == 0:
                continue
            factors = [self._factor(X, s, e) for s, e in word]
            pre = [G.identity((N,))]
            for f in factors:
                pre.append(G.mul(pre[-1], f))
            suf = [G.identity((N,))] * (L + 1)
            for m in range(L - 1, -1, -1):
                suf[m] = G.mul(factors[m], suf[m + 1])
            rows = slice(w * fd, (w + 1) * fd)
            for m, (slot, sign) in enumerate(word):
                if slot not in self._col:
                    continue
                if sign > 0:
                    left, right, scale = pre[m + 1], suf[m + 1], 1.0
                else:
                    left, right, scale = pre[m], suf[m], -1.0
                # (N, td, ...) products left * e_c * right
                lb = G.mul(left[:, None], basis[None])
                term = G.mul(lb, right[:, None])
                block = scale * G.flat(term)  # (N, td, fd)
                c0 = self._col[slot] * td
                J[:, rows, c0:c0 + td] += np.swapaxes(block, 1, 2)
        return J

    def retract(self, X, delta) -> np.ndarray:
        G = self.group
        td = G.tangent_dim
        Y = X.copy()
        for k, s in enumerate(self.free):
            v = delta[:, k * td:(k + 1) * td]
            Y[:, s] = G.normalize(G.mul(X[:, s], G.exp(v)))
        return Y

    def numeric_jacobian(self, X, step: float = 1e-6) -> np.ndarray:
        """Central differences along the tangent coordinates."""
        N = X.shape[0]
        J = np.zeros((N, self.n_rows, self.n_cols))
        for c in range(self.n_cols):
            e = np.zeros((N, self.n_cols))
            e[:, c] = step
            rp = self.residuals(self._retract_raw(X, e))
            rm = self.residuals(self._retract_raw(X, -e))
            J[:, :, c] = (rp - rm) / (2.0 * step)
        return J

    def _retract_raw(self, X, delta):
        # no renormalization: keeps the finite difference symmetric
        G = self.group
        td = G.tangent_dim
        Y = X.copy()
        for k, s in enumerate(self.free):
            Y[:, s] = G.mul(X[:, s], G.exp(delta[:, k * td:(k + 1) * td]))
        return Y


@dataclass
class LMResult:
    X: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


def levenberg_marquardt(system: WordSystem, X0, tol: float = 1e-12, max_iter: int = 200,
                        lam0: float = 1e-3, lam_max: float = 1e12) -> LMResult:
    """Damped Gauss-Newton, one damping parameter per row of the batch.

    Each row evolves independently of the others, so results do not depend on
    how the batch is split.
    """
    X = np.array(X0, dtype=system.group.dtype, copy=True)
    N = X.shape[0]
    r = system.residuals(X)
    cost = np.sum(r * r, axis=-1)
    lam = np.full(N, lam0)
    iters = np.zeros(N, dtype=int)
    active = np.sqrt(cost) > tol
    n = system.n_cols
    eye = np.eye(n)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        Xa = X[idx]
        ra = r[idx]
        J = system.jacobian(Xa)
        JT = np.swapaxes(J, 1, 2)
        A = JT @ J
        g = np.einsum("nij,nj->ni", JT, ra)
        A = A + lam[idx, None, None] * eye
        delta = -np.linalg.solve(A, g[..., None])[..., 0]
        Xn = system.retract(Xa, delta)
        rn = system.residuals(Xn)
        cn = np.sum(rn * rn, axis=-1)
        ok = cn < cost[idx]
        acc = idx[ok]
        X[acc] = Xn[ok]
        r[acc] = rn[ok]
        cost[acc] = cn[ok]
        lam[acc] = np.maximum(lam[acc] / 3.0, 1e-15)
        lam[idx[~ok]] *= 4.0
        iters[idx] += 1
        active[idx] = (np.sqrt(cost[idx]) > tol) & (lam[idx] <= lam_max)
    res = np.sqrt(cost)
    return LMResult(X, res, res <= tol, iters)


def rank_from_singular_values(s, rank_tol: float, atol: float = 0.0) -> int:
    if s.size == 0:
        return 0
    top = s.max()
    if top <= atol:
        return 0
    return int(np.sum(s > max(rank_tol * top, atol)))
