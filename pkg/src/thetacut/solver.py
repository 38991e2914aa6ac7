"""Primal-dual interior-point solver for the bordered relaxations.

The model is brought to the standard form

    min <C, Y> + 0^T s   s.t.   <A_i, Y> = b_i            (equalities)
                                <A_i, Y> + s_i = b_i      (cuts)
                                Y psd, s >= 0

and solved by an infeasible path-following method with the HKM search
direction and Mehrotra's predictor-corrector.  Constraint matrices have a
handful of nonzeros each, so the Schur complement
``M_ij = tr(A_i Y A_j Z^-1)`` is formed entry by entry in a compiled kernel
instead of through dense Kronecker products.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla
from numba import njit

from .model import Problem, SdpModel

log = logging.getLogger(__name__)


class Status(str, Enum):
    OPTIMAL = "optimal"
    NEAR_OPTIMAL = "near_optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class SolverConfig:
    feastol: float = 1e-8
    gaptol: float = 1e-8
    max_solver_iters: int = 100
    verbosity: int = 0

    def __post_init__(self):
        if self.feastol <= 0 or self.gaptol <= 0:
            raise ValueError("solver tolerances must be positive")


@dataclass
class PrimalSolution:
    Y: np.ndarray
    objective: float
    status: Status
    primal_infeasibility: float
    dual_infeasibility: float
    gap: float
    min_eigenvalue: float
    iterations: int
    seconds: float
    dual_objective: float = float("nan")
    cut_slacks: np.ndarray | None = field(default=None, repr=False)

    @property
    def usable(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.NEAR_OPTIMAL)


# -- compiled kernels ---------------------------------------------------------

@njit(cache=True)
def _schur(X, Zi, ptr, P, Q, V, out):
    # row i: W = X A_i Zi densely, then M[i, j] = <A_j, W>
    N = X.shape[0]
    k = ptr.shape[0] - 1
    W = np.empty((N, N))
    for i in range(k):
        W[:, :] = 0.0
        for e in range(ptr[i], ptr[i + 1]):
            p = P[e]
            q = Q[e]
            v = V[e]
            for a in range(N):
                xa = v * X[a, p]
                for b in range(N):
                    W[a, b] += xa * Zi[q, b]
        for j in range(i, k):
            acc = 0.0
            for f in range(ptr[j], ptr[j + 1]):
                acc += V[f] * W[P[f], Q[f]]
            out[i, j] = acc
            out[j, i] = acc


# -- problem data -------------------------------------------------------------

class _Data:
    """Directed-entry (CSR by row) form of every constraint matrix."""

    def __init__(self, model: SdpModel):
        N = model.dim
        edge_pos = {(i + 1, j + 1) for i, j in model.graph.edges}
        rows = [coeffs for coeffs, _ in model.equalities]
        b = [rhs for _, rhs in model.equalities]
        self.n_eq = len(rows)
        kept_cuts = []
        for idx, cut in enumerate(model.cuts):
            # entries on edges are pinned to zero by equalities
            coeffs = {k: v for k, v in cut.coeffs.items() if k not in edge_pos}
            if not coeffs:
                if cut.rhs < 0:
                    raise ValueError(f"cut {cut.key} is infeasible on the edge face")
                continue
            rows.append(coeffs)
            b.append(cut.rhs)
            kept_cuts.append(idx)
        self.cut_index = np.array(kept_cuts, dtype=np.int64)
        self.k = len(rows)
        self.n_cut = self.k - self.n_eq
        ptr = [0]
        P, Q, V = [], [], []
        norms = np.empty(self.k)
        for r, coeffs in enumerate(rows):
            sq = 0.0
            for (a, c), v in coeffs.items():
                if a == c:
                    P.append(a); Q.append(a); V.append(v)
                    sq += v * v
                else:
                    P.extend((a, c)); Q.extend((c, a)); V.extend((0.5 * v, 0.5 * v))
                    sq += 0.5 * v * v
            ptr.append(len(P))
            norms[r] = np.sqrt(sq)
        self.N = N
        self.ptr = np.array(ptr, dtype=np.int64)
        self.P = np.array(P, dtype=np.int64)
        self.Q = np.array(Q, dtype=np.int64)
        self.V = np.array(V, dtype=float)
        self.row_of = np.repeat(np.arange(self.k), np.diff(self.ptr))
        self.flat = self.P * N + self.Q
        self.b = np.array(b, dtype=float)
        self.norms = norms
        sign = -1.0 if model.sense == "max" else 1.0
        C = np.zeros((N, N))
        for (a, c), v in model.objective.items():
            if a == c:
                C[a, a] += sign * v
            else:
                C[a, c] += 0.5 * sign * v
                C[c, a] += 0.5 * sign * v
        self.C = C
        self.sign = sign

    def A(self, X: np.ndarray) -> np.ndarray:
        vals = self.V * X.ravel()[self.flat]
        return np.bincount(self.row_of, weights=vals, minlength=self.k)

    def AT(self, y: np.ndarray) -> np.ndarray:
        w = self.V * y[self.row_of]
        S = np.bincount(self.flat, weights=w, minlength=self.N * self.N)
        return S.reshape(self.N, self.N)

    def schur(self, X: np.ndarray, Zi: np.ndarray) -> np.ndarray:
        M = np.empty((self.k, self.k))
        _schur(X, Zi, self.ptr, self.P, self.Q, self.V, M)
        return M


def _sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha with X + alpha dX psd (inf if unbounded)."""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    W = sla.solve_triangular(L, dX, lower=True, check_finite=False)
    W = sla.solve_triangular(L, W.T, lower=True, check_finite=False)
    lam = sla.eigvalsh(_sym(W), subset_by_index=[0, 0], check_finite=False)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not neg.any():
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def _spd_inverse(Z: np.ndarray) -> np.ndarray:
    c = sla.cho_factor(Z, lower=True, check_finite=False)
    Zi = sla.cho_solve(c, np.eye(Z.shape[0]), check_finite=False)
    return _sym(Zi)


def _solve_schur(M: np.ndarray, rhs_list):
    diag = np.diag(M).copy()
    reg = 0.0
    scale = max(1.0, float(np.max(np.abs(diag)))) if diag.size else 1.0
    for _ in range(8):
        try:
            fac = sla.cho_factor(M, lower=True, check_finite=False, overwrite_a=False)
            return [sla.cho_solve(fac, r, check_finite=False) for r in rhs_list], fac
        except (np.linalg.LinAlgError, ValueError):
            reg = scale * 1e-13 if reg == 0.0 else reg * 100
            M = M.copy()
            M[np.diag_indices_from(M)] = diag + reg
    raise np.linalg.LinAlgError("Schur complement not positive definite")


def solve(model: SdpModel, cfg: SolverConfig | None = None) -> PrimalSolution:
    """Solve ``model``; never raises on numerical trouble (see ``status``)."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    d = _Data(model)
    N, k, L = d.N, d.k, d.n_cut
    eq = slice(0, d.n_eq)
    cut = slice(d.n_eq, k)
    b, C = d.b, d.C
    normb = 1.0 + np.linalg.norm(b)
    normC = 1.0 + np.linalg.norm(C)

    # starting point in the spirit of SDPT3's default
    lp_norms = np.sqrt(d.norms[cut] ** 2 + 1.0)
    all_norms = d.norms.copy()
    all_norms[cut] = lp_norms
    xi = max(10.0, np.sqrt(N), N * float(np.max((1 + np.abs(b)) / (1 + all_norms))) if k else 10.0)
    eta = max(10.0, np.sqrt(N), float(np.max(all_norms)) if k else 0.0, np.linalg.norm(C))
    X = xi * np.eye(N)
    Z = eta * np.eye(N)
    y = np.zeros(k)
    s = np.full(L, xi)
    w = np.full(L, eta)
    nu = N + L

    status = Status.NUMERICAL_FAILURE
    best = None
    it = 0
    pinf = dinf = gap = np.inf
    for it in range(1, cfg.max_solver_iters + 1):
        AX = d.A(X)
        if L:
            AX[cut] += s
        rp = b - AX
        Rd = C - d.AT(y) - Z
        rd = -y[cut] - w
        pobj = float(np.vdot(C, X))
        dobj = float(b @ y)
        mu = (float(np.vdot(X, Z)) + float(s @ w)) / nu
        pinf = np.linalg.norm(rp) / normb
        dinf = (np.linalg.norm(Rd) + np.linalg.norm(rd)) / normC
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        if cfg.verbosity > 1:
            log.debug("it %3d pobj %+.10e dobj %+.10e pinf %.1e dinf %.1e gap %.1e mu %.1e",
                      it, pobj, dobj, pinf, dinf, gap, mu)
        err = max(pinf, dinf, gap)
        if best is None or err < best[0]:
            best = (err, X.copy(), y.copy(), Z.copy(), s.copy(), it, pinf, dinf, gap, pobj, dobj)
        if pinf < cfg.feastol and dinf < cfg.feastol and gap < cfg.gaptol:
            status = Status.OPTIMAL
            break
        if not np.isfinite(err) or err > 1e30:
            break
        # detect divergence of the dual (primal infeasible) or primal (dual infeasible)
        if np.linalg.norm(y) > 1e12 or np.abs(X).max() > 1e12:
            status = Status.INFEASIBLE
            break

        try:
            Zi = _spd_inverse(Z)
        except np.linalg.LinAlgError:
            break
        M = d.schur(X, Zi)
        D = s / w
        if L:
            M[d.n_eq:, d.n_eq:][np.diag_indices(L)] += D

        XRdZi = X @ Rd @ Zi

        def direction(sigma_mu, corr_X=None, corr_lp=None):
            G = sigma_mu * Zi - X - XRdZi
            if corr_X is not None:
                G -= corr_X @ Zi
            h = sigma_mu / w - s - D * rd
            if corr_lp is not None:
                h -= corr_lp / w
            rhs = rp - d.A(G)
            rhs[cut] -= h
            return G, h, rhs

        def finish(G, h, dy):
            ATdy = d.AT(dy)
            dZ = _sym(Rd - ATdy)
            dX = _sym(G + X @ ATdy @ Zi)
            dw = rd - dy[cut]
            ds = h + D * dy[cut]
            return dX, dy, dZ, ds, dw

        try:
            G, h, rhs = direction(0.0)
            (dy,), fac = _solve_schur(M, [rhs])
        except np.linalg.LinAlgError:
            break
        dXa, dya, dZa, dsa, dwa = finish(G, h, dy)
        ap = min(1.0, _max_step(X, dXa), _max_step_lp(s, dsa))
        ad = min(1.0, _max_step(Z, dZa), _max_step_lp(w, dwa))
        mu_aff = (float(np.vdot(X + ap * dXa, Z + ad * dZa))
                  + float((s + ap * dsa) @ (w + ad * dwa))) / nu
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0

        G, h, rhs = direction(sigma * mu, dXa @ dZa, dsa * dwa)
        dy = sla.cho_solve(fac, rhs, check_finite=False)
        dX, dy, dZ, ds, dw = finish(G, h, dy)
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gamma * _max_step(X, dX), gamma * _max_step_lp(s, ds))
        ad = min(1.0, gamma * _max_step(Z, dZ), gamma * _max_step_lp(w, dw))
        if ap < 1e-10 and ad < 1e-10:
            break
        X = X + ap * dX
        s = s + ap * ds
        y = y + ad * dy
        Z = Z + ad * dZ
        w = w + ad * dw

    if status is not Status.OPTIMAL and best is not None:
        err, X, y, Z, s, it_best, pinf, dinf, gap, pobj, dobj = best
        tol = max(cfg.feastol, cfg.gaptol)
        if status is not Status.INFEASIBLE:
            if max(pinf, dinf) <= 100 * cfg.feastol and gap <= 100 * cfg.gaptol:
                status = Status.NEAR_OPTIMAL
            else:
                status = Status.NUMERICAL_FAILURE
        log.warning("solver stopped with status %s (pinf %.1e dinf %.1e gap %.1e, tol %.0e)",
                    status.value, pinf, dinf, gap, tol)
    pobj = float(np.vdot(C, X))
    dobj = float(b @ y)
    Y = _sym(X)
    min_eig = float(sla.eigvalsh(Y, subset_by_index=[0, 0], check_finite=False)[0]) if N else 0.0
    slacks = np.full(len(model.cuts), np.nan)
    if L:
        slacks[d.cut_index] = s
    return PrimalSolution(
        Y=Y,
        objective=d.sign * pobj,
        status=status,
        primal_infeasibility=float(pinf),
        dual_infeasibility=float(dinf),
        gap=float(gap),
        min_eigenvalue=min_eig,
        iterations=it,
        seconds=time.perf_counter() - t0,
        dual_objective=d.sign * dobj,
        cut_slacks=slacks,
    )


# -- certification --------------------------------------------------------------

@dataclass
class Certificate:
    min_eigenvalue: float
    equality_violation: float
    cut_violation: float
    objective: float
    tol: float

    @property
    def ok(self) -> bool:
        return (self.min_eigenvalue >= -self.tol and self.equality_violation <= self.tol
                and self.cut_violation <= self.tol)

    def breaches(self) -> list[str]:
        out = []
        if self.min_eigenvalue < -self.tol:
            out.append(f"min eigenvalue {self.min_eigenvalue:.3e}")
        if self.equality_violation > self.tol:
            out.append(f"equality violation {self.equality_violation:.3e}")
        if self.cut_violation > self.tol:
            out.append(f"cut violation {self.cut_violation:.3e}")
        return out


def min_eigenvalue(Y: np.ndarray) -> float:
    """Smallest eigenvalue; dense below order 300, Lanczos above."""
    Y = _sym(np.asarray(Y, dtype=float))
    if Y.shape[0] < 300:
        return float(sla.eigvalsh(Y, subset_by_index=[0, 0], check_finite=False)[0])
    from scipy.sparse.linalg import eigsh

    return float(eigsh(Y, k=1, which="SA", return_eigenvectors=False, tol=1e-10)[0])


def certify(Y: np.ndarray | PrimalSolution, model: SdpModel, tol: float = 1e-6) -> Certificate:
    """Recheck psd-ness, equalities and the cut pool directly on ``Y``."""
    if isinstance(Y, PrimalSolution):
        Y = Y.Y
    Y = np.asarray(Y, dtype=float)
    if Y.shape != (model.dim, model.dim):
        raise ValueError(f"expected a matrix of order {model.dim}, got {Y.shape}")
    return Certificate(
        min_eigenvalue=min_eigenvalue(Y),
        equality_violation=model.equality_residual(Y) + float(np.abs(Y - Y.T).max(initial=0.0)),
        cut_violation=max(0.0, model.cut_violation(Y)),
        objective=model.objective_value(Y),
        tol=tol,
    )


def theta(g, problem: Problem | str = Problem.STABLE, cfg: SolverConfig | None = None) -> float:
    """Lovasz theta of ``g`` (stable) or of its complement (coloring)."""
    from .model import build_model

    sol = solve(build_model(g, problem), cfg)
    if not sol.usable:
        raise RuntimeError(f"theta solve failed: {sol.status.value}")
    return sol.objective
