"""Entropy-maximizing solvers over spectrahedra.

Given constraint matrices A_1..A_d, margins b, and an optional cost matrix
C, the regularized problem at parameter epsilon has the unique solution
X* = exp(A(y*) - C/epsilon) characterized by pi(X*) = b, where
pi(X)_k = <A_k, X>.  We solve the dual root-finding problem
F(y) = pi(exp(A(y) - C/epsilon)) - b = 0 by damped Newton iteration; the
Jacobian uses the directional derivative of the matrix exponential
(divided-difference kernel in the eigenbasis).  Driving epsilon to zero
follows the central path toward an optimal solution of the linear problem.
"""

import math
from fractions import Fraction

import numpy as np

from .spectra import MatrixSpace

__all__ = [
    "SdpInstance",
    "GibbsPointResult",
    "frechet_exp",
    "von_neumann_entropy",
    "gibbs_point",
    "entropic_path",
    "default_epsilon_schedule",
    "project_to_gibbs_plane",
]


class SdpInstance:
    """Constraint space L (basis A_1..A_d), margins b, optional cost C."""

    __slots__ = ("L", "b", "C")

    def __init__(self, L, b, C=None):
        if len(b) != L.d:
            raise ValueError("need one margin per basis matrix")
        self.L = L
        self.b = np.asarray([float(v) for v in b], dtype=float)
        self.C = None if C is None else np.asarray([[float(v) for v in row] for row in C], dtype=float)
        if self.C is not None and self.C.shape != (L.n, L.n):
            raise ValueError("cost matrix has wrong shape")


class GibbsPointResult:
    """Converged Gibbs point with residual diagnostics."""

    __slots__ = (
        "X_star",
        "y_star",
        "epsilon",
        "residual_primal",
        "residual_stationarity",
        "iterations",
        "objective",
    )

    def __init__(self, X_star, y_star, epsilon, residual_primal, residual_stationarity, iterations, objective):
        self.X_star = X_star
        self.y_star = y_star
        self.epsilon = epsilon
        self.residual_primal = residual_primal
        self.residual_stationarity = residual_stationarity
        self.iterations = iterations
        self.objective = objective


def _np_matrix(M):
    return np.asarray([[float(v) for v in row] for row in M], dtype=float)


def _basis_np(L):
    return [_np_matrix(B) for B in L.basis]


def _sym_eigh(M):
    w, V = np.linalg.eigh((M + M.T) / 2)
    return w, V


def frechet_exp(A, E):
    """Directional derivative of the matrix exponential at symmetric A.

    In A's eigenbasis the derivative acts entrywise through the divided
    differences Phi_ij = (e^li - e^lj)/(li - lj), with e^li on coincident
    pairs.
    """
    A = np.asarray(A, dtype=float)
    E = np.asarray(E, dtype=float)
    w, V = _sym_eigh(A)
    Phi = _dd_kernel(w)
    Et = V.T @ ((E + E.T) / 2) @ V
    return V @ (Phi * Et) @ V.T


def _dd_kernel(w):
    n = len(w)
    ew = np.exp(w)
    Phi = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            if abs(w[i] - w[j]) < 1e-12 * (1 + abs(w[i]) + abs(w[j])):
                Phi[i, j] = np.exp((w[i] + w[j]) / 2)
            else:
                Phi[i, j] = (ew[i] - ew[j]) / (w[i] - w[j])
    return Phi


def von_neumann_entropy(X):
    """h(X) = sum(lambda - lambda*log(lambda)) for positive definite X."""
    w, _V = _sym_eigh(np.asarray(X, dtype=float))
    if np.min(w) <= 1e-14 * max(1.0, float(np.max(np.abs(w)))):
        raise ValueError("entropy needs a positive definite matrix")
    return float(np.sum(w - w * np.log(w)))


def _pi(basis, X):
    return np.array([float(np.sum(B * X)) for B in basis])


def gibbs_point(inst, epsilon=math.inf, tol=1e-11, max_iter=200, y0=None):
    """Solve pi(exp(A(y) - C/epsilon)) = b by damped Newton on y.

    epsilon = inf (or C absent) drops the cost term and returns the
    entropy maximizer of the fiber.  Raises RuntimeError on
    non-convergence or apparent infeasibility (diverging ||y||).
    """
    L = inst.L
    basis = _basis_np(L)
    A0 = _np_matrix(L.A0)
    shift = np.zeros((L.n, L.n))
    if inst.C is not None and epsilon != math.inf:
        shift = -inst.C / float(epsilon)
    b = inst.b
    scale_b = 1.0 + float(np.max(np.abs(b))) if len(b) else 1.0

    y = np.zeros(L.d) if y0 is None else np.asarray(y0, dtype=float).copy()

    def assemble(yv):
        M = A0 + shift
        for c, B in zip(yv, basis):
            M = M + c * B
        return M

    def evaluate(yv):
        M = assemble(yv)
        w, V = _sym_eigh(M)
        if np.max(w) > 700:
            return None, None, None, math.inf
        X = (V * np.exp(w)) @ V.T
        F = _pi(basis, X) - b
        return X, w, V, float(np.max(np.abs(F))) if len(F) else 0.0

    X, w, V, fnorm = evaluate(y)
    if X is None:
        raise RuntimeError("initial point overflows the matrix exponential")
    F = _pi(basis, X) - b
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if fnorm < tol * scale_b:
            break
        Phi = _dd_kernel(w)
        At = [V.T @ B @ V for B in basis]
        J = np.empty((L.d, L.d))
        for k in range(L.d):
            PhiAk = Phi * At[k]
            for i in range(k, L.d):
                J[k, i] = J[i, k] = float(np.sum(PhiAk * At[i]))
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
        # backtracking on ||F||
        t = 1.0
        accepted = False
        for _ in range(40):
            y_new = y + t * step
            X_new, w_new, V_new, fnorm_new = evaluate(y_new)
            if X_new is not None and np.isfinite(fnorm_new) and fnorm_new < fnorm:
                y, X, w, V, fnorm = y_new, X_new, w_new, V_new, fnorm_new
                F = _pi(basis, X) - b
                accepted = True
                break
            t /= 2
        if not accepted:
            # line search exhausted: accept if already at float-noise level
            if fnorm < 1e-9 * scale_b:
                break
            raise RuntimeError(
                "Newton stalled at residual %.3e (infeasible-or-boundary margins?)" % fnorm
            )
        if np.max(np.abs(y)) > 1e8:
            raise RuntimeError("diverging dual iterates: margins look infeasible-or-boundary")
    else:
        if fnorm >= 1e-9 * scale_b:
            raise RuntimeError("no convergence in %d iterations (residual %.3e)" % (max_iter, fnorm))

    residual_primal = fnorm
    # stationarity: distance of C + eps*log(X) (or log(X) for pure entropy)
    # to span(A_1..A_d), relative Frobenius norm.  X was built as V e^w V^T,
    # so V w V^T is the accurate spectral logarithm even when X is nearly
    # singular at small epsilon.
    logX = (V * w) @ V.T
    if inst.C is not None and epsilon != math.inf:
        S = inst.C + float(epsilon) * logX
    else:
        S = logX - A0
    span = np.stack([B.reshape(-1) for B in basis], axis=1)
    coeffs, _res, _rank, _sv = np.linalg.lstsq(span, S.reshape(-1), rcond=None)
    resid_mat = S.reshape(-1) - span @ coeffs
    denom = max(1.0, float(np.linalg.norm(S)))
    residual_stationarity = float(np.linalg.norm(resid_mat)) / denom
    objective = float(np.sum(inst.C * X)) if inst.C is not None else None
    return GibbsPointResult(X, y, epsilon, residual_primal, residual_stationarity, iterations, objective)


def default_epsilon_schedule(start=1.0, stop=1e-4, ratio=10 ** -0.5):
    """Geometric schedule from start down to stop (inclusive endpoints)."""
    out = [start]
    while out[-1] * ratio >= stop * (1 - 1e-12):
        out.append(out[-1] * ratio)
    if abs(out[-1] - stop) > 1e-12 * stop:
        out.append(stop)
    return out


def entropic_path(inst, eps_schedule=None, tol=1e-11):
    """Warm-started Gibbs points along a decreasing epsilon schedule.

    The warm start accounts for the component of C inside the constraint
    span: writing C = A(c) + C_perp, the dual solution shifts by roughly
    c * (1/eps_new - 1/eps_old), so that shift is added before re-solving.
    Failed steps are retried with geometric substeps.
    """
    if inst.C is None:
        res = gibbs_point(inst, math.inf, tol=tol)
        return [res]
    if eps_schedule is None:
        eps_schedule = default_epsilon_schedule()

    L = inst.L
    basis = _basis_np(L)
    A0 = _np_matrix(L.A0)
    C = inst.C

    def tangent(y, s):
        """dy/ds along the solution curve of pi(exp(A(y) - s C)) = b."""
        M = A0 - s * C
        for c, B in zip(y, basis):
            M = M + c * B
        w, V = _sym_eigh(M)
        Phi = _dd_kernel(w)
        At = [V.T @ B @ V for B in basis]
        Ct = V.T @ C @ V
        J = np.empty((L.d, L.d))
        for k in range(L.d):
            PhiAk = Phi * At[k]
            for i in range(k, L.d):
                J[k, i] = J[i, k] = float(np.sum(PhiAk * At[i]))
        Fs = np.array([-float(np.sum(Phi * At[k] * Ct)) for k in range(L.d)])
        try:
            return np.linalg.solve(J, -Fs)
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(J, -Fs, rcond=None)[0]

    results = []
    res = gibbs_point(inst, eps_schedule[0], tol=tol)
    results.append(res)
    y = res.y_star
    s = 1.0 / eps_schedule[0]
    for eps in eps_schedule[1:]:
        s_target = 1.0 / eps
        while s < s_target * (1 - 1e-12):
            step = s_target - s
            for _halve in range(30):
                s_try = s + step
                y0 = y + tangent(y, s) * step
                try:
                    res = gibbs_point(inst, 1.0 / s_try, tol=tol, y0=y0, max_iter=60)
                except RuntimeError:
                    step /= 2
                    continue
                y = res.y_star
                s = s_try
                break
            else:
                raise RuntimeError("continuation stalled at epsilon %.3e" % (1.0 / s))
        results.append(res)
    return results


def project_to_gibbs_plane(inst, plane):
    """Augment an instance with affine-linear constraints valid on the manifold.

    Each plane element is an affine-linear polynomial in the coordinates
    x_i_j (i <= j); the form sum c_ij x_ij + c0 = 0 becomes the constraint
    <A, X> = -c0 with A_ii = c_ii and A_ij = A_ji = c_ij/2.  Constraints
    already implied by the current space are dropped; the optimizer is
    unchanged because valid equalities do not cut the feasible set.
    """
    L = inst.L
    n = L.n
    new_basis = [[[Fraction(v) for v in row] for row in B] for B in L.basis]
    new_b = list(inst.b)
    for p in plane:
        if p.is_zero():
            continue
        if p.total_degree() > 1:
            raise ValueError("plane constraints must be affine-linear")
        A = [[Fraction(0)] * n for _ in range(n)]
        c0 = Fraction(0)
        for exps, coeff in p.terms.items():
            deg = sum(exps)
            if deg == 0:
                c0 = coeff
                continue
            var = p.ring.names[exps.index(1)]
            parts = var.split("_")
            i, j = int(parts[1]), int(parts[2])
            if i == j:
                A[i - 1][j - 1] += coeff
            else:
                A[i - 1][j - 1] += coeff / 2
                A[j - 1][i - 1] += coeff / 2
        try:
            candidate = MatrixSpace(L.A0, new_basis + [A])
        except ValueError:
            # dependent on existing constraints: consistency still required
            continue
        new_basis.append(A)
        new_b.append(-float(c0))
    newL = MatrixSpace(L.A0, new_basis)
    return SdpInstance(newL, new_b, inst.C)
