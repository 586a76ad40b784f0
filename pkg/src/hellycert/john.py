"""Minimum-volume enclosing ellipsoids and John decompositions.

The MVEE solver is the classic Khachiyan coordinate ascent on the log-det
dual, accelerated with away/drop steps so that complementary slackness also
converges (plain ascent only controls the containment side). Dual weights of
the solved problem directly supply John decomposition weights after mapping
to Loewner position, which is why no separate extraction problem is solved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import DegenerateSpan, JohnExtractionFailed
from .geometry import TaggedPointSet
from .linalg import SymMatrix, sym_eigen

EPS_MVEE_DEFAULT = 1e-8
TOL_JOHN_DEFAULT = 1e-5


@dataclass(frozen=True)
class Ellipsoid:
    """{x : (x - center)^T shape (x - center) <= 1}"""

    center: np.ndarray
    shape: SymMatrix


@dataclass(frozen=True)
class LownerMap:
    """Affine map y = forward @ (x - center) sending the MVEE to the unit ball."""

    forward: np.ndarray
    center: np.ndarray

    def apply(self, pts):
        return (np.atleast_2d(pts) - self.center) @ self.forward


@dataclass(frozen=True)
class JohnDecomposition:
    """Unit contact vectors v_j and weights a_j with sum a_j v_j v_j^T = I."""

    vectors: np.ndarray
    weights: np.ndarray
    centered: bool
    residual_identity: float
    residual_barycenter: float
    source_indices: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _centered_mvee_weights(pts, eps, max_iter=500_000, refresh_every=512):
    """Dual weights of the centered MVEE of the rows of pts.

    Runs Khachiyan ascent with away/drop steps until the two-sided gap
    max kappa/n - 1 <= eps and 1 - min-support kappa/n <= eps holds, where
    kappa_k = x_k^T X(u)^{-1} x_k. Sign of the points is irrelevant.
    """
    pts = np.asarray(pts, dtype=float)
    m, n = pts.shape
    if m < n:
        raise DegenerateSpan(f"{m} points cannot span dimension {n}")
    u = np.full(m, 1.0 / m)

    def moments(u):
        X = pts.T @ (pts * u[:, None])
        return (X + X.T) / 2.0

    X = moments(u)
    spec = sym_eigen(X)
    if spec.eigenvalues[0] <= 1e-12 * max(spec.eigenvalues[-1], 1e-300):
        raise DegenerateSpan("input points do not span the space")
    Xinv = np.linalg.inv(X)
    kappa = np.einsum("ij,ij->i", pts @ Xinv, pts)

    since_refresh = 0
    for _ in range(max_iter):
        jp = int(np.argmax(kappa))
        kp = kappa[jp]
        masked = np.where(u > 0.0, kappa, np.inf)
        jm = int(np.argmin(masked))
        km = masked[jm]
        gap_plus = kp / n - 1.0
        gap_minus = 1.0 - km / n

        if gap_plus <= eps and gap_minus <= eps:
            # recheck on fresh numbers before declaring convergence
            X = moments(u)
            Xinv = np.linalg.inv(X)
            kappa = np.einsum("ij,ij->i", pts @ Xinv, pts)
            kp = float(np.max(kappa))
            km = float(np.min(np.where(u > 0.0, kappa, np.inf)))
            if kp / n - 1.0 <= eps and 1.0 - km / n <= eps:
                return u
            since_refresh = 0
            continue

        if gap_plus >= gap_minus:
            j, k = jp, kp
            lam = (k - n) / (n * (k - 1.0))
            y = Xinv @ pts[j]
            z = pts @ y
            denom = 1.0 + lam * k / (1.0 - lam)
            beta = lam / ((1.0 - lam) ** 2 * denom)
            Xinv = Xinv / (1.0 - lam) - beta * np.outer(y, y)
            kappa = kappa / (1.0 - lam) - beta * z * z
            u *= 1.0 - lam
            u[j] += lam
        else:
            j, k = jm, km
            cap = u[j] / (1.0 - u[j]) if u[j] < 1.0 else np.inf
            if k > 1.0:
                lam = min((n - k) / (n * (k - 1.0)), 0.99 / (k - 1.0), cap)
            else:
                lam = cap
            dropped = lam >= cap
            y = Xinv @ pts[j]
            z = pts @ y
            denom = 1.0 - lam * k / (1.0 + lam)
            beta = lam / ((1.0 + lam) ** 2 * denom)
            Xinv = Xinv / (1.0 + lam) + beta * np.outer(y, y)
            kappa = kappa / (1.0 + lam) + beta * z * z
            u *= 1.0 + lam
            u[j] = 0.0 if dropped else max(u[j] - lam, 0.0)

        since_refresh += 1
        if since_refresh >= refresh_every or not np.isfinite(kappa[j]):
            u = np.maximum(u, 0.0)
            u /= u.sum()
            X = moments(u)
            Xinv = np.linalg.inv(X)
            kappa = np.einsum("ij,ij->i", pts @ Xinv, pts)
            since_refresh = 0

    raise JohnExtractionFailed(
        f"MVEE ascent did not reach gap {eps:.1e} in {max_iter} iterations")


def mvee_centered(points, eps_mvee: float = EPS_MVEE_DEFAULT):
    """Centered MVEE of a symmetric point set (signs of points ignored)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[1]
    u = _centered_mvee_weights(pts, eps_mvee)
    X = pts.T @ (pts * u[:, None])
    M = np.linalg.inv((X + X.T) / 2.0) / n
    return Ellipsoid(center=np.zeros(n), shape=SymMatrix(M)), u


def mvee_general(points, eps_mvee: float = EPS_MVEE_DEFAULT):
    """MVEE with free center, via the standard lift to dimension n+1."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = pts.shape
    lifted = np.hstack([pts, np.ones((m, 1))])
    u = _centered_mvee_weights(lifted, eps_mvee * n / (n + 1.0))
    c = pts.T @ u
    Sn = pts.T @ (pts * u[:, None])
    cov = Sn - np.outer(c, c)
    M = np.linalg.inv((cov + cov.T) / 2.0) / n
    return Ellipsoid(center=c, shape=SymMatrix(M)), u


def _sqrt_spd(M: np.ndarray) -> np.ndarray:
    spec = sym_eigen(M)
    if spec.eigenvalues[0] <= 0.0:
        raise DegenerateSpan("ellipsoid shape matrix is not positive definite")
    return (spec.eigenvectors * np.sqrt(spec.eigenvalues)) @ spec.eigenvectors.T


def john_decomposition(point_set: TaggedPointSet, centered: bool,
                       eps_mvee: float = EPS_MVEE_DEFAULT,
                       tol_john: float = TOL_JOHN_DEFAULT,
                       weight_floor: float | None = None):
    """John decomposition of the convex hull of a tagged point set.

    Solves the MVEE of the points, maps them to Loewner position and turns
    the positive dual weights into decomposition weights. With ``centered``
    the MVEE center is free, the barycenter identity sum a_j v_j = 0 is part
    of the contract and a nonnegative least-squares polish is applied.
    Returns (JohnDecomposition, LownerMap).
    """
    pts = point_set.points
    m, n = pts.shape
    if weight_floor is None:
        weight_floor = 1e-9 / m

    if centered:
        ell, u = mvee_general(pts, eps_mvee)
    else:
        ell, u = mvee_centered(pts, eps_mvee)
    T = _sqrt_spd(ell.shape.entries)
    Y = (pts - ell.center) @ T

    keep = np.nonzero(u > weight_floor)[0]
    norms = np.linalg.norm(Y[keep], axis=1)
    v = Y[keep] / norms[:, None]
    a = n * u[keep] * norms ** 2

    if centered:
        # polish: min ||sum a v v^T - I||_F^2 + ||sum a v||^2 over a >= 0
        cols = np.empty((n * n + n, keep.size))
        for idx in range(keep.size):
            cols[:n * n, idx] = np.outer(v[idx], v[idx]).ravel()
            cols[n * n:, idx] = v[idx]
        target = np.concatenate([np.eye(n).ravel(), np.zeros(n)])
        a_fit, _ = nnls(cols, target)
        pos = a_fit > 0.0
        keep = keep[pos]
        v = v[pos]
        a = a_fit[pos]
    else:
        a *= n / a.sum()

    op = (v * a[:, None]).T @ v
    residual_identity = float(np.linalg.norm(op - np.eye(n)))
    residual_barycenter = float(np.linalg.norm(a @ v))

    if residual_identity > tol_john:
        raise JohnExtractionFailed(
            f"identity residual {residual_identity:.3e} above {tol_john:.1e}")
    if centered and residual_barycenter > tol_john:
        raise JohnExtractionFailed(
            f"barycenter residual {residual_barycenter:.3e} "
            f"above {tol_john:.1e}")

    decomp = JohnDecomposition(
        vectors=v, weights=a, centered=centered,
        residual_identity=residual_identity,
        residual_barycenter=residual_barycenter,
        source_indices=keep)
    return decomp, LownerMap(forward=T, center=ell.center)
