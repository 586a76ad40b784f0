"""Body families, normalization, polar generators and containment factors.

A family is a list of convex bodies in one of two modes. ``symmetric`` bodies
are intersections of centered slabs |<x, w>| <= 1, stored by their vectors w.
``general`` bodies are intersections of halfspaces <a, x> <= c. Most of the
pipeline works on normalized general families where every offset is 1, i.e.
the origin is strictly inside every body.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInterior, NotInterior, UnboundedBody
from .lp import LinearProgram, OPTIMAL, UNBOUNDED, solve_lp, support_h_polytope

SYMMETRIC = "symmetric"
GENERAL = "general"
INTERIOR_MARGIN = 1e-7


@dataclass(frozen=True)
class SlabBody:
    """Intersection of slabs |<x, w_k>| <= 1 for the rows w_k of vectors."""

    index: int
    vectors: np.ndarray
    body_id: str = ""

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        v = np.atleast_2d(v)
        if not np.all(np.isfinite(v)):
            raise ValueError("slab vectors must be finite")
        if np.any(np.linalg.norm(v, axis=1) == 0.0):
            raise ValueError("slab vector must be nonzero")
        object.__setattr__(self, "vectors", v)

    def constraint_rows(self):
        return np.vstack([self.vectors, -self.vectors]), np.ones(
            2 * self.vectors.shape[0])


@dataclass(frozen=True)
class HalfspaceBody:
    """Intersection of halfspaces <a_k, x> <= c_k."""

    index: int
    normals: np.ndarray
    offsets: np.ndarray
    body_id: str = ""

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        c = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        if a.shape[0] != c.shape[0]:
            raise ValueError("normals and offsets disagree in length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(c))):
            raise ValueError("halfspace data must be finite")
        if np.any(np.linalg.norm(a, axis=1) == 0.0):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", c)

    def constraint_rows(self):
        return self.normals, self.offsets


@dataclass
class BodyFamily:
    mode: str
    dim: int
    bodies: list = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in (SYMMETRIC, GENERAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for body in self.bodies:
            rows, _ = body.constraint_rows()
            if rows.shape[1] != self.dim:
                raise ValueError("body dimension mismatch")

    def __len__(self):
        return len(self.bodies)

    def constraint_matrix(self, selected=None):
        """Stacked (G, h, owner) rows for the selected bodies (default all)."""
        idx = range(len(self.bodies)) if selected is None else selected
        gs, hs, owners = [], [], []
        for i in idx:
            g, h = self.bodies[i].constraint_rows()
            gs.append(g)
            hs.append(h)
            owners.extend([i] * g.shape[0])
        if not gs:
            raise ValueError("no bodies selected")
        return np.vstack(gs), np.concatenate(hs), np.array(owners)

    def ids(self):
        return [b.body_id or str(b.index) for b in self.bodies]


@dataclass(frozen=True)
class TaggedPointSet:
    """Points with the index of the body each one came from."""

    points: np.ndarray
    tags: np.ndarray

    def __len__(self):
        return self.points.shape[0]


def interior_margin(family: BodyFamily, z) -> float:
    """Smallest Euclidean distance from z to a constraint hyperplane side."""
    z = np.asarray(z, dtype=float)
    G, h, _ = family.constraint_matrix()
    norms = np.linalg.norm(G, axis=1)
    return float(np.min((h - G @ z) / norms))


def chebyshev_center(family: BodyFamily):
    """Deepest point of the intersection: one LP over (x, r)."""
    G, h, _ = family.constraint_matrix()
    n = family.dim
    norms = np.linalg.norm(G, axis=1)
    # variables (x, r), maximize r subject to <a,x> + ||a|| r <= c and r >= 0
    Ga = np.hstack([G, norms[:, None]])
    Ga = np.vstack([Ga, np.concatenate([np.zeros(n), [-1.0]])])
    ha = np.concatenate([h, [0.0]])
    objective = np.concatenate([np.zeros(n), [1.0]])
    res = solve_lp(LinearProgram(objective=objective, G=Ga, h=ha))
    if res.status == UNBOUNDED:
        raise UnboundedBody("interior radius unbounded; family does not "
                            "bound a body")
    if res.status != OPTIMAL:
        raise DegenerateInterior("family intersection is empty")
    r = res.value
    if r <= 1e-9:
        raise DegenerateInterior(f"inradius {r:.3e} below tolerance")
    return res.x[:n], float(r)


def validate_family(family: BodyFamily, margin: float = INTERIOR_MARGIN):
    """Reject families whose intersection has (numerically) no interior."""
    if family.mode == SYMMETRIC:
        m = interior_margin(family, np.zeros(family.dim))
        if m < margin:
            raise DegenerateInterior(
                f"margin {m:.3e} at the origin is below {margin:.1e}")
        return np.zeros(family.dim), m
    z, r = chebyshev_center(family)
    if r < margin:
        raise DegenerateInterior(f"inradius {r:.3e} is below {margin:.1e}")
    return z, r


def normalize_family(family: BodyFamily, z) -> BodyFamily:
    """Translate the origin to z and rescale all offsets to 1.

    Symmetric families are already in normalized form; for them z must be the
    origin and the family is returned unchanged (after validation).
    """
    z = np.asarray(z, dtype=float)
    if family.mode == SYMMETRIC:
        if np.linalg.norm(z) > 1e-12:
            raise ValueError("symmetric families are normalized about 0 only")
        validate_family(family)
        return family
    bodies = []
    for body in family.bodies:
        slack = body.offsets - body.normals @ z
        margins = slack / np.linalg.norm(body.normals, axis=1)
        if np.min(margins) < INTERIOR_MARGIN:
            raise NotInterior(
                f"translate point has margin {np.min(margins):.3e} "
                f"inside body {body.index}")
        bodies.append(HalfspaceBody(index=body.index,
                                    normals=body.normals / slack[:, None],
                                    offsets=np.ones(len(slack)),
                                    body_id=body.body_id))
    return BodyFamily(mode=GENERAL, dim=family.dim, bodies=bodies)


def _require_normalized(family: BodyFamily):
    if family.mode == GENERAL:
        for body in family.bodies:
            if np.max(np.abs(body.offsets - 1.0)) > 1e-9:
                raise ValueError("family must be normalized (offsets 1); "
                                 "call normalize_family first")


def polar_generators(family: BodyFamily) -> TaggedPointSet:
    """Generator points of the polar of the intersection.

    For a normalized family, the polar of the intersection is the convex hull
    of the union of the bodies' polars, and each body's polar is generated by
    its constraint vectors (both signs for slabs).
    """
    _require_normalized(family)
    pts, tags = [], []
    for body in family.bodies:
        rows, _ = body.constraint_rows()
        pts.append(rows)
        tags.extend([body.index] * rows.shape[0])
    return TaggedPointSet(points=np.vstack(pts), tags=np.array(tags))


def containment_factor(family: BodyFamily, selected) -> float:
    """Smallest alpha with (intersection of selected) <= alpha * (full).

    Measured by LP support queries of the selected intersection in every
    constraint direction of the full family; may be +inf when dropping
    bodies leaves the selected intersection unbounded.
    """
    _require_normalized(family)
    selected = sorted(set(int(i) for i in selected))
    if not selected:
        raise ValueError("selected body list is empty")
    if any(i < 0 or i >= len(family.bodies) for i in selected):
        raise ValueError("selected index out of range")
    Gq, hq, _ = family.constraint_matrix(selected)
    Gall, _, _ = family.constraint_matrix()
    alpha = 1.0  # support of a tight constraint is exactly 1 in exact math
    for u in Gall:
        val = support_h_polytope(Gq, hq, u)
        if math.isinf(val):
            return math.inf
        alpha = max(alpha, val)
    return alpha


def minkowski_functional_v(points, x, cap: float = 1e9) -> float:
    """Gauge of conv(points) at x: least t >= 0 with x in t * conv(points).

    Solved as min sum(nu) subject to points^T nu = x, nu >= 0; raises Outside
    when x is not in the cone of the points or needs t beyond the cap.
    """
    from .errors import Outside

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float)
    m = pts.shape[0]
    lp = LinearProgram(objective=-np.ones(m), A_eq=pts.T, b_eq=x, nonneg=True)
    res = solve_lp(lp)
    if res.status != OPTIMAL:
        raise Outside("point is not in the conic hull of the generators")
    t = -res.value
    if t > cap:
        raise Outside(f"gauge value {t:.3e} beyond cap {cap:.1e}")
    return max(t, 0.0)
