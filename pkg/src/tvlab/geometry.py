"""Complex/real vector geometry: embeddings, projections onto complex lines,
closest-point computations on projected polygons, and recovery of a complex
hyperplane from a unit sphere point.

Conventions
-----------
* The Hermitian inner product is linear in the first slot and conjugate-linear
  in the second: ``hermitian_inner(u, v) = sum(u_i * conj(v_i))``.
* A complex vector in C^d is identified with a real vector in R^{2d} by
  interleaving real and imaginary parts; convexity always means real
  convexity of that underlying real set, and convex combinations always use
  real coefficients.
* Convex sets are represented as vertex-generated polytopes only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_NORM_TOL = 1e-12
POLE_GUARD = 1e-9


class PoleError(ValueError):
    """Raised when a sphere point is too close to the excluded last axis to
    recover a hyperplane from it."""


def as_real_point(coords) -> np.ndarray:
    """Validate and return a point of R^d as a float array."""
    p = np.asarray(coords, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("a point must be a nonempty 1-D coordinate vector")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def as_complex_point(coords) -> np.ndarray:
    """Validate and return a point of C^d as a complex array."""
    p = np.asarray(coords, dtype=complex)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("a point must be a nonempty 1-D coordinate vector")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def complex_to_real(z: np.ndarray) -> np.ndarray:
    """View C^d as R^{2d}: (z_1, ..., z_d) -> (Re z_1, Im z_1, ..., Re z_d, Im z_d)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.shape[-1], dtype=float)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def real_to_complex(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complex_to_real`."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise ValueError("real view of a complex vector has even length")
    return x[0::2] + 1j * x[1::2]


def hermitian_inner(u, v) -> complex:
    """Inner product sum(u_i * conj(v_i)); conjugate-symmetric.

    Raises ValueError on dimension mismatch.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(v, u))  # np.vdot conjugates its first argument


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull (under real coefficients) of a finite vertex list.

    ambient is "real" or "complex"; vertices is an (n, d) array, float for
    real ambient and complex for complex ambient.
    """

    ambient: str
    vertices: np.ndarray

    def __post_init__(self):
        if self.ambient not in ("real", "complex"):
            raise ValueError(f"unknown ambient {self.ambient!r}")
        dtype = float if self.ambient == "real" else complex
        v = np.asarray(self.vertices, dtype=dtype)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("vertices must form a nonempty (n, d) array with d >= 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def real_view(self) -> np.ndarray:
        """Vertices as rows of R^{2d} (complex ambient) or R^d (real ambient)."""
        if self.ambient == "real":
            return np.asarray(self.vertices, dtype=float)
        v = self.vertices
        out = np.empty((v.shape[0], 2 * v.shape[1]), dtype=float)
        out[:, 0::2] = v.real
        out[:, 1::2] = v.imag
        return out


@dataclass(frozen=True, eq=False)
class Family:
    """Ordered, labeled list of polytopes sharing ambient and dimension."""

    labels: tuple
    sets: tuple

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        sets = tuple(self.sets)
        if len(labels) != len(sets):
            raise ValueError("labels and sets must have equal length")
        if len(set(labels)) != len(labels):
            raise ValueError("family labels must be unique")
        if sets:
            amb, dim = sets[0].ambient, sets[0].dim
            for p in sets:
                if p.ambient != amb or p.dim != dim:
                    raise ValueError("family members must share ambient and dimension")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sets", sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(zip(self.labels, self.sets))

    def __getitem__(self, label: str) -> Polytope:
        try:
            return self.sets[self.labels.index(label)]
        except ValueError:
            raise KeyError(label) from None

    @property
    def ambient(self) -> str:
        return self.sets[0].ambient

    @property
    def dim(self) -> int:
        return self.sets[0].dim

    def subfamily(self, labels) -> "Family":
        labels = tuple(labels)
        return Family(labels, tuple(self[l] for l in labels))


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Unit vector of C^{d+1} under the Hermitian norm."""

    coords: np.ndarray

    def __post_init__(self):
        x = as_complex_point(self.coords)
        nrm = float(np.linalg.norm(x))
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"sphere point must have unit norm, got {nrm!r}")
        object.__setattr__(self, "coords", x)

    @staticmethod
    def normalized(coords) -> "SpherePoint":
        x = as_complex_point(coords)
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return SpherePoint(x / nrm)

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.coords)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class ComplexHyperplane:
    """The set {z in C^d : <z, normal> = offset} with a unit normal."""

    normal: np.ndarray
    offset: complex

    def __post_init__(self):
        a = as_complex_point(self.normal)
        nrm = float(np.linalg.norm(a))
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"hyperplane normal must have unit norm, got {nrm!r}")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", complex(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def residual(self, z) -> float:
        """|<z, normal> - offset| for a point z of C^d."""
        return abs(hermitian_inner(as_complex_point(z), self.normal) - self.offset)


@dataclass(frozen=True, eq=False)
class ProjectedPolygon:
    """Projection of a polytope onto the complex line spanned by a unit vector.

    vertices are the complex coefficients c_v = <v, x>; the projected set is
    the convex hull of {c_v * x}, i.e. of the coefficients as points of R^2.
    """

    direction: np.ndarray
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "direction", as_complex_point(self.direction))
        object.__setattr__(self, "vertices", tuple(complex(c) for c in self.vertices))
        if not self.vertices:
            raise ValueError("projected polygon needs at least one vertex")


def embed_h(z) -> np.ndarray:
    """Append a final coordinate 1, mapping C^d into the affine slice
    {z in C^{d+1} : z_{d+1} = 1}."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z, [1.0 + 0.0j]])


def embed_polytope(poly: Polytope) -> Polytope:
    """Embed every vertex of a complex polytope via :func:`embed_h`."""
    if poly.ambient != "complex":
        raise ValueError("only complex polytopes embed into the affine slice")
    v = poly.vertices
    ones = np.ones((v.shape[0], 1), dtype=complex)
    return Polytope("complex", np.hstack([v, ones]))


def embed_family(family: Family) -> Family:
    return Family(family.labels, tuple(embed_polytope(p) for p in family.sets))


def project_polytope(x: SpherePoint, poly: Polytope) -> ProjectedPolygon:
    """Orthogonal projection of a polytope onto the complex line spanned by x,
    reported as the coefficient polygon."""
    v = np.asarray(poly.vertices, dtype=complex)
    if v.shape[1] != x.dim:
        raise ValueError(f"dimension mismatch: vertices in C^{v.shape[1]}, x in C^{x.dim}")
    coeffs = v @ np.conj(x.coords)
    return ProjectedPolygon(x.coords, tuple(coeffs.tolist()))


# -- closest point of a 2-D convex hull to the origin ------------------------
#
# The hull of the handful of projected coefficients is computed exactly
# (monotone chain) and the minimizer is found by direct enumeration of hull
# edges; no iterative optimization, so the projection variational inequality
# holds to tight tolerance.


def _hull2d(pts):
    """Andrew monotone chain; returns hull in CCW order without repetition.

    Collinear inputs yield the two extreme points; coincident inputs one.
    """
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts
    def half(points):
        chain = []
        for p in points:
            while len(chain) >= 2:
                ox, oy = chain[-2]
                ax, ay = chain[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain
    lower = half(pts)
    upper = half(pts[::-1])
    return lower[:-1] + upper[:-1]


def _closest_on_segment(ax, ay, bx, by):
    """Closest point to the origin on the segment [a, b], as an (x, y) pair."""
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return ax, ay
    t = -(ax * dx + ay * dy) / dd
    if t <= 0.0:
        return ax, ay
    if t >= 1.0:
        return bx, by
    return ax + t * dx, ay + t * dy


def closest_coeff(polygon: ProjectedPolygon) -> complex:
    """The unique coefficient c in the polygon (a convex region of R^2)
    minimizing |c|: 0 when the origin lies in the hull, otherwise the
    minimizer over hull edges and vertices."""
    pts = [(c.real, c.imag) for c in polygon.vertices]
    return complex(*_closest_to_origin(pts))


def _closest_to_origin(pts):
    """Core of :func:`closest_coeff` on raw (x, y) pairs."""
    hull = _hull2d(pts)
    if len(hull) == 1:
        return hull[0]
    if len(hull) == 2:
        (ax, ay), (bx, by) = hull
        return _closest_on_segment(ax, ay, bx, by)
    # origin-inside test: CCW hull, origin weakly left of every edge
    inside = True
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        if (bx - ax) * (-ay) - (by - ay) * (-ax) < 0.0:
            inside = False
            break
    if inside:
        return (0.0, 0.0)
    best = None
    best_d = None
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        qx, qy = _closest_on_segment(ax, ay, bx, by)
        d = qx * qx + qy * qy
        if best_d is None or d < best_d:
            best_d = d
            best = (qx, qy)
    return best


def hyperplane_from_sphere_point(x0: SpherePoint) -> ComplexHyperplane:
    """The affine hyperplane in C^d carved out of the slice {z_{d+1} = 1} by
    the orthogonal complement of x0.

    Returns {z : <z, a> = b} with a = head/|head| and b = -conj(x0_{d+1})/|head|
    where head is the first d coordinates of x0.  Raises PoleError when
    |head| < 1e-9: recovery near the excluded last axis is refused rather than
    amplified numerically.
    """
    x = x0.coords
    head = x[:-1]
    head_norm = float(np.linalg.norm(head))
    if head_norm < POLE_GUARD:
        raise PoleError(
            f"sphere point within {POLE_GUARD:g} of the last axis has no hyperplane"
        )
    normal = head / head_norm
    offset = -np.conj(x[-1]) / head_norm
    return ComplexHyperplane(normal, complex(offset))
