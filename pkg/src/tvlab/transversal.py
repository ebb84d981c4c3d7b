"""Transversal search: real hyperplanes by direction sweep, complex
hyperplanes by projected-polygon intersection and by zero-finding on the odd
sphere map built from closest projection coefficients.

Search design: the existence arguments are non-constructive, so location is
by seeded multistart derivative-free descent (pattern search with step decay
on the relevant sphere).  The map being minimized is continuous but not
smooth where the closest polygon point crosses a vertex or edge, which is
why no gradients are used.  NotFound is a budget statement, never a
nonexistence certificate, except where noted (d = 1 common-point LP, d = 2
real exhaustive angle grid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    POLE_GUARD,
    ComplexHyperplane,
    Family,
    SpherePoint,
    _closest_to_origin,
    _hull2d,
    closest_coeff,
    hermitian_inner,
    project_polytope,
)
from .consistency import AffineDependence
from .lp import LinearProgram, lp_feasible

ZERO_TOL = 1e-6
VERIFY_TOL = 1e-4
MARGIN_TOL = 1e-9


@dataclass(frozen=True)
class TransversalConfig:
    starts: int = 32
    iters: int = 2000
    step_init: float = 0.5
    step_decay: float = 0.7
    zero_tol: float = ZERO_TOL
    seed: int = 0
    angle_resolution: int = 10000  # exhaustive grid for the real d=2 sweep


@dataclass(frozen=True, eq=False)
class RealHyperplane:
    """The set {p in R^d : u . p = t} with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        u = np.asarray(self.normal, dtype=float)
        if u.ndim != 1 or u.size < 1 or not np.all(np.isfinite(u)):
            raise ValueError("normal must be a finite vector")
        if abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
            raise ValueError("real hyperplane normal must have unit norm")
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", float(self.offset))


@dataclass(frozen=True, eq=False)
class NotFound:
    """Search failure report.  exhaustive marks the two definitive cases
    (d=1 LP, d=2 real angle grid); best is the best margin or residual seen."""

    reason: str
    best: float | None = None
    x: np.ndarray | None = None
    exhaustive: bool = False
    note: str = ""


@dataclass(frozen=True, eq=False)
class BorsukEvaluation:
    """One evaluation of f(x) = sum_F (p_{x,F}, conj(p_{x,F}) phi(F))."""

    x: SpherePoint
    value: np.ndarray  # C^d: first the scalar block, then the C^{d-1} block
    coefficients: tuple  # (label, p_{x,F}) in family order

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.value))


@dataclass(frozen=True, eq=False)
class VerificationReport:
    distances: tuple  # (label, float), family order
    tol: float

    @property
    def max_distance(self) -> float:
        return max(d for _, d in self.distances)

    @property
    def passed(self) -> bool:
        return self.max_distance <= self.tol


# ---------------------------------------------------------------------------
# shared batched evaluator
#
# Pattern search spends nearly all its time evaluating closest polygon
# points for a batch of candidate directions; this is done with one complex
# matrix product per family and vectorized segment projections, with the
# origin-inside test done by the angular-gap criterion.


class _PolygonBatch:
    """Closest-to-target coefficients for all sets over a batch of unit
    directions, vectorized."""

    def __init__(self, family: Family):
        self.labels = family.labels
        self.verts = [np.asarray(p.vertices, dtype=complex) for p in family.sets]
        self.dim = family.dim
        self.pairs = []
        for V in self.verts:
            n = V.shape[0]
            idx = [(i, j) for i in range(n) for j in range(i, n)]
            self.pairs.append((np.array([i for i, _ in idx]), np.array([j for _, j in idx])))

    def coeffs(self, X: np.ndarray):
        """Projection coefficients per set: list of (m, n_F) arrays for the
        (m, dim) direction batch X."""
        cX = np.conj(X)
        return [cX @ V.T for V in self.verts]

    @staticmethod
    def closest(C: np.ndarray, i1, i2):
        """Per-row closest point of the point set C[row] to the origin."""
        A = C[:, i1]
        B = C[:, i2]
        D = B - A
        dd = (D * np.conj(D)).real
        num = -(np.conj(D) * A).real
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(dd > 0.0, np.clip(num / np.where(dd > 0.0, dd, 1.0), 0.0, 1.0), 0.0)
        Q = A + t * D
        dist = np.abs(Q)
        best = np.argmin(dist, axis=1)
        rows = np.arange(C.shape[0])
        q = Q[rows, best]
        # origin inside the hull: angular gaps of the points all <= pi
        ang = np.sort(np.angle(C), axis=1)
        gaps = np.diff(ang, axis=1)
        wrap = 2.0 * np.pi - (ang[:, -1] - ang[:, 0])
        if gaps.shape[1]:
            maxgap = np.maximum(gaps.max(axis=1), wrap)
        else:
            maxgap = np.full(C.shape[0], 2.0 * np.pi)
        inside = maxgap <= np.pi + 1e-12
        return np.where(inside, 0.0 + 0.0j, q)

    def closest_all(self, X: np.ndarray, shift=None):
        """(m, n_sets) closest coefficients; shift translates each row's
        polygon by -shift[row] first (distance-to-point queries)."""
        out = np.empty((X.shape[0], len(self.verts)), dtype=complex)
        for s, (C, (i1, i2)) in enumerate(zip(self.coeffs(X), self.pairs)):
            if shift is not None:
                C = C - shift[:, None]
            out[:, s] = self.closest(C, i1, i2)
        return out


def _phi_targets(family: Family, phi) -> np.ndarray:
    """One complex target row per family member, in label order.

    Accepts either an array-like of shape (n_sets, k) or a witness object
    exposing point_of(label)."""
    if hasattr(phi, "point_of"):
        rows = [np.asarray(phi.point_of(label)) for label in family.labels]
        out = np.asarray(rows, dtype=complex)
    else:
        out = np.asarray(phi, dtype=complex)
    if out.ndim != 2 or out.shape[0] != len(family.labels):
        raise ValueError("one witness image per family member required")
    return out


class _BorsukBatch:
    """Batched evaluation of f over the unit sphere of C^{d+1}."""

    def __init__(self, embedded: Family, phi):
        self.poly = _PolygonBatch(embedded)
        self.phi = _phi_targets(embedded, phi)  # (n_sets, d-1)

    def values(self, X: np.ndarray) -> np.ndarray:
        P = self.poly.closest_all(X)  # (m, n_sets)
        head = P.sum(axis=1)
        tail = np.conj(P) @ self.phi  # (m, d-1)
        return np.column_stack([head, tail])

    def norms(self, X: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.values(X), axis=1)


def _pattern_min(objective, u0: np.ndarray, config: TransversalConfig, target: float):
    """Minimize objective(unit rows) over the unit sphere by coordinate
    pattern search with step decay; returns (best unit vector, best value).

    objective maps an (m, n) batch of unit vectors to m values; descent
    stops early at the target value."""
    n = u0.shape[0]
    u = u0 / np.linalg.norm(u0)
    val = float(objective(u[None, :])[0])
    step = config.step_init
    eye = np.eye(n)
    for _ in range(config.iters):
        if val <= target or step < 1e-13:
            break
        cands = np.vstack([u + step * eye, u - step * eye])
        cands /= np.linalg.norm(cands, axis=1)[:, None]
        vals = objective(cands)
        j = int(np.argmin(vals))
        if vals[j] < val - 1e-16:
            u = cands[j]
            val = float(vals[j])
        else:
            step *= config.step_decay
    return u, val


# ---------------------------------------------------------------------------
# real direction sweep


def _interval_margin(family: Family, U: np.ndarray) -> np.ndarray:
    """g(u) per direction row: min_F max_v u.v - max_F min_v u.v."""
    lo = np.full(U.shape[0], -np.inf)
    hi = np.full(U.shape[0], np.inf)
    for _, poly in family:
        proj = U @ poly.vertices.T  # (m, n_F)
        lo = np.maximum(lo, proj.min(axis=1))
        hi = np.minimum(hi, proj.max(axis=1))
    return hi - lo


def _interval_offset(family: Family, u: np.ndarray) -> float:
    lo, hi = -np.inf, np.inf
    for _, poly in family:
        proj = poly.vertices @ u
        lo = max(lo, float(proj.min()))
        hi = min(hi, float(proj.max()))
    return 0.5 * (lo + hi)


def real_hyperplane_transversal(family: Family, config: TransversalConfig | None = None):
    """A real hyperplane meeting every set, by maximizing the common
    projection-interval margin g over unit directions.

    d = 1 is a single evaluation and d = 2 an exhaustive angle grid with
    local refinement, so NotFound is definitive there; higher d uses seeded
    multistart and NotFound only reports the best margin at budget.
    """
    config = config or TransversalConfig()
    if family.ambient != "real":
        raise ValueError("real_hyperplane_transversal expects a real family")
    d = family.dim
    if d == 1:
        g = float(_interval_margin(family, np.array([[1.0]]))[0])
        if g >= -MARGIN_TOL:
            return RealHyperplane(np.array([1.0]), _interval_offset(family, np.array([1.0])))
        return NotFound("projection intervals disjoint", best=g, exhaustive=True,
                        note="d=1 direction set is exhaustive")
    if d == 2:
        m = config.angle_resolution
        theta = np.linspace(0.0, np.pi, m, endpoint=False)
        g = _interval_margin(family, np.column_stack([np.cos(theta), np.sin(theta)]))
        j = int(np.argmax(g))
        best_t, best_g = float(theta[j]), float(g[j])
        width = np.pi / m
        for _ in range(40):
            t = np.linspace(best_t - width, best_t + width, 9)
            gt = _interval_margin(family, np.column_stack([np.cos(t), np.sin(t)]))
            jt = int(np.argmax(gt))
            if gt[jt] > best_g:
                best_t, best_g = float(t[jt]), float(gt[jt])
            width *= 0.35
        u = np.array([np.cos(best_t), np.sin(best_t)])
        if best_g >= -MARGIN_TOL:
            return RealHyperplane(u, _interval_offset(family, u))
        return NotFound(
            "no stabbing direction on the exhaustive grid",
            best=best_g,
            exhaustive=True,
            note=f"angle grid resolution {m} over [0, pi) plus local refinement",
        )
    # d >= 3: multistart maximization of g
    rng = np.random.default_rng(config.seed)
    best_val = -np.inf
    best_u = None
    for _ in range(config.starts):
        u0 = rng.standard_normal(d)
        u, neg = _pattern_min(
            lambda X: -_interval_margin(family, X), u0, config, target=-MARGIN_TOL
        )
        if -neg > best_val:
            best_val = -neg
            best_u = u
        if best_val >= MARGIN_TOL:
            break
    if best_val >= -MARGIN_TOL:
        return RealHyperplane(best_u, _interval_offset(family, best_u))
    return NotFound("no stabbing direction at budget", best=float(best_val))


# ---------------------------------------------------------------------------
# complex transversal: projected-polygon intersection


def complex_transversal_for_normal(a: np.ndarray, family: Family):
    """Common point b of all projected polygons along the unit normal a, as
    one LP over per-set convex weights; returns complex b or NotFound.

    The hyperplane {<z, a> = b} meets F iff b lies in F's coefficient
    polygon, so feasibility here is exact (infeasibility is rationally
    confirmed)."""
    if family.ambient != "complex":
        raise ValueError("complex ambient required")
    a = np.asarray(a, dtype=complex)
    if abs(float(np.linalg.norm(a)) - 1.0) > 1e-9:
        raise ValueError("normal must have unit norm")
    sizes = [p.n_vertices for p in family.sets]
    total = sum(sizes)
    rows = []
    rhs = []
    pos = 0
    for poly, n in zip(family.sets, sizes):
        c = poly.vertices @ np.conj(a)
        for part, target in ((c.real, 0), (c.imag, 1)):
            row = [0.0] * total + [0.0, 0.0]
            row[pos : pos + n] = list(part)
            row[total + target] = -1.0
            rows.append(tuple(row))
            rhs.append(0.0)
        row = [0.0] * (total + 2)
        row[pos : pos + n] = [1.0] * n
        rows.append(tuple(row))
        rhs.append(1.0)
        pos += n
    lp = LinearProgram(total, 2, tuple(rows), tuple(rhs))
    cert = lp_feasible(lp)
    if not cert.feasible and not cert.exact:
        cert = lp_feasible(lp, exact=True)
    if not cert.feasible:
        return NotFound("projected polygons have no common point", exhaustive=True)
    return complex(cert.witness[total], cert.witness[total + 1])


def _polygon_halfplanes(points):
    """Outward half-plane description (n, c rows with unit n) of the hull of
    2-D points; degenerate hulls get axis boxes (point) or perpendicular
    strips plus end caps (segment) so the margin LP below stays bounded."""
    hull = _hull2d([(float(p[0]), float(p[1])) for p in points])
    out = []
    if len(hull) == 1:
        (x, y) = hull[0]
        for nx, ny in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            out.append(((nx, ny), nx * x + ny * y))
        return out
    if len(hull) == 2:
        (ax, ay), (bx, by) = hull
        tx, ty = bx - ax, by - ay
        nrm = float(np.hypot(tx, ty))
        tx, ty = tx / nrm, ty / nrm
        for nx, ny in ((-ty, tx), (ty, -tx)):
            out.append(((nx, ny), nx * ax + ny * ay))
        out.append(((tx, ty), tx * bx + ty * by))
        out.append(((-tx, -ty), -(tx * ax + ty * ay)))
        return out
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        tx, ty = bx - ax, by - ay
        nrm = float(np.hypot(tx, ty))
        # CCW hull: the outward normal is the tangent rotated clockwise
        nx, ny = ty / nrm, -tx / nrm
        out.append(((nx, ny), nx * ax + ny * ay))
    return out


def polygon_intersection_margin(a: np.ndarray, family: Family) -> float:
    """Largest eps such that the eps-shrunk projected polygons along a still
    share a point; negative when they are disjoint.

    Computed through the dual of {max eps : n_i . b + eps <= c_i}, which is a
    three-row LP over edge weights."""
    a = np.asarray(a, dtype=complex)
    normals = []
    offsets = []
    for poly in family.sets:
        c = poly.vertices @ np.conj(a)
        for (nx, ny), off in _polygon_halfplanes(np.column_stack([c.real, c.imag])):
            normals.append((nx, ny))
            offsets.append(off)
    E = len(normals)
    rows = (
        tuple(n[0] for n in normals),
        tuple(n[1] for n in normals),
        (1.0,) * E,
    )
    lp = LinearProgram(E, 0, rows, (0.0, 0.0, 1.0), objective=tuple(offsets))
    cert = lp_feasible(lp)
    assert cert.feasible  # outward normals of bounded polygons always combine to zero
    y = np.asarray(cert.witness)
    return float(y @ np.asarray(offsets))


def _canonical_phase(a: np.ndarray) -> np.ndarray:
    """Rotate the first coordinate of nonnegligible modulus real-positive;
    removes the global-phase redundancy of projective normals."""
    a = np.asarray(a, dtype=complex)
    for v in a:
        if abs(v) > 1e-9:
            return a * (np.conj(v) / abs(v))
    return a


def find_complex_transversal(family: Family, config: TransversalConfig | None = None):
    """Search for a complex hyperplane meeting every set.

    d = 1: the transversal is a common point, decided exactly by LP.
    d >= 2: seeded multistart descent over joint (normal, offset) candidates
    minimizing the worst distance from the offset to the projected polygons;
    a candidate normal is accepted when its LP intersection margin clears
    -1e-9 and the offset is then recovered by complex_transversal_for_normal.
    """
    config = config or TransversalConfig()
    if family.ambient != "complex":
        raise ValueError("complex ambient required")
    d = family.dim
    if d == 1:
        a = np.array([1.0 + 0.0j])
        b = complex_transversal_for_normal(a, family)
        if isinstance(b, NotFound):
            return NotFound(
                "no common point (a complex 0-transversal is a common point)",
                best=polygon_intersection_margin(a, family),
                exhaustive=True,
                note="d=1 decision is a single exact LP",
            )
        return ComplexHyperplane(a, b)

    batch = _PolygonBatch(family)

    def objective(Z: np.ndarray) -> np.ndarray:
        # rows: (unit a in R^{2d} | b in R^2), normalized on the a-part only
        A = Z[:, : 2 * d : 2] + 1j * Z[:, 1 : 2 * d : 2]
        b = Z[:, 2 * d] + 1j * Z[:, 2 * d + 1]
        q = batch.closest_all(A, shift=b)
        return np.abs(q).max(axis=1)

    def joint_min(z0):
        z = z0.copy()
        anorm = np.linalg.norm(z[: 2 * d])
        z[: 2 * d] /= anorm
        val = float(objective(z[None, :])[0])
        step = config.step_init
        eye = np.eye(2 * d + 2)
        for _ in range(config.iters):
            if val <= 1e-12 or step < 1e-13:
                break
            cands = z[None, :] + np.vstack([step * eye, -step * eye])
            cands[:, : 2 * d] /= np.linalg.norm(cands[:, : 2 * d], axis=1)[:, None]
            vals = objective(cands)
            j = int(np.argmin(vals))
            if vals[j] < val - 1e-16:
                z = cands[j]
                val = float(vals[j])
            else:
                step *= config.step_decay
        return z, val

    rng = np.random.default_rng(config.seed)
    best_margin = -np.inf
    best_a = None
    for _ in range(config.starts):
        z0 = rng.standard_normal(2 * d + 2)
        z, _ = joint_min(z0)
        a = z[: 2 * d : 2] + 1j * z[1 : 2 * d : 2]
        a = a / np.linalg.norm(a)
        margin = polygon_intersection_margin(a, family)
        if margin > best_margin:
            best_margin = margin
            best_a = a
        if margin >= -MARGIN_TOL:
            b = complex_transversal_for_normal(a, family)
            if not isinstance(b, NotFound):
                return ComplexHyperplane(_canonical_phase(a), _rotate_offset(a, b))
    return NotFound("no common projected point at budget", best=float(best_margin),
                    x=best_a)


def _rotate_offset(a: np.ndarray, b: complex) -> complex:
    """Offset transform matching _canonical_phase: (a, b) and (mu a, conj(mu) b)
    name the same hyperplane for unit mu."""
    a = np.asarray(a, dtype=complex)
    for v in a:
        if abs(v) > 1e-9:
            mu = np.conj(v) / abs(v)
            return complex(np.conj(mu) * b)
    return complex(b)


# ---------------------------------------------------------------------------
# the odd map and its zeros


def borsuk_map(x: SpherePoint, embedded: Family, phi) -> BorsukEvaluation:
    """f(x) = sum_F (p_{x,F}, conj(p_{x,F}) phi(F)) for a family embedded in
    the slice {z_{d+1} = 1}; phi maps family order to C^{d-1} rows (a raw
    array or a witness object)."""
    phi = _phi_targets(embedded, phi)
    if embedded.dim != x.dim:
        raise ValueError("family must be embedded in the sphere's dimension")
    ps = []
    for _, poly in embedded:
        ps.append(closest_coeff(project_polytope(x, poly)))
    p = np.asarray(ps, dtype=complex)
    value = np.concatenate([[p.sum()], np.conj(p) @ phi])
    return BorsukEvaluation(x, value, tuple(zip(embedded.labels, ps)))


def find_borsuk_zero(embedded: Family, phi, config: TransversalConfig | None = None):
    """Seeded multistart minimization of ||f|| over the unit sphere of
    C^{d+1}; success at ||f|| <= config.zero_tol with the pole guard
    enforced (pole-adjacent minima are rejected and the next start runs)."""
    config = config or TransversalConfig()
    ev = _BorsukBatch(embedded, phi)
    n = 2 * embedded.dim
    rng = np.random.default_rng(config.seed)
    best_val = np.inf
    best_u = None

    def norms(U: np.ndarray) -> np.ndarray:
        X = U[:, 0::2] + 1j * U[:, 1::2]
        return ev.norms(X)

    for _ in range(config.starts):
        u0 = rng.standard_normal(n)
        u, val = _pattern_min(norms, u0, config, target=config.zero_tol * 0.1)
        if val < best_val:
            best_val = val
            best_u = u
        if val <= config.zero_tol:
            x = u[0::2] + 1j * u[1::2]
            if float(np.linalg.norm(x[:-1])) >= POLE_GUARD:
                return SpherePoint.normalized(x)
            # pole-adjacent: reject and continue with the next start
    x_best = None if best_u is None else best_u[0::2] + 1j * best_u[1::2]
    return NotFound("no zero of f at budget", best=float(best_val), x=x_best)


def borsuk_zero_dependence(x: SpherePoint, embedded: Family, phi,
                           tol: float = ZERO_TOL) -> AffineDependence | None:
    """Affine dependence carried by a near-zero of f: over the subfamily
    with |p_{x,F}| > tol, coefficients a_F = conj(p_{x,F}) satisfy
    sum a_F = 0 and sum a_F phi(F) = 0 up to ||f(x)|| plus the dropped
    small coefficients.

    This is the soundness certificate: if the recovered hyperplane misses
    some set, this dependence has no nonnegative lift, so re-checking it
    convicts the witness of inconsistency.  Returns None when every
    coefficient is below tol (the hyperplane then meets every set)."""
    ev = borsuk_map(x, embedded, phi)
    labels = []
    coeffs = []
    for label, p in ev.coefficients:
        if abs(p) > tol:
            labels.append(label)
            coeffs.append(complex(np.conj(p)))
    if not labels:
        return None
    return AffineDependence(tuple(labels), tuple(coeffs), origin="borsuk-zero")


# ---------------------------------------------------------------------------
# verification


def verify_transversal(T: ComplexHyperplane, family: Family, tol: float = ZERO_TOL) -> VerificationReport:
    """Per-set distance from the hyperplane: the exact 2-D distance from the
    offset to each projected coefficient polygon (projection along the
    normal is an isometry onto the normal's complex line)."""
    if family.ambient != "complex" or family.dim != T.dim:
        raise ValueError("family and hyperplane dimensions must agree")
    dists = []
    for label, poly in family:
        c = poly.vertices @ np.conj(T.normal) - T.offset
        q = _closest_to_origin([(z.real, z.imag) for z in c.tolist()])
        dists.append((label, float(np.hypot(*q))))
    return VerificationReport(tuple(dists), tol)
