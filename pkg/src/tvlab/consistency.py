"""Combinatorial consistency conditions for families of convex sets, with
LP-backed certificates.

Two checkers live here:

* ``check_dependency_consistency`` (complex ambient): every complex affine
  dependence among the witness images must lift to a nonnegatively weighted
  dependence on points chosen inside the sets.  Dependences are enumerated
  subfamily by subfamily up to support size 2k+3; one-dimensional null
  spaces contribute their unique circuit, higher-dimensional ones are
  sampled at a seeded budget.  A pass is therefore "pass at budget" while a
  fail carries an exact, rationally confirmed certificate.
* ``separates_consistently`` (real ambient): hull disjointness of subfamily
  images must be preserved, checked in contrapositive form on all disjoint
  subfamily pairs of total size at most k+2.

The Caratheodory-style support reducer for oversized dependences is also
here; it runs in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .geometry import Family
from .lp import FeasibilityCertificate, hulls_intersect, nontrivial_zero_in_cone

DEP_RESIDUAL_TOL = 1e-9
NULLSPACE_TOL = 1e-10
SUPPORT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConsistencyWitness:
    """Candidate point set P with an assignment of family labels into it."""

    target_dim: int
    points: np.ndarray  # (m, k), complex or float entries
    assignment: dict  # label -> row index into points

    def __post_init__(self):
        pts = np.asarray(self.points)
        if pts.ndim != 2:
            raise ValueError("witness points must form a 2-D array (m, k)")
        if pts.shape[1] != self.target_dim:
            raise ValueError("witness points do not match target dimension")
        if pts.size and not np.all(np.isfinite(pts)):
            raise ValueError("witness points must be finite")
        if pts.shape[0] < 1:
            raise ValueError("witness needs at least one point")
        assignment = dict(self.assignment)
        for label, idx in assignment.items():
            if not 0 <= idx < pts.shape[0]:
                raise ValueError(f"assignment of {label!r} out of range")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "assignment", assignment)

    @property
    def k(self) -> int:
        return self.target_dim

    def point_of(self, label):
        return self.points[self.assignment[label]]

    def covers(self, family: Family) -> bool:
        return all(l in self.assignment for l in family.labels)


def trivial_witness(family: Family) -> ConsistencyWitness:
    """The unique witness into C^0: one empty point, all labels mapped to it."""
    pts = np.zeros((1, 0), dtype=complex)
    return ConsistencyWitness(0, pts, {l: 0 for l in family.labels})


@dataclass(frozen=True, eq=False)
class AffineDependence:
    """Support labels and complex coefficients with zero sum and zero
    weighted witness sum.

    origin records how the dependence was produced ("circuit" for a
    one-dimensional null space, "sampled" otherwise); it carries no
    semantics beyond bookkeeping."""

    labels: tuple
    coeffs: tuple
    origin: str = "circuit"

    def __post_init__(self):
        labels = tuple(self.labels)
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(labels) != len(coeffs) or not labels:
            raise ValueError("labels and coefficients must align and be nonempty")
        if all(abs(c) == 0.0 for c in coeffs):
            raise ValueError("dependence coefficients must not all vanish")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "coeffs", coeffs)

    def residuals(self, witness: ConsistencyWitness):
        """(|sum a|, ||sum a phi||) against a witness."""
        a = np.asarray(self.coeffs)
        pts = np.asarray([witness.point_of(l) for l in self.labels])
        s0 = abs(complex(a.sum()))
        s1 = float(np.linalg.norm(a @ pts)) if witness.k else 0.0
        return s0, s1


@dataclass(frozen=True, eq=False)
class Lift:
    """Realization of a dependence inside the sets: nonnegative weights r_F
    and points p_F in F with vanishing weighted sums.

    vertex_weights certify each p_F as a convex combination of its set's
    vertices (the weights of labels with r_F = 0 are zero; their p_F is an
    arbitrary vertex)."""

    dependence: AffineDependence
    r: tuple  # per support label
    points: np.ndarray  # (s, d) complex
    vertex_weights: tuple  # per label, ndarray of convex weights

    @property
    def products(self) -> tuple:
        return tuple(r * a for r, a in zip(self.r, self.dependence.coeffs))

    def residuals(self):
        prod = np.asarray(self.products)
        return abs(complex(prod.sum())), float(np.linalg.norm(prod @ self.points))


@dataclass(frozen=True, eq=False)
class NoLift:
    """Verdict that a dependence admits no lift; carries the infeasibility
    certificate of the cone formulation (exact when rationally confirmed)."""

    dependence: AffineDependence
    certificate: FeasibilityCertificate

    @property
    def exact(self) -> bool:
        return self.certificate.exact


@dataclass(frozen=True, eq=False)
class ConsistencyVerdict:
    status: str  # "pass" | "fail"
    samples_budget: int
    n_dependences: int = 0
    n_circuits: int = 0
    n_sampled: int = 0
    violation: object = None  # NoLift (complex path) or SeparationViolation
    max_lift_residual: float = 0.0
    worst_lift: Lift | None = None
    lifts: tuple | None = None  # retained only when requested

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True, eq=False)
class SeparationViolation:
    """A disjoint subfamily pair whose witness images intersect."""

    part_one: tuple
    part_two: tuple
    image_point: np.ndarray
    disjointness: FeasibilityCertificate  # Farkas for conv(F1) n conv(F2) = {}


@dataclass(frozen=True)
class ConsistencyConfig:
    samples: int = 64
    seed: int = 0
    residual_tol: float = DEP_RESIDUAL_TOL
    nullspace_tol: float = NULLSPACE_TOL
    exact: bool = False  # rational arithmetic for every lift decision
    keep_lifts: bool = False


# ---------------------------------------------------------------------------
# complex null spaces (column-pivoted elimination)


def _complex_nullspace(M: np.ndarray, tol: float = NULLSPACE_TOL) -> np.ndarray:
    """Null-space basis of a complex matrix by elimination with full column
    pivoting; rank decided by the threshold ``tol``.  Returns (n, nullity)."""
    M = np.array(M, dtype=complex)
    m, n = M.shape
    pivot_cols = []
    row = 0
    for _ in range(min(m, n)):
        sub = np.abs(M[row:, :])
        if pivot_cols:
            sub[:, pivot_cols] = 0.0
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol:
            break
        i += row
        if i != row:
            M[[row, i]] = M[[i, row]]
        M[row] = M[row] / M[row, j]
        for r in range(m):
            if r != row and M[r, j] != 0:
                M[r] = M[r] - M[r, j] * M[row]
        pivot_cols.append(j)
        row += 1
    free_cols = [j for j in range(n) if j not in pivot_cols]
    basis = np.zeros((n, len(free_cols)), dtype=complex)
    for idx, f in enumerate(free_cols):
        basis[f, idx] = 1.0
        for r, p in enumerate(pivot_cols):
            basis[p, idx] = -M[r, f]
    return basis


def _canonical_coeffs(a: np.ndarray, support_tol: float = SUPPORT_TOL):
    """Unit norm, largest-modulus entry rotated real-positive; returns
    (support index tuple, canonical coefficient array) or None for ~0."""
    nrm = float(np.linalg.norm(a))
    if nrm <= support_tol:
        return None
    a = a / nrm
    support = tuple(int(i) for i in np.nonzero(np.abs(a) > support_tol)[0])
    if not support:
        return None
    a = a[list(support)]
    i_star = int(np.argmax(np.abs(a)))
    a = a / a[i_star]
    a = a / np.linalg.norm(a)
    return support, a


def _dependence_key(labels, coeffs):
    parts = [",".join(labels)]
    for c in coeffs:
        parts.append(f"{c.real:.9f},{c.imag:.9f}")
    return "|".join(parts)


def enumerate_dependences(
    family: Family, witness: ConsistencyWitness, config: ConsistencyConfig | None = None
):
    """All circuit dependences plus sampled higher-nullity directions, over
    subfamilies of size at most 2k+3, in increasing-size lexicographic order,
    deduplicated up to global complex scaling."""
    config = config or ConsistencyConfig()
    if not witness.covers(family):
        raise ValueError("witness must assign every family label")
    k = witness.k
    labels = family.labels
    bound = 2 * k + 3
    rng = np.random.default_rng(config.seed)
    out = []
    seen = set()
    for size in range(2, min(len(labels), bound) + 1):
        for combo in combinations(range(len(labels)), size):
            sub = [labels[i] for i in combo]
            pts = np.asarray([witness.point_of(l) for l in sub])  # (size, k)
            M = np.vstack([np.ones((1, size), dtype=complex), pts.T.astype(complex)])
            basis = _complex_nullspace(M, config.nullspace_tol)
            nullity = basis.shape[1]
            if nullity == 0:
                continue
            if nullity == 1:
                candidates = [basis[:, 0]]
                origin = "circuit"
            else:
                q, _ = np.linalg.qr(basis)
                g = rng.standard_normal((nullity, config.samples)) + 1j * rng.standard_normal(
                    (nullity, config.samples)
                )
                candidates = list((q @ g).T)
                origin = "sampled"
            for a in candidates:
                canon = _canonical_coeffs(np.asarray(a))
                if canon is None:
                    continue
                support, coeffs = canon
                sup_labels = tuple(sub[i] for i in support)
                key = _dependence_key(sup_labels, coeffs)
                if key in seen:
                    continue
                seen.add(key)
                out.append(AffineDependence(sup_labels, tuple(coeffs.tolist()), origin))
    return out


# ---------------------------------------------------------------------------
# lifting


def _lift_groups(family: Family, labels, coeffs):
    """Generators (a_F v, a_F) in C^{d+1}, read in R^{2d+2}, per vertex."""
    groups = []
    for label, a in zip(labels, coeffs):
        V = family[label].vertices  # (n, d) complex
        n = V.shape[0]
        W = np.empty((n, V.shape[1] + 1), dtype=complex)
        W[:, :-1] = a * V
        W[:, -1] = a
        G = np.empty((n, 2 * W.shape[1]), dtype=float)
        G[:, 0::2] = W.real
        G[:, 1::2] = W.imag
        groups.append((label, G))
    return groups


def lift_dependence(
    family: Family, dep: AffineDependence, config: ConsistencyConfig | None = None
):
    """Find nonnegative weights and in-set points realizing a dependence.

    Uses the exact equivalence, for vertex-generated sets, between the
    definition's lift and convex-cone membership of the origin among the
    per-vertex generators.  Returns a Lift or a NoLift; a NoLift from the
    float path is always confirmed by a rational run before being reported.
    """
    config = config or ConsistencyConfig()
    # labels whose coefficient vanishes identically cannot affect the sums
    active = [i for i, a in enumerate(dep.coeffs) if abs(a) > 0.0]
    groups = _lift_groups(
        family, [dep.labels[i] for i in active], [dep.coeffs[i] for i in active]
    )
    cz = nontrivial_zero_in_cone(groups, exact=config.exact)
    if not cz.certificate.feasible and not cz.certificate.exact:
        cz = nontrivial_zero_in_cone(groups, exact=True)
    if not cz.certificate.feasible:
        return NoLift(dep, cz.certificate)
    by_label = {label: lam for label, lam in cz.weights}
    rs = []
    points = []
    vweights = []
    for label in dep.labels:
        V = family[label].vertices
        lam = by_label.get(label)
        if lam is None:
            lam = np.zeros(V.shape[0])
        r = float(lam.sum())
        rs.append(r)
        points.append((lam @ V) / r if r > 0.0 else V[0])
        vweights.append(lam / r if r > 0.0 else lam)
    return Lift(dep, tuple(rs), np.asarray(points), tuple(vweights))


def check_dependency_consistency(
    family: Family, witness: ConsistencyWitness, config: ConsistencyConfig | None = None
) -> ConsistencyVerdict:
    """Pass iff every enumerated dependence lifts; the first failure (in
    enumeration order) is returned with its certificate."""
    config = config or ConsistencyConfig()
    if family.ambient != "complex":
        raise ValueError("dependency consistency is a complex-ambient check")
    deps = enumerate_dependences(family, witness, config)
    n_circuits = sum(1 for dep in deps if dep.origin == "circuit")
    max_resid = 0.0
    worst = None
    lifts = [] if config.keep_lifts else None
    for dep in deps:
        res = lift_dependence(family, dep, config)
        if isinstance(res, NoLift):
            return ConsistencyVerdict(
                "fail",
                samples_budget=config.samples,
                n_dependences=len(deps),
                n_circuits=n_circuits,
                n_sampled=len(deps) - n_circuits,
                violation=res,
            )
        r0, r1 = res.residuals()
        resid = max(r0, r1)
        if resid > max_resid:
            max_resid = resid
            worst = res
        if lifts is not None:
            lifts.append(res)
    return ConsistencyVerdict(
        "pass",
        samples_budget=config.samples,
        n_dependences=len(deps),
        n_circuits=n_circuits,
        n_sampled=len(deps) - n_circuits,
        max_lift_residual=max_resid,
        worst_lift=worst,
        lifts=tuple(lifts) if lifts is not None else None,
    )


# ---------------------------------------------------------------------------
# real path: separates consistently


def _union_vertices(family: Family, labels):
    return np.vstack([family[l].vertices for l in labels])


def separates_consistently(
    family: Family, witness: ConsistencyWitness, k: int | None = None
) -> ConsistencyVerdict:
    """Contrapositive check over all disjoint subfamily pairs of total size
    at most k+2: intersecting witness images force intersecting hulls."""
    if family.ambient != "real":
        raise ValueError("separates_consistently is a real-ambient check")
    if not witness.covers(family):
        raise ValueError("witness must assign every family label")
    k = witness.k if k is None else k
    labels = family.labels
    n_checked = 0
    for total in range(2, min(len(labels), k + 2) + 1):
        for combo in combinations(range(len(labels)), total):
            # splits with the first member pinned to part one avoid mirror pairs
            rest = combo[1:]
            for mask in range(1 << len(rest)):
                one = [combo[0]] + [rest[i] for i in range(len(rest)) if mask >> i & 1]
                two = [rest[i] for i in range(len(rest)) if not mask >> i & 1]
                if not two:
                    continue
                f1 = tuple(labels[i] for i in one)
                f2 = tuple(labels[i] for i in two)
                img1 = np.asarray([witness.point_of(l) for l in f1], dtype=float)
                img2 = np.asarray([witness.point_of(l) for l in f2], dtype=float)
                n_checked += 1
                images = hulls_intersect(img1, img2)
                if not images.feasible:
                    continue
                hulls = hulls_intersect(
                    _union_vertices(family, f1), _union_vertices(family, f2)
                )
                if hulls.feasible:
                    continue
                if not hulls.certificate.exact:
                    hulls = hulls_intersect(
                        _union_vertices(family, f1),
                        _union_vertices(family, f2),
                        exact=True,
                    )
                    if hulls.feasible:
                        continue
                return ConsistencyVerdict(
                    "fail",
                    samples_budget=0,
                    n_dependences=n_checked,
                    violation=SeparationViolation(
                        f1, f2, images.point, hulls.certificate
                    ),
                )
    return ConsistencyVerdict("pass", samples_budget=0, n_dependences=n_checked)


# ---------------------------------------------------------------------------
# Caratheodory support reduction (exact arithmetic)


def _fraction_pair(z: complex):
    return Fraction(float(z.real)), Fraction(float(z.imag))


def _exact_null_vector(columns):
    """A nonzero rational vector z with M z = 0 for the given columns, or
    None when the columns are linearly independent."""
    m = len(columns[0])
    n = len(columns)
    M = [[columns[j][i] for j in range(n)] for i in range(m)]
    zero = Fraction(0)
    pivots = {}  # col -> row
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, m):
            if M[r][col] != zero:
                sel = r
                break
        if sel is None:
            continue
        M[row], M[sel] = M[sel], M[row]
        piv = M[row][col]
        M[row] = [v / piv for v in M[row]]
        for r in range(m):
            if r != row and M[r][col] != zero:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[row])]
        pivots[col] = row
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    f = free[0]
    z = [zero] * n
    z[f] = Fraction(1)
    for col, r in pivots.items():
        z[col] = -M[r][f]
    return z


def reduce_dependence_support(
    dep: AffineDependence, witness: ConsistencyWitness, max_support: int | None = None
) -> AffineDependence:
    """Shrink a dependence to support at most 2k+3 by positive rescalings.

    Runs in exact rational arithmetic on the paired real coordinates of the
    points (a_F phi(F), a_F); the output coefficients are s_F * a_F with
    s_F > 0 and satisfy both dependence equations to rounding error only.
    """
    k = witness.k
    if max_support is None:
        max_support = 2 * k + 3
    labels = list(dep.labels)
    coeffs = [complex(c) for c in dep.coeffs]
    # exact complex pairs for a_F and a_F*phi(F), flattened to R^{2k+2} plus a ones row
    def q_column(label, a):
        ar, ai = _fraction_pair(a)
        col = []
        for z in np.asarray(witness.point_of(label)).ravel():
            pr, pi = _fraction_pair(complex(z))
            col.append(ar * pr - ai * pi)
            col.append(ar * pi + ai * pr)
        col.append(ar)
        col.append(ai)
        col.append(Fraction(1))  # affine row over the q points
        return col

    weights = [Fraction(1)] * len(labels)
    while len(labels) > max_support:
        cols = [q_column(l, c) for l, c in zip(labels, coeffs)]
        z = _exact_null_vector(cols)
        if z is None:
            break  # affinely independent; cannot shrink further
        if not any(v > 0 for v in z):
            z = [-v for v in z]
        t = min(w / v for w, v in zip(weights, z) if v > 0)
        weights = [w - t * v for w, v in zip(weights, z)]
        keep = [i for i, w in enumerate(weights) if w != 0]
        labels = [labels[i] for i in keep]
        coeffs = [coeffs[i] for i in keep]
        weights = [weights[i] for i in keep]
    new_coeffs = [float(w) * c for w, c in zip(weights, coeffs)]
    return AffineDependence(tuple(labels), tuple(new_coeffs))
