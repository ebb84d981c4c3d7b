"""Instance generation, witness construction, equivalence experiments, and
canonical persistence.

Documents are serialized through a deterministic emitter: fixed key order,
floats at 17 significant digits, complex numbers as [re, im] pairs.  Reading
a document back and re-serializing it reproduces the file byte for byte,
and reports depend only on (seed, config, version), never on wall time.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .consistency import (
    ConsistencyConfig,
    ConsistencyVerdict,
    ConsistencyWitness,
    Lift,
    NoLift,
    _lift_groups,
    check_dependency_consistency,
    trivial_witness,
)
from .geometry import (
    ComplexHyperplane,
    Family,
    Polytope,
    embed_family,
    hermitian_inner,
    hyperplane_from_sphere_point,
)
from .lp import hulls_intersect, flat_meets_polytope, nontrivial_zero_in_cone
from .transversal import (
    NotFound,
    RealHyperplane,
    TransversalConfig,
    borsuk_map,
    complex_transversal_for_normal,
    find_borsuk_zero,
    find_complex_transversal,
    verify_transversal,
)

PLANTED_TOL = 1e-9


# ---------------------------------------------------------------------------
# canonical document emission


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("non-finite number in document")
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return "%.17g" % x


def _emit(obj, indent: int) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            return "[]"
        if not any(isinstance(v, dict) for v in items):
            return "[" + ", ".join(_emit(v, 0) for v in items) + "]"
        inner = ",\n".join("  " * (indent + 1) + _emit(v, indent + 1) for v in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            "  " * (indent + 1) + json.dumps(str(k)) + ": " + _emit(v, indent + 1)
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    """Deterministic structured-text form, newline terminated."""
    return _emit(obj, 0) + "\n"


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _unpair(p) -> complex:
    return complex(float(p[0]), float(p[1]))


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True, eq=False)
class Instance:
    """A labeled family with optional witness, planted transversal, and the
    seed that generated it."""

    family: Family
    witness: ConsistencyWitness | None = None
    planted: object = None  # ComplexHyperplane or RealHyperplane
    seed: int = 0
    note: str = ""

    def __post_init__(self):
        if self.witness is not None and not self.witness.covers(self.family):
            raise ValueError("witness does not cover every family label")
        if self.planted is not None:
            if self.family.ambient == "complex":
                if not isinstance(self.planted, ComplexHyperplane):
                    raise ValueError("complex instance needs a complex transversal")
                rep = verify_transversal(self.planted, self.family, tol=PLANTED_TOL)
                if not rep.passed:
                    raise ValueError(
                        f"planted transversal misses a set by {rep.max_distance:.3e}"
                    )
            else:
                if not isinstance(self.planted, RealHyperplane):
                    raise ValueError("real instance needs a real hyperplane")
                for label, poly in self.family:
                    pr = poly.vertices @ self.planted.normal
                    if not (
                        pr.min() - PLANTED_TOL
                        <= self.planted.offset
                        <= pr.max() + PLANTED_TOL
                    ):
                        raise ValueError(f"planted hyperplane misses {label!r}")

    @property
    def ambient(self) -> str:
        return self.family.ambient

    @property
    def d(self) -> int:
        return self.family.dim

    def to_json(self) -> dict:
        doc = {"ambient": self.ambient, "d": self.d}
        sets = []
        for label, poly in self.family:
            if self.ambient == "complex":
                verts = [[_pair(z) for z in row] for row in poly.vertices.tolist()]
            else:
                verts = [[float(x) for x in row] for row in poly.vertices.tolist()]
            sets.append({"label": label, "vertices": verts})
        doc["sets"] = sets
        if self.witness is not None:
            pts = [[_pair(z) for z in row] for row in np.asarray(self.witness.points, dtype=complex).tolist()]
            doc["witness"] = {
                "k": self.witness.k,
                "points": pts,
                "assignment": {l: self.witness.assignment[l] for l in self.family.labels},
            }
        if self.planted is not None:
            if self.ambient == "complex":
                doc["planted"] = {
                    "normal": [_pair(z) for z in self.planted.normal.tolist()],
                    "offset": _pair(self.planted.offset),
                }
            else:
                doc["planted"] = {
                    "normal": [[float(u), 0.0] for u in self.planted.normal.tolist()],
                    "offset": [float(self.planted.offset), 0.0],
                }
        doc["seed"] = self.seed
        if self.note:
            doc["note"] = self.note
        return doc


def instance_from_json(doc: dict) -> Instance:
    ambient = doc["ambient"]
    if ambient not in ("real", "complex"):
        raise ValueError("ambient must be 'real' or 'complex'")
    d = int(doc["d"])
    labels = []
    polys = []
    for entry in doc["sets"]:
        labels.append(entry["label"])
        if ambient == "complex":
            verts = np.array(
                [[_unpair(p) for p in row] for row in entry["vertices"]], dtype=complex
            )
        else:
            verts = np.array(entry["vertices"], dtype=float)
        if verts.shape[1] != d:
            raise ValueError("vertex dimension disagrees with d")
        polys.append(Polytope(ambient, verts))
    family = Family(tuple(labels), tuple(polys))

    witness = None
    if "witness" in doc:
        w = doc["witness"]
        k = int(w["k"])
        pts = np.array(
            [[_unpair(p) for p in row] for row in w["points"]], dtype=complex
        ).reshape(len(w["points"]), k)
        witness = ConsistencyWitness(k, pts, {l: int(i) for l, i in w["assignment"].items()})

    planted = None
    if "planted" in doc:
        p = doc["planted"]
        if ambient == "complex":
            normal = np.array([_unpair(q) for q in p["normal"]], dtype=complex)
            planted = ComplexHyperplane(normal, _unpair(p["offset"]))
        else:
            normal = np.array([float(q[0]) for q in p["normal"]])
            planted = RealHyperplane(normal, float(p["offset"][0]))

    return Instance(
        family,
        witness=witness,
        planted=planted,
        seed=int(doc.get("seed", 0)),
        note=str(doc.get("note", "")),
    )


def write_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(instance.to_json()))


def read_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# generation


@dataclass(frozen=True)
class GenSpec:
    d: int
    n_sets: int
    vertices_per_set: int = 4
    planted: bool = False
    seed: int = 0
    ambient: str = "complex"

    def __post_init__(self):
        if self.d < 1 or self.n_sets < 1 or self.vertices_per_set < 1:
            raise ValueError("d, n_sets, and vertices_per_set must be positive")
        if self.ambient not in ("real", "complex"):
            raise ValueError("ambient must be 'real' or 'complex'")


def _generate(rng, d, n_sets, vertices_per_set, planted, ambient, seed) -> Instance:
    labels = tuple(f"S{i}" for i in range(n_sets))
    T = None
    if planted:
        if ambient == "complex":
            a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            a = a / np.linalg.norm(a)
            b = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
            T = ComplexHyperplane(a, b)
        else:
            u = rng.standard_normal(d)
            u = u / np.linalg.norm(u)
            t = float(rng.uniform(-0.5, 0.5))
            T = RealHyperplane(u, t)
    polys = []
    for _ in range(n_sets):
        if ambient == "complex":
            V = rng.uniform(-1, 1, (vertices_per_set, d)) + 1j * rng.uniform(
                -1, 1, (vertices_per_set, d)
            )
            if planted:
                z0 = rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d)
                z = z0 - (hermitian_inner(z0, T.normal) - T.offset) * T.normal
                V = np.vstack([V, z[None, :]])
        else:
            V = rng.uniform(-1, 1, (vertices_per_set, d))
            if planted:
                z0 = rng.uniform(-1, 1, d)
                z = z0 + (T.offset - z0 @ T.normal) * T.normal
                V = np.vstack([V, z[None, :]])
        polys.append(Polytope(ambient, V))
    family = Family(labels, tuple(polys))
    return Instance(family, planted=T, seed=seed)


def gen_instance(spec: GenSpec) -> Instance:
    """Random vertex polytopes in the unit box, one planted on-hyperplane
    vertex per set when requested."""
    rng = np.random.default_rng(spec.seed)
    return _generate(
        rng, spec.d, spec.n_sets, spec.vertices_per_set, spec.planted, spec.ambient, spec.seed
    )


# ---------------------------------------------------------------------------
# witnesses from transversals


def _orthonormal_complement(a: np.ndarray) -> np.ndarray:
    """Rows form a Hermitian-orthonormal basis of {w : <w, a> = 0}."""
    a = np.asarray(a, dtype=complex)
    _, _, Vh = np.linalg.svd(np.conj(a)[None, :])
    return np.conj(Vh[1:])


def _closest_set_point(poly: Polytope, a: np.ndarray, b: complex) -> np.ndarray:
    """The polytope point whose projection coefficient is nearest b, found
    over all vertex-pair segments (the minimum lies on the hull boundary
    whenever it is not zero)."""
    V = poly.vertices
    c = V @ np.conj(a) - b
    best = None
    for i in range(len(c)):
        for j in range(i, len(c)):
            delta = c[j] - c[i]
            den = abs(delta) ** 2
            t = 0.0 if den < 1e-30 else float(
                np.clip(-(c[i].conjugate() * delta).real / den, 0.0, 1.0)
            )
            val = abs(c[i] + t * delta)
            if best is None or val < best[0]:
                best = (val, i, j, t)
    _, i, j, t = best
    return (1.0 - t) * V[i] + t * V[j]


def witness_from_transversal(
    instance: Instance, T: ComplexHyperplane, tol: float = 1e-6
) -> ConsistencyWitness:
    """Frame coordinates on T of one chosen intersection point per set.

    The frame origin is the T-point closest to 0 and the basis is a
    Hermitian-orthonormal complement of the normal, so targets live in
    C^{d-1}.  d=1 collapses to the unique witness into C^0."""
    family = instance.family
    if family.ambient != "complex":
        raise ValueError("witness construction expects a complex family")
    rep = verify_transversal(T, family, tol=tol)
    if not rep.passed:
        raise ValueError(
            f"transversal misses a set by {rep.max_distance:.3e} (tol {tol:g})"
        )
    d = family.dim
    if d == 1:
        return trivial_witness(family)
    a, b = T.normal, T.offset
    z0 = b * a
    basis = _orthonormal_complement(a)
    rows = []
    assignment = {}
    for idx, (label, poly) in enumerate(family):
        cert, point = flat_meets_polytope([(a, b)], poly)
        if not cert.feasible or point is None:
            # the transversal passes only within tol; project the nearest
            # set point onto T instead
            q = _closest_set_point(poly, a, b)
            point = q - (hermitian_inner(q, a) - b) * a
        rows.append(np.conj(basis) @ (point - z0))
        assignment[label] = idx
    return ConsistencyWitness(d - 1, np.asarray(rows, dtype=complex), assignment)


# ---------------------------------------------------------------------------
# the equivalence experiment


@dataclass(frozen=True)
class EquivConfig:
    trials: int
    d: int = 2
    seed: int = 0
    samples: int = 64
    starts: int = 32
    iters: int = 2000

    def __post_init__(self):
        if self.trials < 0 or self.d < 1:
            raise ValueError("trials must be >= 0 and d >= 1")

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "d": self.d,
            "seed": self.seed,
            "samples": self.samples,
            "starts": self.starts,
            "iters": self.iters,
        }


def equiv_config_from_json(doc: dict) -> EquivConfig:
    return EquivConfig(
        trials=int(doc["trials"]),
        d=int(doc["d"]),
        seed=int(doc["seed"]),
        samples=int(doc["samples"]),
        starts=int(doc["starts"]),
        iters=int(doc["iters"]),
    )


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Per-trial records with certificates and aggregate counts.

    wall_time is measured for operator feedback but never serialized, so
    that reports are byte-stable functions of (seed, config, version)."""

    config: EquivConfig
    records: tuple
    aggregates: dict
    wall_time: float

    def to_json(self) -> dict:
        return {
            "version": __version__,
            "kind": "equivalence-report",
            "config": self.config.to_json(),
            "aggregates": self.aggregates,
            "records": list(self.records),
        }


def write_report(report: ExperimentReport, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(report.to_json()))


def _lift_json(lift: Lift) -> dict:
    return {
        "labels": list(lift.dependence.labels),
        "coeffs": [_pair(c) for c in lift.dependence.coeffs],
        "origin": lift.dependence.origin,
        "r": [float(r) for r in lift.r],
        "points": [[_pair(z) for z in row] for row in np.asarray(lift.points).tolist()],
        "vertex_weights": [[float(w) for w in ws] for ws in lift.vertex_weights],
    }


def _nolift_json(nolift: NoLift) -> dict:
    return {
        "labels": list(nolift.dependence.labels),
        "coeffs": [_pair(c) for c in nolift.dependence.coeffs],
        "origin": nolift.dependence.origin,
        "exact": bool(nolift.exact),
    }


def _consistency_json(verdict: ConsistencyVerdict) -> dict:
    return {
        "status": verdict.status,
        "samples_budget": verdict.samples_budget,
        "n_dependences": verdict.n_dependences,
        "n_circuits": verdict.n_circuits,
        "n_sampled": verdict.n_sampled,
        "max_lift_residual": float(verdict.max_lift_residual),
        "worst_lift": None if verdict.worst_lift is None else _lift_json(verdict.worst_lift),
        "violation": None
        if not isinstance(verdict.violation, NoLift)
        else _nolift_json(verdict.violation),
    }


def _trial_instance(config: EquivConfig, trial: int) -> Instance:
    rng = np.random.default_rng([config.seed, trial])
    if config.d >= 2:
        n_sets = int(rng.integers(3, 7))
        return _generate(rng, config.d, n_sets, 4, True, "complex", trial)
    n_sets = int(rng.integers(3, 5))
    return _generate(rng, 1, n_sets, 2, False, "complex", trial)


def _run_trial(config: EquivConfig, trial: int) -> dict:
    instance = _trial_instance(config, trial)
    family = instance.family
    ccfg = ConsistencyConfig(samples=config.samples, seed=trial)
    tcfg = TransversalConfig(starts=config.starts, iters=config.iters, seed=trial)
    failures = []
    record = {"trial": trial, "n_sets": len(family.labels)}

    if config.d >= 2:
        witness = witness_from_transversal(instance, instance.planted)
        verdict = check_dependency_consistency(family, witness, ccfg)
        record["consistency"] = _consistency_json(verdict)
        if not verdict.passed:
            failures.append("planted family judged inconsistent")

        direction = find_complex_transversal(family, tcfg)
        if isinstance(direction, NotFound):
            failures.append("direction search found no transversal")
            record["direction"] = {"found": False, "best_margin": float(direction.best)}
        else:
            drep = verify_transversal(direction, family, tol=1e-6)
            record["direction"] = {
                "found": True,
                "normal": [_pair(z) for z in direction.normal.tolist()],
                "offset": _pair(direction.offset),
                "verify_max": float(drep.max_distance),
            }
            if not drep.passed:
                failures.append("direction transversal fails verification at 1e-6")

        emb = embed_family(family)
        x = find_borsuk_zero(emb, witness, tcfg)
        if isinstance(x, NotFound):
            failures.append("zero search exhausted its budget")
            record["borsuk"] = {"found": False, "best_residual": float(x.best)}
        else:
            residual = borsuk_map(x, emb, witness).norm
            H = hyperplane_from_sphere_point(x)
            brep = verify_transversal(H, family, tol=1e-4)
            record["borsuk"] = {
                "found": True,
                "x": [_pair(z) for z in x.coords.tolist()],
                "residual": float(residual),
                "verify_max": float(brep.max_distance),
            }
            if residual > 1e-6:
                failures.append("accepted zero has residual above 1e-6")
            if not brep.passed:
                failures.append("zero transversal fails verification at 1e-4")
    else:
        witness = trivial_witness(family)
        verdict = check_dependency_consistency(family, witness, ccfg)
        record["consistency"] = _consistency_json(verdict)
        b = complex_transversal_for_normal(np.array([1.0 + 0j]), family)
        common = not isinstance(b, NotFound)
        record["oracle"] = {
            "common_point": common,
            "point": _pair(b) if common else None,
        }
        record["agree"] = bool(verdict.passed == common)
        if verdict.passed != common and common:
            failures.append("consistency check failed a family with a common point")

    record["failures"] = failures
    return record


def run_equivalence(config: EquivConfig) -> ExperimentReport:
    """Branch A (d >= 2): planted instances must chain witness construction,
    a consistency pass, both searches, and verification.  Branch B (d = 1):
    the consistency verdict under the trivial witness is compared with the
    exact common-point LP decision.  Assertion failures are recorded per
    trial, never raised."""
    t0 = time.perf_counter()
    records = [_run_trial(config, trial) for trial in range(config.trials)]
    agg = {
        "trials": config.trials,
        "consistency_pass": sum(
            1 for r in records if r["consistency"]["status"] == "pass"
        ),
        "direction_found": sum(
            1 for r in records if r.get("direction", {}).get("found", False)
        ),
        "borsuk_found": sum(1 for r in records if r.get("borsuk", {}).get("found", False)),
        "agreements": sum(1 for r in records if r.get("agree", False)),
        "false_fails": sum(
            1
            for r in records
            if "agree" in r
            and not r["agree"]
            and r["oracle"]["common_point"]
        ),
        "assertion_failures": sum(len(r["failures"]) for r in records),
    }
    return ExperimentReport(
        config, tuple(records), agg, wall_time=time.perf_counter() - t0
    )


# ---------------------------------------------------------------------------
# rational re-verification of stored certificates


def _frac(x) -> Fraction:
    return Fraction(float(x))


def _frac_pair(p) -> tuple:
    return (_frac(p[0]), _frac(p[1]))


def _cmul(u, v):
    return (u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def _reverify_lift(doc: dict, family: Family, tol=Fraction(1, 10**9)) -> list:
    """Exact-arithmetic re-check of a stored lift: nonnegative weights,
    convex vertex certificates, and both dependence equations."""
    problems = []
    labels = doc["labels"]
    coeffs = [_frac_pair(p) for p in doc["coeffs"]]
    r = [_frac(v) for v in doc["r"]]
    if any(v < 0 for v in r):
        problems.append("negative lift weight")
    if all(v == 0 for v in r):
        problems.append("all lift weights vanish")
    poly_of = dict(zip(family.labels, family.sets))
    d = family.dim
    points = [[_frac_pair(p) for p in row] for row in doc["points"]]
    for label, ws, pt, weight in zip(labels, doc["vertex_weights"], points, r):
        if weight == 0:
            continue
        V = poly_of[label].vertices
        fw = [_frac(w) for w in ws]
        if any(w < 0 for w in fw):
            problems.append(f"negative vertex weight for {label}")
        if abs(sum(fw) - 1) > tol:
            problems.append(f"vertex weights of {label} do not sum to one")
        for col in range(d):
            re = sum(w * _frac(V[i, col].real) for i, w in enumerate(fw))
            im = sum(w * _frac(V[i, col].imag) for i, w in enumerate(fw))
            if abs(re - pt[col][0]) > tol or abs(im - pt[col][1]) > tol:
                problems.append(f"stored point of {label} is not the certified combination")
                break
    # sum r_F a_F = 0 and sum (r_F a_F) p_F = 0
    s_re = sum(w * c[0] for w, c in zip(r, coeffs))
    s_im = sum(w * c[1] for w, c in zip(r, coeffs))
    if abs(s_re) > tol or abs(s_im) > tol:
        problems.append("lift violates the coefficient equation")
    for col in range(d):
        t_re = Fraction(0)
        t_im = Fraction(0)
        for w, c, pt in zip(r, coeffs, points):
            prod = _cmul((w * c[0], w * c[1]), pt[col])
            t_re += prod[0]
            t_im += prod[1]
        if abs(t_re) > tol or abs(t_im) > tol:
            problems.append("lift violates the point equation")
            break
    return problems


def _reverify_nolift(doc: dict, family: Family) -> list:
    """Re-run the cone feasibility decision in exact arithmetic: a stored
    no-lift verdict must stay infeasible."""
    from .consistency import AffineDependence

    dep = AffineDependence(
        tuple(doc["labels"]),
        tuple(_unpair(p) for p in doc["coeffs"]),
        origin=doc.get("origin", "circuit"),
    )
    groups = _lift_groups(family, dep.labels, np.asarray(dep.coeffs))
    cone = nontrivial_zero_in_cone(groups, exact=True)
    if cone.certificate.feasible:
        return ["stored no-lift verdict is rationally liftable after all"]
    return []


def reverify_report(doc: dict) -> list:
    """Rational re-check of every stored certificate in a report; returns
    the list of discrepancies (empty means clean)."""
    config = equiv_config_from_json(doc["config"])
    problems = []
    for record in doc["records"]:
        trial = int(record["trial"])
        family = _trial_instance(config, trial).family
        cons = record["consistency"]
        if cons.get("worst_lift"):
            for p in _reverify_lift(cons["worst_lift"], family):
                problems.append(f"trial {trial}: {p}")
        if cons.get("violation"):
            for p in _reverify_nolift(cons["violation"], family):
                problems.append(f"trial {trial}: {p}")
        oracle = record.get("oracle")
        if oracle and oracle.get("common_point"):
            z = _unpair(oracle["point"])
            point = np.array([[z.real, z.imag]])
            for label, poly in family:
                hull = np.column_stack(
                    [poly.vertices[:, 0].real, poly.vertices[:, 0].imag]
                )
                res = hulls_intersect(point, hull, exact=True)
                if not res.feasible:
                    problems.append(
                        f"trial {trial}: oracle point outside {label}"
                    )
    return problems
