"""Command line front end: generate, check, find, verify, equiv, plot.

Exit codes: 0 for pass/found, 1 for fail/not-found, 2 for usage or input
errors."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .consistency import ConsistencyConfig, check_dependency_consistency, trivial_witness
from .geometry import ComplexHyperplane, PoleError, embed_family, hyperplane_from_sphere_point
from .harness import (
    EquivConfig,
    GenSpec,
    Instance,
    dumps_canonical,
    gen_instance,
    read_instance,
    run_equivalence,
    witness_from_transversal,
    write_instance,
    write_report,
    _pair,
    _unpair,
)
from .plotting import plot_instance
from .transversal import (
    NotFound,
    RealHyperplane,
    TransversalConfig,
    borsuk_map,
    borsuk_zero_dependence,
    find_borsuk_zero,
    find_complex_transversal,
    real_hyperplane_transversal,
    verify_transversal,
)


def _hyperplane_json(T) -> dict:
    if isinstance(T, RealHyperplane):
        return {
            "normal": [float(u) for u in T.normal.tolist()],
            "offset": float(T.offset),
        }
    return {
        "normal": [_pair(z) for z in T.normal.tolist()],
        "offset": _pair(T.offset),
    }


def _hyperplane_from_json(doc: dict, ambient: str):
    if ambient == "real":
        return RealHyperplane(np.asarray(doc["normal"], dtype=float), float(doc["offset"]))
    normal = np.array([_unpair(p) for p in doc["normal"]], dtype=complex)
    return ComplexHyperplane(normal, _unpair(doc["offset"]))


def _load_instance(path: str) -> Instance:
    try:
        return read_instance(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read instance {path}: {exc}")


def _cmd_gen(args) -> int:
    spec = GenSpec(
        d=args.d,
        n_sets=args.sets,
        vertices_per_set=args.verts,
        planted=args.planted,
        seed=args.seed,
        ambient=args.ambient,
    )
    instance = gen_instance(spec)
    write_instance(instance, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_check(args) -> int:
    instance = _load_instance(args.instance)
    family = instance.family
    if family.ambient != "complex":
        print("error: consistency checking expects a complex instance", file=sys.stderr)
        return 2
    if instance.witness is not None:
        witness, source = instance.witness, "stored witness"
    elif instance.planted is not None:
        witness = witness_from_transversal(instance, instance.planted)
        source = "witness from planted transversal"
    else:
        witness, source = trivial_witness(family), "trivial witness"
    config = ConsistencyConfig(samples=args.samples, residual_tol=args.tol, exact=args.exact)
    verdict = check_dependency_consistency(family, witness, config)
    print(f"using {source} (target dimension {witness.k})")
    print(
        f"consistency: {verdict.status}"
        f" ({verdict.n_dependences} dependences, {verdict.n_circuits} circuits,"
        f" {verdict.n_sampled} sampled, max lift residual {verdict.max_lift_residual:.3e})"
    )
    if verdict.violation is not None:
        dep = verdict.violation.dependence
        print(f"unliftable dependence on {list(dep.labels)} (exact={verdict.violation.exact})")
    return 0 if verdict.passed else 1


def _borsuk_witness(instance: Instance):
    d = instance.d
    if instance.witness is not None and instance.witness.k == d - 1:
        return instance.witness
    if instance.planted is not None:
        return witness_from_transversal(instance, instance.planted)
    if d == 1:
        return trivial_witness(instance.family)
    return None


def _cmd_find(args) -> int:
    instance = _load_instance(args.instance)
    family = instance.family
    config = TransversalConfig(starts=args.starts, zero_tol=args.zero_tol, seed=args.seed)
    if family.ambient == "real":
        result = real_hyperplane_transversal(family, config)
        if isinstance(result, NotFound):
            print(f"not found: {result.reason} (best margin {result.best:.3e})")
            return 1
        print(dumps_canonical(_hyperplane_json(result)), end="")
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(dumps_canonical(_hyperplane_json(result)))
        return 0
    if args.method == "direction":
        result = find_complex_transversal(family, config)
        if isinstance(result, NotFound):
            print(f"not found: {result.reason} (best margin {result.best:.3e})")
            return 1
        T = result
        verify_tol = 1e-6
    else:
        witness = _borsuk_witness(instance)
        if witness is None:
            print(
                "error: borsuk method needs a witness with target dimension d-1"
                " or a planted transversal",
                file=sys.stderr,
            )
            return 2
        emb = embed_family(family)
        x = find_borsuk_zero(emb, witness, config)
        if isinstance(x, NotFound):
            print(f"not found: {x.reason} (best residual {x.best:.3e})")
            return 1
        try:
            T = hyperplane_from_sphere_point(x)
        except PoleError:
            print("not found: accepted zero sits at the pole")
            return 1
        residual = borsuk_map(x, emb, witness).norm
        print(f"zero residual {residual:.3e}")
        verify_tol = 1e-4
        rep = verify_transversal(T, family, tol=verify_tol)
        if not rep.passed:
            # a zero whose hyperplane misses a set convicts the witness:
            # its dependence has no nonnegative lift
            dep = borsuk_zero_dependence(x, emb, witness)
            labels = list(dep.labels) if dep is not None else []
            print(
                f"not found: zero does not yield a transversal"
                f" (verify max {rep.max_distance:.3e});"
                f" witness convicted by the dependence on {labels}"
            )
            return 1
    rep = verify_transversal(T, family, tol=verify_tol)
    print(dumps_canonical(_hyperplane_json(T)), end="")
    print(f"verify max distance {rep.max_distance:.3e}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dumps_canonical(_hyperplane_json(T)))
    return 0


def _cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    try:
        with open(args.transversal) as fh:
            doc = json.load(fh)
        T = _hyperplane_from_json(doc, instance.ambient)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: cannot read transversal {args.transversal}: {exc}", file=sys.stderr)
        return 2
    if instance.ambient == "real":
        worst = 0.0
        for _, poly in instance.family:
            pr = poly.vertices @ T.normal
            gap = max(pr.min() - T.offset, T.offset - pr.max(), 0.0)
            worst = max(worst, float(gap))
        print(f"max distance {worst:.3e}")
        return 0 if worst <= args.tol else 1
    rep = verify_transversal(T, instance.family, tol=args.tol)
    for label, dist in rep.distances:
        print(f"{label}: {dist:.3e}")
    print(f"max distance {rep.max_distance:.3e} ({'pass' if rep.passed else 'fail'})")
    return 0 if rep.passed else 1


def _cmd_equiv(args) -> int:
    config = EquivConfig(trials=args.trials, d=args.d, seed=args.seed)
    report = run_equivalence(config)
    write_report(report, args.output)
    agg = report.aggregates
    print(
        f"wrote {args.output}: {agg['trials']} trials,"
        f" {agg['consistency_pass']} consistency passes,"
        f" {agg['assertion_failures']} assertion failures,"
        f" {agg['false_fails']} false fails"
        f" ({report.wall_time:.1f}s)"
    )
    return 0 if agg["assertion_failures"] == 0 and agg["false_fails"] == 0 else 1


def _cmd_plot(args) -> int:
    instance = _load_instance(args.instance)
    T = instance.planted
    if args.transversal:
        try:
            with open(args.transversal) as fh:
                T = _hyperplane_from_json(json.load(fh), instance.ambient)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            print(f"error: cannot read transversal: {exc}", file=sys.stderr)
            return 2
    try:
        svg = plot_instance(instance, T)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    with open(args.output, "w") as fh:
        fh.write(svg + "\n")
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvlab",
        description="Hyperplane transversals of convex polytope families:"
        " generation, consistency checking, search, and verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sets", type=int, required=True)
    p.add_argument("--verts", type=int, default=4)
    p.add_argument("--planted", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ambient", choices=("real", "complex"), default="complex")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("check", help="dependency-consistency check")
    p.add_argument("instance")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("find", help="search for a transversal")
    p.add_argument("instance")
    p.add_argument("--method", choices=("direction", "borsuk"), default="direction")
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--zero-tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_find)

    p = sub.add_parser("verify", help="verify a transversal against an instance")
    p.add_argument("instance")
    p.add_argument("--transversal", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("equiv", help="run the equivalence experiment")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("plot", help="emit an SVG diagnostic")
    p.add_argument("instance")
    p.add_argument("--transversal")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 2
        raise
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
