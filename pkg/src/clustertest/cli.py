"""clustertest command line.

Exit codes: 0 accept / all checks pass, 1 reject / some check fails,
2 usage error, 3 a size guard refused the computation.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from .errors import GraphFormatError, GuardExceeded
from .experiments import Policy, bench_query_scaling, scaling_csv, strictly_decreasing, two_cluster_family
from .generators import PlantedInstance, k_cluster, random_regular, two_cluster, write_instance
from .graph import load_graph
from .spectral import eigendecompose, graph_spectrum, walk_matrix
from .tester import Constants, cluster_test, derive_params
from .verifier import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"# generated seed {args.seed}", file=sys.stderr)
    return args.seed


def _emit(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    print(text)


def _constants(args) -> Constants:
    return Constants(c22=args.c22, c33=args.c33, c35=args.c35, c310=args.c310)


def cmd_gen(args) -> int:
    seed = _seed(args)
    if args.family == "two_cluster":
        inst = two_cluster(args.n_per_part, args.d_inner, args.cross, seed)
    elif args.family == "k_cluster":
        inst = k_cluster(args.n_per_part, args.k, args.d_inner, args.cross, seed)
    else:
        g = random_regular(args.n, args.d, seed)
        inst = PlantedInstance(g, [frozenset(range(g.n))], seed, {"name": "random_regular", "n": args.n, "d": args.d})
    side = write_instance(inst, args.out)
    print(json.dumps({"graph": str(args.out), "sidecar": str(side), "seed": seed, "family": inst.family,
                      "n": inst.graph.n, "d": inst.graph.d}))
    return EXIT_OK


def _phi_from_sidecar(path: str) -> float | None:
    side = Path(path + ".json")
    if not side.exists():
        return None
    cert = json.loads(side.read_text()).get("certificates")
    if not cert:
        return None
    phi = float(cert["phi_hat"])
    return phi if 0 < phi else None


def cmd_test(args) -> int:
    seed = _seed(args)
    g = load_graph(args.graph)
    phi = args.phi if args.phi is not None else _phi_from_sidecar(args.graph)
    if phi is None:
        raise ValueError("--phi is required when the graph has no certified sidecar")
    phi = min(phi, 1.0)
    kw = {}
    if args.mode == "practical":
        kw = dict(R=args.rounds, t=args.walk_len, Lam=args.Lam, xi=args.xi)
    params = derive_params(g.n, g.d, args.eps, phi, args.mu, _constants(args), args.mode, **kw)
    print(json.dumps({"config": params.to_dict(), "seed": seed}), file=sys.stderr)
    report = cluster_test(g, params, seed)
    _emit(report.to_dict(), args.json)
    return EXIT_OK if report.accepted else EXIT_FAIL


def cmd_spectrum(args) -> int:
    g = load_graph(args.graph)
    if args.matrix == "walk":
        values = eigendecompose(walk_matrix(g)).eigenvalues
    else:
        values = graph_spectrum(g).eigenvalues
    _emit([float(x) for x in values], args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _seed(args)
    lines = []

    def show(rep):
        line = rep.to_json()
        lines.append(line)
        print(line, flush=True)

    reports = run_suite(args.suite, seed=seed, gram_trials=args.trials, constants=_constants(args), on_report=show)
    if args.json:
        Path(args.json).write_text("\n".join(lines) + "\n")
    return EXIT_FAIL if any(r.status == "fail" for r in reports) else EXIT_OK


def cmd_bench(args) -> int:
    seed = _seed(args)
    sizes = [int(s) for s in args.sizes.split(",")]
    policy = Policy(eps=args.eps, phi=args.phi, mu=args.mu, R=args.rounds, t=args.walk_len,
                    Lam=args.Lam, xi=args.xi, constants=_constants(args))
    print(json.dumps({"sizes": sizes, "seeds": args.seeds, "seed": seed, "policy": repr(policy)}), file=sys.stderr)
    fam = lambda n: two_cluster_family(n, args.d_inner, args.cross)  # noqa: E731
    rows = bench_query_scaling(sizes, policy, args.seeds, fam, base_seed=seed, jobs=args.jobs)
    text = scaling_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    print(text, end="")
    ok = strictly_decreasing([r.queries_per_n for r in rows]) and all(r.within_bound for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clustertest", description="Sublinear 2-clusterability tester and exact oracles.")
    sub = p.add_subparsers(dest="command", required=True)

    def shared(sp, graph=False):
        if graph:
            sp.add_argument("--graph", required=True, help="edge-list file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--json", default=None, help="also write the output here")
        sp.add_argument("--jobs", type=int, default=1)

    def consts(sp):
        sp.add_argument("--c22", type=float, default=1.0)
        sp.add_argument("--c33", type=float, default=1.0)
        sp.add_argument("--c35", type=float, default=1.0)
        sp.add_argument("--c310", type=float, default=1.0)

    g = sub.add_parser("gen", help="generate a certified instance")
    shared(g)
    g.add_argument("--family", choices=["two_cluster", "k_cluster", "random_regular"], required=True)
    g.add_argument("--n-per-part", type=int, default=64)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--d-inner", type=int, default=8)
    g.add_argument("--cross", type=int, default=1)
    g.add_argument("--n", type=int, default=64)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("test", help="run the tester on a graph")
    shared(t, graph=True)
    t.add_argument("--eps", type=float, default=0.1)
    t.add_argument("--phi", type=float, default=None, help="default: phi_hat from the sidecar certificate")
    t.add_argument("--mu", type=float, default=1e-4)
    t.add_argument("--mode", choices=["paper", "practical"], default="practical")
    t.add_argument("--rounds", type=float, default=None)
    t.add_argument("--walk-len", type=int, default=None)
    t.add_argument("--lambda", dest="Lam", type=float, default=None)
    t.add_argument("--xi", type=float, default=None)
    consts(t)
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("spectrum", help="eigenvalues of L (or M) as a JSON array")
    shared(s, graph=True)
    s.add_argument("--matrix", choices=["laplacian", "walk"], default="laplacian")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="numeric checks of the analysis bounds on the bundled corpus")
    shared(v)
    v.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    v.add_argument("--trials", type=int, default=1000, help="random pairs for the gram suite")
    consts(v)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="oracle queries versus n on two-cluster instances")
    shared(b)
    b.add_argument("--sizes", default="1024,4096,16384")
    b.add_argument("--seeds", type=int, default=1)
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--phi", type=float, default=0.1)
    b.add_argument("--mu", type=float, default=1e-4)
    b.add_argument("--rounds", type=float, default=40)
    b.add_argument("--walk-len", type=int, default=None)
    b.add_argument("--lambda", dest="Lam", type=float, default=None)
    b.add_argument("--xi", type=float, default=None)
    b.add_argument("--d-inner", type=int, default=8)
    b.add_argument("--cross", type=int, default=4)
    b.add_argument("--csv", default=None)
    consts(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (GraphFormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
