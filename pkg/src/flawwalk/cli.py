"""Command-line entry point: ``flawwalk <subcommand> ...``.

Exit status: 0 success, 1 usage or input error, 2 a verification or
condition FAIL, 3 step budget exhausted.

Each run prints one ``key=value`` record.  All keys except ``wall_ms`` are
reproducible from the same arguments and seed.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import corpus
from .aec import AecInstance, aec_solve, format_coloring, load_edge_list, palette_bound
from .causality import CausalityGraph, build_causality, dependency_graph
from .charges import MODES, charge_table
from .conditions import CLUSTER, SIMPLE, evaluate, horizon_T0
from .core import ExplicitInstance, FlawwalkError, load_instance, max_ratio, span
from .forests import forest_of, reconstruct_witness
from .oracle import PreconditionFailed, enumerate_witnesses, verify_lemma1, verify_tightness
from .sat import MTInstance, format_solution, load_dimacs, solve_sat
from .walks import ENGINES, RECURSIVE, RECORD_FULL, read_trajectory_log, write_trajectory_log

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def record(**fields) -> str:
    parts = []
    for k, v in fields.items():
        if isinstance(v, float):
            v = f"{v:.10g}"
        parts.append(f"{k}={v}")
    return " ".join(parts)


def _seeds(args) -> list[int]:
    if args.seed is None:
        args.seed = random.SystemRandom().randrange(2 ** 32)
        print(f"# seed={args.seed}", file=sys.stderr)
    return [args.seed + k for k in range(args.runs)]


def _map(fn, jobs: int, items):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _load_explicit(ref: str) -> ExplicitInstance:
    path = Path(ref)
    if path.exists():
        return load_instance(path)
    if ref in corpus.names():
        return corpus.load(ref)
    raise UsageError(f"no such instance file or corpus name: {ref}")


def _is_dimacs(ref: str) -> bool:
    return Path(ref).suffix in (".cnf", ".dimacs")


# ---------------------------------------------------------------------------
# solve-sat


def _sat_run(job):
    path, seed, engine, psi, max_steps, trace = job
    cnf = load_dimacs(path)
    t0 = time.perf_counter()
    res = solve_sat(cnf, engine, psi, seed, max_steps, record=RECORD_FULL if trace else "none")
    wall = (time.perf_counter() - t0) * 1000
    if trace:
        with open(trace, "w") as fh:
            write_trajectory_log(res.trajectory, MTInstance(cnf), fh)
    rep = res.condition
    rec = record(
        cmd="solve-sat", instance=cnf.name, seed=seed, walk=engine, steps=res.steps,
        outcome=res.outcome,
        verdict=("PASS" if rep.passed else "FAIL") if rep else "NA",
        max_zeta=rep.max_zeta if rep else "NA",
        wall_ms=wall,
    )
    return rec, res.assignment, res.outcome


def cmd_solve_sat(args) -> int:
    seeds = _seeds(args)
    jobs = [(args.input, s, args.walk, args.psi, args.max_steps, _trace_path(args, s, len(seeds)))
            for s in seeds]
    results = _map(_sat_run, args.jobs, jobs)
    status = EXIT_OK
    for (rec, assignment, outcome), seed in zip(results, seeds):
        if assignment is not None and (len(seeds) == 1 or args.output):
            _emit(args, format_solution(assignment), seed, len(seeds))
        print(rec)
        if outcome == "budget":
            status = EXIT_BUDGET
    return status


# ---------------------------------------------------------------------------
# solve-aec


def _aec_run(job):
    path, seed, engine, max_steps, q, trace = job
    graph = load_edge_list(path)
    t0 = time.perf_counter()
    res = aec_solve(graph, seed, max_steps, q=q, engine=engine, record=RECORD_FULL if trace else "none")
    wall = (time.perf_counter() - t0) * 1000
    if trace and res.trajectory is not None:
        with open(trace, "w") as fh:
            write_trajectory_log(res.trajectory, AecInstance(graph, q), fh)
    stats = res.stats()
    rec = record(
        cmd="solve-aec", instance=Path(path).stem, seed=seed, walk=engine, **stats,
        palette_bound=palette_bound(res.d, res.max_degree), wall_ms=wall,
    )
    text = format_coloring(graph, res.coloring) if res.coloring is not None else None
    return rec, text, res.outcome


def cmd_solve_aec(args) -> int:
    seeds = _seeds(args)
    jobs = [(args.input, s, args.walk, args.max_steps, args.q, _trace_path(args, s, len(seeds)))
            for s in seeds]
    results = _map(_aec_run, args.jobs, jobs)
    status = EXIT_OK
    for (rec, text, outcome), seed in zip(results, seeds):
        if text is not None and (len(seeds) == 1 or args.output):
            _emit(args, text, seed, len(seeds))
        print(rec)
        if outcome == "budget":
            status = EXIT_BUDGET
    return status


def _trace_path(args, seed, n):
    if not args.trace:
        return None
    return args.trace if n == 1 else f"{args.trace}.{seed}"


def _emit(args, text, seed, n):
    if args.output:
        path = args.output if n == 1 else f"{args.output}.{seed}"
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# check / charges / causality


def cmd_check(args) -> int:
    variant = args.variant
    if _is_dimacs(args.instance):
        inst = MTInstance(load_dimacs(args.instance))
        gammas = inst.gammas()
        R = inst.causality()
        psi = {c: args.psi for c in R.nodes}
        sp = sorted(inst.declared_span())
        xi = 1.0
    else:
        inst = _load_explicit(args.instance)
        gammas = charge_table(inst, args.mode).gammas()
        R = build_causality(inst)
        if inst.relation is not None:
            declared = CausalityGraph.from_mapping(inst.relation, inst.order)
            if not declared.contains(R):
                print("# declared relation does not contain the causality digraph; using the scanned one")
            else:
                R = declared
        psi = {f: args.psi for f in R.nodes}
        sp = sorted(span(inst), key=inst.flaw_key)
        xi = max_ratio(inst)
    G = dependency_graph(R)
    T0 = horizon_T0(xi, psi, sp, "ind" if variant == CLUSTER else "all", G)
    rep = evaluate(gammas, psi, R, variant, T0=T0)
    sys.stdout.write(rep.to_text(args.s))
    for line in rep.to_records():
        print(line)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_charges(args) -> int:
    inst = _load_explicit(args.instance)
    sys.stdout.write(charge_table(inst, args.mode).to_text())
    return EXIT_OK


def cmd_causality(args) -> int:
    inst = _load_explicit(args.instance)
    C = build_causality(inst)
    print("# causality digraph")
    sys.stdout.write(C.to_text())
    print("# dependency graph")
    sys.stdout.write(dependency_graph(C).to_text())
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle / forest


def cmd_oracle(args) -> int:
    inst = _load_explicit(args.instance)
    gammas = charge_table(inst, args.mode).gammas()
    status = EXIT_OK
    engines = ENGINES if args.walk == "both" else (args.walk,)
    for engine in engines:
        dist = enumerate_witnesses(inst, engine, args.t, keep_trajectories=True)
        print(f"# {inst.name} walk={engine} t={args.t} sequences={len(dist.probabilities)} "
              f"ended_early={dist.ended_early:.10g}")
        rep = verify_lemma1(inst, engine, args.t, gammas, dist=dist)
        sys.stdout.write(rep.to_text())
        if not rep.passed:
            status = EXIT_FAIL
        try:
            tight = verify_tightness(inst, engine, args.t, dist=dist)
        except PreconditionFailed as exc:
            print(f"two-sided bound: SKIPPED ({exc})")
        else:
            sys.stdout.write(tight.to_text())
            if not tight.passed:
                status = EXIT_FAIL
    return status


def cmd_forest(args) -> int:
    with open(args.trace) as fh:
        traj = read_trajectory_log(fh)
    forest = forest_of(traj)
    if args.format == "canonical":
        print(forest.canonical())
    else:
        sys.stdout.write(forest.to_text())
    ok = reconstruct_witness(forest) == traj.witness
    print(record(vertices=len(forest), steps=len(traj.steps), roundtrip="PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flawwalk", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def runs(q):
        q.add_argument("--input", required=True)
        q.add_argument("--seed", type=int)
        q.add_argument("--runs", type=int, default=1)
        q.add_argument("--jobs", type=int, default=1)
        q.add_argument("--max-steps", type=int, default=1_000_000)
        q.add_argument("--walk", choices=ENGINES, default=RECURSIVE)
        q.add_argument("--trace", help="write the trajectory log here")
        q.add_argument("--output", help="write the solution here instead of stdout")

    q = sub.add_parser("solve-sat", help="solve a DIMACS CNF by clause resampling")
    runs(q)
    q.add_argument("--psi", type=float, default=0.5)
    q.set_defaults(func=cmd_solve_sat)

    q = sub.add_parser("solve-aec", help="acyclic edge coloring of an edge list")
    runs(q)
    q.add_argument("--q", type=int, help="override Q (palette slack)")
    q.set_defaults(func=cmd_solve_aec)

    q = sub.add_parser("check", help="evaluate the convergence condition")
    q.add_argument("--instance", "--input", dest="instance", required=True)
    q.add_argument("--psi", type=float, required=True)
    q.add_argument("--variant", choices=(SIMPLE, CLUSTER), default=SIMPLE)
    q.add_argument("--mode", choices=("auto",) + MODES, default="auto")
    q.add_argument("--s", type=float, default=6.0, help="tail parameter for the step bound")
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("oracle", help="exact witness-bound verification")
    q.add_argument("--instance", "--input", dest="instance", required=True)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--walk", choices=ENGINES + ("both",), default="both")
    q.add_argument("--mode", choices=("auto",) + MODES, default="auto")
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("forest", help="witness forest of a trajectory log")
    q.add_argument("--trace", "--input", dest="trace", required=True)
    q.add_argument("--format", choices=("text", "canonical"), default="text")
    q.set_defaults(func=cmd_forest)

    q = sub.add_parser("charges", help="flaw charge table of an explicit instance")
    q.add_argument("--instance", "--input", dest="instance", required=True)
    q.add_argument("--mode", choices=("auto",) + MODES, default="auto")
    q.set_defaults(func=cmd_charges)

    q = sub.add_parser("causality", help="dump the causality digraph and dependency graph")
    q.add_argument("--instance", "--input", dest="instance", required=True)
    q.set_defaults(func=cmd_causality)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "runs", 1) < 1 or getattr(args, "jobs", 1) < 1:
        parser.error("--runs and --jobs must be positive")
    if getattr(args, "max_steps", 1) < 1:
        parser.error("--max-steps must be at least 1")
    if getattr(args, "t", 0) < 0:
        parser.error("--t must be non-negative")
    if getattr(args, "psi", 1.0) is not None and not getattr(args, "psi", 1.0) > 0:
        parser.error("--psi must be positive")
    try:
        return args.func(args)
    except (UsageError, FlawwalkError, OSError, ValueError) as exc:
        print(f"flawwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
