import argparse
import logging
import sys
import time

from bellman import certify_bellman, solve_bellman
from errors import CertificationViolationError, FixedPointError, InputError, PreconditionError
from gauges import CONDITIONS, certify_map, default_grid, midpoint_gauge
from iterate import StopRule, audit_telescoping, brute_force_fixed_points, multivalued_orbit, picard_iterate
from metric_core import MultiValuedMap, hausdorff_components, hausdorff_distance
from problem_file import Problem, located
from selftest import run_selftest
from utils import DEFAULT_SEED, SCHEMA_VERSION, TELESCOPE_TOL, input_digest, write_report

logger = logging.getLogger("cli")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

DEFAULT_MAX_ITER = {"iterate": 1000, "bellman": 10_000}
DEFAULT_TOL = 1e-10


def summary(ok: bool | None, message: str) -> None:
    mark = {True: "✅", False: "❌", None: "⚠️"}[ok]
    print(f"{mark} {message}", file=sys.stderr)


def load_problem(args) -> tuple[Problem, str]:
    if not args.input:
        raise InputError("--input: a problem file is required for this command")
    try:
        with open(args.input, "rb") as f:
            data = f.read()
    except OSError as e:
        raise InputError(f"{args.input}: {e.strerror}") from e
    return Problem.from_bytes(data, args.input), input_digest(data)


def run_certify(args) -> tuple[int, dict]:
    problem, digest = load_problem(args)
    if args.bellman:
        bp = problem.bellman_problem()
        cert = certify_bellman(bp, args.samples, args.seed)
        if cert.passed:
            summary(True, f"bellman aggregator certified {cert.certified} (beta={cert.beta})")
        else:
            summary(False, "bellman aggregator is neither strict-rho nor banach-beta")
        return (EXIT_PASS if cert.passed else EXIT_FAIL), {"input_digest": digest, "certificate": cert.to_dict()}

    if not args.map or not args.condition:
        raise InputError("--map/--condition: certify needs a map and a condition (or --bellman)")
    space = problem.space()
    T = problem.map(args.map)
    gauge = problem.gauge(args.gauge) if args.gauge else None
    potential = problem.potential(args.potential) if args.potential else None
    with located(f"--condition {args.condition}"):
        cert = certify_map(
            space, T, args.condition, gauge=gauge, potential=potential, map_name=args.map, potential_name=args.potential
        )
    if cert.passed:
        summary(True, f"{args.condition} certificate passed for map {args.map} ({cert.pairs_checked} pairs)")
    else:
        summary(False, f"{args.condition} certificate failed for map {args.map}: witness {cert.witness.to_dict()}")
    result = cert.to_dict()
    if cert.witness is not None and cert.witness.points:
        result["witness_labels"] = [space.labels[p] for p in cert.witness.points]
    return (EXIT_PASS if cert.passed else EXIT_FAIL), {"input_digest": digest, "certificate": result}


def run_iterate(args) -> tuple[int, dict]:
    problem, digest = load_problem(args)
    if not args.map or args.start is None:
        raise InputError("--map/--start: iterate needs a map and a start label")
    space = problem.space()
    T = problem.map(args.map)
    with located("--start"):
        x0 = space.index(args.start)
    gauge = problem.gauge(args.gauge) if args.gauge else None
    potential = problem.potential(args.potential) if args.potential else None
    stop = StopRule(max_iter=args.max_iter or DEFAULT_MAX_ITER["iterate"])

    if isinstance(T, MultiValuedMap):
        if gauge is None:
            raise InputError("--gauge: set-valued orbits need an eta gauge")
        theta = problem.gauge(args.theta) if args.theta else midpoint_gauge(gauge, default_grid(space), strict=args.strict)
        trace = multivalued_orbit(space, T, x0, theta, stop=stop, eta=gauge, strict=args.strict)
    else:
        trace = picard_iterate(space, T, x0, stop=stop, gauge=gauge, potential=potential, strict=args.strict)

    result = {"input_digest": digest, "trace": trace.to_dict(space)}
    result["oracle_fixed_points"] = [space.labels[x] for x in brute_force_fixed_points(space, T)]
    if trace.fixed_point is not None:
        result["fixed_point"] = space.labels[trace.fixed_point]
    if trace.potential is not None or trace.caristi_values is not None:
        violations = audit_telescoping(space, trace, args.tol if args.tol is not None else TELESCOPE_TOL)
        result["telescoping_audit"] = {"violations": violations, "ok": not violations}
    if trace.fixed_point is not None:
        summary(True, f"orbit from {args.start} reached fixed point {result['fixed_point']} in {trace.steps} steps")
    else:
        summary(None, f"orbit from {args.start} ended with termination={trace.termination}")
    return EXIT_PASS, result


def run_hausdorff(args) -> tuple[int, dict]:
    problem, digest = load_problem(args)
    space = problem.space()
    A = problem.point_set(args.set_a)
    B = problem.point_set(args.set_b)
    forward, backward = hausdorff_components(space, A, B)
    h = hausdorff_distance(space, A, B)
    summary(True, f"H({args.set_a}, {args.set_b}) = {h:g}")
    return EXIT_PASS, {
        "input_digest": digest,
        "a": [space.labels[i] for i in A],
        "b": [space.labels[i] for i in B],
        "hausdorff": h,
        "directed": {"a_to_b": forward, "b_to_a": backward},
    }


def parse_h0(text: str | None, n: int) -> list[float]:
    if text is None:
        return [0.0] * n
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as e:
        raise InputError(f"--h0: {e}") from e
    if len(values) != n:
        raise InputError(f"--h0: {len(values)} values for {n} states")
    return values


def run_bellman(args) -> tuple[int, dict]:
    problem, digest = load_problem(args)
    bp = problem.bellman_problem()
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    if not tol > 0.0:
        raise InputError(f"--tol: must be positive, got {tol}")
    h0 = parse_h0(args.h0, bp.n_states)
    cert = certify_bellman(bp, args.samples, args.seed)
    result = {"input_digest": digest, "certificate": cert.to_dict()}
    if not cert.passed:
        if args.strict:
            raise PreconditionError("bellman problem is not certified (neither strict-rho nor banach-beta)")
        summary(False, "bellman problem is not certified; value iteration skipped")
        return EXIT_FAIL, result
    h, trace = solve_bellman(bp, h0, tol=tol, max_iter=args.max_iter or DEFAULT_MAX_ITER["bellman"], certificate=cert)
    result["solution"] = dict(zip(bp.states, h.to_list()))
    result["trace"] = trace.to_dict()
    if trace.converged:
        summary(True, f"value iteration converged in {trace.iterations} iterations (residual {trace.residual:.3g})")
        return EXIT_PASS, result
    summary(False, f"value iteration did not converge in {trace.iterations} iterations")
    return EXIT_FAIL, result


def run_selftest_command(args) -> tuple[int, dict]:
    report = run_selftest(seed=args.seed, quick=args.quick)
    for c in report["criteria"]:
        summary(c["verdict"] == "pass", f"criterion {c['criterion']} {c['name']}: {c['checked']} checked")
    timings = report.pop("timings")
    return (EXIT_PASS if report["passed"] else EXIT_FAIL), {"selftest": report, "selftest_timings": timings}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=str, help="Problem file (JSON).", default=None)
    common.add_argument("--output", type=str, help="Report path (default: stdout).", default=None)
    common.add_argument("--seed", type=int, help="Seed for sampled checks.", default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, help="Tolerance (bellman stop rule, telescoping audit).", default=None)
    common.add_argument("--max-iter", type=int, help="Iteration cap.", default=None)
    common.add_argument("--strict", action="store_true", help="Refuse uncertified inputs (exit 2).")
    common.add_argument("--debug", action="store_true", help="Enable debug logging on stderr.")

    parser = argparse.ArgumentParser(
        description="Certify contraction conditions, iterate to fixed points and solve Bellman equations on finite problems."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    certify = sub.add_parser("certify", parents=[common], help="Certify a map (or a Bellman aggregator).")
    certify.add_argument("--map", type=str, default=None)
    certify.add_argument("--condition", choices=CONDITIONS, default=None)
    certify.add_argument("--gauge", type=str, default=None)
    certify.add_argument("--potential", type=str, default=None)
    certify.add_argument("--bellman", action="store_true", help="Certify the file's Bellman aggregator instead.")
    certify.add_argument("--samples", type=int, default=256)
    certify.set_defaults(func=run_certify)

    iterate = sub.add_parser("iterate", parents=[common], help="Run a Picard or set-valued orbit.")
    iterate.add_argument("--map", type=str, default=None)
    iterate.add_argument("--start", type=str, default=None)
    iterate.add_argument("--gauge", type=str, default=None)
    iterate.add_argument("--theta", type=str, default=None, help="Selection gauge for set-valued maps.")
    iterate.add_argument("--potential", type=str, default=None)
    iterate.set_defaults(func=run_iterate)

    hausdorff = sub.add_parser("hausdorff", parents=[common], help="Hausdorff distance between two point sets.")
    hausdorff.add_argument("set_a", help="Named set or comma-separated labels.")
    hausdorff.add_argument("set_b", help="Named set or comma-separated labels.")
    hausdorff.set_defaults(func=run_hausdorff)

    bellman = sub.add_parser("bellman", parents=[common], help="Certify and solve the file's Bellman problem.")
    bellman.add_argument("--h0", type=str, default=None, help="Comma-separated initial values.")
    bellman.add_argument("--samples", type=int, default=256)
    bellman.set_defaults(func=run_bellman)

    selftest = sub.add_parser("selftest", parents=[common], help="Run the seeded acceptance sweeps.")
    selftest.add_argument("--quick", action="store_true", help="Reduced sweep sizes.")
    selftest.set_defaults(func=run_selftest_command)
    return parser


def command_echo(args) -> dict:
    echo = {k: v for k, v in vars(args).items() if k not in ("func", "output", "debug")}
    return echo


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    start = time.perf_counter()
    try:
        code, result = args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CertificationViolationError as e:
        print(f"error: step {e.step}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except FixedPointError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT

    timings = {"total_s": time.perf_counter() - start}
    timings.update(result.pop("selftest_timings", {}))
    report = {
        "schema": SCHEMA_VERSION,
        "command": command_echo(args),
        "input_digest": result.pop("input_digest", None),
        "result": result,
        "timings": timings,
    }
    try:
        write_report(report, args.output)
    except OSError as e:
        print(f"error: {args.output}: {e.strerror}", file=sys.stderr)
        return EXIT_INPUT
    logger.debug("exit code %d", code)
    return code


if __name__ == "__main__":
    sys.exit(main())
