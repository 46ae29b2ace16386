"""Command-line front end.

Exit codes: 0 pass, 1 property violation, 2 input error, 3 inconclusive at
the degree bound.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .formats import Instance, InstanceError, load
from .graded import (
    DegreeBudgetExceeded,
    is_regular_on,
    koszul_strand_profile,
    lech_multiplicity_table,
    lech_table,
    shift_check,
    validate_multiplicity_system,
)
from .koszul import (
    ActionSystem,
    EulerProfile,
    Verdict,
    boundary_identities,
    chi0_dichotomy_check,
    dump_system,
    euler_profile,
    verify_serre,
)
from .lab import DEFAULT_ORACLE_BOUND, SHAPES, GeneratorSpec, instance_at
from .lift import construct_lift, verify_base_change
from .verify import check_instance, oracle_check

EXIT_PASS, EXIT_VIOLATION, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def _exit_code(verdicts) -> int:
    statuses = [v.status for v in verdicts]
    if "fail" in statuses:
        return EXIT_VIOLATION
    if "inconclusive" in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _report(command: str, echo, body: dict, verdicts, started: float, provenance=None) -> dict:
    return {
        "schema_version": 1,
        "command": command,
        "version": __version__,
        "instance": echo,
        **body,
        "verdicts": [v.to_dict() for v in verdicts],
        "provenance": provenance or {},
        "timing": {"seconds": round(time.perf_counter() - started, 6)},
    }


# --- human-readable rendering ---------------------------------------------------


def _profile_table(profile: dict) -> list[str]:
    lengths, chis = profile["homology_lengths"], profile["chis"]
    lines = ["  i   λ(H_i)   χ_i"]
    for i, (h, c) in enumerate(zip(lengths, chis)):
        lines.append(f"  {i:<3} {h:<8} {c}")
    return lines


def render(report: dict) -> str:
    lines = [f"{report['command']}"]
    if "profile" in report:
        lines += _profile_table(report["profile"])
    if "strands" in report:
        s = report["strands"]
        lines.append(f"  degree bound {s['degree_bound']}, window {s['window']}, stabilized={s['stabilized']}")
        lines.append("  d   " + "  ".join(f"H_{i}" for i in range(len(s["totals"]))))
        for d, row in s["table"].items():
            if any(row):
                lines.append(f"  {d:<3} " + "  ".join(f"{x:<3}" for x in row))
        lines.append("  totals " + " ".join(map(str, s["totals"])) + "   χ " + " ".join(map(str, s["chis"])))
    if "lech" in report:
        lech = report["lech"]
        lines.append("  t   λ(M/(y^t)M)")
        for t, length in lech["rows"]:
            lines.append(f"  {t:<3} {length}")
        lines.append(f"  leading coefficient {lech['leading_coefficient']}")
    if "summary" in report:
        lines.append("  " + json.dumps(report["summary"], sort_keys=True))
    for v in report["verdicts"]:
        lines.append(f"  [{v['status'].upper()}] {v['name']}")
        if v["status"] != "pass" and "counterexample" in v["details"]:
            lines.append("    counterexample: " + json.dumps(v["details"]["counterexample"], sort_keys=True))
    return "\n".join(lines)


def _emit(report: dict, as_json: bool):
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(render(report))


# --- commands -----------------------------------------------------------------------


def _finite_verdicts(system: ActionSystem, profile: EulerProfile, oracle_bound: int) -> list[Verdict]:
    verdicts = [verify_serre(system, profile), chi0_dichotomy_check(system, profile), boundary_identities(system)]
    cert = construct_lift(system)
    verdicts.append(Verdict("lift", cert.passed, cert.to_dict()))
    verdicts.append(verify_base_change(system, cert, profile))
    oracle = oracle_check(system, profile, oracle_bound)
    if oracle is not None:
        verdicts.append(oracle)
    return verdicts


def cmd_compute(inst: Instance, args) -> tuple[dict, int]:
    started = time.perf_counter()
    if inst.backend == "finite-length":
        system = inst.action_system()
        profile = euler_profile(system)
        verdicts = _finite_verdicts(system, profile, args.oracle_bound)
        body = {"profile": profile.to_dict(), "module_length": system.module.length()}
    else:
        M = inst.graded_module()
        y = inst.koszul_sequence()
        report = koszul_strand_profile(M, y, args.degree_bound)
        body = {"strands": report.to_dict(), "multiplicity_system": validate_multiplicity_system(M, y, args.degree_bound)}
        serre = Verdict("serre", all(c >= 0 for c in report.chis), {"chis": list(report.chis)})
        if not report.stabilized:
            serre = Verdict("serre", False, {"chis": list(report.chis), "reason": "strands not stabilized"}, status="inconclusive")
        verdicts = [serre]
    out = _report("compute", inst.to_dict(), body, verdicts, started)
    return out, _exit_code(verdicts)


def _sample_task(task):
    spec, index, oracle_bound = task
    system = instance_at(spec, index)
    verdicts = check_instance(system, oracle_bound)
    failed = [v.to_dict() for v in verdicts if not v.passed]
    profile = next(v for v in verdicts if v.name == "serre").details["profile"]
    return index, profile, failed, dump_system(system)


def cmd_verify_serre(args) -> tuple[dict, int]:
    started = time.perf_counter()
    spec = GeneratorSpec(
        seed=args.seed,
        p_values=tuple(args.p),
        k_values=tuple(args.k),
        n_values=tuple(args.n),
        max_length=args.max_length,
        shapes=tuple(args.shape),
    )
    tasks = [(spec, i, args.oracle_bound) for i in range(args.samples)]
    if args.jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sample_task, tasks))
    else:
        results = [_sample_task(t) for t in tasks]
    failures = [{"index": i, "system": system, "verdicts": failed} for i, _, failed, system in results if failed]
    min_chi = min((min(profile["chis"]) for _, profile, _, _ in results), default=0)
    passed = not failures
    verdict = Verdict("verify_serre", passed, {"samples": args.samples, "failures": failures[:10]})
    if failures:
        verdict.details["counterexample"] = failures[0]["system"]
    body = {"summary": {"samples": args.samples, "failures": len(failures), "min_chi": min_chi}}
    out = _report("verify-serre", None, body, [verdict], started, spec.provenance())
    return out, _exit_code([verdict])


def cmd_multiplicity(inst: Instance, args) -> tuple[dict, int]:
    started = time.perf_counter()
    if inst.backend == "finite-length":
        system = inst.action_system()
        if args.t_max < system.n:
            raise InstanceError(f"--t-max must be at least n = {system.n}", "flags")
        rows = [(t, euler_profile(_power_system(system, t)).homology_lengths[0]) for t in range(1, args.t_max + 1)]
        table = lech_table(rows, system.n)
        chi0 = euler_profile(system).chis[0]
        verdicts = [Verdict("chi0_dichotomy", chi0 == 0, {"chi0": chi0, "branch": "zero (dim M < n)"})]
        body = {"lech": table.to_dict()}
    else:
        M = inst.graded_module()
        y = inst.koszul_sequence()
        if args.t_max < len(y):
            raise InstanceError(f"--t-max must be at least n = {len(y)}", "flags")
        try:
            table = lech_multiplicity_table(M, y, args.t_max, args.degree_bound)
        except DegreeBudgetExceeded as exc:
            verdict = Verdict("multiplicity", False, {"error": str(exc), "hint": "raise --degree-bound"}, status="inconclusive")
            return _report("multiplicity", inst.to_dict(), {}, [verdict], started), EXIT_INCONCLUSIVE
        regular, _ = is_regular_on(M, y, args.degree_bound)
        verdicts = []
        if regular:
            chi0 = koszul_strand_profile(M, y, args.degree_bound).chis[0]
            verdicts.append(Verdict("scaling_law", table.scaling_law_holds(), {"chi0": chi0, "leading_coefficient": str(table.leading_coefficient)}))
            verdicts.append(Verdict("chi0_is_multiplicity", table.leading_coefficient == chi0, {"chi0": chi0}))
        body = {"lech": table.to_dict(), "regular": regular}
    out = _report("multiplicity", inst.to_dict(), body, verdicts, started)
    return out, _exit_code(verdicts)


def _power_system(system: ActionSystem, t: int) -> ActionSystem:
    powered = []
    for x in system.actions:
        acc = x
        for _ in range(t - 1):
            acc = acc @ x
        powered.append(acc)
    return ActionSystem(system.module, tuple(powered), system.origin)


def cmd_shift_check(inst: Instance, args) -> tuple[dict, int]:
    started = time.perf_counter()
    J = inst.ideal()
    verdict = shift_check(J, inst.koszul_sequence(), args.degree_bound)
    out = _report("shift-check", inst.to_dict(), {}, [verdict], started)
    return out, _exit_code([verdict])


def cmd_lift(inst: Instance, args) -> tuple[dict, int]:
    started = time.perf_counter()
    system = inst.action_system()
    cert = construct_lift(system, args.degree_bound)
    verdicts = [Verdict("lift", cert.passed, cert.to_dict()), verify_base_change(system, cert)]
    out = _report("lift", inst.to_dict(), {"certificate": cert.to_dict()}, verdicts, started)
    return out, _exit_code(verdicts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="koszul-euler", description="Koszul homology and partial Euler characteristics over Z/p^k.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    c = sub.add_parser("compute", help="profile and verdicts for one instance")
    c.add_argument("instance")
    c.add_argument("--degree-bound", type=int, default=None)
    c.add_argument("--oracle-bound", type=int, default=DEFAULT_ORACLE_BOUND)
    common(c)

    v = sub.add_parser("verify-serre", help="check generated instances")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--p", type=int, nargs="+", default=[2, 3, 5])
    v.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    v.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    v.add_argument("--max-length", type=int, default=64)
    v.add_argument("--shape", nargs="+", choices=SHAPES, default=list(SHAPES))
    v.add_argument("--oracle-bound", type=int, default=DEFAULT_ORACLE_BOUND)
    v.add_argument("--jobs", type=int, default=1)
    common(v)

    m = sub.add_parser("multiplicity", help="Lech-type length table")
    m.add_argument("instance")
    m.add_argument("--t-max", type=int, default=3)
    m.add_argument("--degree-bound", type=int, default=None)
    common(m)

    s = sub.add_parser("shift-check", help="dimension shift H_i(y, B/J) = H_{i-1}(y, J)")
    s.add_argument("instance")
    s.add_argument("--degree-bound", type=int, default=None)
    common(s)

    lf = sub.add_parser("lift", help="construct B and compare both Koszul pipelines")
    lf.add_argument("instance")
    lf.add_argument("--degree-bound", type=int, default=None)
    common(lf)
    return parser


COMMANDS = {
    "compute": cmd_compute,
    "multiplicity": cmd_multiplicity,
    "shift-check": cmd_shift_check,
    "lift": cmd_lift,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        if args.command == "verify-serre":
            if args.samples < 0 or args.max_length < 0 or args.jobs < 1:
                raise InstanceError("--samples, --max-length must be >= 0 and --jobs >= 1", "flags")
            report, code = cmd_verify_serre(args)
        else:
            inst = load(args.instance)
            if args.command in ("lift",) and inst.backend != "finite-length":
                raise InstanceError("lift needs a finite-length instance", "backend")
            if args.command == "shift-check" and inst.backend != "graded":
                raise InstanceError("shift-check needs a graded ideal-quotient instance", "backend")
            report, code = COMMANDS[args.command](inst, args)
    except (InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
