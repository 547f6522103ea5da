"""Command-line front end.

Subcommands:
  capacity     export capacity/bound curves as CSV
  p0           solve the flip-bound breakpoint for a list of q values
  simulate     run one Monte Carlo scenario from a JSON file
  sweep        run the scenario's sweep grid
  attack-demo  one snoop-then-push trial with verbose phase logging

Exit codes: 0 ok, 2 parse/usage error, 3 domain error, 4 I/O error.
All data rows are byte-reproducible from (arguments, seed).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import capacity, sim

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

MODELS = {
    "erasure-nofb": lambda p, q: capacity.capacity_erasure(p, q),
    "erasure-fb": lambda p, q: capacity.capacity_erasure_feedback(p, q),
    "flip-upper": lambda p, q: capacity.upper_bound_flip_closed(p, q),
    "flip-lower": lambda p, q: capacity.achievable_flip(p, q),
}


def _p_grid(start, stop, step):
    if step <= 0:
        raise capacity.DomainError("p-step must be positive")
    out = []
    k = 0
    while True:
        p = start + k * step
        if p > stop + 1e-12:
            break
        out.append(round(p, 12))
        k += 1
    return out


def cmd_capacity(args):
    fn = MODELS[args.model]
    rows = []
    for q in args.q:
        for p in _p_grid(args.p_start, args.p_stop, args.p_step):
            try:
                rows.append({"model": args.model, "q": q, "p": p,
                             "value": f"{fn(p, q):.12g}", "note": ""})
            except capacity.DomainError as exc:
                rows.append({"model": args.model, "q": q, "p": p,
                             "value": "", "note": str(exc)})
    _write_csv(args.out, ["model", "q", "p", "value", "note"], rows)
    return EXIT_OK


def cmd_p0(args):
    rows = []
    for q in args.q:
        try:
            p0 = capacity.p0_solve(q, tol=args.tol)
            rows.append({"q": q, "p0": f"{p0:.15g}",
                         "residual": f"{capacity.p0_residual(p0, q):.3g}", "note": ""})
        except (capacity.DomainError, capacity.SolverError) as exc:
            rows.append({"q": q, "p0": "", "residual": "", "note": str(exc)})
    _write_csv(args.out, ["q", "p0", "residual", "note"], rows)
    return EXIT_OK


def _load_scenario(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _IOErrorExit(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise sim.ScenarioError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return data


def cmd_simulate(args):
    data = _load_scenario(args.scenario)
    scenario = sim.Scenario.from_dict(data)
    est = sim.estimate_error(scenario, args.trials, args.seed)
    sim.write_results_csv([("single", scenario, est, "")], args.out)
    return EXIT_OK


def cmd_sweep(args):
    data = _load_scenario(args.scenario)
    deltas = data.pop("sweep", None)
    if not deltas:
        raise sim.ScenarioError("scenario file has no non-empty 'sweep' list")
    scenario = sim.Scenario.from_dict(data)
    rows = sim.sweep(scenario, deltas, args.trials, args.seed)
    sim.write_results_csv(rows, args.out)
    return EXIT_OK


def cmd_attack_demo(args):
    data = _load_scenario(args.scenario)
    scenario = sim.Scenario.from_dict(data)
    if scenario.adversary["name"] not in ("wait_snoop_push", "babble_snoop_push"):
        raise sim.ScenarioError("attack-demo needs a snoop-then-push adversary")
    outcome = sim.run_trial(scenario, sim.trial_seed(args.seed, 0))
    ev = outcome.events
    print(f"attack: {ev.get('attack')}")
    print(f"phase 1 length ell = {ev.get('ell')}")
    if "babble_flips" in ev:
        print(f"babble flips used: {ev['babble_flips']}")
    if "u_prime" in ev:
        print(f"confusion message u' = {ev['u_prime']}")
        print(f"suffix disagreements d(x2, x2') = {ev.get('suffix_disagreements')}")
        print(f"confusion event fired: {ev.get('confusion_success')}")
        if "push_consistent" in ev:
            print(f"y consistent with both codewords: {ev['push_consistent']}")
    else:
        print("phase 2 never started (degenerate configuration)")
    print(f"budget: used {outcome.actions_used} of {outcome.budget}, "
          f"exhausted: {ev.get('budget_exhausted')}")
    print(f"decoder result: {outcome.result}; trial success: {outcome.success}")
    return EXIT_OK


class _IOErrorExit(Exception):
    pass


def _write_csv(path, columns, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise _IOErrorExit(str(exc)) from exc


def build_parser():
    parser = argparse.ArgumentParser(prog="advchan",
                                     description="adversarial binary channel toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("capacity", help="export a capacity curve as CSV")
    pc.add_argument("--model", required=True, choices=sorted(MODELS))
    pc.add_argument("--q", type=float, action="append", required=True)
    pc.add_argument("--p-start", type=float, default=0.0)
    pc.add_argument("--p-stop", type=float, default=0.5)
    pc.add_argument("--p-step", type=float, default=0.01)
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=cmd_capacity)

    pp = sub.add_parser("p0", help="solve the flip-bound breakpoint p0(q)")
    pp.add_argument("--q", type=float, action="append", required=True)
    pp.add_argument("--tol", type=float, default=1e-12)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=cmd_p0)

    ps = sub.add_parser("simulate", help="run one scenario")
    ps.add_argument("--scenario", required=True)
    ps.add_argument("--trials", type=int, default=100)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_simulate)

    pw = sub.add_parser("sweep", help="run the scenario's sweep grid")
    pw.add_argument("--scenario", required=True)
    pw.add_argument("--trials", type=int, default=100)
    pw.add_argument("--seed", type=int, default=0)
    pw.add_argument("--out", required=True)
    pw.set_defaults(func=cmd_sweep)

    pa = sub.add_parser("attack-demo", help="one verbose snoop-then-push trial")
    pa.add_argument("--scenario", required=True)
    pa.add_argument("--seed", type=int, default=0)
    pa.set_defaults(func=cmd_attack_demo)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except sim.ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (capacity.DomainError, capacity.SolverError, ValueError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _IOErrorExit as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
