"""Batch driver: run a construction, validate a file, or dump an oracle.

One construction per invocation; everything is driven by a JSON config plus
a seed, and all outputs (JSON-lines traces, CSV oracle dumps) are canonical,
so identical invocations produce byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Optional, TextIO

from . import diagonal, fixtures, genericity, markers, relations, selfref, zulu
from .core import (ApproxProcess, CapacityError, Horizon, InputError,
                   Numbering, Prefix, Schedule,
                   UsageError, index_set_estimate, limit_estimate,
                   process_from_stage_prefixes, validate_left_re,
                   validate_monotone_membership)

CONSTRUCTIONS = ("markers", "generic", "selfref", "bambam", "zulu-min",
                 "zulu-max", "maxsep", "split", "lowerfarm", "tilde-a",
                 "inc-decode", "gazebo", "diagonal", "excise")


def save_numbering(nu: Numbering, path: str) -> None:
    hz = nu.horizon
    obj = {
        "horizon": {"stages": hz.stages, "bits": hz.bits},
        "processes": [[nu.at(e).prefix(s).to_string() for s in range(hz.stages)]
                      for e in range(nu.index_range)],
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")


def load_numbering(path: str) -> Numbering:
    with open(path) as fh:
        obj = json.load(fh)
    hz = Horizon(obj["horizon"]["stages"], obj["horizon"]["bits"])
    processes = []
    for i, rows in enumerate(obj["processes"]):
        if len(rows) != hz.stages:
            raise UsageError(f"process {i}: {len(rows)} stages, expected {hz.stages}")
        prefixes = [Prefix.from_string(r) for r in rows]
        processes.append(process_from_stage_prefixes(prefixes, hz, f"file-{i}"))
    return Numbering(processes, label=path)


class TraceWriter:
    def __init__(self, out: TextIO):
        self.out = out

    def line(self, obj: dict) -> None:
        self.out.write(json.dumps(obj, sort_keys=True))
        self.out.write("\n")


def _process_rows(p: ApproxProcess, trace: TraceWriter, every: int = 16) -> None:
    S = p.horizon.stages
    for s in range(0, S, every):
        trace.line({"prefix": p.prefix(s).to_string(), "stage": s, "type": "stage"})
    trace.line({"prefix": p.prefix(S - 1).to_string(), "stage": S - 1,
                "type": "stage"})


def _run_markers(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    m = fixtures.marker_fixture(hz)
    finals = m.final_markers(20)
    trace.line({"markers": finals, "type": "final-markers"})
    checks = {
        "dominates": all(finals[n] > n + 5 for n in range(20)),
        "retrace": all(markers.retrace(m, finals[n + 1]) == finals[n]
                       for n in range(19)),
        "count": all(markers.count_h(m, finals[n]) == n for n in range(20)),
        # The marker set is complement-enumerable: membership only ever moves
        # 1 -> 0, so the down-direction validator is the right contract here.
        "complement-monotone": bool(validate_monotone_membership(
            m.membership_process(), "down")),
    }
    return checks


def _run_generic(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    Ws = fixtures.requirement_fixture()
    bits = params.get("bits", 14)
    levels = params.get("levels", 6)
    plan = genericity.build_generic_plan(Ws, bits, levels, hz)
    trace.line({"forced": plan.A.to_string(), "f": plan.f_values, "type": "plan"})
    free = plan.marker_free_intervals(levels)
    report = genericity.verify_indifference(plan.A, plan.markers, Ws, Ws.count - 1)
    trace.line({"free-intervals": free, "type": "intervals",
                "variants": report.variants_checked})
    satisfied = all(
        genericity.prefix_meets_requirement(plan.A, Ws.strings_at(e, None), bits)
        for e in range(Ws.count))
    return {"forced-satisfies": satisfied, "indifference": report.ok}


def _run_selfref(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    plan = fixtures.selfref_fixture(seed, hz)
    beta = selfref.make_into_itself(plan)
    est = index_set_estimate(beta, plan.classC)
    a_set = plan.A.final_prefix().members() & frozenset(range(plan.indices))
    removed = frozenset(e for e in range(plan.indices)
                        if plan.I.removed(e, hz.stages - 1))
    trace.line({"a": sorted(a_set), "index-set": sorted(est),
                "removed": sorted(removed), "type": "sets"})
    surviving = frozenset(range(plan.indices)) - removed
    sym = (est ^ a_set)
    checks = {
        "delta-in-surviving": sym <= surviving,
        "outside-matches": all((e in est) == (e in a_set) for e in removed),
        "validator": all(bool(r) for r in beta.validate()),
    }
    return checks


def _run_bambam(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    A = fixtures.bambam_infinite_process(hz)
    a_members = A.final_prefix().members()
    R = [b for b in range(1, hz.bits, 2)][:6]
    base = fixtures.random_catalog(seed, 6, hz, "bambam-base")
    gamma = selfref.singleton_numbering_infinite(A, R, base)
    target, _ = limit_estimate(A)
    est = index_set_estimate(gamma, selfref.limit_equals(target))
    expected = frozenset(e for e in range(gamma.index_range) if e in a_members)
    trace.line({"expected": sorted(expected), "index-set": sorted(est),
                "type": "sets"})
    return {"index-set-exact": est == expected,
            "validator": all(bool(r) for r in gamma.validate())}


def _zulu_pair(hz: Horizon, seed: int, params: dict):
    n_cap = params.get("n_cap", 3)
    omega = fixtures.omega_fixture(seed, hz, top_bit=min(2 ** n_cap - 1, 32))
    layout = zulu.BlockLayout(n_cap)
    return omega, layout


def _run_zulu(hz: Horizon, seed: int, params: dict, trace: TraceWriter,
              minimal: bool) -> dict:
    omega, layout = _zulu_pair(hz, seed, params)
    A = zulu.build_minimal(omega, layout, hz)
    B = zulu.build_maximal(omega, layout, hz)
    state = zulu.ZuluState(omega, layout)
    for s in range(0, hz.stages, max(1, hz.stages // 16)):
        row = {"stage": s, "type": "markers",
               "a": [state.a(n, s) for n in range(1, state.covered(s) + 1)]}
        trace.line(row)
    target = A if minimal else B
    report = zulu.btt_check(A, B, layout, seed=seed)
    return {"validator": bool(validate_left_re(target)), "btt": report.ok}


def _run_maxsep(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    A = fixtures.one_per_stage_schedule(seed, hz)
    E = zulu.maxsep_superset(A, hz)
    _process_rows(E, trace)
    final_a = A.final_members()
    final_e = E.final_prefix().members()
    comp = [x for x in range(hz.bits) if x not in final_a]
    audit = all((x in final_e) == (r % 2 == 1) for r, x in enumerate(comp))
    return {"validator": bool(validate_left_re(E)),
            "strict-superset": final_a < final_e, "every-second": audit}


def _run_split(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    odds = fixtures.one_per_stage_schedule(seed, Horizon(hz.stages, hz.bits // 2))
    A = Schedule.from_pairs([(2 * x + 1, s) for x, s in odds.entries],
                            "re-set").as_process(hz, "odd-stream")
    E = zulu.split_subset(A)
    _process_rows(E, trace)
    members = sorted(A.final_prefix().members())
    e_final = E.final_prefix().members()
    alternate = all((m in e_final) == (k % 2 == 0) for k, m in enumerate(members))
    return {"validator": bool(validate_left_re(E)), "alternation": alternate}


def _run_lowerfarm(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    B = fixtures.random_leftre_process(seed, hz, "lowerfarm-b", head_zeros=8)
    R = frozenset(params.get("fixed", [0, 2, 4]))
    E = zulu.lowerfarm_witness(B, R)
    _process_rows(E, trace)
    return {"validator": bool(validate_left_re(E)),
            "contains-fixed": R <= E.final_prefix().members()}


def _run_tilde(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    omega, layout = _zulu_pair(hz, seed, params)
    A = zulu.build_minimal(omega, layout, hz)
    W = Schedule.from_pairs([(1, 2), (3, 5)], "re-set")
    T = zulu.tilde_set(A, W, layout)
    _process_rows(T, trace)
    return {"validator": bool(validate_left_re(T))}


def _decode_family(K: Schedule, x: int, hz: Horizon) -> Numbering:
    odds = process_from_stage_prefixes(
        [Prefix.from_set(range(1, hz.bits, 2), hz.bits)] * hz.stages, hz, "odds")
    B = relations.b_from_k(K, hz)
    final_k = K.final_members()
    cands = []
    for x1 in range(x + 1):
        members = frozenset(2 * y + 1 for y in range(x1) if y not in final_k)
        cands.append(process_from_stage_prefixes(
            [Prefix.from_set(members, hz.bits)] * hz.stages, hz, f"cand-{x1}"))
    return Numbering([odds, B] + cands, label="decode-family")


def _run_inc_decode(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    x = params.get("x", 8)
    ok = True
    for i, K in enumerate(fixtures.k_fixtures(hz)):
        nu = _decode_family(K, x, hz)
        oracle = relations.inc_oracle_bruteforce(nu)
        got = relations.decide_k_below(oracle, nu, x, K)
        expected = {y for y in K.final_members() if y < x}
        trace.line({"decoded": sorted(got), "expected": sorted(expected),
                    "fixture": i, "type": "decode"})
        ok = ok and got == expected
    return {"decoded-exact": ok}


def _run_gazebo(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    beta = fixtures.random_catalog(seed, params.get("size", 5), hz, "gazebo-beta")
    alpha, state = relations.gazebo_run(beta)
    for row in state.trace:
        trace.line({"type": "gazebo", **{k: v for k, v in sorted(row.items())}})
    oracle = relations.gazebo_lex_emissions(state, alpha)
    bad = relations.check_persistence(oracle, alpha)
    brute = relations.lex_oracle_bruteforce(alpha)
    return {
        "persistence": bad is None,
        "matches-bruteforce": oracle.pairs() == brute.pairs(),
        "validator": all(bool(r) for r in alpha.validate()),
    }


def _run_diagonal(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    nu = fixtures.diagonal_catalog(hz)
    Ws = [Schedule.from_pairs([], "re-set") for _ in range(nu.index_range)]
    B, state = diagonal.build_diagonal(nu, Ws, e_cap=nu.index_range - 1)
    for row in state.trace_rows()[:200]:
        trace.line({"type": "diag", **row})
    final = B.final_prefix()
    differs = all(final.value != limit_estimate(nu.at(e))[0].value
                  for e in range(nu.index_range))
    return {"validator": bool(validate_left_re(B)), "differs-from-catalog": differs}


def _run_excise(hz: Horizon, seed: int, params: dict, trace: TraceWriter) -> dict:
    alpha = fixtures.random_catalog(seed, 5, hz, "excise-base")
    R = Schedule.from_pairs([(1, 4), (3, 9)], "re-set")
    X = fixtures.late_boundary_process(hz, params.get("checkpoint", 20))
    beta = selfref.excise(alpha, R, X)
    for e in range(beta.index_range):
        trace.line({"final": beta.at(e).final_prefix().to_string(), "index": e,
                    "type": "excised"})
    return {"validator": all(bool(r) for r in beta.validate())}


RUNNERS: dict[str, Callable] = {
    "markers": _run_markers,
    "generic": _run_generic,
    "selfref": _run_selfref,
    "bambam": _run_bambam,
    "zulu-min": lambda hz, seed, p, t: _run_zulu(hz, seed, p, t, True),
    "zulu-max": lambda hz, seed, p, t: _run_zulu(hz, seed, p, t, False),
    "maxsep": _run_maxsep,
    "split": _run_split,
    "lowerfarm": _run_lowerfarm,
    "tilde-a": _run_tilde,
    "inc-decode": _run_inc_decode,
    "gazebo": _run_gazebo,
    "diagonal": _run_diagonal,
    "excise": _run_excise,
}


def cmd_run(args: argparse.Namespace) -> int:
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    construction = config.get("construction", args.construction)
    if construction not in CONSTRUCTIONS:
        raise UsageError(f"unknown construction {construction!r}; "
                         f"choose from {', '.join(CONSTRUCTIONS)}")
    hz = Horizon(args.stages or config.get("stages", 256),
                 args.bits or config.get("bits", 512))
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    params = config.get("params", {})
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        trace = TraceWriter(out)
        trace.line({"bits": hz.bits, "construction": construction, "seed": seed,
                    "stages": hz.stages, "type": "header"})
        checks = RUNNERS[construction](hz, seed, params, trace)
        ok = all(checks.values())
        trace.line({"checks": checks, "ok": ok, "type": "verdict"})
    finally:
        if args.out:
            out.close()
    return 0 if ok else 1


def cmd_validate(args: argparse.Namespace) -> int:
    nu = load_numbering(args.path)
    all_ok = True
    for e in range(nu.index_range):
        r = validate_left_re(nu.at(e))
        all_ok = all_ok and r.ok
        print(json.dumps({"index": e, "ok": r.ok, "position": r.position,
                          "reason": r.reason, "stage": r.stage}, sort_keys=True))
    print(json.dumps({"indices": nu.index_range, "ok": all_ok, "type": "summary"},
                     sort_keys=True))
    return 0 if all_ok else 1


def cmd_oracle(args: argparse.Namespace) -> int:
    nu = load_numbering(args.path)
    oracle = (relations.inc_oracle_bruteforce(nu) if args.mode == "inc"
              else relations.lex_oracle_bruteforce(nu))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("i,j,stage\n")
        for row in oracle.csv_rows():
            out.write(row + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leftre",
        description="Finite-horizon constructions over lex-monotone set "
                    "approximations")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one construction and emit a trace")
    run_p.add_argument("construction", nargs="?", choices=CONSTRUCTIONS)
    run_p.add_argument("--config", help="JSON config file")
    run_p.add_argument("--stages", type=int)
    run_p.add_argument("--bits", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--out", help="trace output path (default stdout)")
    run_p.set_defaults(fn=cmd_run)

    val_p = sub.add_parser("validate", help="validate a numbering file")
    val_p.add_argument("path")
    val_p.set_defaults(fn=cmd_validate)

    orc_p = sub.add_parser("oracle", help="dump a brute-force relation oracle")
    orc_p.add_argument("path", help="numbering file")
    orc_p.add_argument("--mode", choices=("inc", "lex"), default="inc")
    orc_p.add_argument("--out", help="CSV output path (default stdout)")
    orc_p.set_defaults(fn=cmd_oracle)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, InputError, CapacityError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
