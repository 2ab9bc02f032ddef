"""Command line interface.

Exit status: 0 when the command ran and nothing negative was found, 1 when
it ran but the verdict is negative (a failed ``--expect``, a campaign
violation, an infeasible assessment), 2 for input and usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .analysis import CONSTRICTIONS, DILATIONS, NEITHER, classify_partition, open_set_demo
from .campaigns import THEOREMS, run_campaign
from .capacity import MassFunction
from .core import CredalSet, Measure, as_rational, format_rational
from .errors import ConstrictionError, DegenerateError
from .extension import (
    DETERMINED,
    INFEASIBLE,
    convex_pool,
    definetti_bounds,
    definetti_select,
    maxent_select,
    selection_classify,
)
from .modelio import (
    DISPLAY_NOTE,
    decimal,
    interval,
    parse_assessment,
    parse_model,
    parse_opinions,
    parse_transfer,
    parse_weights,
    rational,
    render_json,
)
from .pooling import consensus_condition, consensus_limit, iterate, max_deviation, nesting_trace, stationary_vector
from .updating import RULE_NAMES, TransferFunction, as_credal, levi_neutral, state_interval, update

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2
EXPECT = {"constriction": CONSTRICTIONS, "dilation": DILATIONS, "neither": (NEITHER,)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _base(command: str, args, seed=None) -> dict:
    return {
        "schema": 1,
        "command": command,
        "args": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "format")},
        "seed": seed,
        "version": __version__,
        "note": DISPLAY_NOTE,
    }


def _verdict(v) -> dict:
    out = {"kind": v.kind, "scope": v.scope, "before": interval(v.before)}
    if isinstance(v.after, tuple):
        out["after"] = [interval(i) for i in v.after]
    else:
        out["after"] = interval(v.after)
    return out


def _iv(iv) -> str:
    return f"[{format_rational(iv.lo)}, {format_rational(iv.hi)}]"


def _table(rows: Sequence[Sequence[str]]) -> list:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


# -- analyze -------------------------------------------------------------------


def cmd_analyze(args):
    model = parse_model(args.model)
    event = model.event(args.event)
    partition = model.partition(args.partition)
    rules = [r.strip() for r in args.rules.split(",") if r.strip()]
    for r in rules:
        if r not in RULE_NAMES:
            raise UsageError(f"unknown rule {r!r}; choose from {', '.join(RULE_NAMES)}")
    report = _base("analyze", args)
    report["event"] = repr(event)
    report["partition"] = [repr(b) for b in partition]
    results = {}
    negative = False
    applicable = 0
    text = [f"event {event!r}  partition {' '.join(repr(b) for b in partition)}"]
    rows = [("rule", "block", "prior", "posterior", "verdict")]
    for r in rules:
        transfer = None
        if RULE_NAMES[r] == "I":
            transfer = _transfer_factory(args, model)
        try:
            rep = classify_partition(model.state, event, partition, r, transfer)
        except ConstrictionError as exc:
            results[r] = {"status": "not-applicable", "reason": str(exc)}
            rows.append((r, "-", "-", "-", f"not applicable: {exc}"))
            continue
        applicable += 1
        results[r] = {
            "status": "ok",
            "prior": interval(rep.before),
            "blocks": [
                {"block": repr(b), "posterior": interval(v.after), "verdict": v.kind} for b, v in rep.blocks
            ],
            "skipped": [repr(b) for b in rep.skipped],
            "pointwise": _verdict(rep.pointwise),
            "uniform": _verdict(rep.uniform),
        }
        for b, v in rep.blocks:
            rows.append((r, repr(b), _iv(rep.before), _iv(v.after), v.kind))
        rows.append((r, "pointwise", "", "", f"{rep.pointwise.kind} ({rep.pointwise.scope})"))
        rows.append((r, "uniform", "", _iv(rep.uniform.after), rep.uniform.kind))
        if args.expect and rep.pointwise.kind not in EXPECT[args.expect]:
            negative = True
    report["rules"] = results
    if args.expect:
        report["expect"] = {"verdict": args.expect, "met": not negative}
        text.append(f"expect {args.expect}: {'met' if not negative else 'NOT met'}")
    if not applicable:
        raise ConstrictionError("no requested rule applies to this model")
    return report, text + _table(rows), NEGATIVE if negative else OK


def _transfer_factory(args, model):
    spec = args.transfer or "dempster-style"
    if spec.endswith(".json"):
        return lambda evidence: parse_transfer(spec, model.space, evidence)
    return spec


# -- update --------------------------------------------------------------------


def _state_dump(state) -> dict:
    if isinstance(state, CredalSet):
        return {"credal": [[format_rational(w) for w in v.weights] for v in state.vertices]}
    if isinstance(state, MassFunction):
        return {"mass": {"|".join(e.labels): format_rational(state.mass(e)) for e in state.focal_elements}}
    return {"lower": {"|".join(labels): format_rational(v) for labels, v in state.table()}}


def cmd_update(args):
    model = parse_model(args.model)
    evidence = model.event(args.evidence)
    transfer = None
    if RULE_NAMES.get(args.rule) == "I":
        t = args.transfer or "dempster-style"
        transfer = parse_transfer(t, model.space, evidence) if t.endswith(".json") else TransferFunction.builtin(t, evidence)
    if args.rule not in RULE_NAMES:
        raise UsageError(f"unknown rule {args.rule!r}")
    rec = update(model.state, args.rule, evidence, transfer)
    report = _base("update", args)
    report["evidence"] = repr(evidence)
    report["posterior"] = _state_dump(rec.posterior)
    text = [f"{args.rule} update on {evidence!r}"]
    code = OK
    events = [model.event(e) for e in args.event or []]
    if events:
        rows = [("event", "prior", "posterior")]
        report["events"] = {}
        for e in events:
            before, after = state_interval(rec.prior, e), state_interval(rec.posterior, e)
            report["events"][repr(e)] = {"prior": interval(before), "posterior": interval(after)}
            rows.append((repr(e), _iv(before), _iv(after)))
        text += _table(rows)
    if args.levi:
        target = model.event(args.levi)
        lv = levi_neutral(rec, target)
        report["levi"] = {
            "triggered": lv.triggered,
            "message": lv.message,
            "restored": interval(state_interval(lv.restored, target)) if lv.triggered else None,
            "reversal": lv.reversal.kind if lv.triggered else None,
        }
        text.append(lv.message)
    for k, v in _state_dump(rec.posterior).items():
        text.append(f"posterior {k}:")
        if isinstance(v, list):
            text += ["  " + ", ".join(row) for row in v]
        else:
            text += [f"  {{{key}}}: {val}" for key, val in v.items()]
    return report, text, code


# -- bounds --------------------------------------------------------------------


def cmd_bounds(args):
    af = parse_assessment(args.assessment, args.target)
    a = af.assessment(args.target)
    res = definetti_bounds(a)
    report = _base("bounds", args)
    report["target"] = repr(a.target)
    report["status"] = res.status
    text = [f"target {args.target or af.target}: {res.status}"]
    if res.status == INFEASIBLE:
        return report, text, NEGATIVE
    report["interval"] = interval(res.interval)
    text.append(f"bounds {_iv(res.interval)}")
    if args.select is not None:
        if res.status == DETERMINED:
            raise ConstrictionError(f"P(target) is determined at {res.value}; nothing to select")
        v = definetti_select(a, as_rational(args.select))
        report["selection"] = _verdict(v)
        text.append(f"select {args.select}: {v.kind}")
    return report, text, OK


# -- select --------------------------------------------------------------------


def cmd_select(args):
    model = parse_model(args.model)
    credal = model.state
    if isinstance(credal, MassFunction):
        credal = as_credal(credal)
    report = _base("select", args)
    point_spec = args.point
    text = []
    if point_spec == "maxent":
        me = maxent_select(credal)
        point = me.measure
        report["maxent"] = {"approximate": me.approximate, "duality_gap": f"{me.gap:.3e}", "certified": me.certified}
        text.append(f"maximum entropy (approximate, gap {me.gap:.3e})")
    elif point_spec.startswith("pool:"):
        weights = [as_rational(w) for w in point_spec[5:].split(",")]
        point = convex_pool(list(credal.vertices), weights)
        text.append(f"convex pool of the vertices with weights {', '.join(map(format_rational, weights))}")
    else:
        point = Measure(model.space, tuple(as_rational(w) for w in point_spec.split(",")))
    sel = selection_classify(credal, point)
    report["point"] = [format_rational(w) for w in point.weights]
    report["extreme_points"] = len(sel.extreme)
    report["mixture_weights"] = [format_rational(w) for w in sel.decomposition.weights]
    report["strict_everywhere"] = sel.strict_everywhere
    report["is_extreme_point"] = sel.is_extreme
    report["weak_events"] = [repr(e) for e in sel.weak_events]
    report["events"] = {repr(e): {"prior": interval(v.before), "selected": rational(v.after.lo), "verdict": v.kind} for e, v in sel.verdicts}
    text.append("point " + ", ".join(format_rational(w) for w in point.weights))
    text.append(f"strict constriction of every nondegenerate event: {'yes' if sel.strict_everywhere else 'no'}")
    rows = [("event", "prior", "selected", "verdict")]
    for e, v in sel.verdicts:
        rows.append((repr(e), _iv(v.before), format_rational(v.after.lo), v.kind))
    return report, text + _table(rows), OK


# -- pool ----------------------------------------------------------------------


def cmd_pool(args):
    W = parse_weights(args.weights)
    of = parse_opinions(args.opinions)
    event = of.event(args.event)
    trace = nesting_trace(W, of.opinions, event, args.steps)
    cond = consensus_condition(W, args.max_n)
    report = _base("pool", args)
    report["event"] = repr(event)
    report["trace"] = [interval(iv) for iv in trace.intervals]
    report["nested"] = trace.nested
    report["first_strict_shrink"] = list(trace.first_strict) if trace.first_strict else None
    report["consensus_condition"] = {"holds_at": cond.holds_at, "max_n": cond.max_n}
    text = _table([("step", "lower", "upper")] + [(str(n), format_rational(iv.lo), format_rational(iv.hi)) for n, iv in enumerate(trace.intervals)])
    text.append(f"weakly nested: {'yes' if trace.nested else 'no'}")
    if trace.first_strict:
        text.append(f"first strict shrink: steps {trace.first_strict[0]} -> {trace.first_strict[1]}")
    code = OK if trace.nested else NEGATIVE
    try:
        pi = stationary_vector(W)
    except DegenerateError as exc:
        report["stationary"] = {"degenerate": True, "dimension": exc.dimension}
        text.append(f"stationary vector not unique (dimension {exc.dimension})")
        return report, text, code
    limit = consensus_limit(W, of.opinions)
    last = iterate(W, of.opinions, args.steps)
    dev = max(max_deviation(f, limit) for f in last)
    report["stationary"] = {"degenerate": False, "pi": [format_rational(p) for p in pi]}
    report["limit"] = [format_rational(w) for w in limit.weights]
    report["limit_event"] = rational(limit.prob(event))
    report["deviation_at_last_step"] = decimal(dev)
    text.append(f"consensus condition: {'holds at n=' + str(cond.holds_at) if cond.holds else 'unknown up to ' + str(cond.max_n)}")
    text.append("stationary vector: " + ", ".join(format_rational(p) for p in pi))
    text.append(f"limit P(A) = {format_rational(limit.prob(event))}; max deviation at step {args.steps}: {decimal(dev)}")
    return report, text, code


# -- check / demo --------------------------------------------------------------


def cmd_check(args):
    res = run_campaign(args.theorem, args.trials, args.seed)
    report = _base("check", args, seed=args.seed)
    report["theorem"] = res.theorem
    report["trials"] = res.trials
    report["passed"] = res.passed
    report["violations"] = res.violations
    report["stats"] = res.stats
    text = [f"{res.theorem}: {res.passed}/{res.trials} pass (seed {res.seed})"]
    text += [f"  {k}: {v}" for k, v in sorted(res.stats.items())]
    for v in res.violations:
        text.append(f"  violation: {v}")
    return report, text, OK if res.ok else NEGATIVE


def cmd_demo(args):
    grid = [as_rational(x) for x in args.grid.split(",")]
    rep = open_set_demo(grid, args.n)
    report = _base("demo", args)
    report["q"] = [format_rational(q) for q in rep.q]
    report["inf_q"] = rational(rep.inf_q)
    report["sup_q"] = rational(rep.sup_q)
    report["points"] = [
        {
            "x": format_rational(p.x),
            "feasible": p.feasible,
            "reason": p.reason or None,
            "posteriors_equal_q": p.feasible and p.posteriors == rep.q,
        }
        for p in rep.points
    ]
    text = [f"q_1..q_{len(rep.q)}: " + ", ".join(map(format_rational, rep.q))]
    text.append(f"inf q = {format_rational(rep.inf_q)}, sup q = {format_rational(rep.sup_q)}")
    for p in rep.points:
        status = "posteriors equal q" if p.feasible and p.posteriors == rep.q else p.reason or "posteriors differ"
        text.append(f"x = {format_rational(p.x)}: {status}")
    return report, text, OK if rep.posteriors_match else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="constriction", description="Constriction and dilation of imprecise probabilities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--format", choices=("json", "text"), default="text")
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", cmd_analyze, "classify updating rules on an experiment")
    sp.add_argument("--model", required=True)
    sp.add_argument("--event", required=True)
    sp.add_argument("--partition", required=True, help="partition name or blocks separated by ';'")
    sp.add_argument("--rules", default="bayes")
    sp.add_argument("--transfer", help="imaging transfer: a built-in name or a JSON file")
    sp.add_argument("--expect", choices=sorted(EXPECT))

    sp = add("update", cmd_update, "apply one updating rule")
    sp.add_argument("--model", required=True)
    sp.add_argument("--rule", required=True, choices=sorted(RULE_NAMES))
    sp.add_argument("--evidence", required=True)
    sp.add_argument("--event", action="append", help="report this event's interval (repeatable)")
    sp.add_argument("--transfer")
    sp.add_argument("--levi", metavar="EVENT", help="run the Levi-neutrality check for EVENT")

    sp = add("bounds", cmd_bounds, "coherent bounds for a new event")
    sp.add_argument("--assessment", required=True)
    sp.add_argument("--target")
    sp.add_argument("--select", help="classify fixing P(target) to this value")

    sp = add("select", cmd_select, "select one measure from a credal set")
    sp.add_argument("--model", required=True)
    sp.add_argument("--point", required=True, help="'w1,w2,...', 'maxent' or 'pool:z1,z2,...'")

    sp = add("pool", cmd_pool, "DeGroot pooling trace")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--opinions", required=True)
    sp.add_argument("--event", required=True)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--max-n", type=int, default=64)

    sp = add("check", cmd_check, "seeded property campaign for one theorem")
    sp.add_argument("--theorem", required=True, choices=THEOREMS)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, required=True)

    sp = add("demo", cmd_demo, "open credal set example, finite truncation")
    sp.add_argument("--grid", default="9/20,1/2,11/20")
    sp.add_argument("--n", type=int, default=16)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return INPUT_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        report, text, code = args.func(args)
    except (ConstrictionError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    if args.format == "json":
        sys.stdout.write(render_json(report))
    else:
        head = f"constriction {__version__}" + (f"  seed {report['seed']}" if report["seed"] is not None else "")
        sys.stdout.write("\n".join([head] + text) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
