"""Command-line front end.

Subcommands: run, localize, space, repair, analyze, explore, compare-orders.
Exit codes: 0 success, 1 repair found nothing, 2 usage or corpus errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import difflib
import json
import sys
from pathlib import Path

from .bench import (
    Corpus,
    CorpusError,
    analyze_space,
    bundled_corpus,
    compare_orders,
    explore,
    load_corpus,
    load_defect,
)
from .interp import execute
from .lang import ParseError, parse_program, render_program
from .localize import localization_scores, localize
from .synth import SynthSettings, repair
from .transform import SpaceConfig, generate_space


def _space_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--loc-limit", type=int, default=200, metavar="N")
    parser.add_argument("--ext-cond", action="store_true",
                        help="extended condition pool: <, > and variable pairs")
    parser.add_argument("--ext-rep", action="store_true",
                        help="extended replacements: fresh right-hand sides")
    parser.add_argument("--goto-control", action="store_true",
                        help="control-flow templates may retarget to any label")


def _synth_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-flip-trials", type=int, default=11, metavar="N")
    parser.add_argument("--top-conditions", type=int, default=20, metavar="N")
    parser.add_argument("--fuel", type=int, default=SynthSettings().fuel, metavar="STEPS")


def _cfg(args) -> SpaceConfig:
    return SpaceConfig(args.loc_limit, args.ext_cond, args.ext_rep, args.goto_control)


def _settings(args) -> SynthSettings:
    return SynthSettings(args.max_flip_trials, args.top_conditions, args.fuel)


def _emit(text: str, args) -> None:
    if getattr(args, "emit", None):
        Path(args.emit).write_text(text + "\n")
    else:
        print(text)


def _tsv(rows) -> str:
    return "\n".join("\t".join(str(c) for c in row) for row in rows)


def _report_dict(report) -> dict:
    d = dataclasses.asdict(report)
    d.pop("verdicts", None)
    return d


def _report_rows(reports, columns):
    yield columns
    for rep in reports:
        d = _report_dict(rep)
        yield [d[c] for c in columns]


def _load_target(path: str | None):
    """A defect directory means one defect; anything else must be a corpus.

    Returns a Corpus either way so report commands iterate uniformly.
    """
    if path is None:
        return bundled_corpus()
    root = Path(path)
    if (root / "program.spr").is_file():
        return Corpus((load_defect(root),))
    return load_corpus(root)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    prog = parse_program(Path(args.program).read_text())
    out = execute(prog, args.values, fuel=args.fuel)
    if args.format == "json":
        print(json.dumps({"output": list(out.output), "fault": out.fault}))
    else:
        for v in out.output:
            print(v)
        if out.fault:
            print(f"fault: {out.fault}", file=sys.stderr)
    return 0


def _cmd_localize(args) -> int:
    defect = load_defect(Path(args.defect))
    scores = localization_scores(defect.program, list(defect.neg), list(defect.pos),
                                 fuel=args.fuel)
    ranked = localize(defect.program, list(defect.neg), list(defect.pos),
                      limit=args.limit, fuel=args.fuel)
    rows = [
        (lbl, scores[lbl].a, scores[lbl].b, scores[lbl].c, rank)
        for rank, lbl in enumerate(ranked, start=1)
    ]
    if args.format == "json":
        print(json.dumps([
            {"label": l, "a": a, "b": b, "c": c, "rank": r} for l, a, b, c, r in rows
        ], indent=2))
    else:
        print(_tsv([("label", "a", "b", "c", "rank"), *rows]))
    return 0


def _cmd_space(args) -> int:
    defect = load_defect(Path(args.defect))
    cfg = _cfg(args)
    ranked = localize(defect.program, list(defect.neg), list(defect.pos),
                      limit=cfg.loc_limit, fuel=args.fuel)
    space = generate_space(defect.program, ranked, cfg)
    if args.dump:
        entries = [
            {"rank": i, "tier": t.tier, "schema": t.schema, "target": t.target,
             "kind": t.kind, "program": render_program(t.program)}
            for i, t in enumerate(space, start=1)
        ]
        if args.format == "json":
            print(json.dumps(entries, indent=2))
        else:
            rows = [("rank", "tier", "schema", "target", "kind", "program")]
            rows += [(e["rank"], e["tier"], e["schema"], e["target"], e["kind"],
                      e["program"].replace("\n", "\\n")) for e in entries]
            print(_tsv(rows))
        return 0
    counts: dict[str, int] = {}
    for t in space:
        counts[t.schema] = counts.get(t.schema, 0) + 1
    if args.format == "json":
        print(json.dumps({"total": len(space), "schemas": counts}, indent=2))
    else:
        rows = [("schema", "templates")]
        rows += sorted(counts.items())
        rows.append(("total", len(space)))
        print(_tsv(rows))
    return 0


def _cmd_repair(args) -> int:
    defect = load_defect(Path(args.defect))
    result = repair(
        defect.program, list(defect.neg), list(defect.pos),
        cfg=_cfg(args), settings=_settings(args),
        template_budget=args.template_budget, time_budget=args.time_budget,
        jobs=args.jobs,
    )
    stats = {
        "found": result.found,
        "templates_evaluated": result.templates_evaluated,
        "abstc_templates_evaluated": result.abstc_templates_evaluated,
        "stage2_entries": result.stage2_entries,
        "plausible_rank": result.plausible_rank,
        "budget_exhausted": result.budget_exhausted,
        "space_size": result.space_size,
    }
    if not result.found:
        if args.format == "json":
            print(json.dumps({"stats": stats}, indent=2))
        else:
            print("no plausible patch", file=sys.stderr)
        return 1

    patched = render_program(result.patch.program)
    original = render_program(defect.program)
    diff = "\n".join(difflib.unified_diff(
        original.splitlines(), patched.splitlines(),
        fromfile="a/program.spr", tofile="b/program.spr", lineterm="",
    ))
    if args.format == "json":
        print(json.dumps({
            "patch": patched, "diff": diff, "stats": stats,
            "schema": result.patch.template.schema,
            "target": result.patch.template.target,
            "substitution": result.patch.substitution,
        }, indent=2))
    elif args.format == "tsv":
        cols = sorted(stats)
        print(_tsv([cols, [stats[c] for c in cols]]))
    else:
        print(diff)
        print()
        for key in sorted(stats):
            print(f"{key}: {stats[key]}")
    if args.emit:
        Path(args.emit).write_text(patched + "\n")
    return 0


_SPACE_COLUMNS = ("defect_id", "space_size", "correct_in_space", "correct_rank",
                  "plausible_in_space", "first_plausible_rank")
_EXPLORE_COLUMNS = ("defect_id", "budget", "order", "space_size", "templates_evaluated",
                    "plausible_found", "correct_found", "first_plausible_is_correct",
                    "blocked", "timed_out")


def _print_reports(reports, columns, args) -> None:
    if args.format == "json":
        print(json.dumps([_report_dict(r) for r in reports], indent=2))
    else:
        print(_tsv(_report_rows(reports, columns)))


def _cmd_analyze(args) -> int:
    corpus = _load_target(args.target)
    if args.defect:
        corpus = Corpus((corpus.get(args.defect),))
    reports = [
        analyze_space(d, _cfg(args), _settings(args), adjudication_seed=args.seed)
        for d in corpus
    ]
    _print_reports(reports, _SPACE_COLUMNS, args)
    return 0


def _cmd_explore(args) -> int:
    corpus = _load_target(args.target)
    if args.defect:
        corpus = Corpus((corpus.get(args.defect),))
    reports = [
        explore(d, _cfg(args), _settings(args), budget=args.template_budget,
                order=args.order, seed=args.seed, adjudication_seed=args.seed)
        for d in corpus
    ]
    _print_reports(reports, _EXPLORE_COLUMNS, args)
    return 0


def _cmd_compare_orders(args) -> int:
    corpus = _load_target(args.target)
    cmp_ = compare_orders(corpus, _cfg(args), _settings(args),
                          budget=args.template_budget, k=args.review_depth,
                          seeds=args.seeds, adjudication_seed=args.seed)
    if args.format == "json":
        print(json.dumps(dataclasses.asdict(cmp_), indent=2))
    else:
        print(_tsv([
            ("order", "cost", "payoff", "display"),
            ("spr_tiers", f"{cmp_.spr_tiers.cost:g}", f"{cmp_.spr_tiers.payoff:g}",
             cmp_.spr_tiers.display),
            ("random", f"{cmp_.random.cost:g}", f"{cmp_.random.payoff:g}",
             cmp_.random.display),
        ]))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spr", description="Staged program repair for labeled programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a program on an input vector")
    p.add_argument("program")
    p.add_argument("values", type=int, nargs="*", metavar="INT")
    p.add_argument("--fuel", type=int, default=SynthSettings().fuel)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("localize", help="rank suspicious labels for a defect")
    p.add_argument("defect", help="defect directory")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--fuel", type=int, default=SynthSettings().fuel)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=_cmd_localize)

    p = sub.add_parser("space", help="template census for a defect")
    p.add_argument("defect", help="defect directory")
    _space_flags(p)
    p.add_argument("--dump", action="store_true", help="list every template")
    p.add_argument("--fuel", type=int, default=SynthSettings().fuel)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=_cmd_space)

    p = sub.add_parser("repair", help="search the space for a plausible patch")
    p.add_argument("defect", help="defect directory")
    _space_flags(p)
    _synth_flags(p)
    p.add_argument("--template-budget", type=int, default=None, metavar="B")
    p.add_argument("--time-budget", type=float, default=None, metavar="SECS")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--emit", metavar="PATH", help="write the patched program here")
    p.add_argument("--format", choices=("text", "json", "tsv"), default="text")
    p.set_defaults(func=_cmd_repair)

    for name, func, help_ in (
        ("analyze", _cmd_analyze, "space size and correct-patch rank per defect"),
        ("explore", _cmd_explore, "collect and adjudicate every plausible patch"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("target", nargs="?", default=None,
                       help="defect or corpus directory (default: bundled corpus)")
        p.add_argument("--defect", default=None, metavar="ID",
                       help="restrict a corpus to one defect")
        _space_flags(p)
        _synth_flags(p)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("tsv", "json"), default="tsv")
        if name == "explore":
            p.add_argument("--template-budget", type=int, default=None, metavar="B")
            p.add_argument("--order", choices=("spr_tiers", "random"),
                           default="spr_tiers")
        p.set_defaults(func=func)

    p = sub.add_parser("compare-orders",
                       help="review cost/payoff of tier order vs random order")
    p.add_argument("target", nargs="?", default=None,
                   help="corpus directory (default: bundled corpus)")
    _space_flags(p)
    _synth_flags(p)
    p.add_argument("--template-budget", type=int, default=None, metavar="B")
    p.add_argument("-k", "--review-depth", type=int, default=10, metavar="K")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=_cmd_compare_orders)
    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusError, ParseError, ValueError, OSError) as err:
        print(f"spr: error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
