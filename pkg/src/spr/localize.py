"""Suspiciousness ranking over statement labels.

Each run stamps every statement it reaches with the step number at which
it last started executing. A label is suspicious when failing runs reach
it (the more, the worse), passing runs avoid it, and failing runs touch
it late. Runs that bottom out still contribute the stamps collected up
to the fault.
"""

from __future__ import annotations

from dataclasses import dataclass

from spr.interp import DEFAULT_FUEL, EMPTY_PLAN, TestCase, execute
from spr.lang import Program, label_key


@dataclass(frozen=True)
class LocalizationScore:
    """a: failing runs reaching the label. b: passing runs avoiding it.
    c: summed last-execution stamps over failing runs."""

    a: int
    b: int
    c: int

    @property
    def sort_key(self):
        return (-self.a, -self.b, -self.c)


def instrument_run(prog: Program, input_vals, fuel: int = DEFAULT_FUEL) -> dict[str, int]:
    """Last-execution stamp per label for one run; partial on bottom."""
    stamps: dict[str, int] = {}

    def trace(label, n):
        stamps[label] = n

    execute(prog, input_vals, EMPTY_PLAN, fuel, trace)
    return stamps


def localization_scores(
    prog: Program,
    neg: list[TestCase],
    pos: list[TestCase],
    fuel: int = DEFAULT_FUEL,
) -> dict[str, LocalizationScore]:
    labels = prog.labels()
    a = {lbl: 0 for lbl in labels}
    b = {lbl: 0 for lbl in labels}
    c = {lbl: 0 for lbl in labels}
    for case in neg:
        stamps = instrument_run(prog, case.input, fuel)
        for lbl, stamp in stamps.items():
            a[lbl] += 1
            c[lbl] += stamp
    for case in pos:
        stamps = instrument_run(prog, case.input, fuel)
        for lbl in labels:
            if lbl not in stamps:
                b[lbl] += 1
    return {lbl: LocalizationScore(a[lbl], b[lbl], c[lbl]) for lbl in labels}


def localize(
    prog: Program,
    neg: list[TestCase],
    pos: list[TestCase],
    limit: int | None = None,
    fuel: int = DEFAULT_FUEL,
) -> list[str]:
    """Labels ranked most-suspicious first; ties broken by label order.

    The ranking is prefix-stable: asking for a limit returns exactly the
    first entries of the unlimited ranking.
    """
    scores = localization_scores(prog, neg, pos, fuel)
    ranked = sorted(scores, key=lambda lbl: scores[lbl].sort_key + (label_key(lbl),))
    if limit is not None:
        ranked = ranked[:limit]
    return ranked
