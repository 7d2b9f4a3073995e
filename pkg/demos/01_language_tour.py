"""Tour of the little language: parse a program, run it, watch it fail.

The running example is an acceptor that should print 1 for inputs 3 and 5
but was shipped testing only for 5.
"""

from spr.interp import TestCase, execute, run_case
from spr.lang import parse_program, render_program

SOURCE = """\
L0: x = read -> L1
L1: y = 1 -> L2
L2: if ((x == 5)) L3 L4
L3: print y -> L5
L4: print 0 -> L5
L5: stop
"""

program = parse_program(SOURCE)
print("canonical form:")
print(render_program(program))
print()

for value in (5, 3, 7):
    outcome = execute(program, (value,))
    print(f"input {value} -> output {list(outcome.output)}")

print()
print("the suite pins what SHOULD happen:")
neg = TestCase("three-is-accepted", (3,), (1,))
pos = TestCase("seven-is-rejected", (7,), (0,))
for case in (neg, pos):
    status = "pass" if run_case(program, case) else "FAIL"
    print(f"  {case.name}: in {list(case.input)} expects {list(case.expected)} -> {status}")

print()
print("faults are outcomes, not exceptions:")
starved = execute(parse_program("L0: x = read\nL1: print x\nL2: stop"), ())
print(f"  reading from empty input -> fault={starved.fault!r}, output={list(starved.output)}")
