"""Traces as a feedback loop.

Reading each accepting exit as a jump to a fresh state turns an automaton
into an arrow X -o X + 1 of the free LTS monad. Solving the feedback loop
with the Conway dagger yields, per state, the words that reach the exit:
the same languages as the trace fixed point.
"""

from pathlib import Path

from kleisli import conway_dagger, exception_form, io_formats, reglang, trace_exact
from kleisli.trace import dagger_fixed_point_holds

here = Path(__file__).parent
loop = io_formats.read_json((here / "data" / "loop.json").read_bytes(), surface=True)

f = exception_form(loop)
print("targets of the feedback arrow:", f.target.names)
dag = conway_dagger(f)
print("dagger satisfies its fixed-point equation:", dagger_fixed_point_holds(f, dag))
exact = trace_exact(loop)
for x, name in enumerate(loop.space.names):
    L = dag.langs[x][0]
    print(f"{name}: same language as the trace: {reglang.equivalent(L, exact[name])}")
