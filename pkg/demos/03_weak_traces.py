"""Weak traces of an automaton with epsilon moves.

Iterating tr -> tr . alpha from the empty trace accumulates accepted words
one Kleisli step at a time; the limit is the accepted language of each
state. A silent self-loop shows why the least fixed point is the right
one: every word set is a fixed point there, but nothing is accepted.
"""

from pathlib import Path

from kleisli import epsilon_na, io_formats, reglang, trace_exact, trace_iterate
from kleisli.trace import is_fixed_point

here = Path(__file__).parent
loop = io_formats.read_json((here / "data" / "loop.json").read_bytes(), surface=True)

for n in range(1, 5):
    tr = trace_iterate(loop, n)
    row = ", ".join(f"{s} -> {{{', '.join(''.join(w) or 'ε' for w in sorted(ws))}}}"
                    for s, ws in zip(tr.space.names, tr.values))
    print(f"tr_{n}: {row}")

exact = trace_exact(loop)
for s in loop.space.names:
    words = reglang.enumerate_upto(exact[s], 3)
    print(f"{s}: {[''.join(w) or 'ε' for w in words]} ...")

spin = epsilon_na(["x"], ["a"], [("x", "eps", "x")])
print("silent loop accepts nothing:", reglang.is_empty(trace_exact(spin)["x"]))
print("yet {a} is also a fixed point:",
      is_fixed_point((reglang.from_words([("a",)], ("a",)),), spin))
