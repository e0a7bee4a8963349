"""Saturating a labelled transition system.

A silent step followed by a visible one is a single weak move. The star
saturator adds exactly those weak moves as ordinary transitions, and the
free saturator keeps every path as a word, from which the same LTS is
recovered by keeping words of length at most one.
"""

from kleisli import lts, project_to_lts, saturate_free, star
from kleisli import io_formats, reglang

alpha = lts(["x", "y", "z"], ["a"], [("x", "tau", "y"), ("y", "a", "z"), ("z", "tau", "x")])
print("system:")
print(io_formats.write_aut(alpha).decode())

s = star(alpha)
print("star saturation (every weak move is now one step):")
print(io_formats.write_aut(s).decode())

wm = saturate_free(alpha)
print("free saturation, words from x to z up to length 4:")
print([" ".join(w) or "ε" for w in reglang.enumerate_upto(wm.lang[0][2], 4)])
print("projection of the free saturation equals star:", project_to_lts(wm) == s)
