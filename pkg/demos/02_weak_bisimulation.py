"""Weak bisimilarity of a vending machine and its specification.

The implementation commits internally to tea or coffee after the coin; the
specification lets the customer choose. They are not weakly bisimilar.
A copy of the specification with a silent detour after the coin is weakly
but not strongly bisimilar to it.
"""

from pathlib import Path

from kleisli import (
    io_formats, lts, milner_oracle, strong_bisimilarity, union_quotient,
    weak_bisimilarity_free, weak_bisimilarity_star,
)

here = Path(__file__).parent
impl = io_formats.read_aut((here / "data" / "vending.aut").read_bytes(),
                           alphabet=("coffee", "coin", "tea"))
spec = lts(["s0", "s1"], ["coffee", "coin", "tea"],
           [("s0", "coin", "s1"), ("s1", "tea", "s0"), ("s1", "coffee", "s0")])
slow = lts(["t0", "t1", "t2"], ["coffee", "coin", "tea"],
           [("t0", "coin", "t1"), ("t1", "tau", "t2"), ("t2", "tea", "t0"),
            ("t2", "coffee", "t0")])

for name, other in [("implementation", impl), ("slow specification", slow)]:
    part = weak_bisimilarity_star(spec, other)
    same = part.same(0, len(spec.source))
    print(f"spec ~weak~ {name}: {same}")
    print(part.describe())

print("strong: spec ~ slow:", strong_bisimilarity(spec, slow).same(0, 2))
print("free-saturation partition agrees:",
      weak_bisimilarity_free(impl) == weak_bisimilarity_star(impl))
print("double-arrow oracle agrees:", milner_oracle(impl) == weak_bisimilarity_star(impl))

print("weak minimization of the slow specification:")
print(io_formats.write_aut(union_quotient(slow, weak_bisimilarity_star(slow))).decode())
