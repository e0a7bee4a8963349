"""Running the randomized property suites.

Each suite draws seeded random systems and checks one law. Reports are
identical for identical seeds, and a failing case is stored with its input
documents so it can be re-run on its own.
"""

from kleisli.harness import SUITES, GenConfig, run_suite

cfg = GenConfig(seed=2024, cases=100, max_states=6)
for name in SUITES:
    report = run_suite(name, cfg)
    print(report.to_text().rstrip(), f"[{report.wall_time:.2f}s]")
