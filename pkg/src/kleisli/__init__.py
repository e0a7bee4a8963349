"""Saturation, weak bisimilarity and weak traces for finite systems,
computed in Kleisli categories of four finitary monads."""

from .errors import *  # noqa: F401,F403
from .kernel import (
    Alphabet, Effect, ENASurface, Fixpoint, LawReport, Monad, Morphism, StateSpace,
    bottom, check_monad_laws, compose, disjoint_union, embed_underline, epsilon_na,
    identity, join, leq, lfp, lift, lts, pow_system, surface_of, unit_effect, word_system,
)
from .reglang import RegLang
from .saturation import (
    WeakMatrix, elim_to_lts, project_to_lts, saturate_free, star, star_axioms_check,
    transitive_closure,
)
from .equivalence import (
    Partition, is_bisimulation, milner_oracle, quotient, strong_bisimilarity,
    union_quotient, weak_bisimilarity_free, weak_bisimilarity_star,
)
from .trace import (
    TraceMap, check_uniformity, conway_dagger, exception_form, trace_exact,
    trace_iterate, trace_via_dagger,
)
from .harness import GenConfig, SuiteReport, run_suite

__version__ = "0.1.0"
