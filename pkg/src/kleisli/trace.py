"""Weak trace semantics of automata with epsilon moves.

A trace map is an arrow ``X -o 0`` in the Kleisli category of the ENA
monad, i.e. a word set per state. Finite iterates ``tr_n = tr_{n-1}.alpha``
are computed with ordinary Kleisli composition; the exact (least) fixed
point is the bare component of the free saturation.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import reglang
from .errors import BadSplit, SpaceMismatch, WrongMonad
from .kernel import (
    ENASurface, Effect, Monad, Morphism, StateSpace,
    bottom, compose, embed_underline, lift,
)
from .saturation import saturate_free

EMPTY_SPACE = StateSpace(())


def _ena(alpha) -> Morphism:
    if isinstance(alpha, ENASurface):
        return embed_underline(alpha)
    if isinstance(alpha, Morphism) and alpha.monad is Monad.LTS:
        # an LTS is an automaton without final states
        return embed_underline(ENASurface(alpha))
    if not isinstance(alpha, Morphism) or alpha.monad is not Monad.ENA or not alpha.is_system:
        raise WrongMonad("expected an ENA system")
    return alpha


@dataclass(frozen=True, eq=False)
class TraceMap:
    """Per-state traces: finite word sets (``mode == "bounded"``, the ``k``-th
    iterate) or regular languages (``mode == "exact"``)."""

    space: StateSpace
    mode: str
    k: int | None
    values: tuple

    def __getitem__(self, x):
        if isinstance(x, str):
            x = self.space.index(x)
        return self.values[x]

    def as_morphism(self, alphabet) -> Morphism:
        if self.mode != "bounded":
            raise ValueError("only bounded traces are finite")
        return trace_morphism(self.space, alphabet, self.values)


def trace_morphism(space, alphabet, words) -> Morphism:
    """The arrow ``X -o 0`` mapping state ``x`` to the word set ``words[x]``."""
    image = [Effect(frozenset(), frozenset(tuple(w) for w in ws)) for ws in words]
    return Morphism(Monad.ENA, space, EMPTY_SPACE, alphabet, image)


def trace_iterate(alpha, n: int) -> TraceMap:
    """``tr_n``: ``n`` Kleisli compositions with ``alpha`` starting from bottom."""
    alpha = _ena(alpha)
    if n < 0:
        raise ValueError("n must be non-negative")
    tr = bottom(Monad.ENA, alpha.source, EMPTY_SPACE, alpha.alphabet)
    for _ in range(n):
        tr = compose(tr, alpha)
    return TraceMap(alpha.source, "bounded", n, tuple(eff.bare for eff in tr.image))


def trace_exact(alpha) -> TraceMap:
    """Accepted language of every state, as regular languages."""
    alpha = _ena(alpha)
    wm = saturate_free(alpha)
    return TraceMap(alpha.source, "exact", None, wm.bare)


def step_languages(langs, alpha) -> tuple:
    """Symbolic ``tr.alpha``: for each state the union of ``s . tr(y)`` over
    its steps ``(s, y)`` and of its bare words."""
    alpha = _ena(alpha)
    vis = alpha.alphabet.visible
    out = []
    for eff in alpha.image:
        parts = [reglang.concat(reglang.from_words([w], vis), langs[y]) for w, y in eff.steps]
        if eff.bare:
            parts.append(reglang.from_words(eff.bare, vis))
        out.append(reglang.union_all(parts, vis))
    return tuple(out)


def is_fixed_point(langs, alpha) -> bool:
    """``tr = tr.alpha`` decided with language equivalence."""
    return all(reglang.equivalent(a, b)
               for a, b in zip(step_languages(langs, alpha), langs))


def below(bounded: TraceMap, exact: TraceMap) -> bool:
    """Every word of a bounded trace belongs to the exact trace."""
    return all(reglang.member(L, w)
               for ws, L in zip(bounded.values, exact.values) for w in ws)


@dataclass(frozen=True)
class UniformityReport:
    premise: bool
    conclusion: bool | None


def check_uniformity(alpha, h, beta) -> UniformityReport:
    """If ``h`` is a homomorphism from ``alpha`` to ``beta``
    (``h#.alpha = beta.h#``), check that it carries exact traces along:
    ``tr_alpha = tr_beta.h#``.

    ``h`` is a plain map (a sequence of target indices) or a free-LTS
    morphism, which is read as an ENA morphism without bare words.
    """
    alpha, beta = _ena(alpha), _ena(beta)
    if alpha.alphabet != beta.alphabet:
        raise SpaceMismatch("systems use different alphabets")
    if isinstance(h, Morphism):
        if h.monad is not Monad.FREE_LTS:
            raise WrongMonad("h must be a plain map or a free-LTS morphism")
        if h.source != alpha.source or h.target != beta.source:
            raise SpaceMismatch("h does not run from alpha to beta")
        if h.alphabet.visible != alpha.alphabet.visible:
            raise SpaceMismatch("h uses a different alphabet")
        hs = Morphism(Monad.ENA, h.source, h.target, alpha.alphabet,
                      [Effect(eff.steps) for eff in h.image])
    else:
        if len(h) != len(alpha.source):
            raise SpaceMismatch("h must map every state of alpha")
        if any(not 0 <= y < len(beta.source) for y in h):
            raise SpaceMismatch("h leaves the state space of beta")
        hs = lift(list(h), Monad.ENA, alpha.source, beta.source, alpha.alphabet)
    if compose(hs, alpha) != compose(beta, hs):
        return UniformityReport(False, None)
    ta, tb = trace_exact(alpha), trace_exact(beta)
    vis = alpha.alphabet.visible
    ok = all(
        reglang.equivalent(
            reglang.union_all([reglang.concat(reglang.from_words([w], vis), tb.values[y])
                               for w, y in eff.steps], vis),
            ta.values[x])
        for x, eff in enumerate(hs.image))
    return UniformityReport(True, ok)


# -- Conway operator of the free LTS monad -------------------------------------

@dataclass(frozen=True, eq=False)
class Dagger:
    """``f†: X -o A``; ``langs[x][k]`` is the language from ``x`` to ``exits[k]``."""

    space: StateSpace
    exits: tuple
    langs: tuple

    def __getitem__(self, x):
        if isinstance(x, str):
            x = self.space.index(x)
        return dict(zip(self.exits, self.langs[x]))


def _split(f: Morphism, exits):
    names = f.target.names
    n = len(f.source)
    if exits is None:
        if names[:n] != f.source.names:
            raise BadSplit("target does not start with a copy of the source")
        inner = list(range(n))
        outer = list(range(n, len(names)))
    else:
        exits = list(exits)
        missing = [a for a in exits if a not in f.target]
        if missing:
            raise BadSplit(f"unknown exits {missing!r}")
        outer = [f.target.index(a) for a in exits]
        inner = [i for i in range(len(names)) if i not in set(outer)]
        if tuple(names[i] for i in inner) != f.source.names:
            raise BadSplit("non-exit part of the target is not the source")
    return inner, outer


def conway_dagger(f: Morphism, exits=None) -> Dagger:
    """Solve the feedback loop of ``f: X -o X + A`` in the free LTS monad.

    ``f†(x)(a)`` is the language of words along paths from ``x`` that stay
    inside ``X`` and finally step into ``a``. By default ``A`` is the part of
    the target after a copy of ``X``; ``exits`` names it explicitly.
    """
    if f.monad is not Monad.FREE_LTS:
        raise WrongMonad("conway_dagger expects a free-LTS morphism")
    inner, outer = _split(f, exits)
    node = {t: i for i, t in enumerate(inner)}
    k = len(inner)
    exit_node = {t: k + j for j, t in enumerate(outer)}
    node.update(exit_node)
    edges = [(x, w, node[t]) for x, eff in enumerate(f.image) for w, t in eff.steps]
    graph = reglang.word_graph(k + len(outer), edges)
    vis = f.alphabet.visible
    langs = tuple(tuple(reglang.RegLang(graph, x, (exit_node[t],), vis) for t in outer)
                  for x in range(k))
    return Dagger(f.source, tuple(f.target.names[t] for t in outer), langs)


def dagger_fixed_point_holds(f: Morphism, dag: Dagger, exits=None) -> bool:
    """``f† = [f†, unit].f`` checked per state and exit."""
    inner, outer = _split(f, exits)
    pos = {t: i for i, t in enumerate(inner)}
    vis = f.alphabet.visible
    for x, eff in enumerate(f.image):
        for j, a in enumerate(outer):
            parts = []
            for w, t in eff.steps:
                if t in pos:
                    parts.append(reglang.concat(reglang.from_words([w], vis), dag.langs[pos[t]][j]))
                elif t == a:
                    parts.append(reglang.from_words([w], vis))
            if not reglang.equivalent(reglang.union_all(parts, vis), dag.langs[x][j]):
                return False
    return True


def exception_form(alpha) -> Morphism:
    """Re-read an ENA system ``X -> P(S* x X + S*)`` as a free-LTS arrow
    ``X -o X + 1``: each bare word ``s`` becomes a step ``(s, done)``."""
    alpha = _ena(alpha)
    done = "•"
    while done in alpha.source:
        done += "'"
    target = StateSpace(alpha.source.names + (done,))
    n = len(alpha.source)
    image = [Effect(eff.steps | frozenset((w, n) for w in eff.bare)) for eff in alpha.image]
    return Morphism(Monad.FREE_LTS, alpha.source, target, alpha.alphabet, image)


def trace_via_dagger(alpha) -> tuple:
    dag = conway_dagger(exception_form(alpha))
    return tuple(row[0] for row in dag.langs)
