"""Saturators: reflexive-transitive closures of systems in a Kleisli category.

``star`` computes the closure in the LTS monad itself, as the least fixed
point of ``x -> 1 v x.alpha``. ``saturate_free`` computes the closure in the
free monad, whose images are infinite word sets; it is returned as a matrix
of regular languages (:class:`WeakMatrix`) instead of an effect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import reglang
from .errors import WrongMonad
from .kernel import (
    Alphabet, Effect, ENASurface, Monad, Morphism, StateSpace,
    bottom, compose, embed_underline, identity, join, leq, lfp, lift,
)


def _fresh(name, taken):
    while name in taken:
        name += "'"
    return name


def _require_lts(alpha, what):
    if not isinstance(alpha, Morphism) or alpha.monad is not Monad.LTS or not alpha.is_system:
        raise WrongMonad(f"{what} expects an LTS system")


def _lts_star(alpha: Morphism) -> Morphism:
    one = identity(Monad.LTS, alpha.source, alpha.alphabet)
    bot = bottom(Monad.LTS, alpha.source, alpha.source, alpha.alphabet)
    return lfp(lambda x: join(one, compose(x, alpha)), bot).value


def tick_encoding(e: ENASurface):
    """Encode an ENA surface as an LTS: a fresh visible label ``tick`` from
    every final state to a fresh inert sink. Returns ``(lts, tick, sink)``."""
    base = e.lts
    tick = _fresh("✓", set(base.alphabet.labels))
    sink_name = _fresh("✓", set(base.source.names))
    space = StateSpace(base.source.names + (sink_name,))
    sink = len(base.source)
    alphabet = Alphabet(base.alphabet.visible + (tick,), base.alphabet.silent)
    image = [Effect(eff.steps | ({(tick, sink)} if x in e.final else set()))
             for x, eff in enumerate(base.image)]
    image.append(Effect())
    return Morphism(Monad.LTS, space, space, alphabet, image), tick, sink


def tick_decoding(encoded: Morphism, original: ENASurface, tick, sink) -> ENASurface:
    n = len(original.space)
    final = set()
    image = []
    for x in range(n):
        steps = set()
        for label, y in encoded.image[x].steps:
            if label == tick:
                final.add(x)
            elif y != sink:
                steps.add((label, y))
        image.append(Effect(frozenset(steps)))
    base = Morphism(Monad.LTS, original.space, original.space, original.alphabet, image)
    return ENASurface(base, frozenset(final))


def star(alpha):
    """Saturate an LTS, ``alpha* = 1 v alpha v alpha.alpha v ...``.

    ``(s, y) in alpha*(x)`` iff ``x`` reaches ``y`` by silent steps around
    at most one visible ``s``. An ENA surface is saturated in its own monad:
    the final marker then propagates backwards along epsilon paths.
    """
    if isinstance(alpha, ENASurface):
        encoded, tick, sink = tick_encoding(alpha)
        return tick_decoding(_lts_star(encoded), alpha, tick, sink)
    _require_lts(alpha, "star")
    return _lts_star(alpha)


def transitive_closure(alpha: Morphism) -> Morphism:
    """Least ``beta >= alpha`` with ``beta.alpha <= beta``: the closure
    without the reflexive unit."""
    _require_lts(alpha, "transitive_closure")
    bot = bottom(Monad.LTS, alpha.source, alpha.source, alpha.alphabet)
    return lfp(lambda x: join(alpha, compose(x, alpha)), bot).value


def is_closed(beta: Morphism) -> bool:
    one = identity(beta.monad, beta.source, beta.alphabet)
    return leq(one, beta) and leq(compose(beta, beta), beta)


@dataclass
class AxiomReport:
    reflexive: bool = True          # 1 <= alpha*
    extensive: bool = True          # alpha <= alpha*
    transitive: bool = True         # alpha*.alpha* <= alpha*
    minimal: bool = True            # below every supplied closed candidate
    minimal_tested: int = 0
    uniform: bool = True            # transported along supplied witnesses
    uniform_results: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.reflexive and self.extensive and self.transitive
                and self.minimal and self.uniform)


def star_axioms_check(alpha: Morphism, candidates=(), witnesses=()) -> AxiomReport:
    """Check the ordered-saturation axioms for ``star`` at ``alpha``.

    ``candidates`` probe minimality: each one that is reflexive, transitive
    and above ``alpha`` must lie above ``star(alpha)``. ``witnesses`` are
    pairs ``(fn, beta)`` with ``fn`` a plain map given as target indices and
    ``beta`` a system on its codomain; for each comparison the implication
    ``fn#.alpha [] beta.fn#  =>  fn#.alpha* [] beta*.fn#`` is tested.
    """
    s = star(alpha)
    one = identity(alpha.monad, alpha.source, alpha.alphabet)
    rep = AxiomReport(
        reflexive=leq(one, s),
        extensive=leq(alpha, s),
        transitive=leq(compose(s, s), s),
    )
    for beta in candidates:
        if leq(alpha, beta) and is_closed(beta):
            rep.minimal_tested += 1
            if not leq(s, beta):
                rep.minimal = False
    for k, (fn, beta) in enumerate(witnesses):
        f = lift(fn, Monad.LTS, alpha.source, beta.source, alpha.alphabet)
        beta_s = star(beta)
        for rel, cmp in (("<=", leq), (">=", lambda p, q: leq(q, p))):
            premise = cmp(compose(f, alpha), compose(beta, f))
            conclusion = cmp(compose(f, s), compose(beta_s, f)) if premise else None
            rep.uniform_results.append((k, rel, premise, conclusion))
            if premise and not conclusion:
                rep.uniform = False
    return rep


# -- saturation in the free monad ---------------------------------------------

@dataclass(frozen=True, eq=False)
class WeakMatrix:
    """The free-monad saturation of a word system.

    ``lang[x][y]`` is the set of words ``s`` with ``x =s=> y``; ``bare[x]``
    (ENA only, else ``None``) the words that lead from ``x`` into a bare
    accepted word.
    """

    space: StateSpace
    alphabet: Alphabet
    graph: reglang.Graph
    sink: int | None
    lang: tuple
    bare: tuple | None

    def to_block(self, x: int, ys) -> reglang.RegLang:
        """Words leading from ``x`` into some state of ``ys``."""
        return reglang.RegLang(self.graph, x, ys, self.alphabet.visible)


def _word_system(alpha):
    if isinstance(alpha, ENASurface) or (
            isinstance(alpha, Morphism) and alpha.monad is Monad.LTS):
        alpha = embed_underline(alpha)
    if not isinstance(alpha, Morphism) or alpha.monad not in (Monad.FREE_LTS, Monad.ENA):
        raise WrongMonad("expected a free-LTS or ENA system")
    if not alpha.is_system:
        raise WrongMonad("expected a system (source = target)")
    return alpha


def saturate_free(alpha) -> WeakMatrix:
    """Path languages of the word-labelled graph of ``alpha``.

    One shared epsilon-NFA over the states (plus a sink collecting bare
    words); each cell is that graph with a different start/accept pair.
    """
    alpha = _word_system(alpha)
    n = len(alpha.source)
    ena = alpha.monad is Monad.ENA
    edges = [(x, w, y) for x, eff in enumerate(alpha.image) for w, y in eff.steps]
    sink = None
    if ena:
        sink = n
        edges += [(x, w, sink) for x, eff in enumerate(alpha.image) for w in eff.bare]
    graph = reglang.word_graph(n + (1 if ena else 0), edges)
    vis = alpha.alphabet.visible
    lang = tuple(tuple(reglang.RegLang(graph, x, (y,), vis) for y in range(n))
                 for x in range(n))
    bare = tuple(reglang.RegLang(graph, x, (sink,), vis) for x in range(n)) if ena else None
    return WeakMatrix(alpha.source, alpha.alphabet, graph, sink, lang, bare)


def project_to_lts(wm: WeakMatrix, silent: str | None = None) -> Morphism:
    """Apply ``h`` to the free saturation: keep words of length <= 1, the
    empty word becoming a silent step."""
    alphabet = wm.alphabet if silent is None else wm.alphabet.with_silent(silent)
    image = []
    for x in range(len(wm.space)):
        steps = set()
        for y in range(len(wm.space)):
            L = wm.lang[x][y]
            if reglang.member(L, ()):
                steps.add((alphabet.silent, y))
            for a in alphabet.visible:
                if reglang.member(L, (a,)):
                    steps.add((a, y))
        image.append(Effect(frozenset(steps)))
    return Morphism(Monad.LTS, wm.space, wm.space, alphabet, image)


def elim_to_lts(f: Morphism, strict: bool = False, silent: str = "tau") -> Morphism:
    """The monad morphism ``h`` applied pointwise to a free-LTS morphism.

    Words longer than one letter have no image; ``strict=True`` raises on
    them instead of dropping them.
    """
    if f.monad is not Monad.FREE_LTS:
        raise WrongMonad("elim_to_lts expects a free-LTS morphism")
    alphabet = f.alphabet.with_silent(silent) if f.alphabet.silent != silent else f.alphabet
    image = []
    for x, eff in enumerate(f.image):
        steps = set()
        for w, y in eff.steps:
            if len(w) == 0:
                steps.add((alphabet.silent, y))
            elif len(w) == 1:
                steps.add((w[0], y))
            elif strict:
                raise ValueError(f"word {w!r} at state {x} has no image under h")
        image.append(Effect(frozenset(steps)))
    return Morphism(Monad.LTS, f.source, f.target, alphabet, image)


def one_step_inequality(alpha: Morphism) -> bool:
    """Embedding of the LTS composite ``alpha.alpha`` lies below the free
    composite of the embedded system (the cotupling inequality behind the
    coincidence of the two saturators)."""
    _require_lts(alpha, "one_step_inequality")
    under = embed_underline(alpha)
    return leq(embed_underline(compose(alpha, alpha)), compose(under, under))
