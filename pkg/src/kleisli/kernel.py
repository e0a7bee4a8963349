"""Finite carriers, effect values and Kleisli arrows for four monads on Set.

The monads are a closed set:

``POW``       P X
``LTS``       P(Sigma_tau x X), silent steps form the unit
``FREE_LTS``  P(Sigma* x X), words concatenate
``ENA``       P(Sigma* x X + Sigma*), words plus a bare accepted-word part

A :class:`Morphism` ``f: X -o Y`` stores one :class:`Effect` per source
state. A morphism whose source and target coincide is a system (coalgebra).
Everything is immutable; equality is structural.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import MonadMismatch, SpaceMismatch, NonMonotoneDetected

Word = tuple  # tuple[str, ...]; () is the empty word
EMPTY_WORD: Word = ()


class Monad(enum.Enum):
    POW = "pow"
    LTS = "lts"
    FREE_LTS = "free-lts"
    ENA = "ena"


WORD_MONADS = (Monad.FREE_LTS, Monad.ENA)


@dataclass(frozen=True)
class StateSpace:
    names: tuple

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate state names in {names!r}")
        for n in names:
            if not isinstance(n, str):
                raise TypeError(f"state name {n!r} is not a string")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(range(len(self.names)))

    def index(self, name: str) -> int:
        try:
            return self._lookup[name]
        except KeyError:
            raise KeyError(f"unknown state {name!r}") from None

    @property
    def _lookup(self):
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {n: i for i, n in enumerate(self.names)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    def __contains__(self, name):
        return name in self._lookup


@dataclass(frozen=True)
class Alphabet:
    visible: tuple
    silent: str = "tau"

    def __post_init__(self):
        visible = tuple(self.visible)
        object.__setattr__(self, "visible", visible)
        if len(set(visible)) != len(visible):
            raise ValueError("duplicate letters in alphabet")
        for a in visible:
            if not isinstance(a, str) or not a:
                raise ValueError(f"letter {a!r} must be a non-empty string")
        if self.silent in visible:
            raise ValueError(f"silent label {self.silent!r} is also visible")

    @property
    def labels(self) -> tuple:
        """Visible letters followed by the silent label."""
        return self.visible + (self.silent,)

    def with_silent(self, silent: str) -> "Alphabet":
        return Alphabet(self.visible, silent)


@dataclass(frozen=True)
class Effect:
    """The value of ``T Y`` at one state.

    ``steps`` holds successors (``POW``), ``(label, y)`` pairs (``LTS``) or
    ``(word, y)`` pairs (word monads). ``bare`` is only populated for ``ENA``.
    """

    steps: frozenset = frozenset()
    bare: frozenset = frozenset()

    def __le__(self, other):
        return self.steps <= other.steps and self.bare <= other.bare

    def __or__(self, other):
        return Effect(self.steps | other.steps, self.bare | other.bare)

    def is_empty(self):
        return not self.steps and not self.bare

    def sorted_steps(self):
        return sorted(self.steps, key=_step_key)

    def sorted_bare(self):
        return sorted(self.bare, key=_word_key)


EMPTY = Effect()


def _word_key(w):
    return (len(w), w)


def _step_key(step):
    if isinstance(step, int):
        return (step,)
    label, y = step
    if isinstance(label, tuple):
        return (y, len(label), label)
    return (y, 0, (label,))


@dataclass(frozen=True)
class Morphism:
    """A Kleisli arrow ``source -o target`` for one of the four monads."""

    monad: Monad
    source: StateSpace
    target: StateSpace
    alphabet: Alphabet
    image: tuple

    def __post_init__(self):
        image = tuple(self.image)
        object.__setattr__(self, "image", image)
        if len(image) != len(self.source):
            raise SpaceMismatch(
                f"{len(image)} effects given for {len(self.source)} source states")
        for x, eff in enumerate(image):
            _validate_effect(self.monad, eff, len(self.target), self.alphabet, x)

    @classmethod
    def _trusted(cls, monad, source, target, alphabet, image):
        m = object.__new__(cls)
        object.__setattr__(m, "monad", monad)
        object.__setattr__(m, "source", source)
        object.__setattr__(m, "target", target)
        object.__setattr__(m, "alphabet", alphabet)
        object.__setattr__(m, "image", tuple(image))
        return m

    @property
    def is_system(self) -> bool:
        return self.source == self.target

    @property
    def space(self) -> StateSpace:
        if not self.is_system:
            raise SpaceMismatch("morphism is not an endomorphism")
        return self.source

    def __getitem__(self, x: int) -> Effect:
        return self.image[x]

    def edges(self):
        """Yield ``(x, label_or_word, y)`` triples in canonical order."""
        if self.monad is Monad.POW:
            for x, eff in enumerate(self.image):
                for y in sorted(eff.steps):
                    yield x, None, y
            return
        for x, eff in enumerate(self.image):
            for label, y in eff.sorted_steps():
                yield x, label, y

    def __repr__(self):
        return (f"Morphism({self.monad.value}, {list(self.source.names)} -o "
                f"{list(self.target.names)}, {len(list(self.edges()))} steps)")


def _validate_effect(monad, eff, n_target, alphabet, x):
    if not isinstance(eff, Effect):
        raise TypeError(f"image of state {x} is not an Effect")
    if eff.bare and monad is not Monad.ENA:
        raise MonadMismatch(f"bare words only exist in the ena monad (state {x})")
    for step in eff.steps:
        if monad is Monad.POW:
            y = step
        else:
            label, y = step
            if monad is Monad.LTS:
                if label not in alphabet.visible and label != alphabet.silent:
                    raise ValueError(f"label {label!r} not in alphabet")
            else:
                _validate_word(label, alphabet)
        if not isinstance(y, int) or not 0 <= y < n_target:
            raise SpaceMismatch(f"successor {y!r} of state {x} out of range")
    for w in eff.bare:
        _validate_word(w, alphabet)


def _validate_word(w, alphabet):
    if not isinstance(w, tuple):
        raise TypeError(f"word {w!r} must be a tuple of letters")
    for a in w:
        if a not in alphabet.visible:
            raise ValueError(f"letter {a!r} not in visible alphabet")


def as_word(w) -> Word:
    """Coerce ``"ab"``, ``["a", "b"]`` or ``("a", "b")`` to a word tuple."""
    if isinstance(w, str):
        return tuple(w)
    return tuple(w)


# -- constructors -------------------------------------------------------------

def _space(names):
    return names if isinstance(names, StateSpace) else StateSpace(tuple(names))


def lts(names, visible, transitions, silent="tau") -> Morphism:
    """Build an LTS from ``(from, label, to)`` triples over state names."""
    space = _space(names)
    alphabet = Alphabet(tuple(visible), silent)
    steps = [set() for _ in space]
    for src, label, dst in transitions:
        steps[space.index(src)].add((label, space.index(dst)))
    return Morphism(Monad.LTS, space, space, alphabet,
                    tuple(Effect(frozenset(s)) for s in steps))


def word_system(monad, names, visible, transitions, bare=(), silent="eps") -> Morphism:
    """Build a ``FREE_LTS`` or ``ENA`` system from ``(from, word, to)`` triples.

    ``bare`` is an iterable of ``(state, word)`` pairs (``ENA`` only).
    """
    space = _space(names)
    alphabet = Alphabet(tuple(visible), silent)
    steps = [set() for _ in space]
    bares = [set() for _ in space]
    for src, w, dst in transitions:
        steps[space.index(src)].add((as_word(w), space.index(dst)))
    for src, w in bare:
        bares[space.index(src)].add(as_word(w))
    return Morphism(monad, space, space, alphabet,
                    tuple(Effect(frozenset(s), frozenset(b)) for s, b in zip(steps, bares)))


def pow_system(names, edges) -> Morphism:
    space = _space(names)
    steps = [set() for _ in space]
    for src, dst in edges:
        steps[space.index(src)].add(space.index(dst))
    return Morphism(Monad.POW, space, space, Alphabet(()),
                    tuple(Effect(frozenset(s)) for s in steps))


@dataclass(frozen=True)
class ENASurface:
    """An automaton with epsilon moves: an LTS whose silent label is epsilon,
    plus the set of final states (the ``1`` summand of its type)."""

    lts: Morphism
    final: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "final", frozenset(self.final))
        if self.lts.monad is not Monad.LTS or not self.lts.is_system:
            raise MonadMismatch("an ENA surface wraps an LTS system")
        for x in self.final:
            if not 0 <= x < len(self.lts.source):
                raise SpaceMismatch(f"final state {x!r} out of range")

    @property
    def space(self):
        return self.lts.source

    @property
    def alphabet(self):
        return self.lts.alphabet


def epsilon_na(names, visible, transitions, final=(), silent="eps") -> ENASurface:
    base = lts(names, visible, transitions, silent=silent)
    return ENASurface(base, frozenset(base.source.index(f) for f in final))


# -- Kleisli structure --------------------------------------------------------

def _check_composable(g, f):
    if f.monad is not g.monad:
        raise MonadMismatch(f"cannot compose {g.monad.value} after {f.monad.value}")
    if f.target != g.source:
        raise SpaceMismatch("target of f differs from source of g")
    if f.alphabet != g.alphabet:
        raise MonadMismatch("morphisms use different alphabets")


def compose(g: Morphism, f: Morphism) -> Morphism:
    """Kleisli composite ``g . f`` (first ``f``, then ``g``)."""
    _check_composable(g, f)
    gi = g.image
    out = []
    if f.monad is Monad.POW:
        for eff in f.image:
            acc = set()
            for y in eff.steps:
                acc |= gi[y].steps
            out.append(Effect(frozenset(acc)))
    elif f.monad is Monad.LTS:
        tau = f.alphabet.silent
        for eff in f.image:
            acc = set()
            for sigma, y in eff.steps:
                for rho, z in gi[y].steps:
                    if rho == tau:
                        acc.add((sigma, z))
                    elif sigma == tau:
                        acc.add((rho, z))
            out.append(Effect(frozenset(acc)))
    else:
        with_bare = f.monad is Monad.ENA
        for eff in f.image:
            acc = set()
            bare = set(eff.bare)
            for s, y in eff.steps:
                nxt = gi[y]
                for t, z in nxt.steps:
                    acc.add((s + t, z))
                if with_bare:
                    for t in nxt.bare:
                        bare.add(s + t)
            out.append(Effect(frozenset(acc), frozenset(bare)))
    return Morphism._trusted(f.monad, f.source, g.target, f.alphabet, out)


def unit_effect(monad: Monad, alphabet: Alphabet, y: int) -> Effect:
    if monad is Monad.POW:
        return Effect(frozenset((y,)))
    if monad is Monad.LTS:
        return Effect(frozenset(((alphabet.silent, y),)))
    return Effect(frozenset(((EMPTY_WORD, y),)))


def identity(monad: Monad, space: StateSpace, alphabet: Alphabet = Alphabet(())) -> Morphism:
    return Morphism._trusted(monad, space, space, alphabet,
                             [unit_effect(monad, alphabet, x) for x in space])


def lift(fn: Sequence[int], monad: Monad, source: StateSpace, target: StateSpace,
         alphabet: Alphabet = Alphabet(())) -> Morphism:
    """The Kleisli arrow ``fn#`` = unit after ``fn`` for a plain map given as
    a sequence of target indices."""
    if len(fn) != len(source):
        raise SpaceMismatch("plain map has wrong length")
    return Morphism(monad, source, target, alphabet,
                    [unit_effect(monad, alphabet, y) for y in fn])


def bottom(monad: Monad, source: StateSpace, target: StateSpace,
           alphabet: Alphabet = Alphabet(())) -> Morphism:
    return Morphism._trusted(monad, source, target, alphabet, [EMPTY] * len(source))


def _check_parallel(f, g):
    if f.monad is not g.monad:
        raise MonadMismatch(f"{f.monad.value} vs {g.monad.value}")
    if f.source != g.source or f.target != g.target:
        raise SpaceMismatch("morphisms are not parallel")
    if f.alphabet != g.alphabet:
        raise MonadMismatch("morphisms use different alphabets")


def join(f: Morphism, g: Morphism) -> Morphism:
    _check_parallel(f, g)
    return Morphism._trusted(f.monad, f.source, f.target, f.alphabet,
                             [a | b for a, b in zip(f.image, g.image)])


def leq(f: Morphism, g: Morphism) -> bool:
    _check_parallel(f, g)
    return all(a <= b for a, b in zip(f.image, g.image))


def disjoint_union(a: Morphism, b: Morphism, prefixes=("1:", "2:")) -> Morphism:
    """The coproduct system on ``A + B``; state names get ``prefixes``."""
    if a.monad is not b.monad:
        raise MonadMismatch(f"{a.monad.value} vs {b.monad.value}")
    if a.alphabet != b.alphabet:
        raise MonadMismatch("systems use different alphabets")
    n = len(a.source)
    space = StateSpace(tuple(prefixes[0] + s for s in a.source.names)
                       + tuple(prefixes[1] + s for s in b.source.names))

    def shift(eff):
        if a.monad is Monad.POW:
            return Effect(frozenset(y + n for y in eff.steps))
        return Effect(frozenset((l, y + n) for l, y in eff.steps), eff.bare)

    return Morphism._trusted(a.monad, space, space, a.alphabet,
                             list(a.image) + [shift(e) for e in b.image])


# -- least fixed points -------------------------------------------------------

class Fixpoint(NamedTuple):
    value: object
    exact: bool
    iterations: int


def height_bound(m: Morphism):
    """Height of the finite lattice of parallel morphisms, or None."""
    n, k = len(m.source), len(m.target)
    if m.monad is Monad.POW:
        return n * k
    if m.monad is Monad.LTS:
        return n * (len(m.alphabet.visible) + 1) * k
    return None


def lfp(step: Callable, bottom: Morphism, fuel: int | None = None,
        order: Callable = leq) -> Fixpoint:
    """Kleene iteration ``bottom, step(bottom), ...`` until it stabilises.

    Stops after ``fuel`` applications of ``step`` with ``exact=False`` when
    no fixed point was reached. ``step`` must be monotone; a descending pair
    of consecutive iterates raises :class:`NonMonotoneDetected`.
    """
    if fuel is None:
        h = height_bound(bottom) if isinstance(bottom, Morphism) else None
        fuel = 10 * (h + 1) if h is not None else 1000
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    x = bottom
    for i in range(1, fuel + 1):
        nxt = step(x)
        if nxt == x:
            return Fixpoint(x, True, i)
        if not order(x, nxt):
            raise NonMonotoneDetected(f"iterate {i} is not above iterate {i - 1}")
        x = nxt
    return Fixpoint(x, False, fuel)


# -- embedding into the free monads --------------------------------------------

def embed_underline(alpha):
    """Send an LTS to the free LTS monad, or an ENA surface to the ENA monad.

    Visible labels become one-letter words, silent steps the empty word and
    the final marker the bare empty word.
    """
    if isinstance(alpha, ENASurface):
        base, final, monad = alpha.lts, alpha.final, Monad.ENA
    elif isinstance(alpha, Morphism) and alpha.monad is Monad.LTS:
        base, final, monad = alpha, frozenset(), Monad.FREE_LTS
    else:
        raise MonadMismatch("embed_underline expects an LTS or an ENA surface")
    silent = base.alphabet.silent
    out = []
    for x, eff in enumerate(base.image):
        steps = frozenset(((() if l == silent else (l,)), y) for l, y in eff.steps)
        out.append(Effect(steps, frozenset({()}) if x in final else frozenset()))
    return Morphism._trusted(monad, base.source, base.target, base.alphabet, out)


def surface_of(m: Morphism) -> ENASurface:
    """Inverse of :func:`embed_underline` on ENA systems with words of length
    at most one and bare part within ``{eps}``."""
    if m.monad is not Monad.ENA:
        raise MonadMismatch("surface_of expects an ena system")
    silent = m.alphabet.silent
    out, final = [], set()
    for x, eff in enumerate(m.image):
        steps = set()
        for w, y in eff.steps:
            if len(w) > 1:
                raise ValueError(f"word {w!r} at state {x} is longer than one letter")
            steps.add((w[0] if w else silent, y))
        if eff.bare - {()}:
            raise ValueError(f"state {x} accepts non-empty bare words")
        if eff.bare:
            final.add(x)
        out.append(Effect(frozenset(steps)))
    return ENASurface(Morphism._trusted(Monad.LTS, m.source, m.target, m.alphabet, out),
                      frozenset(final))


# -- extensional monad-law checking -------------------------------------------

@dataclass
class LawReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def check_monad_laws(monad: Monad, samples: Iterable) -> LawReport:
    """Check unit and associativity laws on composable triples ``(f, g, h)``
    with ``f: X -o Y``, ``g: Y -o Z``, ``h: Z -o W``."""
    report = LawReport()
    for k, (f, g, h) in enumerate(samples):
        for m in (f, g, h):
            if m.monad is not monad:
                raise MonadMismatch(f"sample {k} mixes monads")
        report.checked += 1
        for name, m in (("f", f), ("g", g), ("h", h)):
            one_src = identity(monad, m.source, m.alphabet)
            one_tgt = identity(monad, m.target, m.alphabet)
            if compose(m, one_src) != m:
                report.violations.append(f"sample {k}: {name}.1 != {name}")
            if compose(one_tgt, m) != m:
                report.violations.append(f"sample {k}: 1.{name} != {name}")
        if compose(h, compose(g, f)) != compose(compose(h, g), f):
            report.violations.append(f"sample {k}: h.(g.f) != (h.g).f")
    return report
