"""Hypothesis strategies for small systems."""

from hypothesis import strategies as st

from kleisli.kernel import (
    Alphabet, Effect, ENASurface, Monad, Morphism, StateSpace,
)

LETTERS = ("a", "b")


def space(n):
    return StateSpace(tuple(f"s{i}" for i in range(n)))


words = st.lists(st.sampled_from(LETTERS), max_size=2).map(tuple)


@st.composite
def lts_systems(draw, max_states=4, silent="tau"):
    n = draw(st.integers(1, max_states))
    labels = LETTERS + (silent,)
    image = [Effect(frozenset(draw(st.sets(st.tuples(st.sampled_from(labels),
                                                     st.integers(0, n - 1)), max_size=5))))
             for _ in range(n)]
    sp = space(n)
    return Morphism(Monad.LTS, sp, sp, Alphabet(LETTERS, silent), image)


@st.composite
def ena_surfaces(draw, max_states=4):
    base = draw(lts_systems(max_states, silent="eps"))
    final = draw(st.sets(st.integers(0, len(base.source) - 1)))
    return ENASurface(base, frozenset(final))


def _effect(draw, monad, n_target, labels):
    if monad is Monad.POW:
        return Effect(frozenset(draw(st.sets(st.integers(0, n_target - 1), max_size=3))))
    if monad is Monad.LTS:
        return Effect(frozenset(draw(st.sets(
            st.tuples(st.sampled_from(labels), st.integers(0, n_target - 1)), max_size=3))))
    steps = frozenset(draw(st.sets(st.tuples(words, st.integers(0, n_target - 1)), max_size=3)))
    bare = frozenset(draw(st.sets(words, max_size=2))) if monad is Monad.ENA else frozenset()
    return Effect(steps, bare)


@st.composite
def morphisms(draw, monad, n_source, n_target):
    alphabet = Alphabet(() if monad is Monad.POW else LETTERS,
                        "tau" if monad in (Monad.POW, Monad.LTS) else "eps")
    labels = alphabet.labels
    image = [_effect(draw, monad, n_target, labels) for _ in range(n_source)]
    return Morphism(monad, space(n_source), space(n_target), alphabet, image)


@st.composite
def composable_triples(draw, monad):
    n = [draw(st.integers(1, 3)) for _ in range(4)]
    return tuple(draw(morphisms(monad, n[i], n[i + 1])) for i in range(3))


@st.composite
def parallel_pairs(draw, monad):
    a, b = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    return draw(morphisms(monad, a, b)), draw(morphisms(monad, a, b))
