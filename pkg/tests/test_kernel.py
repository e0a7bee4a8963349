import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleisli.errors import MonadMismatch, NonMonotoneDetected, SpaceMismatch
from kleisli.kernel import (
    Alphabet, Effect, ENASurface, Monad, Morphism, StateSpace,
    bottom, check_monad_laws, compose, disjoint_union, embed_underline, epsilon_na,
    identity, join, leq, lfp, lift, lts, pow_system, surface_of, word_system,
)

from strategies import composable_triples, morphisms, parallel_pairs

ALL = list(Monad)


def triples(m):
    """Edges of a morphism as a set of (x, step) pairs, bare words tagged."""
    out = set()
    for x, eff in enumerate(m.image):
        out |= {(x, s) for s in eff.steps}
        out |= {(x, ("bare", w)) for w in eff.bare}
    return out


def brute_compose(g, f):
    """Kleisli composite from the multiplication of each monad, written
    over explicit edge sets."""
    tau = f.alphabet.silent
    out = [set() for _ in f.source]
    bare = [set() for _ in f.source]
    for x, s in triples(f):
        if isinstance(s, tuple) and s[0] == "bare":
            bare[x].add(s[1])
            continue
        for y2, t in triples(g):
            if f.monad is Monad.POW:
                if y2 == s:
                    out[x].add(t)
                continue
            label, y = s
            if y2 != y:
                continue
            if t[0] == "bare":
                bare[x].add(label + t[1])
            elif f.monad is Monad.LTS:
                if label == tau:
                    out[x].add(t)
                elif t[0] == tau:
                    out[x].add((label, t[1]))
            else:
                out[x].add((label + t[0], t[1]))
    return [Effect(frozenset(a), frozenset(b)) for a, b in zip(out, bare)]


@pytest.mark.parametrize("monad", ALL)
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_compose_matches_edge_oracle(monad, data):
    f, g, _ = data.draw(composable_triples(monad))
    assert list(compose(g, f).image) == brute_compose(g, f)


@pytest.mark.parametrize("monad", ALL)
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_monad_laws(monad, data):
    assert check_monad_laws(monad, [data.draw(composable_triples(monad))]).ok


@pytest.mark.parametrize("monad", ALL)
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_composition_preserves_joins(monad, data):
    f1, f2 = data.draw(parallel_pairs(monad))
    n = len(f1.target)
    g = data.draw(morphisms(monad, n, data.draw(st.integers(1, 3))))
    assert compose(g, join(f1, f2)) == join(compose(g, f1), compose(g, f2))
    h = data.draw(morphisms(monad, data.draw(st.integers(1, 3)), len(f1.source)))
    assert compose(join(f1, f2), h) == join(compose(f1, h), compose(f2, h))
    assert leq(f1, join(f1, f2)) and leq(f2, join(f1, f2))


@pytest.mark.parametrize("monad", [Monad.POW, Monad.LTS, Monad.FREE_LTS])
@given(data=st.data())
@settings(max_examples=40, deadline=None)
def test_bottom_is_a_zero(monad, data):
    f = data.draw(morphisms(monad, 2, 3))
    assert compose(f, bottom(monad, f.source, f.source, f.alphabet)) == bottom(
        monad, f.source, f.target, f.alphabet)
    assert compose(bottom(monad, f.target, f.target, f.alphabet), f) == bottom(
        monad, f.source, f.target, f.alphabet)


def test_ena_bottom_keeps_bare_words_on_the_right():
    f = word_system(Monad.ENA, ["x"], ["a"], [("x", "a", "x")], bare=[("x", "a")])
    z = bottom(Monad.ENA, f.source, f.source, f.alphabet)
    assert compose(f, z) == z
    assert compose(z, f).image[0] == Effect(frozenset(), frozenset({("a",)}))


def test_lts_composition_absorbs_tau():
    alpha = lts(["x", "y", "z"], ["a", "b"], [("x", "tau", "y"), ("y", "a", "z"), ("z", "b", "x")])
    two = compose(alpha, alpha)
    assert two.image[0].steps == {("a", 2)}
    assert two.image[1].steps == frozenset()  # a then b is two visible letters
    assert two.image[2].steps == {("b", 1)}


def test_identity_and_lift():
    sp = StateSpace(("p", "q"))
    one = identity(Monad.LTS, sp, Alphabet(("a",)))
    assert one.image[0].steps == {("tau", 0)}
    f = lift([1, 1], Monad.ENA, sp, sp, Alphabet(("a",), "eps"))
    assert f.image[0].steps == {((), 1)}
    with pytest.raises(SpaceMismatch):
        lift([0], Monad.POW, sp, sp)


def test_validation_rejects_bad_effects():
    sp = StateSpace(("p",))
    with pytest.raises(SpaceMismatch):
        Morphism(Monad.LTS, sp, sp, Alphabet(("a",)), [Effect(frozenset({("a", 3)}))])
    with pytest.raises(Exception):
        Morphism(Monad.LTS, sp, sp, Alphabet(("a",)), [Effect(frozenset({("c", 0)}))])
    with pytest.raises(Exception):
        Morphism(Monad.FREE_LTS, sp, sp, Alphabet(("a",)), [Effect(frozenset(), frozenset({()}))])
    with pytest.raises(Exception):
        StateSpace(("p", "p"))


def test_mixed_monads_do_not_compose():
    a = pow_system(["x"], [("x", "x")])
    b = lts(["x"], [], [("x", "tau", "x")])
    with pytest.raises(MonadMismatch):
        compose(a, b)


def test_lfp_computes_reachability_and_detects_non_monotone_steps():
    alpha = pow_system(["0", "1", "2"], [("0", "1"), ("1", "2")])
    one = identity(Monad.POW, alpha.source)
    fix = lfp(lambda x: join(one, compose(x, alpha)), bottom(Monad.POW, alpha.source, alpha.source))
    assert fix.exact
    assert [sorted(e.steps) for e in fix.value.image] == [[0, 1, 2], [1, 2], [2]]
    flip = [one, bottom(Monad.POW, alpha.source, alpha.source)]
    with pytest.raises(NonMonotoneDetected):
        lfp(lambda x: flip[0] if x == flip[1] else flip[1], flip[1])


def test_lfp_reports_exhausted_fuel():
    # an ascending chain of words that never stabilises
    f = word_system(Monad.FREE_LTS, ["x"], ["a"], [("x", "a", "x")])
    one = identity(Monad.FREE_LTS, f.source, f.alphabet)
    fix = lfp(lambda x: join(one, compose(x, f)),
              bottom(Monad.FREE_LTS, f.source, f.source, f.alphabet), fuel=5)
    assert not fix.exact and fix.iterations == 5


def test_embed_and_surface_are_inverse():
    e = epsilon_na(["x", "y"], ["a"], [("x", "eps", "y"), ("y", "a", "x")], final=["y"])
    under = embed_underline(e)
    assert under.monad is Monad.ENA
    assert under.image[0].steps == {((), 1)}
    assert under.image[1].bare == {()}
    assert surface_of(under) == e
    with pytest.raises(ValueError):
        surface_of(word_system(Monad.ENA, ["x"], ["a"], [("x", "aa", "x")]))


def test_disjoint_union_prefixes_names():
    a = lts(["x"], ["a"], [("x", "a", "x")])
    u = disjoint_union(a, a)
    assert u.source.names == ("1:x", "2:x")
    assert u.image[1].steps == {("a", 1)}


def test_surface_rejects_out_of_range_final():
    base = lts(["x"], [], [], silent="eps")
    with pytest.raises(SpaceMismatch):
        ENASurface(base, frozenset({2}))
