import itertools
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleisli import reglang
from kleisli.reglang import (
    canonical_key, concat, empty, enumerate_upto, epsilon, equivalent, from_words,
    is_empty, member, minimal_dfa, star, subset, to_dot, union, union_all, word_graph,
)

AB = ("a", "b")


def all_words(maxlen, alphabet=AB):
    for n in range(maxlen + 1):
        yield from itertools.product(alphabet, repeat=n)


# expression trees, evaluated both as RegLang and as a Python regex
leaf = st.one_of(
    st.just(("empty",)),
    st.just(("eps",)),
    st.lists(st.sampled_from(AB), min_size=1, max_size=2).map(lambda w: ("word", tuple(w))),
)
exprs = st.recursive(
    leaf,
    lambda sub: st.one_of(
        st.tuples(st.just("union"), sub, sub),
        st.tuples(st.just("concat"), sub, sub),
        st.tuples(st.just("star"), sub),
    ),
    max_leaves=6,
)


def build(e):
    tag = e[0]
    if tag == "empty":
        return empty(AB)
    if tag == "eps":
        return epsilon(AB)
    if tag == "word":
        return from_words([e[1]], AB)
    if tag == "union":
        return union(build(e[1]), build(e[2]))
    if tag == "concat":
        return concat(build(e[1]), build(e[2]))
    return star(build(e[1]))


def regex(e):
    tag = e[0]
    if tag == "empty":
        return "(?!)"
    if tag == "eps":
        return "(?:)"
    if tag == "word":
        return "".join(e[1])
    if tag == "union":
        return f"(?:{regex(e[1])}|{regex(e[2])})"
    if tag == "concat":
        return f"(?:{regex(e[1])})(?:{regex(e[2])})"
    return f"(?:{regex(e[1])})*"


def run(d, q, w):
    for a in w:
        q = d.trans[q][d.alphabet.index(a)]
    return q


def separating_word(d1, q1, d2, q2):
    """Shortest word accepted from exactly one of two DFA states, by
    breadth-first search over state pairs; None if there is none."""
    seen = {(q1, q2): ()}
    frontier = [(q1, q2)]
    while frontier:
        nxt = []
        for p, q in frontier:
            w = seen[(p, q)]
            if (p in d1.accepting) != (q in d2.accepting):
                return w
            for k, a in enumerate(d1.alphabet):
                pair = (d1.trans[p][k], d2.trans[q][k])
                if pair not in seen:
                    seen[pair] = w + (a,)
                    nxt.append(pair)
        frontier = nxt
    return None


@given(exprs)
@settings(max_examples=150, deadline=None)
def test_membership_matches_python_regex(e):
    L, pat = build(e), re.compile(regex(e))
    for w in all_words(5):
        assert member(L, w) == bool(pat.fullmatch("".join(w)))


@given(exprs)
@settings(max_examples=100, deadline=None)
def test_enumeration_is_sorted_and_complete(e):
    L = build(e)
    got = enumerate_upto(L, 4)
    assert got == sorted(got, key=lambda w: (len(w), w))
    assert set(got) == {w for w in all_words(4) if member(L, w)}
    d = minimal_dfa(L)
    reachable_accept = separating_word(d, 0, minimal_dfa(empty(AB)), 0) is not None
    assert is_empty(L) == (not reachable_accept)


@given(exprs, exprs)
@settings(max_examples=150, deadline=None)
def test_equivalence_agrees_with_product_search(e1, e2):
    l1, l2 = build(e1), build(e2)
    witness = separating_word(minimal_dfa(l1), 0, minimal_dfa(l2), 0)
    assert equivalent(l1, l2) == (witness is None)
    if witness is not None:
        assert member(l1, witness) != member(l2, witness)
    assert equivalent(l1, l2) == (canonical_key(l1) == canonical_key(l2))
    assert subset(l1, union(l1, l2)) and subset(l2, union(l1, l2))
    extra_word = separating_word(minimal_dfa(union(l1, l2)), 0, minimal_dfa(l2), 0)
    assert subset(l1, l2) == (extra_word is None)


@given(exprs)
@settings(max_examples=100, deadline=None)
def test_minimal_dfa_is_minimal(e):
    L = build(e)
    d = minimal_dfa(L)
    for p in range(d.size):
        for q in range(p + 1, d.size):
            assert separating_word(d, p, d, q) is not None
    # and it recognises the language
    for w in all_words(4):
        assert (run(d, 0, w) in d.accepting) == member(L, w)


def test_kleene_algebra_identities():
    a = from_words([("a",)], AB)
    b = from_words([("b",)], AB)
    assert equivalent(star(star(a)), star(a))
    assert equivalent(star(union(a, b)), star(concat(star(a), star(b))))
    assert equivalent(concat(star(a), a), concat(a, star(a)))
    assert equivalent(union(a, empty(AB)), a)
    assert equivalent(concat(a, epsilon(AB)), a)
    assert is_empty(concat(a, empty(AB)))
    assert not equivalent(star(a), star(b))


def test_word_graph_path_language():
    # 0 -eps-> 1 -a-> 1 -b-> 2 -eps-> 0, accept at 2: (a*b)+
    g = word_graph(3, [(0, (), 1), (1, ("a",), 1), (1, ("b",), 2), (2, (), 0)])
    L = reglang.RegLang(g, 0, (2,), AB)
    expected = concat(concat(star(from_words([("a",)], AB)), from_words([("b",)], AB)),
                      star(concat(star(from_words([("a",)], AB)), from_words([("b",)], AB))))
    assert equivalent(L, expected)
    assert enumerate_upto(L, 2) == [("b",), ("a", "b"), ("b", "b")]


def test_multi_letter_words_and_union_all():
    L = from_words([("a", "b", "a"), ()], AB)
    assert member(L, ("a", "b", "a")) and member(L, ())
    assert not member(L, ("a", "b"))
    assert is_empty(union_all([], AB))
    assert "digraph" in to_dot(L)


def test_mismatched_alphabets_rejected():
    with pytest.raises(Exception):
        union(from_words([("a",)], ("a",)), from_words([("a",)], AB))
