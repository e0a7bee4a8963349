"""Regular languages over a fixed visible alphabet, as epsilon-NFAs.

Handles are immutable. Nothing is minimised implicitly: decision procedures
determinise on demand (subset construction) and cache the result on the
underlying graph, so languages that share a graph and a start node share
the work.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple

from .errors import AlphabetMismatch


class Graph:
    """Frozen epsilon-NFA skeleton: nodes ``0..n-1``, epsilon adjacency and
    per-letter adjacency."""

    __slots__ = ("n", "eps", "delta", "_closure", "_subsets")

    def __init__(self, n, eps, delta):
        self.n = n
        self.eps = tuple(tuple(sorted(set(e))) for e in eps)
        self.delta = tuple({a: tuple(sorted(set(d))) for a, d in row.items()} for row in delta)
        self._closure = {}
        self._subsets = {}

    def closure(self, nodes) -> frozenset:
        nodes = frozenset(nodes)
        hit = self._closure.get(nodes)
        if hit is not None:
            return hit
        seen = set(nodes)
        stack = list(nodes)
        while stack:
            u = stack.pop()
            for v in self.eps[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        out = frozenset(seen)
        self._closure[nodes] = out
        return out

    def step(self, subset, letter) -> frozenset:
        nxt = set()
        for u in subset:
            nxt.update(self.delta[u].get(letter, ()))
        return self.closure(nxt)

    def subset_automaton(self, start, alphabet):
        """Reachable subset construction from ``start``: ``(subsets, trans)``
        where ``trans[i][k]`` is the index reached from subset ``i`` on
        ``alphabet[k]``. The empty subset acts as the dead state."""
        key = (start, alphabet)
        hit = self._subsets.get(key)
        if hit is not None:
            return hit
        first = self.closure((start,))
        index = {first: 0}
        subsets = [first]
        trans = []
        i = 0
        while i < len(subsets):
            row = []
            for a in alphabet:
                t = self.step(subsets[i], a)
                j = index.get(t)
                if j is None:
                    j = index[t] = len(subsets)
                    subsets.append(t)
                row.append(j)
            trans.append(tuple(row))
            i += 1
        out = (tuple(subsets), tuple(trans))
        self._subsets[key] = out
        return out


class _Builder:
    def __init__(self):
        self.eps = []
        self.delta = []

    def node(self):
        self.eps.append([])
        self.delta.append({})
        return len(self.eps) - 1

    def edge(self, u, letter, v):
        if letter is None:
            self.eps[u].append(v)
        else:
            self.delta[u].setdefault(letter, []).append(v)

    def word(self, u, word, v):
        """Letter-by-letter chain ``u -> ... -> v`` through fresh nodes."""
        if not word:
            self.edge(u, None, v)
            return
        cur = u
        for a in word[:-1]:
            nxt = self.node()
            self.edge(cur, a, nxt)
            cur = nxt
        self.edge(cur, word[-1], v)

    def embed(self, graph: Graph) -> int:
        off = len(self.eps)
        for u in range(graph.n):
            self.node()
        for u in range(graph.n):
            for v in graph.eps[u]:
                self.edge(off + u, None, off + v)
            for a, ds in graph.delta[u].items():
                for v in ds:
                    self.edge(off + u, a, off + v)
        return off

    def freeze(self) -> Graph:
        return Graph(len(self.eps), self.eps, self.delta)


def word_graph(n_nodes: int, edges: Iterable) -> Graph:
    """Graph on nodes ``0..n_nodes-1`` (plus fresh intermediates) with one
    chain per word-labelled edge ``(u, word, v)``."""
    b = _Builder()
    for _ in range(n_nodes):
        b.node()
    for u, w, v in edges:
        b.word(u, tuple(w), v)
    return b.freeze()


class DFA(NamedTuple):
    """Complete deterministic automaton; state 0 is the start."""
    alphabet: tuple
    accepting: frozenset
    trans: tuple  # trans[q][k] for letter alphabet[k]

    @property
    def size(self):
        return len(self.trans)


class RegLang:
    """A regular language: the words labelling start-to-accept paths."""

    __slots__ = ("graph", "start", "accepts", "alphabet", "_dfa", "_key")

    def __init__(self, graph: Graph, start: int, accepts, alphabet):
        self.graph = graph
        self.start = start
        self.accepts = frozenset(accepts)
        self.alphabet = tuple(alphabet)
        self._dfa = None
        self._key = None

    def __repr__(self):
        sample = enumerate_upto(self, 3)
        shown = ", ".join(_show(w) for w in sample[:6])
        more = ", ..." if len(sample) > 6 else ""
        return f"RegLang({{{shown}{more}}}, nodes={self.graph.n})"

    def dfa(self) -> DFA:
        if self._dfa is None:
            subsets, trans = self.graph.subset_automaton(self.start, self.alphabet)
            acc = frozenset(i for i, s in enumerate(subsets) if s & self.accepts)
            self._dfa = DFA(self.alphabet, acc, trans)
        return self._dfa


def _show(w):
    return "".join(w) if w else "ε"


def _same_alphabet(*langs):
    first = langs[0].alphabet
    for L in langs[1:]:
        if L.alphabet != first:
            raise AlphabetMismatch(f"{first!r} vs {L.alphabet!r}")


# -- construction --------------------------------------------------------------

def from_words(ws: Iterable, alphabet) -> RegLang:
    alphabet = tuple(alphabet)
    b = _Builder()
    start, acc = b.node(), b.node()
    for w in ws:
        w = tuple(w)
        for a in w:
            if a not in alphabet:
                raise AlphabetMismatch(f"letter {a!r} not in {alphabet!r}")
        b.word(start, w, acc)
    return RegLang(b.freeze(), start, {acc}, alphabet)


def empty(alphabet) -> RegLang:
    return from_words((), alphabet)


def epsilon(alphabet) -> RegLang:
    return from_words([()], alphabet)


def union(l1: RegLang, l2: RegLang) -> RegLang:
    _same_alphabet(l1, l2)
    b = _Builder()
    s, f = b.node(), b.node()
    for L in (l1, l2):
        off = b.embed(L.graph)
        b.edge(s, None, off + L.start)
        for q in L.accepts:
            b.edge(off + q, None, f)
    return RegLang(b.freeze(), s, {f}, l1.alphabet)


def union_all(langs, alphabet) -> RegLang:
    langs = list(langs)
    if not langs:
        return empty(alphabet)
    b = _Builder()
    s, f = b.node(), b.node()
    for L in langs:
        if L.alphabet != tuple(alphabet):
            raise AlphabetMismatch(f"{L.alphabet!r} vs {tuple(alphabet)!r}")
        off = b.embed(L.graph)
        b.edge(s, None, off + L.start)
        for q in L.accepts:
            b.edge(off + q, None, f)
    return RegLang(b.freeze(), s, {f}, tuple(alphabet))


def concat(l1: RegLang, l2: RegLang) -> RegLang:
    _same_alphabet(l1, l2)
    b = _Builder()
    o1 = b.embed(l1.graph)
    o2 = b.embed(l2.graph)
    for q in l1.accepts:
        b.edge(o1 + q, None, o2 + l2.start)
    return RegLang(b.freeze(), o1 + l1.start, {o2 + q for q in l2.accepts}, l1.alphabet)


def star(l: RegLang) -> RegLang:
    b = _Builder()
    s = b.node()
    off = b.embed(l.graph)
    b.edge(s, None, off + l.start)
    for q in l.accepts:
        b.edge(off + q, None, s)
    return RegLang(b.freeze(), s, {s}, l.alphabet)


# -- decisions -----------------------------------------------------------------

def member(l: RegLang, w) -> bool:
    g = l.graph
    cur = g.closure((l.start,))
    for a in tuple(w):
        if a not in l.alphabet:
            return False
        cur = g.step(cur, a)
        if not cur:
            return False
    return bool(cur & l.accepts)


def is_empty(l: RegLang) -> bool:
    g = l.graph
    seen = {l.start}
    stack = [l.start]
    while stack:
        u = stack.pop()
        if u in l.accepts:
            return False
        succ = list(g.eps[u])
        for ds in g.delta[u].values():
            succ.extend(ds)
        for v in succ:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return True


def equivalent(l1: RegLang, l2: RegLang) -> bool:
    """Hopcroft-Karp: merge start states with union-find and propagate along
    letters; the languages differ iff a merged pair disagrees on acceptance."""
    _same_alphabet(l1, l2)
    d1, d2 = l1.dfa(), l2.dfa()
    n1 = d1.size
    parent = list(range(n1 + d2.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def accepting(i):
        return i in d1.accepting if i < n1 else (i - n1) in d2.accepting

    def succ(i, k):
        return d1.trans[i][k] if i < n1 else n1 + d2.trans[i - n1][k]

    todo = [(0, n1)]
    parent[find(0)] = find(n1)
    while todo:
        p, q = todo.pop()
        if accepting(p) != accepting(q):
            return False
        for k in range(len(l1.alphabet)):
            a, b = find(succ(p, k)), find(succ(q, k))
            if a != b:
                parent[a] = b
                todo.append((succ(p, k), succ(q, k)))
    return True


def subset(l1: RegLang, l2: RegLang) -> bool:
    """Decide ``L1 <= L2`` by exploring the product of the two DFAs."""
    _same_alphabet(l1, l2)
    d1, d2 = l1.dfa(), l2.dfa()
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        p, q = stack.pop()
        if p in d1.accepting and q not in d2.accepting:
            return False
        for k in range(len(l1.alphabet)):
            nxt = (d1.trans[p][k], d2.trans[q][k])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def minimal_dfa(l: RegLang) -> DFA:
    """Minimal complete DFA (Moore refinement), states numbered in BFS order
    from the start over the alphabet order. Two languages are equal iff
    their minimal DFAs are equal tuples."""
    d = l.dfa()
    block = [1 if q in d.accepting else 0 for q in range(d.size)]
    n_blocks = len(set(block))
    while True:
        sigs = {}
        new = []
        for q in range(d.size):
            sig = (block[q],) + tuple(block[t] for t in d.trans[q])
            new.append(sigs.setdefault(sig, len(sigs)))
        block = new
        if len(sigs) == n_blocks:
            break
        n_blocks = len(sigs)
    rep = {}
    for q in range(d.size):
        rep.setdefault(block[q], q)
    order = {block[0]: 0}
    queue = deque([block[0]])
    trans = []
    acc = set()
    while queue:
        b = queue.popleft()
        q = rep[b]
        if q in d.accepting:
            acc.add(order[b])
        row = []
        for t in d.trans[q]:
            tb = block[t]
            if tb not in order:
                order[tb] = len(order)
                queue.append(tb)
            row.append(order[tb])
        trans.append(tuple(row))
    return DFA(d.alphabet, frozenset(acc), tuple(trans))


def canonical_key(l: RegLang):
    """Hashable normal form: equal keys iff equal languages."""
    if l._key is None:
        m = minimal_dfa(l)
        l._key = (m.alphabet, tuple(sorted(m.accepting)), m.trans)
    return l._key


def enumerate_upto(l: RegLang, maxlen: int) -> list:
    """All words of length at most ``maxlen``, shortest first, then
    lexicographic in alphabet order."""
    if maxlen < 0:
        raise ValueError("maxlen must be non-negative")
    d = l.dfa()
    # states from which an accepting state is reachable
    rev = [[] for _ in range(d.size)]
    for q, row in enumerate(d.trans):
        for t in row:
            rev[t].append(q)
    live = set(d.accepting)
    stack = list(live)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in live:
                live.add(p)
                stack.append(p)
    out = []
    layer = [((), 0)] if 0 in live else []
    for length in range(maxlen + 1):
        out.extend(w for w, q in layer if q in d.accepting)
        if length == maxlen:
            break
        nxt = []
        for w, q in layer:
            for k, a in enumerate(d.alphabet):
                t = d.trans[q][k]
                if t in live:
                    nxt.append((w + (a,), t))
        layer = nxt
    return out


def to_dot(l: RegLang, name: str = "nfa") -> str:
    g = l.graph
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point];']
    for u in range(g.n):
        shape = "doublecircle" if u in l.accepts else "circle"
        lines.append(f'  n{u} [shape={shape}, label="{u}"];')
    lines.append(f"  __start -> n{l.start};")
    for u in range(g.n):
        for v in g.eps[u]:
            lines.append(f'  n{u} -> n{v} [label="ε"];')
        for a in sorted(g.delta[u]):
            for v in g.delta[u][a]:
                lines.append(f'  n{u} -> n{v} [label="{a}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
