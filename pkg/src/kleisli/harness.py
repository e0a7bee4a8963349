"""Seeded random systems and the property suites run over them.

Random numbers come from xorshift64* so that seeds mean the same thing on
every platform and in every implementation:

* ``splitmix64(z)``: ``z += 0x9E3779B97F4A7C15``; ``z = (z ^ z>>30) *
  0xBF58476D1CE4E5B9``; ``z = (z ^ z>>27) * 0x94D049BB133111EB``; return
  ``z ^ z>>31`` (all arithmetic mod 2**64).
* the generator state is ``splitmix64(seed)`` (replaced by
  ``0x9E3779B97F4A7C15`` if that is zero); each draw does ``x ^= x>>12;
  x ^= x<<25; x ^= x>>27`` and returns ``x * 0x2545F4914F6CDD1D mod 2**64``.
* ``below(n)`` is ``draw % n``; ``chance(p)`` for a rational ``p = u/v`` is
  ``draw < floor(u * 2**64 / v)``.
* case ``i`` of a suite run with seed ``s`` uses the generator seeded with
  ``splitmix64(s + i * 0x9E3779B97F4A7C15 mod 2**64)``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import io_formats, reglang
from .equivalence import (
    Partition, milner_oracle, quotient, strong_bisimilarity, is_bisimulation,
    weak_bisimilarity_free, weak_bisimilarity_star,
)
from .errors import UnknownSuite
from .kernel import (
    Alphabet, ENASurface, Effect, Monad, Morphism, StateSpace,
    bottom, check_monad_laws, compose, disjoint_union, embed_underline, identity, join, leq,
)
from .saturation import (
    is_closed, one_step_inequality, project_to_lts, saturate_free, star,
    star_axioms_check, transitive_closure,
)
from .trace import (
    below, check_uniformity, conway_dagger, dagger_fixed_point_holds, exception_form,
    is_fixed_point, trace_exact, trace_iterate, trace_via_dagger,
)

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z = (z + GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK) or GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def chance(self, p) -> bool:
        p = Fraction(p)
        return self.next_u64() < (p.numerator << 64) // p.denominator


def case_seed(seed: int, index: int) -> int:
    return splitmix64((seed + index * GOLDEN) & MASK)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_states: int = 8
    alphabet_size: int = 2
    transition_density: Fraction = Fraction(1, 6)
    tau_density: Fraction = Fraction(1, 6)
    final_density: Fraction = Fraction(1, 4)
    cases: int = 100

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")
        if self.alphabet_size < 0 or self.cases < 0:
            raise ValueError("counts must be non-negative")
        for name in ("transition_density", "tau_density", "final_density"):
            val = Fraction(getattr(self, name))
            if not 0 <= val <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
            object.__setattr__(self, name, val)


LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _shape(cfg, rng, n=None):
    if n is None:
        n = 1 + rng.below(cfg.max_states)
    k = rng.below(cfg.alphabet_size + 1) if cfg.alphabet_size else 0
    k = max(k, 1) if cfg.alphabet_size else 0
    return n, tuple(LETTERS[:k])


def _random_steps(cfg, rng, n, visible, silent):
    image = []
    for _ in range(n):
        steps = set()
        for y in range(n):
            for a in visible:
                if rng.chance(cfg.transition_density):
                    steps.add((a, y))
            if rng.chance(cfg.tau_density):
                steps.add((silent, y))
        image.append(Effect(frozenset(steps)))
    return image


def gen_lts(cfg: GenConfig, rng: XorShift64Star, n=None, visible=None) -> Morphism:
    """Random LTS on states ``"0" .. "n-1"``, silent label ``tau``."""
    n0, vis0 = _shape(cfg, rng, n)
    visible = vis0 if visible is None else visible
    space = StateSpace(tuple(str(i) for i in range(n0)))
    return Morphism(Monad.LTS, space, space, Alphabet(visible, "tau"),
                    _random_steps(cfg, rng, n0, visible, "tau"))


def gen_ena(cfg: GenConfig, rng: XorShift64Star, n=None) -> ENASurface:
    """Random epsilon-automaton, silent label ``eps``."""
    n, visible = _shape(cfg, rng, n)
    space = StateSpace(tuple(str(i) for i in range(n)))
    base = Morphism(Monad.LTS, space, space, Alphabet(visible, "eps"),
                    _random_steps(cfg, rng, n, visible, "eps"))
    final = frozenset(x for x in range(n) if rng.chance(cfg.final_density))
    return ENASurface(base, final)


def _random_word(rng, visible, maxlen=2):
    if not visible:
        return ()
    return tuple(visible[rng.below(len(visible))] for _ in range(rng.below(maxlen + 1)))


def gen_word_system(cfg: GenConfig, rng: XorShift64Star, n=None, visible=None) -> Morphism:
    """Random ENA system with words up to length two and bare words."""
    n0, vis0 = _shape(cfg, rng, n)
    visible = vis0 if visible is None else visible
    space = StateSpace(tuple(str(i) for i in range(n0)))
    image = []
    for _ in range(n0):
        steps, bare = set(), set()
        for y in range(n0):
            if rng.chance(cfg.transition_density + cfg.tau_density):
                steps.add((_random_word(rng, visible), y))
        if rng.chance(cfg.final_density):
            bare.add(_random_word(rng, visible))
        image.append(Effect(frozenset(steps), frozenset(bare)))
    return Morphism(Monad.ENA, space, space, Alphabet(visible, "eps"), image)


def gen_unfolded_ena(cfg: GenConfig, rng: XorShift64Star) -> ENASurface:
    """Random automaton built by copying the states of a smaller one, so its
    strong bisimilarity has non-trivial blocks."""
    small = gen_ena(cfg, rng, n=1 + rng.below(max(1, cfg.max_states // 2)))
    m = len(small.space)
    copies = []
    total = 0
    for y in range(m):
        room = cfg.max_states - total - (m - y - 1)
        c = 1 + rng.below(max(1, min(3, room)))
        copies.append(list(range(total, total + c)))
        total += c
    owner = [y for y in range(m) for _ in copies[y]]
    image = []
    for x in range(total):
        steps = {(l, copies[y][rng.below(len(copies[y]))])
                 for l, y in small.lts.image[owner[x]].sorted_steps()}
        image.append(Effect(frozenset(steps)))
    space = StateSpace(tuple(str(i) for i in range(total)))
    base = Morphism(Monad.LTS, space, space, small.alphabet, image)
    return ENASurface(base, frozenset(x for x in range(total) if owner[x] in small.final))


def gen_quotient_pair(cfg: GenConfig, rng: XorShift64Star):
    """``(alpha, h, beta)``: an ENA system, the projection onto its quotient
    by strong bisimilarity, and the quotient. ``h`` is a homomorphism."""
    alpha = embed_underline(gen_unfolded_ena(cfg, rng))
    return quotient_pair(alpha)


def quotient_pair(alpha: Morphism):
    part = strong_bisimilarity(alpha)
    if not is_bisimulation(alpha, part):
        # fall back to the identity partition, which is always stable
        part = Partition(alpha.source, tuple(range(len(alpha.source))))
    beta, h = quotient(alpha, part)
    return alpha, h, beta


# -- suites -------------------------------------------------------------------

def _as_ena(system) -> Morphism:
    return embed_underline(system) if isinstance(system, ENASurface) else system


def _forget_labels(m: Morphism) -> Morphism:
    image = [Effect(frozenset(y for _, y in eff.steps)) for eff in m.image]
    return Morphism(Monad.POW, m.source, m.target, Alphabet(()), image)


def _drop_bare(m: Morphism) -> Morphism:
    return Morphism(Monad.FREE_LTS, m.source, m.target, m.alphabet,
                    [Effect(eff.steps) for eff in m.image])


def _gen_monad_laws(cfg, rng):
    n, visible = _shape(cfg, rng)
    ltss = [gen_lts(cfg, rng, n=n, visible=visible) for _ in range(3)]
    enas = [gen_word_system(cfg, rng, n=n, visible=visible) for _ in range(3)]
    return ltss + enas


def _check_monad_laws(docs):
    ltss, enas = docs[:3], [_as_ena(d) for d in docs[3:]]
    triples = [
        (Monad.LTS, tuple(ltss)),
        (Monad.POW, tuple(_forget_labels(m) for m in ltss)),
        (Monad.FREE_LTS, tuple(_drop_bare(m) for m in enas)),
        (Monad.ENA, tuple(enas)),
    ]
    for monad, triple in triples:
        rep = check_monad_laws(monad, [triple])
        if not rep.ok:
            return f"{monad.value}: {rep.violations[0]}"
        f, g, _ = triple
        if monad in (Monad.LTS, Monad.ENA):
            # bottom absorbs on the left; on the right only bare words survive
            zero = bottom(monad, f.source, f.target, f.alphabet)
            survivors = Morphism(monad, f.source, f.target, f.alphabet,
                                 [Effect(frozenset(), eff.bare) for eff in f.image])
            if compose(f, zero) != zero or compose(zero, f) != survivors:
                return f"{monad.value}: bottom is not a zero morphism"
        fg = join(f, g)
        if not (leq(compose(f, f), compose(fg, fg))):
            return f"{monad.value}: composition not monotone"
        if compose(g, fg) != join(compose(g, f), compose(g, g)):
            return f"{monad.value}: composition does not distribute over joins"
    return None


def _gen_lts_pair(cfg, rng):
    a = gen_lts(cfg, rng)
    return [a, gen_lts(cfg, rng, n=len(a.source), visible=a.alphabet.visible)]


def _pushforward(alpha, fn, space):
    image = [set() for _ in space]
    for x, eff in enumerate(alpha.image):
        image[fn[x]] |= {(l, fn[y]) for l, y in eff.steps}
    return Morphism(Monad.LTS, space, space, alpha.alphabet, [Effect(frozenset(s)) for s in image])


def _fibre_meet(alpha, fn, space):
    image = [None] * len(space)
    for x, eff in enumerate(alpha.image):
        pushed = frozenset((l, fn[y]) for l, y in eff.steps)
        image[fn[x]] = pushed if image[fn[x]] is None else image[fn[x]] & pushed
    return Morphism(Monad.LTS, space, space, alpha.alphabet,
                    [Effect(s or frozenset()) for s in image])


def _check_saturation_axioms(docs):
    alpha, extra = docs
    n = len(alpha.source)
    bigger = join(alpha, extra)
    candidates = [star(alpha), star(bigger), _full(alpha)]
    witnesses = []
    for m in sorted({1, max(1, n // 2), n}):
        fn = [x % m for x in range(n)]
        space = StateSpace(alpha.source.names[:m])
        restricted = _pushforward(extra, fn, space)
        witnesses.append((fn, join(_pushforward(alpha, fn, space), restricted)))
        witnesses.append((fn, _fibre_meet(alpha, fn, space)))
    rep = star_axioms_check(alpha, candidates, witnesses)
    if not rep.ok:
        return f"axioms failed: {rep}"
    s = star(alpha)
    if star(s) != s:
        return "star is not idempotent"
    if not leq(s, star(bigger)):
        return "star is not monotone"
    if not is_closed(s):
        return "star is not closed"
    closure = transitive_closure(alpha)
    if not (leq(alpha, closure) and leq(compose(closure, alpha), closure)):
        return "transitive closure is not closed"
    if join(identity(Monad.LTS, alpha.source, alpha.alphabet), closure) != s:
        return "star differs from 1 v transitive closure"
    return None


def _full(alpha):
    n = len(alpha.source)
    labels = alpha.alphabet.labels
    steps = frozenset((l, y) for l in labels for y in range(n))
    return Morphism(Monad.LTS, alpha.source, alpha.source, alpha.alphabet,
                    [Effect(steps)] * n)


def _gen_lts(cfg, rng):
    return [gen_lts(cfg, rng)]


def _check_h_compat(docs):
    (alpha,) = docs
    if project_to_lts(saturate_free(embed_underline(alpha))) != star(alpha):
        return "h applied to the free saturation differs from star"
    if not one_step_inequality(alpha):
        return "cotupling inequality fails"
    return None


def _gen_lts_and_ena(cfg, rng):
    return [gen_lts(cfg, rng), gen_ena(cfg, rng)]


def _check_weak_coincide(docs):
    for system in docs:
        a = weak_bisimilarity_star(system)
        b = weak_bisimilarity_free(embed_underline(system))
        if a != b:
            return f"star partition {a.blocks} != free partition {b.blocks}"
    alpha = docs[0]
    if weak_bisimilarity_star(star(alpha)) != weak_bisimilarity_star(alpha):
        return "weak bisimilarity changes under pre-saturation"
    return None


def _check_strong_implies_weak(docs):
    for system in docs:
        strong = strong_bisimilarity(system)
        if not is_bisimulation(system, strong):
            return "strong bisimilarity is not stable"
        if not strong.refines(weak_bisimilarity_star(system)):
            return "strong partition does not refine weak partition"
        # maximality: merging any two blocks breaks stability
        k = len(strong)
        for i in range(k):
            for j in range(i + 1, k):
                merged = tuple(i if b == j else b for b in strong.block_of)
                if is_bisimulation(system, Partition(strong.space, merged)):
                    return f"blocks {i} and {j} can be merged"
    return None


def _gen_ena(cfg, rng):
    return [gen_ena(cfg, rng)]


def accepted_words(e: ENASurface, maxlen: int) -> set:
    """Words of length <= maxlen accepted by direct simulation of epsilon
    closures (independent of Kleisli composition and of the NFA module)."""
    eps = e.alphabet.silent
    image = e.lts.image

    def close(states):
        seen = set(states)
        stack = list(states)
        while stack:
            x = stack.pop()
            for l, y in image[x].steps:
                if l == eps and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return frozenset(seen)

    out = set()
    for x0 in range(len(e.space)):
        frontier = {((), close({x0}))}
        for length in range(maxlen + 1):
            for w, cur in frontier:
                if cur & e.final:
                    out.add((x0, w))
            if length == maxlen:
                break
            nxt = set()
            for w, cur in frontier:
                for a in e.alphabet.visible:
                    moved = {y for x in cur for l, y in image[x].steps if l == a}
                    if moved:
                        nxt.add((w + (a,), close(moved)))
            frontier = nxt
    return out


def _check_trace_lfp(docs):
    (e,) = docs
    under = embed_underline(e)
    exact = trace_exact(under)
    if not is_fixed_point(exact.values, under):
        return "exact trace is not a fixed point of x -> x.alpha"
    prev = None
    for k in range(9):
        cur = trace_iterate(under, k)
        if prev is not None and any(not a <= b for a, b in zip(prev.values, cur.values)):
            return f"iterate {k} is not above iterate {k - 1}"
        if not below(cur, exact):
            return f"iterate {k} is not below the exact trace"
        prev = cur
    L = 3
    bound = _truncated_iterate(under, (L + 1) * (len(e.space) + 1), L)
    brute = accepted_words(e, L)
    for x in range(len(e.space)):
        words = set(reglang.enumerate_upto(exact.values[x], L))
        if words != {w for y, w in brute if y == x}:
            return f"state {x}: exact trace differs from direct acceptance"
        if not words <= bound[x]:
            return f"state {x}: short word missing from the bounded iterate"
    return None


def _truncated_iterate(alpha, n, maxlen):
    """Words of length <= maxlen in the n-th trace iterate. Steps only
    prepend letters, so truncating after every step loses nothing."""
    tr = [set() for _ in alpha.image]
    for _ in range(n):
        tr = [{w for w in eff.bare if len(w) <= maxlen}
              | {s + w for s, y in eff.steps for w in tr[y] if len(s) + len(w) <= maxlen}
              for eff in alpha.image]
    return tr


def _gen_unfolded(cfg, rng):
    return [gen_unfolded_ena(cfg, rng)]


def _check_uniformity(docs):
    alpha, h, beta = quotient_pair(embed_underline(docs[0]))
    rep = check_uniformity(alpha, h, beta)
    if not rep.premise:
        return "quotient map is not a homomorphism"
    if not rep.conclusion:
        return "traces are not preserved by the quotient map"
    rep = check_uniformity(alpha, list(range(len(alpha.source))), alpha)
    if not (rep.premise and rep.conclusion):
        return "identity instance fails"
    rep = check_uniformity(alpha, diagonal(alpha.source, h, beta), disjoint_union(beta, beta))
    if not (rep.premise and rep.conclusion):
        return "relational instance into two copies of the quotient fails"
    return None


def diagonal(source: StateSpace, h, beta: Morphism) -> Morphism:
    """The free-LTS morphism ``x -> {inl h(x), inr h(x)}`` into ``beta + beta``:
    a join of two homomorphisms, hence a homomorphism that is not a function."""
    m = len(beta.source)
    target = disjoint_union(beta, beta).source
    image = [Effect(frozenset({((), y), ((), y + m)})) for y in h]
    return Morphism(Monad.FREE_LTS, source, target, beta.alphabet, image)


def _check_dagger(docs):
    under = embed_underline(docs[0])
    f = exception_form(under)
    if not dagger_fixed_point_holds(f, conway_dagger(f)):
        return "dagger is not a fixed point"
    exact = trace_exact(under)
    for x, L in enumerate(trace_via_dagger(under)):
        if not reglang.equivalent(L, exact.values[x]):
            return f"state {x}: dagger differs from the trace"
    return None


def _check_weak_implies_trace(docs):
    (e,) = docs
    under = embed_underline(e)
    exact = trace_exact(under)
    for block in weak_bisimilarity_star(e).blocks:
        for x in block[1:]:
            if not reglang.equivalent(exact.values[block[0]], exact.values[x]):
                return f"states {block[0]} and {x} weakly bisimilar but trace-inequivalent"
    with_unit = join(identity(Monad.ENA, under.source, under.alphabet), under)
    saturated = embed_underline(star(e))
    for other, what in ((with_unit, "1 v alpha"), (saturated, "alpha*")):
        t = trace_exact(other)
        for x in range(len(e.space)):
            if not reglang.equivalent(t.values[x], exact.values[x]):
                return f"state {x}: trace of {what} differs"
    return None


def _check_milner(docs):
    (alpha,) = docs
    a, b = weak_bisimilarity_star(alpha), milner_oracle(alpha)
    if a != b:
        return f"saturation partition {a.blocks} != oracle {b.blocks}"
    return None


def _check_round_trip(docs):
    lts, e = docs
    if io_formats.read_json(io_formats.write_json(lts)) != lts:
        return "json round trip of lts"
    if io_formats.read_json(io_formats.write_json(e), surface=True) != e:
        return "json round trip of ena"
    back = io_formats.read_aut(io_formats.write_aut(lts), alphabet=lts.alphabet.visible)
    if back != lts:
        return "aut round trip"
    return None


SUITES = {
    "monad-laws": (_gen_monad_laws, _check_monad_laws),
    "saturation-axioms": (_gen_lts_pair, _check_saturation_axioms),
    "h-compat": (_gen_lts, _check_h_compat),
    "weak-coincide": (_gen_lts_and_ena, _check_weak_coincide),
    "strong-implies-weak": (_gen_lts_and_ena, _check_strong_implies_weak),
    "trace-lfp": (_gen_ena, _check_trace_lfp),
    "trace-uniformity": (_gen_unfolded, _check_uniformity),
    "dagger": (_gen_ena, _check_dagger),
    "weak-implies-trace": (_gen_ena, _check_weak_implies_trace),
    "milner-oracle": (_gen_lts, _check_milner),
    "round-trip": (_gen_lts_and_ena, _check_round_trip),
}


@dataclass
class Failure:
    seed: int
    case: int
    counterexample: str  # JSON, see :func:`replay`


@dataclass
class SuiteReport:
    name: str
    cases: int
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def to_text(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lines = [f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures"]
        for f in self.failures:
            msg = json.loads(f.counterexample)["message"]
            lines.append(f"  seed={f.seed} case={f.case}: {msg}")
        return "\n".join(lines) + "\n"

    def to_document(self) -> dict:
        return {
            "kind": "report",
            "suite": self.name,
            "cases": self.cases,
            "failures": [{"seed": f.seed, "case": f.case,
                          "counterexample": json.loads(f.counterexample)}
                         for f in self.failures],
        }


def _serialize(name, seed, case, docs, message):
    return json.dumps({
        "suite": name, "seed": seed, "case": case, "message": message,
        "documents": [io_formats.system_document(d) for d in docs],
    }, sort_keys=True, ensure_ascii=False)


def _load(doc):
    if doc.get("kind") == "ena":
        try:
            return io_formats.from_document(doc, surface=True)
        except Exception:
            return io_formats.from_document(doc)
    return io_formats.from_document(doc)


def _run_check(check, docs):
    try:
        return check(docs)
    except Exception as exc:  # a crash is a failed case, recorded with its input
        return f"{type(exc).__name__}: {exc}"


def replay(counterexample: str):
    """Re-run a serialized failure in isolation; returns the failure message
    or ``None`` if the case now passes."""
    data = json.loads(counterexample)
    if data["suite"] not in SUITES:
        raise UnknownSuite(data["suite"])
    docs = [_load(d) for d in data["documents"]]
    return _run_check(SUITES[data["suite"]][1], docs)


def run_suite(name: str, cfg: GenConfig) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    generate, check = SUITES[name]
    report = SuiteReport(name, cfg.cases)
    start = time.perf_counter()
    for i in range(cfg.cases):
        rng = XorShift64Star(case_seed(cfg.seed, i))
        docs = generate(cfg, rng)
        msg = _run_check(check, docs)
        if msg is not None:
            report.failures.append(Failure(cfg.seed, i, _serialize(name, cfg.seed, i, docs, msg)))
    report.wall_time = time.perf_counter() - start
    return report
