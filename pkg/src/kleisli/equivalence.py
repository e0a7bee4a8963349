"""Strong and weak bisimilarity as coarsest stable partitions."""

from __future__ import annotations

from dataclasses import dataclass

from . import reglang
from .errors import MonadMismatch, SpaceMismatch, TooLarge, WrongMonad
from .kernel import (
    Alphabet, Effect, ENASurface, Monad, Morphism, StateSpace, disjoint_union,
)
from .saturation import saturate_free, star


@dataclass(frozen=True)
class Partition:
    """An equivalence on a state space, given by canonical block ids.

    Blocks are numbered in order of their least member, so two partitions
    of the same space are equal iff they relate the same states.
    """

    space: StateSpace
    block_of: tuple

    def __post_init__(self):
        raw = tuple(self.block_of)
        if len(raw) != len(self.space):
            raise SpaceMismatch("block assignment has wrong length")
        ids = {}
        object.__setattr__(self, "block_of", tuple(ids.setdefault(b, len(ids)) for b in raw))

    @classmethod
    def from_blocks(cls, space, blocks):
        block_of = [None] * len(space)
        for k, members in enumerate(blocks):
            for x in members:
                if block_of[x] is not None:
                    raise ValueError(f"state {x} in two blocks")
                block_of[x] = k
        if None in block_of:
            raise ValueError("blocks do not cover the space")
        return cls(space, tuple(block_of))

    @classmethod
    def discrete(cls, space):
        return cls(space, tuple(range(len(space))))

    @property
    def blocks(self) -> tuple:
        out = [[] for _ in range(max(self.block_of, default=-1) + 1)]
        for x, b in enumerate(self.block_of):
            out[b].append(x)
        return tuple(tuple(b) for b in out)

    def same(self, x: int, y: int) -> bool:
        return self.block_of[x] == self.block_of[y]

    def refines(self, other: "Partition") -> bool:
        """Every block of ``self`` lies inside a block of ``other``."""
        if self.space != other.space:
            raise SpaceMismatch("partitions of different spaces")
        return all(other.same(b[0], x) for b in self.blocks for x in b)

    def __len__(self):
        return len(self.blocks)

    def describe(self) -> str:
        """One line per block, ``{x, y}``, in canonical block order."""
        return "\n".join("{" + ", ".join(self.space.names[x] for x in b) + "}"
                         for b in self.blocks) + "\n"


def _refine(n: int, signature) -> tuple:
    """Naive coarsest-stable-partition refinement (Kanellakis-Smolka style):
    split every block by the successor signature until nothing splits."""
    block = [0] * n
    count = 1 if n else 0
    while True:
        sigs = {}
        new = [sigs.setdefault((block[x], signature(x, block)), len(sigs)) for x in range(n)]
        block = new
        if len(sigs) == count:
            return tuple(block)
        count = len(sigs)


def _step_signature(system):
    if isinstance(system, ENASurface):
        image, final = system.lts.image, system.final

        def sig(x, block):
            return (x in final,
                    frozenset((l, block[y]) for l, y in image[x].steps))
        return sig
    image = system.image
    if system.monad is Monad.POW:
        return lambda x, block: frozenset(block[y] for y in image[x].steps)

    def sig(x, block):
        eff = image[x]
        return (frozenset((l, block[y]) for l, y in eff.steps), eff.bare)
    return sig


def _union(a, b):
    if isinstance(a, ENASurface) != isinstance(b, ENASurface):
        raise MonadMismatch("cannot compare an ENA surface with a plain system")
    if isinstance(a, ENASurface):
        base = disjoint_union(a.lts, b.lts)
        n = len(a.space)
        return ENASurface(base, a.final | {n + x for x in b.final})
    return disjoint_union(a, b)


def _as_system(alpha):
    if isinstance(alpha, ENASurface):
        return alpha
    if not isinstance(alpha, Morphism) or not alpha.is_system:
        raise SpaceMismatch("expected a system")
    return alpha


def strong_bisimilarity(alpha, beta=None) -> Partition:
    """Coarsest partition on ``alpha`` (or on ``alpha + beta``, state names
    prefixed ``1:`` and ``2:``) in which related states reach the same
    blocks under the same labels."""
    system = _as_system(alpha) if beta is None else _union(_as_system(alpha), _as_system(beta))
    n = len(system.space)
    return Partition(system.space, _refine(n, _step_signature(system)))


def is_bisimulation(alpha, partition: Partition) -> bool:
    system = _as_system(alpha)
    if partition.space != system.space:
        raise SpaceMismatch("partition is over a different space")
    sig = _step_signature(system)
    block = partition.block_of
    for members in partition.blocks:
        first = sig(members[0], block)
        if any(sig(x, block) != first for x in members[1:]):
            return False
    return True


def quotient(alpha, partition: Partition):
    """Quotient system by a stable partition, with the projection map.

    Blocks are named after their least member. Returns ``(beta, h)`` where
    ``h[x]`` is the block index of ``x``; ``h`` is a homomorphism exactly
    when the partition is a bisimulation.
    """
    system = _as_system(alpha)
    blocks = partition.blocks
    h = partition.block_of
    space = StateSpace(tuple(system.space.names[b[0]] for b in blocks))
    if isinstance(system, ENASurface):
        base = system.lts
        image = [Effect(frozenset((l, h[y]) for l, y in base.image[b[0]].steps)) for b in blocks]
        lts = Morphism(Monad.LTS, space, space, base.alphabet, image)
        return ENASurface(lts, frozenset(h[x] for x in system.final)), h
    if system.monad is Monad.POW:
        image = [Effect(frozenset(h[y] for y in system.image[b[0]].steps)) for b in blocks]
    else:
        image = [Effect(frozenset((l, h[y]) for l, y in system.image[b[0]].steps),
                        system.image[b[0]].bare) for b in blocks]
    return Morphism(system.monad, space, space, system.alphabet, image), h


def union_quotient(alpha, partition: Partition):
    """Quotient of an LTS (or ENA surface) by a weak bisimilarity: the union
    of the members' transitions, with silent self-loops on blocks dropped.
    A block of an ENA surface is final if one of its members is."""
    if isinstance(alpha, ENASurface):
        base = union_quotient(alpha.lts, partition)
        return ENASurface(base, frozenset(partition.block_of[x] for x in alpha.final))
    if not isinstance(alpha, Morphism) or alpha.monad is not Monad.LTS:
        raise WrongMonad("union_quotient expects an LTS or ENA surface")
    h = partition.block_of
    blocks = partition.blocks
    space = StateSpace(tuple(alpha.space.names[b[0]] for b in blocks))
    tau = alpha.alphabet.silent
    image = []
    for k, members in enumerate(blocks):
        steps = set()
        for x in members:
            for l, y in alpha.image[x].steps:
                if not (l == tau and h[y] == k):
                    steps.add((l, h[y]))
        image.append(Effect(frozenset(steps)))
    return Morphism(Monad.LTS, space, space, alpha.alphabet, image)


def weak_bisimilarity_star(alpha, beta=None) -> Partition:
    """Strong bisimilarity of the saturated system(s)."""
    for s in (alpha, beta):
        if s is None or isinstance(s, ENASurface):
            continue
        if not isinstance(s, Morphism) or s.monad is not Monad.LTS:
            raise WrongMonad("weak_bisimilarity_star expects an LTS or ENA surface")
    system = alpha if beta is None else _union(alpha, beta)
    return strong_bisimilarity(star(system))


def weak_bisimilarity_free(alpha, beta=None) -> Partition:
    """Coarsest partition in which related states have equal path languages
    into every block (and equal bare languages, for ENA systems).

    Language equality is decided on minimal-DFA normal forms, computed once
    per (state, block) and round.
    """
    if beta is not None:
        alpha = _union(alpha, beta)
    wm = saturate_free(alpha)
    n = len(wm.space)
    bare = tuple(reglang.canonical_key(b) for b in wm.bare) if wm.bare is not None else None

    round_blocks = {}

    def sig(x, block):
        key = tuple(block)
        groups = round_blocks.get(key)
        if groups is None:
            members = {}
            for y, b in enumerate(block):
                members.setdefault(b, []).append(y)
            groups = round_blocks[key] = [members[b] for b in sorted(members)]
        keys = tuple(reglang.canonical_key(wm.to_block(x, g)) for g in groups)
        return keys if bare is None else (bare[x], keys)

    return Partition(wm.space, _refine(n, sig))


def weak_relations(alpha: Morphism):
    """``{label: matrix}`` of Milner's double-arrow relations, computed by
    plain boolean closure (independent of Kleisli composition)."""
    n = len(alpha.source)
    tau = alpha.alphabet.silent
    reach = [[x == y for y in range(n)] for x in range(n)]
    for x in range(n):
        for l, y in alpha.image[x].steps:
            if l == tau:
                reach[x][y] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    rel = {tau: reach}
    for a in alpha.alphabet.visible:
        step = [[False] * n for _ in range(n)]
        for x in range(n):
            for l, y in alpha.image[x].steps:
                if l == a:
                    step[x][y] = True
        out = [[False] * n for _ in range(n)]
        for i in range(n):
            for p in range(n):
                if not reach[i][p]:
                    continue
                for q in range(n):
                    if not step[p][q]:
                        continue
                    for j in range(n):
                        if reach[q][j]:
                            out[i][j] = True
        rel[a] = out
    return rel


ORACLE_LIMIT = 10


def milner_oracle(alpha: Morphism) -> Partition:
    """Largest relation R such that related states match each other's weak
    moves ``=sigma=>`` into R, by direct greatest-fixed-point iteration."""
    if not isinstance(alpha, Morphism) or alpha.monad is not Monad.LTS:
        raise WrongMonad("milner_oracle expects an LTS")
    n = len(alpha.source)
    if n > ORACLE_LIMIT:
        raise TooLarge(f"{n} states exceed the oracle limit of {ORACLE_LIMIT}")
    rel = weak_relations(alpha)
    succ = {l: [[j for j in range(n) if m[i][j]] for i in range(n)] for l, m in rel.items()}
    R = {(x, y) for x in range(n) for y in range(n)}

    def matched(x, y):
        for moves in succ.values():
            for x2 in moves[x]:
                if not any((x2, y2) in R for y2 in moves[y]):
                    return False
        return True

    changed = True
    while changed:
        changed = False
        for x, y in sorted(R):
            if (x, y) in R and not (matched(x, y) and matched(y, x)):
                R.discard((x, y))
                R.discard((y, x))
                changed = True
    block_of = []
    reps = []
    for x in range(n):
        for k, r in enumerate(reps):
            if (x, r) in R:
                block_of.append(k)
                break
        else:
            reps.append(x)
            block_of.append(len(reps) - 1)
    for x in range(n):
        for y in range(n):
            assert ((x, y) in R) == (block_of[x] == block_of[y]), "not an equivalence"
    return Partition(alpha.source, tuple(block_of))
