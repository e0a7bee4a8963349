"""JSON model documents, Aldebaran ``.aut`` files and DOT export.

Every JSON document carries a ``kind`` field (``lts``, ``ena``, ``partition``,
``weak-matrix``, ``traces``, ``report``). Output is canonical: sorted keys, two-space
indent, UTF-8, trailing newline, transitions sorted by source index, label
and target index. State lists keep their declared order because state
indices are part of a system's identity.
"""

from __future__ import annotations

import json
import re

from . import reglang
from .errors import HeaderMismatch, ParseError, SchemaError
from .kernel import (
    Alphabet, Effect, ENASurface, Monad, Morphism, StateSpace, _word_key,
    embed_underline, surface_of,
)


def dumps(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _loads(data):
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(1, f"not UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None


# -- JSON: systems ---------------------------------------------------------------

def system_document(system) -> dict:
    if isinstance(system, ENASurface):
        system = embed_underline(system)
    if not isinstance(system, Morphism) or not system.is_system:
        raise TypeError("only systems can be serialized")
    names = system.source.names
    doc = {
        "states": list(names),
        "alphabet": list(system.alphabet.visible),
        "silent": system.alphabet.silent,
    }
    if system.monad is Monad.LTS:
        doc["kind"] = "lts"
        doc["transitions"] = [
            {"from": names[x], "label": l, "to": names[y]}
            for x, eff in enumerate(system.image)
            for l, y in sorted(eff.steps, key=lambda s: (s[0], s[1]))
        ]
        return doc
    if system.monad is not Monad.ENA:
        raise TypeError(f"{system.monad.value} systems have no document form")
    doc["kind"] = "ena"
    doc["transitions"] = [
        {"from": names[x], "word": list(w), "to": names[y]}
        for x, eff in enumerate(system.image)
        for w, y in sorted(eff.steps, key=lambda s: (_word_key(s[0]), s[1]))
    ]
    doc["final"] = [names[x] for x, eff in enumerate(system.image) if () in eff.bare]
    exits = [{"from": names[x], "word": list(w)}
             for x, eff in enumerate(system.image)
             for w in sorted(eff.bare, key=_word_key) if w]
    if exits:
        doc["exits"] = exits
    return doc


def write_json(system) -> bytes:
    """Serialize an LTS, an ENA system or an ENA surface."""
    return dumps(system_document(system))


def _expect(cond, path, reason):
    if not cond:
        raise SchemaError(path, reason)


def _str_list(doc, key, path):
    val = doc.get(key)
    _expect(isinstance(val, list), f"{path}.{key}", "expected a list")
    for i, v in enumerate(val):
        _expect(isinstance(v, str) and v, f"{path}.{key}[{i}]", "expected a non-empty string")
    return val


def _word(val, path, visible):
    _expect(isinstance(val, list), path, "word must be a list of letters")
    for i, a in enumerate(val):
        _expect(a in visible, f"{path}[{i}]", f"letter {a!r} not in alphabet")
    return tuple(val)


def from_document(doc: dict, surface: bool = False):
    """Build a system from a parsed document (see :func:`read_json`)."""
    _expect(isinstance(doc, dict), "$", "document must be an object")
    kind = doc.get("kind")
    _expect(kind in ("lts", "ena"), "$.kind", f"unknown kind {kind!r}")
    states = _str_list(doc, "states", "$")
    _expect(len(set(states)) == len(states), "$.states", "duplicate state name")
    letters = _str_list(doc, "alphabet", "$")
    _expect(len(set(letters)) == len(letters), "$.alphabet", "duplicate letter")
    silent = doc.get("silent", "tau" if kind == "lts" else "eps")
    _expect(isinstance(silent, str) and silent, "$.silent", "expected a non-empty string")
    _expect(silent not in letters, "$.silent", "silent label is also a visible letter")
    space = StateSpace(tuple(states))
    alphabet = Alphabet(tuple(letters), silent)
    if "initial" in doc:
        _expect(doc["initial"] in space, "$.initial", "undeclared state")

    def state(val, path):
        _expect(isinstance(val, str) and val in space, path, f"undeclared state {val!r}")
        return space.index(val)

    trans = doc.get("transitions", [])
    _expect(isinstance(trans, list), "$.transitions", "expected a list")
    steps = [set() for _ in states]
    bare = [set() for _ in states]
    seen = set()
    for i, t in enumerate(trans):
        p = f"$.transitions[{i}]"
        _expect(isinstance(t, dict), p, "expected an object")
        x = state(t.get("from"), p + ".from")
        y = state(t.get("to"), p + ".to")
        if kind == "lts":
            label = t.get("label")
            _expect(label == silent or label in letters, p + ".label", f"unknown label {label!r}")
            step = (label, y)
        else:
            step = (_word(t.get("word"), p + ".word", letters), y)
        _expect((x, step) not in seen, p, "duplicate transition")
        seen.add((x, step))
        steps[x].add(step)
    if kind == "lts":
        for key in ("final", "exits"):
            _expect(key not in doc, f"$.{key}", "only ena documents have this field")
        image = [Effect(frozenset(s)) for s in steps]
        return Morphism(Monad.LTS, space, space, alphabet, image)
    for i, name in enumerate(doc.get("final", [])):
        x = state(name, f"$.final[{i}]")
        _expect(() not in bare[x], f"$.final[{i}]", "duplicate final state")
        bare[x].add(())
    exits = doc.get("exits", [])
    _expect(isinstance(exits, list), "$.exits", "expected a list")
    for i, e in enumerate(exits):
        p = f"$.exits[{i}]"
        _expect(isinstance(e, dict), p, "expected an object")
        x = state(e.get("from"), p + ".from")
        w = _word(e.get("word"), p + ".word", letters)
        _expect(w and w not in bare[x], p, "empty or duplicate exit word")
        bare[x].add(w)
    system = Morphism(Monad.ENA, space, space, alphabet,
                      [Effect(frozenset(s), frozenset(b)) for s, b in zip(steps, bare)])
    if surface:
        try:
            return surface_of(system)
        except ValueError as exc:
            raise SchemaError("$.transitions", f"not a surface automaton: {exc}") from None
    return system


def read_json(data, surface: bool = False):
    """Parse a model document into a system.

    ``lts`` documents give an LTS; ``ena`` documents give an ENA system, or
    an :class:`ENASurface` when ``surface`` is set (words of length at most
    one, no exit words).
    """
    return from_document(_loads(data), surface=surface)


# -- JSON: partitions, saturations, reports -----------------------------------------

def partition_document(partition) -> dict:
    names = partition.space.names
    return {
        "kind": "partition",
        "states": list(names),
        "blocks": [[names[x] for x in b] for b in partition.blocks],
    }


def weak_matrix_document(wm, samples: int = 5, maxlen: int = 3) -> dict:
    """Finite summary of a free saturation: minimal DFA size and a few short
    words for every non-empty cell (and bare component)."""
    names = wm.space.names

    def cell(L):
        words = reglang.enumerate_upto(L, maxlen)
        return {"dfa_states": reglang.minimal_dfa(L).size,
                "samples": [list(w) for w in words[:samples]]}

    cells = []
    for x in range(len(names)):
        for y in range(len(names)):
            L = wm.lang[x][y]
            if not reglang.is_empty(L):
                cells.append({"from": names[x], "to": names[y], **cell(L)})
    doc = {
        "kind": "weak-matrix",
        "states": list(names),
        "alphabet": list(wm.alphabet.visible),
        "cells": cells,
    }
    if wm.bare is not None:
        doc["bare"] = [{"state": names[x], **cell(L)} for x, L in enumerate(wm.bare)
                       if not reglang.is_empty(L)]
    return doc


def trace_document(traces) -> dict:
    """A bounded trace map: every state's words, shortest first, then in
    alphabet order."""
    if traces.mode != "bounded":
        raise ValueError("only bounded traces have a finite listing")
    names = traces.space.names
    return {
        "kind": "traces",
        "iterations": traces.k,
        "traces": {names[x]: [list(w) for w in sorted(ws, key=_word_key)]
                   for x, ws in enumerate(traces.values)},
    }


# -- Aldebaran .aut ------------------------------------------------------------

_HEADER = re.compile(r"^des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_EDGE = re.compile(r'^\(\s*(\d+)\s*,\s*(?:"((?:[^"\\]|\\.)*)"|([^,"\s][^,"]*?))\s*,\s*(\d+)\s*\)\s*$')
SILENT_AUT = ("i", "tau")


def read_aut(data, alphabet=None) -> Morphism:
    """Parse an ``.aut`` file; states become ``"0" .. "n-1"``.

    Labels ``i`` and ``tau`` are silent. The visible alphabet is
    ``alphabet`` if given, else the sorted set of labels that occur.
    """
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    lines = data.splitlines()
    idx = 0
    while idx < len(lines) and not lines[idx].strip():
        idx += 1
    if idx == len(lines):
        raise ParseError(1, "missing des header")
    m = _HEADER.match(lines[idx].strip())
    if not m:
        raise ParseError(idx + 1, "expected 'des (<first>, <transitions>, <states>)'")
    first, n_trans, n_states = (int(g) for g in m.groups())
    if n_states == 0 or first >= n_states:
        raise ParseError(idx + 1, "initial state out of range")
    edges = []
    last = idx + 1
    for k in range(idx + 1, len(lines)):
        text = lines[k].strip()
        if not text:
            continue
        e = _EDGE.match(text)
        if not e:
            raise ParseError(k + 1, f"malformed transition {text!r}")
        src, quoted, bare, dst = e.groups()
        label = quoted.replace('\\"', '"').replace("\\\\", "\\") if quoted is not None else bare
        src, dst = int(src), int(dst)
        if src >= n_states or dst >= n_states:
            raise ParseError(k + 1, "state index out of range")
        edges.append((src, label, dst))
        last = k + 1
    if len(edges) != n_trans:
        raise HeaderMismatch(last, f"header declares {n_trans} transitions, found {len(edges)}")
    visible = sorted({l for _, l, _ in edges if l not in SILENT_AUT})
    if alphabet is not None:
        extra = [l for l in visible if l not in alphabet]
        if extra:
            raise ParseError(last, f"labels {extra!r} not in the given alphabet")
        visible = list(alphabet)
    alpha = Alphabet(tuple(visible), "tau")
    space = StateSpace(tuple(str(i) for i in range(n_states)))
    steps = [set() for _ in range(n_states)]
    for src, label, dst in edges:
        steps[src].add(("tau" if label in SILENT_AUT else label, dst))
    return Morphism(Monad.LTS, space, space, alpha, [Effect(frozenset(s)) for s in steps])


def write_aut(system: Morphism) -> bytes:
    if not isinstance(system, Morphism) or system.monad is not Monad.LTS:
        raise TypeError("only LTS systems have an .aut form")
    silent = system.alphabet.silent
    for a in system.alphabet.visible:
        if a in SILENT_AUT:
            raise ValueError(f"visible label {a!r} would read back as silent")
    rows = []
    for x, label, y in system.edges():
        text = "tau" if label == silent else label.replace("\\", "\\\\").replace('"', '\\"')
        rows.append((x, text, y))
    rows.sort()
    out = [f"des (0, {len(rows)}, {len(system.source)})"]
    out += [f'({x}, "{l}", {y})' for x, l, y in rows]
    return ("\n".join(out) + "\n").encode("utf-8")


# -- DOT ----------------------------------------------------------------------

def _q(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _word_text(w):
    return "".join(w) if w else "ε"


def _system_edges(system):
    if isinstance(system, ENASurface):
        return system.lts, system.final
    final = set()
    if system.monad is Monad.ENA:
        final = {x for x, eff in enumerate(system.image) if () in eff.bare}
    return system, final


def write_dot(obj, system=None) -> bytes:
    """DOT digraph of a system, a partition (blocks as clusters; edges drawn
    when ``system`` is given) or a free saturation (sample words on edges)."""
    from .equivalence import Partition
    from .saturation import WeakMatrix

    lines = ["digraph G {"]
    if isinstance(obj, Partition):
        names = obj.space.names
        for k, block in enumerate(obj.blocks):
            lines.append(f"  subgraph cluster_{k} {{")
            lines.append(f'    label="block {k}";')
            for x in block:
                lines.append(f"    n{x} [label={_q(names[x])}];")
            lines.append("  }")
        if system is not None:
            lines += _edge_lines(*_system_edges(system))[1]
    elif isinstance(obj, WeakMatrix):
        names = obj.space.names
        for x, n in enumerate(names):
            shape = "circle"
            if obj.bare is not None and reglang.member(obj.bare[x], ()):
                shape = "doublecircle"
            lines.append(f"  n{x} [label={_q(n)}, shape={shape}];")
        for x in range(len(names)):
            for y in range(len(names)):
                L = obj.lang[x][y]
                if reglang.is_empty(L):
                    continue
                words = reglang.enumerate_upto(L, 3)
                text = ",".join(_word_text(w) for w in words[:4])
                if len(words) > 4 or not reglang.subset(L, reglang.from_words(words, L.alphabet)):
                    text += ",…"
                lines.append(f"  n{x} -> n{y} [label={_q(text)}];")
    else:
        base, final = _system_edges(obj)
        nodes, edges = _edge_lines(base, final)
        lines += nodes + edges
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _edge_lines(base, final):
    names = base.source.names
    nodes = [f"  n{x} [label={_q(n)}, shape={'doublecircle' if x in final else 'circle'}];"
             for x, n in enumerate(names)]
    edges = []
    for x, label, y in base.edges():
        if label is None:
            edges.append(f"  n{x} -> n{y};")
            continue
        text = _word_text(label) if isinstance(label, tuple) else label
        edges.append(f"  n{x} -> n{y} [label={_q(text)}];")
    return nodes, edges
