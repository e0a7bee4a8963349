"""Command-line interface: ``kleisli <command> ...``.

Exit codes: 0 success, 1 a checked property or equivalence does not hold,
2 unreadable input, 3 operation not available for this kind of system,
4 unknown state name, 5 unknown suite.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import io_formats, reglang
from .equivalence import (
    quotient, strong_bisimilarity, union_quotient,
    weak_bisimilarity_free, weak_bisimilarity_star,
)
from .errors import (
    AlphabetMismatch, BadSplit, MonadMismatch, ParseError, SchemaError,
    SpaceMismatch, TooLarge, UnknownState, UnknownSuite, WrongMonad,
)
from .harness import SUITES, GenConfig, run_suite
from .kernel import ENASurface, Monad, Morphism, embed_underline
from .saturation import saturate_free, star
from .trace import trace_exact

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CAPABILITY, EXIT_NAME, EXIT_SUITE = range(6)

_EXIT_FOR = [
    ((ParseError, SchemaError), EXIT_PARSE),
    ((WrongMonad, MonadMismatch, SpaceMismatch, AlphabetMismatch, TooLarge, BadSplit),
     EXIT_CAPABILITY),
    ((UnknownState,), EXIT_NAME),
    ((UnknownSuite,), EXIT_SUITE),
]


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# -- input and output ------------------------------------------------------------

def _input_format(path, override):
    if override:
        return override
    suffix = Path(path).suffix.lower()
    if suffix in (".json", ".aut"):
        return suffix[1:]
    raise _Fail(EXIT_PARSE, f"{path}: cannot infer format from extension; use --input-format")


def load(path, fmt=None):
    """Read a system; ENA documents become surfaces whenever possible."""
    fmt = _input_format(path, fmt)
    try:
        data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as exc:
        raise _Fail(EXIT_PARSE, f"{path}: {exc.strerror}") from None
    try:
        if fmt == "aut":
            return io_formats.read_aut(data)
        try:
            return io_formats.read_json(data, surface=True)
        except SchemaError as exc:
            if not exc.reason.startswith("not a surface automaton"):
                raise
            return io_formats.read_json(data)
    except (ParseError, SchemaError) as exc:
        raise _Fail(EXIT_PARSE, f"{path}: {exc}") from None


def _emit(data: bytes, out):
    if out in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _write_system(system, fmt):
    if fmt == "json":
        return io_formats.write_json(system)
    if fmt == "dot":
        return io_formats.write_dot(system)
    if not (isinstance(system, Morphism) and system.monad is Monad.LTS):
        raise WrongMonad("only plain LTSs can be written as .aut")
    return io_formats.write_aut(system)


def _output_format(args):
    if args.format:
        return args.format
    if args.output and args.output != "-":
        suffix = Path(args.output).suffix.lower()[1:]
        if suffix in ("json", "aut", "dot"):
            return suffix
    return "json"


def _state(system, name, where=""):
    if name not in system.space:
        raise UnknownState(f"unknown state {name!r}{where}")
    return system.space.index(name)


def word_text(word, letters) -> str:
    """Letters are juxtaposed when all are single characters, else joined
    with dots; the empty word prints as ``ε``."""
    if not word:
        return "ε"
    sep = "" if all(len(a) == 1 for a in letters) else "."
    return sep.join(word)


# -- commands --------------------------------------------------------------------

def cmd_convert(args):
    system = load(args.input, args.input_format)
    _emit(_write_system(system, _output_format(args)), args.output)
    return EXIT_OK


def cmd_saturate(args):
    system = load(args.input, args.input_format)
    fmt = _output_format(args)
    if args.strategy == "star":
        if isinstance(system, Morphism) and system.monad is Monad.ENA:
            raise WrongMonad("star needs an LTS or an automaton with single-letter steps; "
                             "use --strategy free")
        _emit(_write_system(star(system), fmt), args.output)
        return EXIT_OK
    wm = saturate_free(system)
    if fmt == "aut":
        raise WrongMonad("the free saturation is a language matrix, not an LTS")
    if fmt == "dot":
        _emit(io_formats.write_dot(wm), args.output)
    else:
        _emit(io_formats.dumps(io_formats.weak_matrix_document(wm)), args.output)
    return EXIT_OK


def _parse_pair(text):
    for sep in ("~", ","):
        if sep in text:
            a, b = text.split(sep, 1)
            if a and b:
                return a.strip(), b.strip()
    raise _Fail(EXIT_PARSE, f"bad pair {text!r}; expected STATE~STATE")


def _partition(args, a, b):
    if args.kind == "strong":
        return strong_bisimilarity(a, b)
    if args.via == "star":
        for s in (a, b):
            if isinstance(s, Morphism) and s.monad is Monad.ENA:
                raise WrongMonad("--via star needs single-letter steps; use --via free")
        return weak_bisimilarity_star(a, b)
    if b is not None and isinstance(a, ENASurface) != isinstance(b, ENASurface):
        raise MonadMismatch("cannot compare an automaton with a plain LTS")
    return weak_bisimilarity_free(a, b)


def cmd_bisim(args):
    pairs = [_parse_pair(p) for p in args.pairs or ()]
    a = load(args.input_a, args.input_format)
    b = load(args.input_b, args.input_format) if args.input_b else None
    part = _partition(args, a, b)
    if not pairs:
        _emit(part.describe().encode(), None)
        return EXIT_OK
    all_yes = True
    lines = []
    for x, y in pairs:
        if b is None:
            i, j = _state(a, x), _state(a, y)
        else:
            i = _state(part, x if x.startswith("1:") else "1:" + x)
            j = _state(part, y if y.startswith("2:") else "2:" + y)
        same = part.same(i, j)
        all_yes &= same
        lines.append(f"{x} ~ {y}: {'yes' if same else 'no'}\n")
    _emit("".join(lines).encode(), None)
    return EXIT_OK if all_yes else EXIT_FAIL


def _dfa_text(L) -> str:
    d = reglang.minimal_dfa(L)
    letters = d.alphabet
    if reglang.is_empty(L):
        head = "empty language\n"
    else:
        head = ""
    lines = [head + f"dfa states={d.size} start=0 accepting=[" +
             ", ".join(str(q) for q in sorted(d.accepting)) + "]"]
    for q, row in enumerate(d.trans):
        for a, t in zip(letters, row):
            lines.append(f"{q} -{a}-> {t}")
    return "\n".join(lines) + "\n"


def cmd_trace(args):
    system = load(args.input, args.input_format)
    x = _state(system, args.state)
    L = trace_exact(system).values[x]
    if args.exact:
        _emit(_dfa_text(L).encode(), None)
        return EXIT_OK
    letters = system.alphabet.visible
    words = reglang.enumerate_upto(L, args.max_len)
    _emit("".join(word_text(w, letters) + "\n" for w in words).encode(), None)
    return EXIT_OK


def _split_ref(text):
    path, sep, state = text.rpartition(":")
    if not sep or not path or not state:
        raise _Fail(EXIT_PARSE, f"bad reference {text!r}; expected FILE:STATE")
    return path, state


def cmd_trace_equiv(args):
    refs = [_split_ref(args.ref_a), _split_ref(args.ref_b)]
    langs = []
    letters = None
    for path, name in refs:
        system = load(path, args.input_format)
        if letters is None:
            letters = system.alphabet.visible
        elif set(system.alphabet.visible) != set(letters):
            raise AlphabetMismatch("the two systems use different alphabets")
        x = _state(system, name, f" in {path}")
        langs.append(trace_exact(system).values[x])
    if reglang.equivalent(*langs):
        _emit(b"equivalent\n", None)
        return EXIT_OK
    _emit(b"not equivalent\n", None)
    return EXIT_FAIL


def cmd_minimize(args):
    system = load(args.input, args.input_format)
    if args.kind == "strong":
        result, _ = quotient(system, strong_bisimilarity(system))
    else:
        if isinstance(system, Morphism) and system.monad is Monad.ENA:
            raise WrongMonad("weak minimization needs single-letter steps")
        result = union_quotient(system, weak_bisimilarity_star(system))
    _emit(_write_system(result, _output_format(args)), args.output)
    return EXIT_OK


def cmd_check(args):
    seed = args.seed
    if seed is None:
        env = os.environ.get("KLEISLI_SEED", "0")
        try:
            seed = int(env, 0)
        except ValueError:
            raise _Fail(EXIT_PARSE, f"KLEISLI_SEED={env!r} is not an integer") from None
    if args.suite not in SUITES:
        raise UnknownSuite(f"unknown suite {args.suite!r}; known: {', '.join(SUITES)}")
    cfg = GenConfig(seed=seed, max_states=args.max_states,
                    alphabet_size=args.alphabet_size, cases=args.cases)
    report = run_suite(args.suite, cfg)
    if args.format == "json":
        _emit(io_formats.dumps(report.to_document()), None)
    else:
        _emit(report.to_text().encode(), None)
    print(f"{args.suite}: {report.wall_time:.2f}s", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


# -- argument parsing ------------------------------------------------------------

def _positive(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return val


def _count(text):
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return val


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kleisli", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp, *names):
        for n in names:
            sp.add_argument(n)
        sp.add_argument("--input-format", choices=("json", "aut"),
                        help="input format (default: from the file extension)")

    def with_output(sp):
        sp.add_argument("--format", choices=("json", "aut", "dot"),
                        help="output format (default: from -o, else json)")
        sp.add_argument("-o", "--output", help="output file (default: standard out)")

    sp = sub.add_parser("convert", help="re-write a system in another format")
    with_input(sp, "input")
    with_output(sp)
    sp.set_defaults(run=cmd_convert)

    sp = sub.add_parser("saturate", help="weak-transition closure of a system")
    with_input(sp, "input")
    sp.add_argument("--strategy", choices=("star", "free"), default="star")
    with_output(sp)
    sp.set_defaults(run=cmd_saturate)

    sp = sub.add_parser("bisim", help="bisimilarity partition or pair queries")
    with_input(sp, "input_a")
    sp.add_argument("input_b", nargs="?")
    sp.add_argument("--kind", choices=("strong", "weak"), default="weak")
    sp.add_argument("--via", choices=("star", "free"), default="star")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--pairs", nargs="+", metavar="X~Y")
    mode.add_argument("--partition", action="store_true", help="print the partition (default)")
    sp.set_defaults(run=cmd_bisim)

    sp = sub.add_parser("trace", help="accepted words of a state")
    with_input(sp, "input")
    sp.add_argument("--state", required=True)
    what = sp.add_mutually_exclusive_group(required=True)
    what.add_argument("--max-len", type=_count)
    what.add_argument("--exact", action="store_true", help="print the minimal DFA")
    sp.set_defaults(run=cmd_trace)

    sp = sub.add_parser("trace-equiv", help="compare the traces of two states")
    sp.add_argument("ref_a", metavar="FILE:STATE")
    sp.add_argument("ref_b", metavar="FILE:STATE")
    sp.add_argument("--input-format", choices=("json", "aut"))
    sp.set_defaults(run=cmd_trace_equiv)

    sp = sub.add_parser("minimize", help="quotient by bisimilarity")
    with_input(sp, "input")
    sp.add_argument("--kind", choices=("strong", "weak"), default="strong")
    with_output(sp)
    sp.set_defaults(run=cmd_minimize)

    sp = sub.add_parser("check", help="run a randomized property suite")
    sp.add_argument("--suite", required=True, help="one of: " + ", ".join(SUITES))
    sp.add_argument("--seed", type=lambda t: int(t, 0),
                    help="default: $KLEISLI_SEED, else 0")
    sp.add_argument("--cases", type=_count, default=100)
    sp.add_argument("--max-states", type=_positive, default=8)
    sp.add_argument("--alphabet-size", type=_count, default=2)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(run=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except _Fail as exc:
        print(f"kleisli: {exc}", file=sys.stderr)
        return exc.code
    except tuple(e for errs, _ in _EXIT_FOR for e in errs) as exc:
        code = next(c for errs, c in _EXIT_FOR if isinstance(exc, errs))
        print(f"kleisli: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
