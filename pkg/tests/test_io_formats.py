import json

import pytest
from hypothesis import given, settings

from kleisli import io_formats
from kleisli.equivalence import weak_bisimilarity_star
from kleisli.errors import HeaderMismatch, ParseError, SchemaError
from kleisli.kernel import ENASurface, Monad, epsilon_na, lts, word_system
from kleisli.saturation import saturate_free
from kleisli.trace import trace_iterate

from strategies import ena_surfaces, lts_systems

LOOP = {
    "kind": "ena", "states": ["x", "y", "z"], "alphabet": ["a", "b"], "final": ["z"],
    "transitions": [
        {"from": "x", "to": "y", "word": []},
        {"from": "y", "to": "y", "word": ["a"]},
        {"from": "y", "to": "z", "word": ["b"]},
        {"from": "z", "to": "x", "word": []},
    ],
}


@given(lts_systems())
@settings(max_examples=100, deadline=None)
def test_lts_json_round_trip(alpha):
    data = io_formats.write_json(alpha)
    assert io_formats.read_json(data) == alpha
    assert io_formats.write_json(io_formats.read_json(data)) == data


@given(ena_surfaces())
@settings(max_examples=100, deadline=None)
def test_automaton_json_round_trip(e):
    data = io_formats.write_json(e)
    assert io_formats.read_json(data, surface=True) == e


@given(lts_systems())
@settings(max_examples=100, deadline=None)
def test_aut_round_trip(alpha):
    text = io_formats.write_aut(alpha)
    back = io_formats.read_aut(text, alphabet=alpha.alphabet.visible)
    assert back.image == alpha.image
    assert io_formats.write_aut(back) == text


def test_general_ena_round_trip_uses_exits():
    f = word_system(Monad.ENA, ["p", "q"], ["a", "b"], [("p", "ab", "q")],
                    bare=[("q", ""), ("p", "ba")])
    doc = json.loads(io_formats.write_json(f))
    assert doc["final"] == ["q"]
    assert doc["exits"] == [{"from": "p", "word": ["b", "a"]}]
    assert io_formats.read_json(io_formats.write_json(f)) == f
    with pytest.raises(SchemaError):
        io_formats.read_json(io_formats.write_json(f), surface=True)


def test_canonical_json_layout():
    e = io_formats.read_json(json.dumps(LOOP), surface=True)
    assert isinstance(e, ENASurface)
    data = io_formats.write_json(e).decode()
    assert data.endswith("}\n")
    assert data.index('"alphabet"') < data.index('"final"') < data.index('"kind"')
    assert '\n  "kind": "ena",\n' in data


def test_trace_document_is_canonical():
    e = io_formats.read_json(json.dumps(LOOP), surface=True)
    doc = io_formats.trace_document(trace_iterate(e, 4))
    assert doc["traces"] == {"x": [["b"], ["a", "b"]], "y": [["b"], ["a", "b"], ["a", "a", "b"]],
                             "z": [[], ["b"]]}


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.update(kind="dfa"), "$.kind"),
    (lambda d: d["transitions"][3].update(to="w"), "$.transitions[3].to"),
    (lambda d: d["transitions"][1].update(word=["c"]), "$.transitions[1].word[0]"),
    (lambda d: d.update(states=["x", "x", "z"]), "$.states"),
    (lambda d: d.update(final=["q"]), "$.final[0]"),
    (lambda d: d["transitions"].append(dict(d["transitions"][0])), "$.transitions[4]"),
    (lambda d: d.pop("alphabet"), "$.alphabet"),
])
def test_schema_errors_name_the_offending_path(mutate, path):
    doc = json.loads(json.dumps(LOOP))
    mutate(doc)
    with pytest.raises(SchemaError) as err:
        io_formats.read_json(json.dumps(doc))
    assert err.value.path == path


def test_malformed_json_reports_line():
    with pytest.raises(ParseError) as err:
        io_formats.read_json(b'{\n  "kind": "lts",\n  oops\n}')
    assert err.value.line == 3


def test_lts_documents_reject_automaton_fields():
    doc = {"kind": "lts", "states": ["x"], "alphabet": [], "final": ["x"], "transitions": []}
    with pytest.raises(SchemaError) as err:
        io_formats.read_json(json.dumps(doc))
    assert err.value.path == "$.final"


def test_read_aut_accepts_tool_conventions():
    text = 'des (0, 3, 3)\n(0, "a", 1)\n(1, i, 2)\n(2, "say \\"hi\\"", 0)\n'
    alpha = io_formats.read_aut(text)
    assert alpha.source.names == ("0", "1", "2")
    assert alpha.alphabet.visible == ("a", 'say "hi"')
    assert alpha.image[1].steps == {("tau", 2)}
    assert io_formats.read_aut(io_formats.write_aut(alpha)) == alpha


@pytest.mark.parametrize("text, exc, line", [
    ("des (0, 2, 2)\n(0, \"a\", 1)\n", HeaderMismatch, 2),
    ("des 0 1 2\n", ParseError, 1),
    ("des (0, 1, 2)\n(0, \"a\", 5)\n", ParseError, 2),
    ("des (0, 1, 2)\n(0 \"a\" 1)\n", ParseError, 2),
    ("", ParseError, 1),
])
def test_read_aut_errors(text, exc, line):
    with pytest.raises(exc) as err:
        io_formats.read_aut(text)
    assert err.value.line == line


def test_write_aut_refuses_reserved_labels():
    with pytest.raises(ValueError):
        io_formats.write_aut(lts(["x"], ["i"], [("x", "i", "x")]))


def test_dot_outputs():
    e = io_formats.read_json(json.dumps(LOOP), surface=True)
    dot = io_formats.write_dot(e).decode()
    assert 'n2 [label="z", shape=doublecircle];' in dot
    assert 'n1 -> n2 [label="b"];' in dot
    part = weak_bisimilarity_star(e)
    assert "subgraph cluster_0" in io_formats.write_dot(part, e).decode()
    wm_dot = io_formats.write_dot(saturate_free(e)).decode()
    assert 'n1 -> n1 [label="ε,a,b,aa,…"];' in wm_dot


def test_weak_matrix_summary():
    alpha = lts(["x", "y", "z"], ["a"], [("x", "tau", "y"), ("y", "a", "z")])
    doc = io_formats.weak_matrix_document(saturate_free(alpha))
    cell = next(c for c in doc["cells"] if c["from"] == "x" and c["to"] == "z")
    assert cell["samples"] == [["a"]]
    assert doc["kind"] == "weak-matrix" and "bare" not in doc
    e = epsilon_na(["p"], ["a"], [("p", "a", "p")], final=["p"])
    doc = io_formats.weak_matrix_document(saturate_free(e), samples=3)
    assert doc["bare"] == [{"state": "p", "dfa_states": 1, "samples": [[], ["a"], ["a", "a"]]}]


def test_dot_of_one_state_system():
    dot = io_formats.write_dot(lts(["p"], ["a"], [])).decode()
    assert dot.count("[label=") == 1 and "->" not in dot
