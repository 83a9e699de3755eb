"""Instance JSON and graph/matrix text formats."""

import pytest

from mvowf.formats import (
    FormatError,
    dump_graph,
    dump_instance,
    matrix_to_text,
    parse_graph,
    parse_instance,
    parse_matrix,
)
from mvowf.graphs import SimpleGraph
from mvowf.owf import OwfImage, OwfKey, evaluate, keygen


def test_instance_round_trip():
    key = keygen(3, 4, delta=2, seed=9)
    text = dump_instance(key)
    parsed_key, image = parse_instance(text)
    assert parsed_key == key
    assert image is None
    assert dump_instance(parsed_key) == text


def test_instance_round_trip_with_image():
    key = keygen(2, 3, delta=3, seed=10)
    from mvowf.field import identity

    image = evaluate(key, identity(3))
    text = dump_instance(key, image)
    parsed_key, parsed_image = parse_instance(text)
    assert parsed_key == key and parsed_image == image
    assert dump_instance(parsed_key, parsed_image) == text


def test_instance_out_of_range_entry_names_vector():
    key = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1)))
    text = dump_instance(key).replace('"1 0"', '"3 0"')
    with pytest.raises(FormatError, match=r"V\[0\].*range"):
        parse_instance(text)


def test_instance_rejects_bad_schema_and_shape():
    with pytest.raises(FormatError, match="JSON"):
        parse_instance("not json at all {")
    with pytest.raises(FormatError, match="schema"):
        parse_instance('{"q": 2}')
    key = keygen(2, 2, delta=1, seed=1)
    text = dump_instance(key).replace('"m": 3', '"m": 4')
    with pytest.raises(FormatError, match="m = 4"):
        parse_instance(text)


def test_instance_rejects_unsorted_image():
    key = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1)))
    doc = dump_instance(key, OwfImage(((0, 1), (1, 0))))
    broken = doc.replace('"0 1",\n    "1 0"', '"1 0",\n    "0 1"')
    with pytest.raises(FormatError, match="sorted"):
        parse_instance(broken)


def test_matrix_text_round_trip():
    m = ((1, 0, 2), (0, 1, 1), (2, 2, 0))
    assert parse_matrix(matrix_to_text(m), 3) == m
    with pytest.raises(FormatError):
        parse_matrix("1 0\n0 5\n", 3)
    with pytest.raises(FormatError):
        parse_matrix("", 2)


def test_graph_round_trip():
    g = SimpleGraph.from_edges(4, [(0, 1), (2, 3), (1, 3)])
    assert parse_graph(dump_graph(g)) == g


def test_graph_parse_errors():
    with pytest.raises(FormatError, match="header"):
        parse_graph("3\n0 1\n")
    with pytest.raises(FormatError, match="promises"):
        parse_graph("3 2\n0 1\n")
    with pytest.raises(FormatError, match="self-loop"):
        parse_graph("3 1\n1 1\n")
    with pytest.raises(FormatError, match="duplicate"):
        parse_graph("3 2\n0 1\n1 0\n")
    with pytest.raises(FormatError, match="range"):
        parse_graph("3 1\n0 7\n")


def test_graph_comments_and_blank_lines():
    g = parse_graph("# a path\n3 2\n\n0 1\n1 2\n")
    assert g == SimpleGraph.from_edges(3, [(0, 1), (1, 2)])
