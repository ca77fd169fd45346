from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from auctionmatch.graph import (
    BipartiteGraph,
    GeneratorSpec,
    InvalidSpecError,
    ParseError,
    format_weight,
    generate,
    parse,
    serialize,
)


def test_generate_is_deterministic():
    spec = GeneratorSpec("k_left_regular", n_right=10, n_left=9, k=3, seed=7)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(GeneratorSpec("k_left_regular", 10, 9, k=3, seed=8))


@pytest.mark.parametrize("seed", range(20))
def test_k_regular_degree_and_distinct(seed):
    g = generate(GeneratorSpec("k_left_regular", n_right=10, n_left=5, k=3, seed=seed))
    for nbrs in g.neighbors:
        assert len(nbrs) == 3
        assert len(set(nbrs)) == 3


def test_complete_edge_count():
    g = generate(GeneratorSpec("complete", n_right=4, n_left=4))
    assert g.n_edges == 16
    assert all(nb == (0, 1, 2, 3) for nb in g.neighbors)


def test_k_equal_n_right_gives_all_vertices():
    g = generate(GeneratorSpec("k_left_regular", n_right=5, n_left=3, k=5, seed=1))
    assert all(sorted(nb) == [0, 1, 2, 3, 4] for nb in g.neighbors)


def test_k_too_large():
    with pytest.raises(InvalidSpecError):
        generate(GeneratorSpec("k_left_regular", n_right=3, n_left=2, k=4))


@pytest.mark.parametrize(
    "spec",
    [
        GeneratorSpec("k_left_regular", 5, 3, k=0),
        GeneratorSpec("complete", 5, 3, weight_low=2, weight_high=1),
        GeneratorSpec("complete", 5, 3, integer_weights=True, weight_high=1.5),
        GeneratorSpec("ring", 5, 3),
        GeneratorSpec("complete", 5, 3, seed=-1),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(InvalidSpecError):
        generate(spec)


def test_neighbor_choice_is_uniform():
    g = generate(GeneratorSpec("k_left_regular", n_right=10, n_left=10_000, k=1, seed=3))
    counts = Counter(nb[0] for nb in g.neighbors)
    for v in range(10):
        assert abs(counts[v] / 10_000 - 0.1) <= 0.02


def test_weight_ranges():
    g = generate(GeneratorSpec("complete", 30, 30, weight_low=-2, weight_high=3, seed=1))
    assert -2 <= g.w_min and g.w_max < 3
    gi = generate(GeneratorSpec("complete", 30, 30, weight_low=0, weight_high=100,
                                integer_weights=True, seed=1))
    assert all(w.is_integer() and 0 <= w <= 100 for _, _, w in gi.edges())


def test_cached_extrema():
    g = BipartiteGraph.from_edges(2, 3, [(0, 0, 4.0), (0, 2, -1.5), (1, 1, 2.0)])
    assert (g.w_max, g.w_min) == (4.0, -1.5)


@pytest.mark.parametrize(
    "edges, msg",
    [
        ([(0, 3, 1.0)], "out of range"),
        ([(0, 1, 1.0), (0, 1, 2.0)], "duplicate"),
        ([(0, 1, float("nan"))], "non-finite"),
    ],
)
def test_graph_invariants_enforced(edges, msg):
    with pytest.raises(ValueError, match=msg):
        BipartiteGraph.from_edges(1, 3, edges)


def test_parse_single_edge():
    g = parse("p bpm 1 1 1\ne 1 1 5.0\n")
    assert (g.n_left, g.n_right) == (1, 1)
    assert g.adjacency(0) == [(0, 5.0)]


def test_parse_accepts_bytes_and_comments():
    g = parse(b"c hello\n\np bpm 2 2 1\nc mid\ne 2 1 -0.5\n")
    assert g.adjacency(1) == [(0, -0.5)]
    assert g.adjacency(0) == []


@pytest.mark.parametrize(
    "text, lineno, fragment",
    [
        ("p bpm 1 1 1\ne 1 2 5.0\n", 2, "right index 2 out of range"),
        ("p bpm 1 1 1\ne 2 1 5.0\n", 2, "left index 2"),
        ("p bpm 2 2 2\ne 1 1 1\ne 1 1 2\n", 3, "duplicate edge"),
        ("p bpm 2 2 3\ne 1 1 1\ne 1 2 2\n", 3, "declares 3 edges but 2"),
        ("p bpm 2 2 1\ne 1 1 1\ne 1 2 2\n", 3, "more edge lines"),
        ("e 1 1 1\n", 1, "expected header"),
        ("p bpm 1 x 1\n", 1, "bad n_right"),
        ("p bpm 1 1\n", 1, "malformed header"),
        ("p bpm 1 1 1\ne 1 1 abc\n", 2, "bad weight"),
        ("p bpm 1 1 1\ne 1 1 inf\n", 2, "non-finite"),
        ("p bpm 1 1 1\np bpm 1 1 1\n", 2, "duplicate header"),
        ("p bpm 1 1 1\nx 1 1 1\n", 2, "expected 'e"),
        ("c only\n", 1, "missing header"),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.lineno == lineno
    assert fragment in str(info.value)


def test_serialize_examples():
    assert serialize(parse("p bpm 1 1 1\ne 1 1 5.0\n")) == "p bpm 1 1 1\ne 1 1 5\n"
    assert serialize(BipartiteGraph.from_edges(0, 3, [])) == "p bpm 0 3 0\n"


def test_serialize_sorts_edges():
    text = "p bpm 2 3 3\ne 2 1 1\ne 1 3 0.25\ne 1 1 7\n"
    assert serialize(parse(text)) == "p bpm 2 3 3\ne 1 1 7\ne 1 3 0.25\ne 2 1 1\n"


@pytest.mark.parametrize("w", [0.1, 1 / 3, -2.5e-300, 1e22, 5.0, -0.0, 123456789.125])
def test_format_weight_round_trips(w):
    assert float(format_weight(w)) == w


finite = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def graphs(draw):
    n_left = draw(st.integers(0, 6))
    n_right = draw(st.integers(1, 6))
    nbrs, ws = [], []
    for _ in range(n_left):
        row = draw(st.lists(st.integers(0, n_right - 1), unique=True, max_size=n_right))
        nbrs.append(tuple(row))
        ws.append(tuple(draw(finite) for _ in row))
    return BipartiteGraph(n_left, n_right, tuple(nbrs), tuple(ws))


@settings(max_examples=200)
@given(graphs())
def test_round_trip(g):
    text = serialize(g)
    back = parse(text)
    assert back == g.canonical()
    assert serialize(back) == text


@settings(max_examples=50)
@given(st.integers(1, 30), st.integers(0, 2**64 - 1))
def test_generated_graphs_round_trip(n, seed):
    g = generate(GeneratorSpec("k_left_regular", n, n, k=min(3, n), seed=seed))
    assert parse(serialize(g)) == g.canonical()
