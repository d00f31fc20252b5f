from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hposhadow import (
    MarkovPartition,
    Orbit,
    code_orbit,
    decode_symbols,
    enumerate_periodic,
    full_shift,
    graph_from_adjacency,
    graph_system,
    make_circle_system,
    parse_itinerary,
)
from hposhadow.errors import DomainError, InputError
from hposhadow.symbolic import adjacency_matrix, itinerary_orbit

GOLDEN = [("a", 1, 1), ("b", 1, 2), ("c", 2, 1)]


def test_graph_examples():
    assert len(full_shift(2).X1.elements) == 2
    G = graph_system(GOLDEN)
    assert adjacency_matrix(G).tolist() == [[1, 1], [1, 0]]
    with pytest.raises(InputError):
        graph_system([("a", 1, 3)], vertices=[1, 2])


def test_empty_edge_set_is_rejected():
    with pytest.raises(InputError):
        graph_system([])


def test_enumerate_periodic_examples():
    assert len(enumerate_periodic(full_shift(2), 3)) == 8
    G = graph_system(GOLDEN)
    assert len(enumerate_periodic(G, 3)) == 4
    assert enumerate_periodic(G, 1) == [("a",)]
    with pytest.raises(DomainError):
        enumerate_periodic(G, 13)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 6))
    A = draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n))
    adjacency = {v: [w for w in range(n) if A[v][w]] for v in range(n)}
    return adjacency, np.array(A, dtype=np.int64)


@given(small_graphs(), st.integers(1, 6))
def test_periodic_count_is_trace_of_matrix_power(graph, n):
    adjacency, A = graph
    if A.sum() == 0:
        return
    G = graph_from_adjacency(adjacency)
    assert len(enumerate_periodic(G, n)) == int(np.trace(np.linalg.matrix_power(A, n)))


def test_code_orbit_examples():
    d2 = make_circle_system(2)
    assert code_orbit(d2, MarkovPartition(2), Orbit(np.array([1 / 3, 2 / 3, 1 / 3, 2 / 3]))) == "0101"
    d3 = make_circle_system(3)
    assert code_orbit(d3, MarkovPartition(3), Orbit(np.array([0.5, 0.5]))) == "11"
    with pytest.raises(DomainError):
        code_orbit(d2, MarkovPartition(2), Orbit(np.array([0.5])))


def test_code_orbit_at_zero_hits_the_guard():
    # 0 lies on the boundary between arcs d-1 and 0, so its coding is ambiguous.
    d2 = make_circle_system(2)
    with pytest.raises(DomainError):
        code_orbit(d2, MarkovPartition(2), Orbit(np.zeros(3)))


def test_decode_examples():
    assert decode_symbols(2, "", "01") == Fraction(1, 3)
    assert decode_symbols(2, "", "100") == Fraction(4, 7)
    assert decode_symbols(3, "", "1") == Fraction(1, 2)
    assert decode_symbols(2, "1", "0") == Fraction(1, 2)
    with pytest.raises(InputError):
        decode_symbols(2, "", "012")


def test_parse_itinerary():
    assert parse_itinerary("1(00)") == ("1", "00")
    assert parse_itinerary("(1)") == ("", "1")
    with pytest.raises(InputError):
        parse_itinerary("100")


words = st.text("01", min_size=1, max_size=6)


@given(st.text("01", max_size=4), words)
def test_decode_then_code_round_trip(pre, per):
    # Skip itineraries whose points sit on an arc boundary (tails of all 0 or all 1).
    if set(per) != {"0", "1"}:
        return
    n = len(pre) + 3 * len(per)
    pts = itinerary_orbit(2, pre, per, n)
    for a, b in zip(pts, pts[1:]):
        assert (2 * a) % 1 == b
    symbols = code_orbit(make_circle_system(2), MarkovPartition(2), Orbit(np.array([float(p) for p in pts])))
    assert symbols == (pre + per * 4)[:n]
    assert decode_symbols(2, pre, per) == pts[0]


@given(st.integers(2, 5), st.data())
def test_coding_commutes_with_shift(d, data):
    per = data.draw(st.text("".join(str(k) for k in range(d)), min_size=2, max_size=5))
    if len(set(per)) < 2:
        return
    pts = itinerary_orbit(d, "", per, 2 * len(per) + 1)
    S = make_circle_system(d)
    P = MarkovPartition(d)
    full = code_orbit(S, P, Orbit(np.array([float(p) for p in pts])))
    shifted = code_orbit(S, P, Orbit(np.array([float(p) for p in pts[1:]])))
    assert shifted == full[1:]
