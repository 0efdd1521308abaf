from fractions import Fraction

import pytest

from phylocircuit.enum2 import (
    add_heavy_chord,
    enumerate_binary_two_nested,
    skeleton_census,
    two_nested_breakdown,
)
from phylocircuit.errors import BadChordError, NoCycleError, OutOfRangeError
from phylocircuit.metrics import min_path_vector, resistance_vector
from phylocircuit.netgraph import THETA, classify, is_binary
from phylocircuit.reconstruct import min_path_split_system

from fixtures import quartet_tree, ring_with_pendants, square_with_pendants

F = Fraction


def test_count_four_leaves():
    nets = enumerate_binary_two_nested(4)
    assert len(nets) == 6


def test_count_five_leaves():
    assert len(enumerate_binary_two_nested(5)) == 120


def test_count_six_leaves():
    assert len(enumerate_binary_two_nested(6)) == 2790


def test_breakdown_matches_published_terms():
    bd = two_nested_breakdown(6)
    assert bd.total == 2790
    assert sorted((c for _, c in bd.rows), reverse=True) == [900, 720, 540, 360, 180, 90]
    assert two_nested_breakdown(5).total == 120
    assert sorted(c for _, c in two_nested_breakdown(5).rows) == [60, 60]
    assert two_nested_breakdown(4).total == 6


def test_skeleton_census():
    assert skeleton_census(4) == 1
    assert skeleton_census(5) == 2
    assert skeleton_census(6) == 6


def test_enumerated_networks_classify_level_two():
    nets = enumerate_binary_two_nested(4)
    for net in nets:
        cls = classify(net)
        assert cls.level == 2
        assert cls.triangle_free
        assert is_binary(net)
        assert cls.blocks.of_kind(THETA)


def test_enumeration_out_of_range():
    with pytest.raises(OutOfRangeError):
        enumerate_binary_two_nested(7)


# ---------------------------------------------------------------------------
# heavy chords


def test_heavy_chord_preserves_min_path_exactly():
    net = square_with_pendants()
    chorded = add_heavy_chord(net, 0, ("c1", "c3"), F(100))
    assert classify(chorded).level == 2
    assert min_path_vector(chorded) == min_path_vector(net)


def test_heavy_chord_preserves_decomposition():
    net = ring_with_pendants(5, cycle_weights=[F(2), F(1), F(3), F(1), F(2)])
    chorded = add_heavy_chord(net, 0, ("c1", "c3"), F(1000))
    assert min_path_split_system(chorded).same_weighted_splits(
        min_path_split_system(net)
    )


def test_light_chord_rejected():
    net = square_with_pendants()
    with pytest.raises(BadChordError):
        add_heavy_chord(net, 0, ("c1", "c3"), F(1, 10))


def test_light_chord_would_change_distances():
    # the precondition is not vacuous: a light chord does alter the metric
    net = square_with_pendants(cycle_weights=[F(4), F(4), F(4), F(4)])
    edges = list(net.edge_items) + [("c1", "c3", F(1, 10))]
    from phylocircuit.netgraph import PhyloNetwork

    cheat = PhyloNetwork.build(net.leaves, edges, strict=True)
    assert min_path_vector(cheat) != min_path_vector(net)


def test_adjacent_chord_rejected():
    net = square_with_pendants()
    with pytest.raises(BadChordError):
        add_heavy_chord(net, 0, ("c1", "c2"), F(100))


def test_tree_input_has_no_cycle():
    with pytest.raises(NoCycleError):
        add_heavy_chord(quartet_tree(), 0, ("a", "b"), F(100))


def test_two_nested_resistance_often_kalmanson():
    # conjecture evidence, asserted only on a fixed chorded square
    from phylocircuit.metrics import find_kalmanson_order

    net = square_with_pendants()
    chorded = add_heavy_chord(net, 0, ("c1", "c3"), F(100))
    d = resistance_vector(chorded)
    result = find_kalmanson_order(d, mode="exact")
    assert result.found


def test_chorded_square_resistance_matches_some_one_nested():
    # a 1-nested network with the same resistance vector exists
    from phylocircuit.metrics import find_kalmanson_order
    from phylocircuit.reconstruct import circular_decomposition, invert_to_network

    chorded = add_heavy_chord(square_with_pendants(), 0, ("c1", "c3"), F(100))
    d = resistance_vector(chorded)
    order = find_kalmanson_order(d, mode="exact").order
    dec = circular_decomposition(d, order)
    assert dec.residual == 0
    witness = invert_to_network(dec.system)
    assert classify(witness).level in (0, 1)
    got = resistance_vector(witness)
    for a, b in zip(got.values, d.values):
        if isinstance(a, F) and isinstance(b, F):
            assert a == b
        else:
            assert abs(float(a) - float(b)) <= 1e-9
