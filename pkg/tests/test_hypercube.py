import pytest

from hoptte import hypercube as hc
from hoptte.hypercube import DEFAULT_TABLES, Orientation


def test_zeta_alternates():
    assert [hc.zeta(i) for i in range(1, 7)] == [0, 1, 0, 1, 0, 1]
    with pytest.raises(ValueError):
        hc.zeta(0)


def test_dimension_counts_stars():
    assert hc.dimension("01*0") == 1
    assert hc.dimension("****") == 4
    assert hc.dimension("0110") == 0


def test_contains():
    assert hc.contains("0***", "01*0")
    assert hc.contains("****", "****")
    assert not hc.contains("0***", "11*0")
    assert not hc.contains("0*", "0*1")


def test_classify_incoming_headers():
    assert hc.classify("****", "0***") is Orientation.INCOMING
    assert hc.classify("****", "*1**") is Orientation.INCOMING
    assert hc.classify("****", "**0*") is Orientation.INCOMING
    assert hc.classify("****", "***1") is Orientation.INCOMING
    assert hc.classify("****", "***0") is Orientation.OUTGOING
    assert hc.classify("****", "1***") is Orientation.OUTGOING
    assert hc.classify("**", "0*") is Orientation.INCOMING


def test_classify_rejects_non_facets():
    with pytest.raises(ValueError):
        hc.classify("0***", "00*0")  # two stars replaced
    with pytest.raises(ValueError):
        hc.classify("0***", "1***")  # fixed symbol changed
    with pytest.raises(ValueError):
        hc.classify("0***", "0***")  # nothing replaced


def test_incoming_outgoing_counts():
    # every d-subface of the 4-cube has exactly d incoming and d outgoing facets
    for d in range(1, 5):
        for face in hc.subfaces("****", d):
            inc = hc.facets(face, Orientation.INCOMING)
            out = hc.facets(face, Orientation.OUTGOING)
            assert len(inc) == d and len(out) == d


def test_edge_roles_base_square():
    assert hc.edge_roles("**") == ("0*", "*1", "1*", "*0")


def test_edge_roles_carries_fixed_symbols():
    assert hc.edge_roles("0**") == ("00*", "0*1", "01*", "0*0")
    assert hc.edge_roles("**1") == ("0*1", "*11", "1*1", "*01")


def test_edge_roles_each_edge_once():
    for face in hc.subfaces("****", 2):
        roles = hc.edge_roles(face)
        assert len(set(roles)) == 4
        assert set(roles) == set(hc.subfaces(face, 1))


def test_edge_roles_orientation_agrees_with_classify():
    for face in hc.subfaces("***", 2):
        i1, i2, o1, o2 = hc.edge_roles(face)
        assert hc.classify(face, i1) is Orientation.INCOMING
        assert hc.classify(face, i2) is Orientation.INCOMING
        assert hc.classify(face, o1) is Orientation.OUTGOING
        assert hc.classify(face, o2) is Orientation.OUTGOING


def test_reverse_transform():
    assert hc.reverse_transform("0***") == "***0"
    assert hc.reverse_transform("01*0") == "0*10"
    assert hc.reverse_transform("****") == "****"
    for code in ("01*0", "**10", "1001"):
        assert hc.reverse_transform(hc.reverse_transform(code)) == code
    with pytest.raises(ValueError):
        hc.reverse_transform("0**")


def test_subfaces_examples():
    assert set(hc.subfaces("***", 2)) == {"0**", "1**", "*0*", "*1*", "**0", "**1"}
    assert hc.subfaces("**", 0) == ["00", "01", "10", "11"]
    assert len(hc.subfaces("0***", 1)) == 12
    # lexicographic with 0 < 1 < *
    assert hc.subfaces("**", 1) == ["0*", "1*", "*0", "*1"]


def test_default_tables_are_valid():
    assert hc.validate_tables(DEFAULT_TABLES) == []


def test_table_edges_disjoint_counts():
    left = DEFAULT_TABLES.all_edges("left")
    right = DEFAULT_TABLES.all_edges("right")
    assert len(left) == len(set(left)) == 12
    assert len(right) == len(set(right)) == 12
    assert not set(left) & set(right)
    # 24 of the 32 edges of the 4-cube are used
    assert len(set(left) | set(right)) == 24
    assert len(hc.subfaces("****", 1)) == 32


def test_exchange_invariant():
    ok, report = hc.exchange_invariant_check(DEFAULT_TABLES)
    assert ok
    assert report["left_reversed"] == report["right"]


def test_exchange_invariant_detects_tampering():
    broken = hc.EdgeChoiceTables(
        lte=DEFAULT_TABLES.lte,
        rte={**DEFAULT_TABLES.rte, "1***": ("100*", "1*11", "11*1")},
    )
    ok, _ = hc.exchange_invariant_check(broken)
    assert not ok


def test_lte_not_reversal_closed():
    self_compared = hc.EdgeChoiceTables(lte=DEFAULT_TABLES.lte, rte=DEFAULT_TABLES.lte)
    ok, _ = hc.exchange_invariant_check(self_compared)
    assert not ok


def test_header_images_in_order():
    assert [hc.reverse_transform(k) for k in DEFAULT_TABLES.lte] == list(DEFAULT_TABLES.rte)
