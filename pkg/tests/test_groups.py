import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foxcalc.groups import (
    AbelianSection,
    GroupError,
    GroupSeries,
    InvalidTable,
    NotNormal,
    OrderBoundExceeded,
    abelianize,
    action_series,
    build_preset,
    center,
    closure,
    commutator_subgroup,
    cyclic,
    group_from_data,
    induced_series,
    intersect,
    is_normal,
    load_table,
    lower_central_series,
    parse_subgroup,
    quotient_group,
)

import oracles

PRESETS = ["C2", "C3", "C4", "C6", "C8", "C2xC2", "C2xC4", "S3", "D4", "Q8", "D6", "A4", "Heis3", "D8"]


@pytest.mark.parametrize("name", PRESETS)
def test_presets_are_valid_groups(name):
    g = build_preset(name)
    # re-validating the table exercises every axiom check
    type(g)(g.table, g.labels)
    assert g.order == len(g.table)


def test_preset_orders():
    orders = {name: build_preset(name).order for name in PRESETS}
    assert orders == {
        "C2": 2, "C3": 3, "C4": 4, "C6": 6, "C8": 8, "C2xC2": 4, "C2xC4": 8,
        "S3": 6, "D4": 8, "Q8": 8, "D6": 12, "A4": 12, "Heis3": 27, "D8": 16,
    }


def test_long_preset_names():
    assert build_preset("cyclic:6").order == 6
    assert build_preset("dihedral:3").order == 6
    assert build_preset("quaternion8").order == 8
    assert build_preset("heisenberg:3").order == 27
    assert build_preset("cyclic:2xdihedral:3").order == 12


def test_bad_presets():
    with pytest.raises(GroupError):
        build_preset("klein")
    with pytest.raises(GroupError):
        build_preset("cyclic:")
    with pytest.raises(OrderBoundExceeded):
        build_preset("cyclic:600")
    with pytest.raises(OrderBoundExceeded):
        build_preset("C8", max_order=4)


def test_heisenberg_center_has_order_three():
    g = build_preset("Heis3")
    z = center(g)
    assert z.order == 3
    assert set(z.elements) == oracles.brute_center(g)
    assert commutator_subgroup(g.whole, g.whole) == z


def test_derived_subgroups():
    s3 = build_preset("S3")
    assert commutator_subgroup(s3.whole, s3.whole) == parse_subgroup(s3, "(123)")
    q8 = build_preset("Q8")
    assert sorted(q8.labels[x] for x in commutator_subgroup(q8.whole, q8.whole)) == ["-1", "1"]
    a4 = build_preset("A4")
    assert commutator_subgroup(a4.whole, a4.whole).order == 4


def test_lower_central_series_examples():
    assert build_preset("Q8") and lower_central_series(build_preset("Q8")).describe() == [8, 2, 1]
    assert lower_central_series(build_preset("D8")).describe() == [16, 4, 2, 1]
    assert lower_central_series(build_preset("S3")).describe() == [6, 3]
    assert lower_central_series(build_preset("C6")).describe() == [6, 1]
    assert lower_central_series(build_preset("Heis3")).describe() == [27, 3, 1]


def test_induced_and_action_series_for_rotation_subgroup():
    d4 = build_preset("D4")
    h = parse_subgroup(d4, "r")
    gamma = lower_central_series(d4)
    induced = induced_series(gamma, h)
    assert induced.describe() == [4, 2, 1]
    action = action_series(h)
    assert action.describe() == [4, 2, 1]
    assert induced.is_n_series() and action.is_n_series()
    with pytest.raises(NotNormal):
        action_series(parse_subgroup(d4, "s"))


def test_abelianizations():
    assert abelianize(build_preset("Q8")).divisors == [2, 2]
    assert abelianize(build_preset("S3")).divisors == [2]
    assert abelianize(build_preset("C2xC4")).divisors == [2, 4]
    assert abelianize(build_preset("A4")).divisors == [3]
    assert abelianize(build_preset("Heis3")).divisors == [3, 3]


def test_abelian_section_is_a_homomorphism():
    g = build_preset("D8")
    gamma = lower_central_series(g)
    sec = AbelianSection(g, gamma[2], gamma[3])
    assert sec.divisors == [2]
    assert sec.is_homomorphism()
    for k, lift in enumerate(sec.lifts):
        assert sec.coords(lift) == tuple(int(i == k) for i in range(sec.rank))


def test_non_abelian_section_rejected():
    s3 = build_preset("S3")
    with pytest.raises(GroupError):
        AbelianSection(s3, s3.whole, s3.trivial)


def test_quotient_projection_is_homomorphism():
    d4 = build_preset("D4")
    n = parse_subgroup(d4, "r^2")
    q, which = quotient_group(d4, n)
    assert q.order == 4 and q.is_abelian()
    for a in range(d4.order):
        for b in range(d4.order):
            assert which[d4.mul(a, b)] == q.mul(which[a], which[b])
    with pytest.raises(NotNormal):
        quotient_group(d4, parse_subgroup(d4, "s"))


def _table_with_bad_associativity():
    # a Latin square with identity 0 that is not associative
    return [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]


def test_bad_table_names_the_failing_triple():
    with pytest.raises(InvalidTable, match=r"associativity fails for \("):
        group_from_data({"order": 5, "table": _table_with_bad_associativity()})


def test_table_shape_errors(tmp_path):
    with pytest.raises(InvalidTable):
        group_from_data({"order": 3, "table": [[0, 1], [1, 0]]})
    with pytest.raises(InvalidTable):
        group_from_data({"table": [[0, 1], [1, 2]]})
    with pytest.raises(InvalidTable):
        group_from_data({"table": [[0, 1], [1, 0]], "labels": ["e", "e"]})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidTable):
        load_table(str(bad))


def test_load_table_round_trip(tmp_path):
    g = build_preset("S3")
    path = tmp_path / "s3.json"
    path.write_text(json.dumps({"order": 6, "labels": g.labels, "table": g.table}))
    h = load_table(str(path))
    assert h.table == g.table and h.labels == g.labels


def test_parse_subgroup_by_id_and_label():
    q8 = build_preset("Q8")
    assert parse_subgroup(q8, "i") == parse_subgroup(q8, "#2")
    assert parse_subgroup(q8, None) == q8.whole
    with pytest.raises(GroupError):
        parse_subgroup(q8, "x")


def test_custom_series_must_be_n_series():
    s3 = build_preset("S3")
    bad = GroupSeries(s3, [s3.whole, parse_subgroup(s3, "(12)")])
    with pytest.raises(GroupError):
        bad.validate()


groups_small = st.sampled_from(["S3", "D4", "Q8", "A4", "C2xC4", "D6", "D8"]).map(build_preset)


@settings(max_examples=40, deadline=None)
@given(groups_small, st.data())
def test_closure_matches_enumeration(g, data):
    gens = data.draw(st.lists(st.integers(0, g.order - 1), max_size=3))
    s = closure(g, gens)
    assert set(s.elements) == oracles.generated(g.table, gens)
    assert s.is_closed()


@settings(max_examples=40, deadline=None)
@given(groups_small, st.data())
def test_commutator_subgroup_symmetric_and_matches_enumeration(g, data):
    a = closure(g, data.draw(st.lists(st.integers(0, g.order - 1), max_size=2)))
    b = closure(g, data.draw(st.lists(st.integers(0, g.order - 1), max_size=2)))
    ab = commutator_subgroup(a, b)
    assert ab == commutator_subgroup(b, a)
    assert set(ab.elements) == oracles.commutator_closure(g, a.elements, b.elements)


@settings(max_examples=30, deadline=None)
@given(groups_small, st.data())
def test_induced_lower_central_series_is_n_series(g, data):
    h = closure(g, data.draw(st.lists(st.integers(0, g.order - 1), max_size=2)))
    gamma = lower_central_series(g)
    assert gamma.is_n_series()
    induced = induced_series(gamma, h)
    assert induced.is_n_series()
    for i in range(1, 5):
        assert induced[i] == intersect(h, gamma[i])
    if is_normal(h):
        assert action_series(h).is_n_series()


def test_cyclic_checks_small_tables():
    assert cyclic(5).order == 5
    with pytest.raises(GroupError):
        cyclic(0)
