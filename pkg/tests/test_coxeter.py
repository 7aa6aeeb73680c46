from __future__ import annotations

import pytest

from coxlog.coxeter import (CatalogError, MultiplicityMap, build, is_invariant, jacobian_determinant, parse_type,
                            product)

HYPERPLANES = {"A1": 1, "A2": 3, "A3": 6, "A4": 10, "B2": 4, "B3": 9, "D4": 12, "I2(3)": 3, "I2(4)": 4,
               "I2(5)": 5, "I2(6)": 6, "H3": 15, "A1xA1": 2, "A1xB2": 5}
DEGREES = {"A1": (2,), "A2": (2, 3), "A3": (2, 3, 4), "A4": (2, 3, 4, 5), "B2": (2, 4), "B3": (2, 4, 6),
           "D4": (2, 4, 4, 6), "I2(5)": (2, 5), "H3": (2, 6, 10), "A1xB2": (2, 2, 4)}


@pytest.mark.parametrize("name,count", sorted(HYPERPLANES.items()))
def test_hyperplane_count_and_q_degree(name, count):
    d = build(name)
    assert len(d.hyperplanes) == count
    assert d.Q.degrees() == {count}
    assert len(set(h.alpha for h in d.hyperplanes)) == count


@pytest.mark.parametrize("name,degrees", sorted(DEGREES.items()))
def test_degrees_and_exponents(name, degrees):
    d = build(name)
    assert d.degrees == degrees
    assert d.exponents == tuple(x - 1 for x in degrees)
    assert [p.degrees() for p in d.invariants] == [{x} for x in degrees]
    # sum of exponents is the number of hyperplanes
    assert sum(d.exponents) == len(d.hyperplanes)


@pytest.mark.parametrize("name", ["A3", "B3", "D4", "I2(5)", "H3", "A1xB2"])
def test_invariants_are_invariant_and_jacobian_is_cq(name):
    d = build(name)
    assert all(is_invariant(p, d) for p in d.invariants)
    c = jacobian_determinant(d.invariants).try_divide(d.Q)
    assert c is not None and c.is_constant() and not c.is_zero()


def test_orbits():
    b2 = build("B2")
    assert sorted(len(o) for o in b2.orbits()) == [2, 2]
    b3 = build("B3")
    assert sorted(len(o) for o in b3.orbits()) == [3, 6]
    assert len(build("A3").orbits()) == 1
    assert len(build("I2(5)").orbits()) == 1
    assert len(build("I2(6)").orbits()) == 2


def test_product_places_factors_on_disjoint_variables():
    d = build("A1xB2")
    assert [f.positions for f in d.factors] == [(0,), (1, 2)]
    for h in d.hyperplanes:
        f = d.factors[h.factor]
        assert all(not c for i, c in enumerate(h.alpha.coefficients) if i not in f.positions)
    assert product([build("A1"), build("B2")]).Q == d.Q


def test_sqrt5_types_carry_discriminant():
    assert build("H3").discriminant == 5
    assert build("I2(5)").discriminant == 5
    assert build("B3").discriminant == 0


@pytest.mark.parametrize("text", ["A0", "A5", "B4", "D3", "I2(7)", "H4", "", "Q2", "A1xx", "A1xI2(2)"])
def test_unsupported_types_are_rejected(text):
    with pytest.raises(CatalogError):
        build(text)


def test_parse_type():
    assert parse_type("a1xb2xI2(5)") == [("A", 1), ("B", 2), ("I2", 5)]
    assert parse_type("H3") == [("H3", 3)]


def test_multiplicity_map_parsing():
    d = build("B2")
    m = MultiplicityMap.parse(d, "orbit:long=1,short=-1")
    assert sorted(m[h] for h in d.hyperplanes) == [-1, -1, 1, 1]
    for h in d.hyperplanes:
        assert m[h] == (1 if d.orbit_names[h.orbit_id] == "long" else -1)
    assert MultiplicityMap.parse(d, "const:3").shifted(2).description == "const:5"
    assert m.shifted(2).description == "orbit:long=3,short=1"
    assert all(v == -3 for _, v in MultiplicityMap.parse(d, "const:3").negated().values)
    for bad in ["const:x", "orbit:long=1", "orbit:wide=1,short=2", "orbit:long", "const"]:
        with pytest.raises(ValueError):
            MultiplicityMap.parse(d, bad)


def test_q_power_is_a_product_of_hyperplane_powers():
    d = build("A2")
    assert d.q_power(1).num == d.Q
    assert (d.q_power(-2) * d.q_power(2)).is_constant()
