import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charvar.correspondences import (
    CYLINDER,
    CorrespondencePair,
    ElementaryBordism,
    composite_words,
    composition_check,
    correspondence_membership,
)
from charvar.errors import InvalidParameterError, ShapeError, UnsupportedCompositionError
from charvar.moduli import RepresentationPoint, pin_gauge, trivial_point
from charvar.quaternion import IDENTITY, QI, UnitQuaternion, random_unit
from charvar.words import FreeWord

seeds = st.integers(0, 2**32 - 1)


def commuting_point(rng, g):
    hs = []
    for _ in range(g):
        axis = rng.standard_normal(3)
        hs += [UnitQuaternion.from_axis_angle(axis, rng.uniform(0, 6.3)),
               UnitQuaternion.from_axis_angle(axis, rng.uniform(0, 6.3))]
    return RepresentationPoint(hs)


def uq(rng):
    return UnitQuaternion.from_array(random_unit(rng))


def test_bordism_invariants():
    assert ElementaryBordism.raising(1).target_genus == 2
    assert ElementaryBordism.lowering(1).target_genus == 0
    assert ElementaryBordism.raising(0).attaching_word == FreeWord.parse("a1")
    with pytest.raises(ShapeError):
        ElementaryBordism("genus-raising", 1, 3)
    with pytest.raises(InvalidParameterError):
        ElementaryBordism(CYLINDER, 1, 1, FreeWord.parse("a1"))
    with pytest.raises(InvalidParameterError):
        ElementaryBordism("twist", 1, 1)


def test_membership_examples():
    rng = np.random.default_rng(0)
    p = commuting_point(rng, 2)
    assert correspondence_membership(ElementaryBordism.cylinder(2), CorrespondencePair(p, p))
    pair = CorrespondencePair(trivial_point(1), trivial_point(0))
    assert correspondence_membership(ElementaryBordism.lowering(1), pair)
    bad = RepresentationPoint([QI, IDENTITY])
    m = correspondence_membership(ElementaryBordism.lowering(1), CorrespondencePair(bad, trivial_point(0)))
    assert not m and m.residual >= np.linalg.norm(QI.as_array() - IDENTITY.as_array())


def test_membership_genus_mismatch():
    with pytest.raises(ShapeError):
        correspondence_membership(ElementaryBordism.cylinder(1),
                                  CorrespondencePair(trivial_point(1), trivial_point(2)))


@settings(max_examples=30)
@given(seeds, st.integers(0, 2))
def test_membership_conjugation_invariant(seed, g):
    rng = np.random.default_rng(seed)
    low = commuting_point(rng, g)
    high = RepresentationPoint(list(low.handles) + [IDENTITY, uq(rng)])
    b = ElementaryBordism.raising(g)
    base = correspondence_membership(b, CorrespondencePair(low, high))
    moved = correspondence_membership(b, CorrespondencePair(low.conjugated(uq(rng)), high.conjugated(uq(rng))))
    assert base.member and moved.member
    assert abs(base.residual - moved.residual) <= 1e-9


@settings(max_examples=30)
@given(seeds, st.integers(1, 2), st.booleans())
def test_cylinder_is_the_diagonal(seed, g, same):
    rng = np.random.default_rng(seed)
    p = commuting_point(rng, g)
    q = p if same else commuting_point(rng, g)
    left, right = p.conjugated(uq(rng)), q.conjugated(uq(rng))
    member = bool(correspondence_membership(ElementaryBordism.cylinder(g), CorrespondencePair(left, right)))
    equal = all(a.distance(b) <= 1e-9 for a, b in zip(pin_gauge(left).handles, pin_gauge(right).handles))
    assert member == equal


def test_composite_words_of_cancelling_pair_is_diagonal():
    words = composite_words(ElementaryBordism.raising(1), ElementaryBordism.lowering(2))
    # relators on each block plus two diagonal identifications
    assert [(1, 1), (3, -1)] in words and [(2, 1), (4, -1)] in words


def test_unsupported_compositions():
    with pytest.raises(UnsupportedCompositionError):
        composition_check(ElementaryBordism.raising(0), ElementaryBordism.raising(0))
    odd = ElementaryBordism("genus-raising", 1, 2, FreeWord.parse("a1"))
    with pytest.raises(UnsupportedCompositionError):
        composition_check(odd, ElementaryBordism.lowering(2))


def test_raise_then_lower_from_genus_zero():
    rep = composition_check(ElementaryBordism.raising(0), ElementaryBordism.lowering(1), samples=50)
    assert rep.passed and rep.distinct_composite_points == 1


def test_cylinders_compose():
    rep = composition_check(ElementaryBordism.cylinder(1), ElementaryBordism.cylinder(1), samples=50)
    assert rep.passed and rep.max_forward_residual <= 1e-6


def test_handle_cancellation_at_genus_one():
    rep = composition_check(ElementaryBordism.raising(1), ElementaryBordism.lowering(2), samples=30)
    assert rep.passed


def test_lower_then_raise():
    rep = composition_check(ElementaryBordism.lowering(1), ElementaryBordism.raising(0), samples=30)
    assert rep.passed
    j = rep.to_json()
    assert all(c["pass"] for c in j["checks"])
