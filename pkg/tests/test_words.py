import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charvar.errors import DiagramValidationError, InvalidMoveError, InvalidParameterError, MalformedWordError
from charvar.words import (
    FreeWord,
    HeegaardDiagram,
    abelianize,
    connected_sum,
    dumps_diagram,
    h1_invariants,
    handleslide,
    lens,
    loads_diagram,
    make_standard,
    random_word,
    s2xs1,
    s3_genus,
    stabilize,
    validate_diagram,
)

W = FreeWord.parse


def test_parse_reduces_freely():
    assert W("a1 a1^-1 b1") == W("b1")
    assert W("b2^3").letters == ((4, 1),) * 3
    assert len(W("a1 b1 b1^-1 a1^-1")) == 0
    with pytest.raises(MalformedWordError):
        W("c1")


def test_abelianize_examples():
    assert abelianize(W("a1 b1 a1^-1 b1^-1"), 1) == [0, 0]
    assert abelianize(W("a1 b1^2"), 1) == [1, 2]
    assert abelianize(lens(5, 2).beta[0], 1) == [2, 5]
    with pytest.raises(MalformedWordError):
        abelianize(W("a2"), 1)


def test_validate():
    assert validate_diagram(s3_genus(3))
    bad = HeegaardDiagram(2, (W("a1"), W("a2")), (W("b1"), W("b1")))
    rep = validate_diagram(bad)
    assert not rep and "rank 1" in rep.reasons[0]
    for p, q in [(2, 1), (5, 2), (7, 3), (8, 3)]:
        assert validate_diagram(lens(p, q))
    assert not validate_diagram(HeegaardDiagram(1, (W("a1"),), ()))


def test_make_standard():
    d = make_standard("s3", genus=1)
    assert d.alpha == (W("a1"),) and d.beta == (W("b1"),)
    assert lens(2, 1).beta == (W("a1 b1 b1"),)
    with pytest.raises(InvalidParameterError):
        lens(4, 2)
    assert s2xs1().alpha == s2xs1().beta == (W("a1"),)


def test_connected_sum():
    d = connected_sum(s3_genus(1), s3_genus(1))
    assert (d.genus, d.alpha, d.beta) == (2, s3_genus(2).alpha, s3_genus(2).beta)
    ls = connected_sum(lens(2, 1), lens(3, 1))
    assert ls.genus == 2 and ls.beta == (W("a1 b1^2"), W("a2 b2^3"))
    assert ls.name == "lens(2,1)#lens(3,1)"
    d0 = connected_sum(lens(5, 2), s3_genus(0))
    assert (d0.genus, d0.alpha, d0.beta, d0.name) == (1, lens(5, 2).alpha, lens(5, 2).beta, "lens(5,2)")
    with pytest.raises(DiagramValidationError):
        connected_sum(HeegaardDiagram(1, (W("a1"),), ()), s3_genus(1))


def test_stabilize():
    d = stabilize(s3_genus(0))
    assert (d.genus, d.alpha, d.beta) == (1, (W("a1"),), (W("b1"),))
    d2 = stabilize(stabilize(lens(3, 1)))
    assert d2.genus == 3 and d2.alpha[1:] == (W("a2"), W("a3")) and d2.beta[1:] == (W("b2"), W("b3"))


def test_handleslide_examples():
    d = handleslide(s3_genus(2), "alpha", 1, 2)
    assert d.alpha[0] == W("a1 a2")
    with pytest.raises(InvalidMoveError):
        handleslide(s3_genus(2), "alpha", 1, 1)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["alpha", "beta"]), st.sampled_from([1, -1]), st.integers(0, 6))
def test_handleslide_properties(seed, fam, sign, plen):
    rng = np.random.default_rng(seed)
    d = connected_sum(lens(3, 1), lens(5, 2))
    path = random_word(rng, 2, plen)
    j, k = (1, 2) if rng.random() < 0.5 else (2, 1)
    slid = handleslide(d, fam, j, k, path, sign)
    before = getattr(d, fam)
    after = getattr(slid, fam)
    expected = np.array(abelianize(before[j - 1], 2)) + sign * np.array(abelianize(before[k - 1], 2))
    assert abelianize(after[j - 1], 2) == expected.tolist()
    assert validate_diagram(slid)
    back = handleslide(slid, fam, j, k, path, -sign)
    assert getattr(back, fam) == before
    assert h1_invariants(slid) == h1_invariants(d)


def test_h1_examples():
    for p, q in [(2, 1), (5, 2), (8, 3)]:
        h = h1_invariants(lens(p, q))
        assert h.free_rank == 0 and h.torsion == (p,)
    assert h1_invariants(s2xs1()).free_rank == 1
    assert h1_invariants(connected_sum(lens(2, 1), lens(3, 1))).torsion == (6,)
    assert h1_invariants(s3_genus(3)).order == 1


@pytest.mark.parametrize("p", range(2, 13))
def test_lens_torsion_order(p):
    for q in range(1, p):
        if math.gcd(p, q) == 1:
            assert h1_invariants(lens(p, q)).order == p


def test_h1_connected_sum_is_direct_sum():
    h = h1_invariants(connected_sum(lens(3, 1), s2xs1()))
    assert h.free_rank == 1 and h.torsion == (3,)
    h = h1_invariants(connected_sum(lens(4, 1), lens(6, 1)))
    assert h.torsion == (2, 12)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_diagram_json_round_trip(seed):
    rng = np.random.default_rng(seed)
    d = connected_sum(lens(int(rng.integers(2, 9)), 1), s3_genus(1))
    d = handleslide(d, "beta", 1, 2, random_word(rng, 2, 4), 1)
    text = dumps_diagram(d)
    back = loads_diagram(text)
    assert back == d and dumps_diagram(back) == text


def test_diagram_json_schema():
    data = json.loads(dumps_diagram(lens(2, 1)))
    assert data == {"genus": 1, "alpha": [[["a", 1, 1]]], "beta": [[["a", 1, 1], ["b", 1, 1], ["b", 1, 1]]],
                    "name": "lens(2,1)"}
    with pytest.raises(DiagramValidationError):
        loads_diagram('{"genus": 1}')


def test_every_constructor_validates():
    for d in [s3_genus(0), s3_genus(4), s2xs1(), lens(7, 3), stabilize(s2xs1()),
              connected_sum(s2xs1(), s2xs1())]:
        assert validate_diagram(d), d.name
