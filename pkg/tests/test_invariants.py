import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charvar.invariants import (
    Move,
    blowup_diagrams,
    blowup_triple_check,
    expected_census,
    generator_census,
    kunneth_check,
    lens_trace_set,
    predict_euler,
    verify_move,
)
from charvar.errors import InvalidMoveError
from charvar.solver import SolverConfig
from charvar.words import (
    AbelianGroupInvariants,
    FreeWord,
    HeegaardDiagram,
    connected_sum,
    h1_invariants,
    lens,
    s2xs1,
    s3_genus,
)

CFG = SolverConfig(seed=0)


def test_expected_census_from_names():
    assert expected_census("lens(7,1)") == [0, 2, 2, 2]
    assert expected_census("lens(6,1)") == [0, 0, 2, 2]
    assert expected_census("lens(2,1)#lens(3,1)") == [0, 0, 2, 2]
    assert expected_census("s2xs1#s2xs1") == [6]
    assert expected_census("lens(3,1)#s3_genus(1)") == [0, 2]
    assert expected_census("mystery") is None and expected_census("") is None


def test_lens_trace_set():
    assert np.allclose(lens_trace_set(4), [2.0, 0.0, -2.0])


def test_predict_euler_examples():
    assert predict_euler(lens(5, 2)) == 5
    assert predict_euler(s2xs1()) == 0
    assert predict_euler(connected_sum(lens(2, 1), lens(3, 1))) == 6


@settings(max_examples=30)
@given(st.integers(2, 12), st.integers(1, 11))
def test_euler_is_function_of_h1(p, q):
    import math

    if math.gcd(p, q) != 1:
        return
    d = lens(p, q)
    h = h1_invariants(d)
    assert predict_euler(d) == (math.prod(h.torsion) if h.free_rank == 0 else 0)
    assert predict_euler(d) == p


@pytest.mark.parametrize("d,dims", [(s3_genus(2), [0]), (lens(7, 1), [0, 2, 2, 2]), (lens(6, 1), [0, 0, 2, 2])])
def test_generator_census_examples(d, dims):
    rep = generator_census(d, CFG)
    assert rep.components.dims == dims
    assert rep.passed, [c for c in rep.checks if not c.passed]
    j = rep.to_json()
    assert {"diagram", "components", "h1", "euler_prediction", "checks", "warnings"} <= set(j)


def test_qhs_theta_is_transverse_and_euler_matches():
    for p, q in [(3, 1), (5, 2)]:
        rep = generator_census(lens(p, q), CFG)
        names = {c.name: c.passed for c in rep.checks}
        assert names["trivial-representation-transverse"] and names["euler-equals-order"]


def test_unknown_diagram_has_no_family_verdict():
    d = HeegaardDiagram(1, (FreeWord.parse("a1"),), (FreeWord.parse("a1 b1 a1"),), "custom")
    rep = generator_census(d, CFG)
    assert "census-matches-family" not in {c.name for c in rep.checks}


def test_kunneth_lens_sum():
    rep = kunneth_check(lens(2, 1), lens(3, 1), CFG)
    assert rep.passed
    assert rep.total.components.dims == [0, 0, 2, 2]
    assert rep.total.components.betti_heuristic() == 6
    assert rep.total.h1 == AbelianGroupInvariants(0, (6,))


def test_kunneth_with_sphere_summand_keeps_census():
    rep = kunneth_check(lens(3, 1), s3_genus(1), CFG)
    assert rep.passed and rep.total.components.dims == rep.first.components.dims


def test_kunneth_s2xs1_squared():
    rep = kunneth_check(s2xs1(), s2xs1(), SolverConfig(starts=2000))
    assert rep.passed and rep.total.components.dims == [6]


def test_verify_stabilize():
    rep = verify_move(lens(3, 1), Move("stabilize"), CFG)
    assert rep.passed and rep.hausdorff is None


def test_verify_handleslide_genus_two():
    d = connected_sum(lens(3, 1), lens(2, 1))
    rep = verify_move(d, Move("handleslide", "beta", 1, 2, FreeWord.parse("a2 b1"), -1), CFG)
    assert rep.passed and rep.hausdorff <= 1e-9


def test_verify_isotopy():
    d = connected_sum(lens(5, 2), s3_genus(1))
    rep = verify_move(d, Move("isotopy", "beta", 1, conjugator=FreeWord.parse("b2 a1^-1")), CFG)
    assert rep.passed


def test_bad_move():
    with pytest.raises(InvalidMoveError):
        Move("twist").apply(lens(2, 1))
    with pytest.raises(InvalidMoveError):
        Move("isotopy", j=3).apply(lens(2, 1))


def test_blowup_triple():
    names = [d.name for d in blowup_diagrams()]
    assert len(names) == 3
    rep = blowup_triple_check(CFG)
    assert rep.passed
    for c in rep.censuses:
        assert c.components.dims == [0]
