import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charvar.errors import NotInStratumError, OutOfNeighborhoodError, ShapeError, SmoothnessConditionError
from charvar.moduli import (
    MONOTONICITY_CONSTANT,
    PI2_RANK,
    PINNED,
    ModuliPoint,
    RepresentationPoint,
    commutator_product,
    ht_embed,
    ht_gamma,
    inserted_product,
    insertion_uses_inverse,
    moduli_dimension,
    pin_gauge,
    relation_residual,
    trivial_point,
)
from charvar.quaternion import IDENTITY, QI, QJ, QK, UnitQuaternion, qmul, random_unit

seeds = st.integers(0, 2**32 - 1)


def uq(rng, scale=None):
    if scale is None:
        return UnitQuaternion.from_array(random_unit(rng))
    v = rng.standard_normal(3) * scale
    a = np.linalg.norm(v)
    return UnitQuaternion(math.cos(a), *(math.sin(a) * v / a))


def random_solution(rng, genus):
    """Tuple with trivial commutator product: commuting pairs on random axes."""
    hs = []
    for _ in range(genus):
        axis = rng.standard_normal(3)
        hs += [UnitQuaternion.from_axis_angle(axis, rng.uniform(0, 6.3)),
               UnitQuaternion.from_axis_angle(axis, rng.uniform(0, 6.3))]
    return RepresentationPoint(hs)


def test_residual_examples():
    assert relation_residual(trivial_point(3)) <= 1e-15
    p = ModuliPoint((QI, QJ), PINNED)
    assert abs(relation_residual(p) - 2.0) <= 1e-15


@settings(max_examples=50)
@given(seeds, st.integers(0, 3))
def test_residual_conjugation_invariant(seed, g):
    rng = np.random.default_rng(seed)
    p = ModuliPoint(tuple(uq(rng) for _ in range(2 * g)), PINNED)
    m = uq(rng)
    assert abs(relation_residual(p.conjugated(m)) - relation_residual(p)) <= 1e-12


@settings(max_examples=50)
@given(seeds, st.integers(0, 3))
def test_pin_gauge_round_trip_and_idempotent(seed, g):
    rng = np.random.default_rng(seed)
    p = random_solution(rng, g)
    q = p.conjugated(uq(rng))
    pinned = pin_gauge(q)
    for a, b in zip(pinned.handles, p.handles):
        assert a.distance(b) <= 1e-10
    again = pin_gauge(pinned)
    for a, b in zip(again.handles, pinned.handles):
        assert a.distance(b) <= 1e-12
    assert abs(relation_residual(pinned) - relation_residual(p)) <= 1e-10


def test_pin_gauge_theta():
    rng = np.random.default_rng(4)
    q = trivial_point(2).conjugated(uq(rng))
    out = pin_gauge(q)
    assert all(h.isclose(IDENTITY, 1e-10) for h in out.handles)


def test_pin_gauge_rejects_wrong_product():
    p = ModuliPoint((), (QI, QJ, QK))
    with pytest.raises(NotInStratumError):
        pin_gauge(p)


@settings(max_examples=50)
@given(seeds, st.integers(1, 3))
def test_commutator_test_equivalent_to_residual(seed, g):
    rng = np.random.default_rng(seed)
    p = random_solution(rng, g) if seed % 2 else RepresentationPoint([uq(rng) for _ in range(2 * g)])
    P = commutator_product(p.handle_array())
    assert abs(np.linalg.norm(P - [1, 0, 0, 0]) - relation_residual(p)) <= 1e-12


def test_moduli_dimension():
    assert moduli_dimension(1, 3) == 6
    assert moduli_dimension(0, 3) == 0
    assert moduli_dimension(2, 3) == 12
    with pytest.raises(SmoothnessConditionError):
        moduli_dimension(1, 4)


def test_metadata_constants():
    assert MONOTONICITY_CONSTANT == 0.25 and PI2_RANK == 4


def test_point_shapes_and_pickle():
    with pytest.raises(ShapeError):
        ModuliPoint((QI,), PINNED)
    p = RepresentationPoint([QI, QJ])
    assert pickle.loads(pickle.dumps(p)) == p


def test_ht_at_identity():
    out = ht_embed([IDENTITY] * 4)
    assert out.punctures[1].isclose(-QI, 1e-15)
    assert ht_gamma(np.array([1.0, 0, 0, 0])) == 0.5


def test_ht_gamma_qk_zero_branch():
    P = np.array([math.cos(0.2), math.sin(0.2), 0.0, 0.0])
    assert ht_gamma(P) == 0.25


def test_ht_out_of_neighborhood():
    with pytest.raises(OutOfNeighborhoodError):
        ht_embed([QI, QJ])


def test_insertion_choice_makes_relator_hold():
    # with the relator prod[A,B] C1 C2 C3 = 1 the inserted element must be P^-1
    assert insertion_uses_inverse() is True


def test_anticommutation_identity():
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-3, 3, size=20):
        rot = np.array([math.cos(theta), 0, 0, math.sin(theta)])
        Pp = random_unit(rng)
        prod = qmul(qmul(QI.as_array(), qmul(rot, QI.as_array())), -qmul(rot, Pp))
        assert np.allclose(prod, Pp, atol=1e-14)


def _near_identity_handles(rng, g):
    while True:
        hs = [uq(rng, scale=rng.uniform(0.01, 0.6)) for _ in range(2 * g)]
        P = commutator_product(np.array([h.as_array() for h in hs]))
        if 2 * P[0] > 1.0:
            return hs, P


@settings(max_examples=100)
@given(seeds, st.integers(1, 2))
def test_ht_identities(seed, g):
    rng = np.random.default_rng(seed)
    hs, P = _near_identity_handles(rng, g)
    out = ht_embed(hs)
    c1, c2, c3 = (c.as_array() for c in out.punctures)
    assert abs(c1[0]) <= 1e-12 and abs(c2[0]) <= 1e-12
    prod = qmul(qmul(c1, c2), c3)
    assert np.linalg.norm(prod - inserted_product(hs)) <= 1e-12
    assert abs(2 * prod[0] - 2 * P[0]) <= 1e-12
    assert relation_residual(out) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_ht_continuity_along_a_path(seed):
    # gamma flips from +1/4 to -1/4 where the k-component of P changes sign,
    # so continuity is probed away from that wall
    rng = np.random.default_rng(seed)
    hs, _ = _near_identity_handles(rng, 2)
    target, _ = _near_identity_handles(rng, 2)

    def at(s):
        cur = []
        for a, b in zip(hs, target):
            q = (1 - s) * a.as_array() + s * b.as_array()
            cur.append(UnitQuaternion.from_array(q / np.linalg.norm(q)))
        P = commutator_product(np.array([h.as_array() for h in cur]))
        if 2 * P[0] <= 1.0:
            return None, 0.0
        return np.array([c.as_array() for c in ht_embed(cur).punctures]), P[3]

    checked = 0
    for s in np.linspace(0, 1, 101):
        a, qa = at(s)
        b, qb = at(s + 1e-8)
        if a is None or b is None or np.sign(qa) != np.sign(qb) or abs(qa) < 1e-4:
            continue
        assert np.linalg.norm(a - b) < 1e-3
        checked += 1
    assert checked > 50
