"""Impact scalar arithmetic.

The frozen constants below were derived by hand from the product form
before being asserted here: for levels mapped to {0, 0.275, 0.660},
10.41 * 0.275 = 2.86275 exactly in binary floating point, the all-high
triple caps (raw 10.41 * (1 - 0.34**3) = 10.00084536...), and the
two-partial triple gives 10.41 * (1 - 0.725**2) = 4.93824375.
"""

import itertools

import pytest

from conftest import make_threat
from qrsacp.impact import (
    IMPACT_CAP,
    IMPACT_COEFFICIENT,
    ImpactScalar,
    adjusted_impact,
    affected_impact,
    cia_scalar,
)
from qrsacp.model import CiaLevel, CiaTriple, ThreatType

TOL = 1e-9


def test_cia_scalar_constants():
    assert cia_scalar(CiaLevel.NONE) == 0.0
    assert cia_scalar(CiaLevel.PARTIAL) == 0.275
    assert cia_scalar(CiaLevel.COMPLETE) == 0.660


def test_impact_scalar_bounds():
    ImpactScalar(0.0)
    ImpactScalar(10.0)
    with pytest.raises(ValueError):
        ImpactScalar(-0.01)
    with pytest.raises(ValueError):
        ImpactScalar(10.01)


def test_adjusted_impact_all_none_is_zero():
    assert float(adjusted_impact(CiaTriple.parse("NNN"))) == 0.0


def test_adjusted_impact_all_complete_caps():
    # Raw value exceeds the cap: 10.41 * (1 - 0.34**3) = 10.00084536...
    raw = IMPACT_COEFFICIENT * (1 - (1 - 0.660) ** 3)
    assert raw > IMPACT_CAP
    assert float(adjusted_impact(CiaTriple.parse("CCC"))) == IMPACT_CAP


def test_adjusted_impact_single_partial():
    assert abs(float(adjusted_impact(CiaTriple.parse("PNN"))) - 2.86275) <= TOL


def test_adjusted_impact_two_partials():
    assert abs(float(adjusted_impact(CiaTriple.parse("PPN"))) - 4.93824375) <= TOL


def test_adjusted_impact_symmetric_in_components():
    for letters in ("PNN", "NPN", "NNP"):
        assert abs(float(adjusted_impact(CiaTriple.parse(letters))) - 2.86275) <= TOL


def test_adjusted_impact_monotone_exhaustive():
    """Over all 27x27 ordered triple pairs: a <= b componentwise implies
    impact(a) <= impact(b); also the zero characterization."""
    triples = [
        CiaTriple.parse("".join(t))
        for t in itertools.product("NPC", repeat=3)
    ]
    for a in triples:
        fa = float(adjusted_impact(a))
        assert 0.0 <= fa <= IMPACT_CAP
        assert (fa == 0.0) == (a.compact() == "NNN")
        for b in triples:
            if a <= b:
                assert fa <= float(adjusted_impact(b)) + TOL


def test_affected_impact_prefers_announced():
    threat = make_threat("a", ttype=ThreatType.INCIDENT, cia="CCC", affected="PPN")
    assert abs(float(affected_impact(threat)) - 4.93824375) <= TOL


def test_affected_impact_falls_back_to_potential():
    threat = make_threat("a", ttype=ThreatType.ATTACK, cia="CCC")
    assert threat.affected_cia is None
    assert float(affected_impact(threat)) == IMPACT_CAP


def test_affected_impact_zero_announcement():
    threat = make_threat("a", ttype=ThreatType.INCIDENT, cia="CCC", affected="NNN")
    assert float(affected_impact(threat)) == 0.0


def test_affected_never_exceeds_potential_when_dominated():
    triples = ["".join(t) for t in itertools.product("NPC", repeat=3)]
    for pot in triples:
        for aff in triples:
            if CiaTriple.parse(aff) <= CiaTriple.parse(pot):
                threat = make_threat("a", ttype=ThreatType.INCIDENT, cia=pot, affected=aff)
                assert float(affected_impact(threat)) <= float(
                    adjusted_impact(threat.potential_cia)
                ) + TOL
