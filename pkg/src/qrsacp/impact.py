"""CIA-level numeric mapping and the adjusted/affected impact scalar.

A qualitative (conf, intg, avl) triple maps to a damage scalar in [0, 10]:

    impact = min(10, 10.41 * (1 - (1-conf)(1-intg)(1-avl)))

with the CVSS v2 numeric constants None=0, Partial=0.275, Complete=0.660.
(C, C, C) evaluates to 10.00084536 raw and is capped at 10. The *adjusted*
impact scores a threat's potential triple; the *affected* impact scores the
triple the reporting organization announces actually occurred, falling back
to the potential triple when nothing was announced.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import CiaLevel, CiaTriple, ThreatRecord

# CVSS v2 impact constants.
_CIA_SCALARS = {
    CiaLevel.NONE: 0.0,
    CiaLevel.PARTIAL: 0.275,
    CiaLevel.COMPLETE: 0.660,
}

IMPACT_CAP = 10.0
IMPACT_COEFFICIENT = 10.41


@dataclass(frozen=True)
class ImpactScalar:
    """A damage scalar in [0, 10]."""

    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= IMPACT_CAP):
            raise ValueError(f"impact out of range: {self.value!r}")

    def __float__(self) -> float:
        return self.value


def cia_scalar(level: CiaLevel) -> float:
    """Numeric value of one qualitative level: N=0.0, P=0.275, C=0.660."""
    return _CIA_SCALARS[level]


def adjusted_impact(cia: CiaTriple) -> ImpactScalar:
    """Impact scalar of a triple; monotone in each component, capped at 10."""
    product = 1.0
    for level in (cia.conf, cia.intg, cia.avl):
        product *= 1.0 - cia_scalar(level)
    return ImpactScalar(min(IMPACT_CAP, IMPACT_COEFFICIENT * (1.0 - product)))


def affected_impact(threat: ThreatRecord) -> ImpactScalar:
    """Impact the threat certainly had, per the announced triple.

    Threats that announce nothing fall back to their potential triple, so
    attacks without a separate announcement still carry a definite impact.
    """
    cia = threat.affected_cia if threat.affected_cia is not None else threat.potential_cia
    return adjusted_impact(cia)
