"""Locally-applicable transformation families and the axiom checker."""

from .axioms import (
    AXIOMS,
    AxiomReport,
    SamplingConfig,
    Witness,
    check_all,
    check_no_signaling,
    check_state_locality,
    check_update_commutativity,
    merge_reports,
)
from .family import (
    TransFamily,
    compose_families,
    identity_family,
    lift_channel,
    lift_isometry,
    lift_unitary,
    validate_output,
)
from .spec import family_from_spec, family_to_spec
from .zoo import ZOO, constant_mixed, constant_pure, nonlinear_phase, transpose_mixed, zoo

__all__ = [
    "AXIOMS",
    "AxiomReport",
    "SamplingConfig",
    "Witness",
    "check_all",
    "check_no_signaling",
    "check_state_locality",
    "check_update_commutativity",
    "merge_reports",
    "TransFamily",
    "compose_families",
    "identity_family",
    "lift_channel",
    "lift_isometry",
    "lift_unitary",
    "validate_output",
    "family_from_spec",
    "family_to_spec",
    "ZOO",
    "constant_mixed",
    "constant_pure",
    "nonlinear_phase",
    "transpose_mixed",
    "zoo",
]
