"""State-vector and block-encoding simulation of the quantum routines."""

from .algorithms import T1Result, T2Result, alg_t1, alg_t2, run_t1, run_t2
from .estimation import ae_depth, ae_repetitions, amplitude_estimate
from .gates import dirac_unitary, membership_oracle_unitary, projection_not, pue_boundary
from .polynomials import cheb_cos, cheb_pseudo_inverse
from .states import dicke_prep, prepare_field_state, projected_phase_prep, sim_node_aggregated_prep
from .transforms import amplitude_block_encoding, hadamard_test_prob, qsvt_apply
from .types import BlockEncoding, ChebyshevPolynomial, PreparedState, QueryLedger

__all__ = [
    "BlockEncoding",
    "ChebyshevPolynomial",
    "PreparedState",
    "QueryLedger",
    "T1Result",
    "T2Result",
    "ae_depth",
    "ae_repetitions",
    "alg_t1",
    "alg_t2",
    "amplitude_block_encoding",
    "amplitude_estimate",
    "cheb_cos",
    "cheb_pseudo_inverse",
    "dicke_prep",
    "dirac_unitary",
    "hadamard_test_prob",
    "membership_oracle_unitary",
    "prepare_field_state",
    "projected_phase_prep",
    "projection_not",
    "pue_boundary",
    "qsvt_apply",
    "run_t1",
    "run_t2",
    "sim_node_aggregated_prep",
]
