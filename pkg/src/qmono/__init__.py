"""Bipartite quantum-correlation measures on small multiqubit systems and
numerical verification of complementary monogamy/polygamy power bounds."""

__version__ = "0.1.0"

from .bounds import (Branch, BoundParams, BoundReport, ChainSpec, bound_coeff,
                     check_power_lower_bound, check_power_upper_bound,
                     max_admissible_k, monogamy_bound_chain,
                     monogamy_bound_tripartite, polygamy_bound_chain,
                     polygamy_bound_tripartite, prior_bound_chain,
                     prior_bound_tripartite, prior_polygamy_bound,
                     verify_state)
from .linalg import eigh, eigh_batch, sqrtm_psd
from .measures import (MeasureKind, MeasureValue, concurrence_of_assistance,
                       concurrence_pure, concurrence_two_qubit_mixed,
                       eof_pure, eof_two_qubit, negativity, negativity_pure,
                       pure_cut_value, scren_pure, scren_two_qubit,
                       screnoa_two_qubit, spin_flip_roots,
                       two_qubit_mixed_value)
from .roof import (Ensemble, RoofConfig, RoofResult, enumerate_ensemble,
                   optimize_roof)
from .states import (Bipartition, DensityMatrix, GsdParams, PureState,
                     QubitRegister, computational_state, dump_state_csv,
                     haar_random_pure, make_ghz_state, make_gsd_state,
                     make_w_state, partial_trace, partial_transpose,
                     random_mixed, reduced_density, register, rng_stream,
                     tensor_product, to_density)

__all__ = [
    "__version__",
    "Branch", "BoundParams", "BoundReport", "ChainSpec", "bound_coeff",
    "check_power_lower_bound", "check_power_upper_bound", "max_admissible_k",
    "monogamy_bound_chain", "monogamy_bound_tripartite",
    "polygamy_bound_chain", "polygamy_bound_tripartite", "prior_bound_chain",
    "prior_bound_tripartite", "prior_polygamy_bound", "verify_state",
    "eigh", "eigh_batch", "sqrtm_psd",
    "MeasureKind", "MeasureValue", "concurrence_of_assistance",
    "concurrence_pure", "concurrence_two_qubit_mixed", "eof_pure",
    "eof_two_qubit", "negativity", "negativity_pure", "pure_cut_value",
    "scren_pure", "scren_two_qubit", "screnoa_two_qubit", "spin_flip_roots",
    "two_qubit_mixed_value",
    "Ensemble", "RoofConfig", "RoofResult", "enumerate_ensemble",
    "optimize_roof",
    "Bipartition", "DensityMatrix", "GsdParams", "PureState", "QubitRegister",
    "computational_state", "dump_state_csv", "haar_random_pure",
    "make_ghz_state", "make_gsd_state", "make_w_state", "partial_trace",
    "partial_transpose", "random_mixed", "reduced_density", "register",
    "rng_stream", "tensor_product", "to_density",
]
