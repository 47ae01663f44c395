"""Entanglement and discord measures with numerical checks of strong polygamy.

Entropies are in bits. Roof quantities are found by a multi-restart search
over pure-state decompositions, and every searched value records whether it
is an upper or a lower bound.
"""

from ._backend import backend, set_backend
from .ensembles import (Isometry, MeasurementOutcomeSet, PureEnsemble, Rank1Measurement,
                        average_branch_entropy, ensemble_measurement_duality, hjw_ensemble,
                        measure_rank1, measurement_from_ensemble, spectral_ensemble)
from .measures import (CorrelationValue, concurrence, entropy, eoa, eof, mutual_info,
                       one_way_classical_correlation, quantum_discord, unlocalizable_discord,
                       unlocalizable_entanglement, wootters_eof_two_qubit)
from .polygamy import (PolygamyReport, SubsetFamily, enumerate_subsets, identity_suite,
                       strong_polygamy_discord, strong_polygamy_entanglement)
from .roof import OptimizationResult, OptimizerConfig, optimize_rank1_measurement, optimize_roof
from .states import StateSpec, gen_named_state, haar_random_pure, random_mixed
from .tensor import (DensityOperator, StateVector, SystemLayout, conditional_entropy, eig_hermitian,
                     mutual_information, partial_trace, purify, tensor_product, von_neumann_entropy)

__version__ = "0.1.0"
