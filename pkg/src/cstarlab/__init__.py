"""Finite-dimensional laboratory for perturbation theory of operator
algebras: concrete matrix C*-subalgebras, completely positive maps, and the
constructive machinery relating close algebras (averaging, intertwining,
order-zero perturbation), every quantitative bound backed by a Certificate.
"""

from .algebra import (BlockModel, BlockStructure, ConcreteAlgebra, FDAlgebra,
                      generate_algebra, unitize_dagger, unitize_tilde,
                      verify_algebra, wedderburn_decompose)
from .averaging import (AveragingSet, IntertwinerResult, LiftResult,
                        RepairResult, commutant_lift, exact_diagonal,
                        improve_multiplicativity, intertwining_unitary,
                        polar_unitary, projection_conjugator,
                        unitary_commutant_lift)
from .certs import (DEFAULT_BUDGET, PAPER_BUDGET, Certificate,
                    ContradictionError, SpectralGapError, ToleranceBudget,
                    WindowError, provenance_stamp)
from .cpmaps import (DefectReport, LinMap, StinespringDilation, Ternary,
                     arveson_restrict, cb_bracket, choi, choi_blocks,
                     classify, conditional_expectation, from_choi,
                     kraus_operators, mult_defect, stinespring,
                     ucp_extension)
from .geometry import (DistanceInterval, NearInclusionCert, SampleSpec,
                       equality_criterion, kk_distance, near_inclusion,
                       nearest_in_ball, nearest_in_span, tensor_lift)
from .instances import (Instance, block_algebra, gen_instance,
                        hat_decomposition, random_order_zero)
from .intertwine import (IsoResult, StageRecord, close_isomorphism,
                         expectation_producer, half_flip_cpc,
                         implement_unitarily, intertwining_iso,
                         near_embedding_nuclear, unit_match)
from .orderzero import (NucDimDecomposition, OrderZeroMap, cone_evaluate,
                        identity_decomposition, is_order_zero,
                        near_embed_nucdim, nucdim_cpc_transfer,
                        order_zero_projection, perturb_order_zero,
                        split_decomposition, structure_decompose,
                        verify_nucdim_decomposition)
from .pipelines import Report, conjugation_iso, render_report, run_pipeline
from .serialize import SchemaError, dumps, load, loads, save

__version__ = "0.1.0"

__all__ = [
    "AveragingSet", "BlockModel", "BlockStructure", "Certificate",
    "ConcreteAlgebra", "ContradictionError", "DEFAULT_BUDGET",
    "DefectReport", "DistanceInterval", "FDAlgebra", "Instance",
    "IntertwinerResult", "IsoResult", "LiftResult", "LinMap",
    "NearInclusionCert", "NucDimDecomposition", "OrderZeroMap",
    "PAPER_BUDGET", "RepairResult", "Report", "SampleSpec", "SchemaError",
    "SpectralGapError", "StageRecord", "StinespringDilation", "Ternary",
    "ToleranceBudget", "WindowError", "arveson_restrict", "block_algebra",
    "cb_bracket", "choi", "choi_blocks", "classify", "close_isomorphism",
    "commutant_lift", "conditional_expectation", "cone_evaluate",
    "conjugation_iso", "dumps", "equality_criterion", "exact_diagonal",
    "expectation_producer", "from_choi", "gen_instance", "generate_algebra",
    "half_flip_cpc", "hat_decomposition", "identity_decomposition",
    "implement_unitarily", "improve_multiplicativity", "intertwining_iso",
    "intertwining_unitary", "is_order_zero", "kk_distance",
    "kraus_operators", "load", "loads", "mult_defect", "near_embed_nucdim",
    "near_embedding_nuclear", "near_inclusion", "nearest_in_ball",
    "nearest_in_span", "nucdim_cpc_transfer", "order_zero_projection",
    "perturb_order_zero", "polar_unitary", "projection_conjugator",
    "provenance_stamp", "random_order_zero", "render_report",
    "run_pipeline", "save", "split_decomposition", "stinespring",
    "structure_decompose", "tensor_lift", "ucp_extension", "unit_match",
    "unitary_commutant_lift", "unitize_dagger", "unitize_tilde",
    "verify_algebra", "verify_nucdim_decomposition", "wedderburn_decompose",
]
