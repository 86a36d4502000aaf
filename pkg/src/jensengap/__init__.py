"""Numerical verification engine for Jensen-type inequalities on pairs
of atomic measure spaces."""

from .checks import (CheckResult, StabilityParams, concave_reversal,
                     entropy_check, erasure_check, geometric_mean_check,
                     main_inequality, marginal_power_mean, power_mean_chain,
                     sequence_inequalities, stability_check, stability_params,
                     variational_scan)
from .convexity import (Interval, PhiSpec, ShapeCertificate, certify_shape,
                        estimate_alpha, parse_phi)
from .degree import DegreeProfile, HypothesisReport, characterize, check_hypotheses
from .errors import (DimensionError, DomainError, GenerationError,
                     HypothesisViolation, InternalConsistencyError,
                     InvalidValueError, ShapeError, VerifierError)
from .hypergraph import (Hypergraph, gm_of_gms_check, hypergraph_from_dict,
                         hypergraph_to_dict, random_hypergraph, to_instance,
                         validate_and_degrees)
from .model import (AtomicSpace, Instance, QuadratureScheme, SequenceModel,
                    build_discrete, diagonal_kernel, from_interval,
                    from_sequences, instance_from_dict, instance_to_dict,
                    random_instance, restrict_edges)
from .suite import (FuzzReport, SuiteConfig, SuiteReport, fuzz,
                    parse_generator, run_suite, run_suite_on_instance, sweep)

__version__ = "0.1.0"
