"""Online combinatorial assignment with certificate samplers."""
from .errors import (InternalConsistencyError, InvalidCertificate, InvalidDistribution, InvalidInput,
                     InvalidInstance, InvalidParameter, NumericError, OnAssignError, ResourceLimit,
                     TrialFailed)
from .model import (BOTTOM, Hypergraph, IndependenceSystem, WeightDistribution, WeightFunction,
                    assignment_value, is_feasible, sample_profile)
from .matroids import GraphicMatroid, Matchoid, PartitionMatroid, TransversalMatroid
from .certifiers import Certificate, NULL, matroid_certifier, verify_certification
from .offline import offline_opt_bruteforce, solve_hm_lp, solve_matchoid_lp
from .samplers import DirectedSampler, HMSampler, MatchoidSampler, verify_sampler
from .online import (SecretarySchedule, p_alpha, run_prophet_iid,
                     run_prophet_secretary_single_sample, run_secretary)

__version__ = "0.1.0"
