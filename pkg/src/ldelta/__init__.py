"""(l, delta)-diversity: planning, anonymization and linkage analysis."""
from .core import AnonymizedDataset, Dataset, Partition, anonymize, diversity, validate_partition
from .distribution import (
    DistributionSummary,
    JointDistribution,
    class_mass,
    p_ell,
    sample_dataset,
    support_set,
)
from .estimator import LDeltaDiversityAnonymizer
from .exceptions import (
    CoverageError,
    InfeasibleError,
    LDeltaError,
    OverlapError,
    SizeGuardError,
    UnsupportedParametersError,
    ValidationError,
)
from .generalization import (
    ContiguousPartition,
    brute_force_optimal_contiguous,
    brute_force_optimal_unrestricted,
    class_count_bounds,
    generalize_ind,
    greedy_generalize,
)
from .linkage import (
    CharacteristicVector,
    LinkageResult,
    adversarial_construction,
    brute_force_worst_case,
    link,
    link_all,
    worst_case_post_linkage_diversity,
)
from .mechanism import MechanismPlan, m_bound, plan, sample_size
from .simulation import TrialReport, simulate_linkage, simulate_single

__version__ = "0.1.0"
