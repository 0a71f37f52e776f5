"""Graph-based two-sample tests on raw distances and MADD dissimilarities."""

from .calibrate import (
    PermutationPlan,
    TestReport,
    exact_null_test,
    nbp_null_cdf,
    permutation_test,
    run_test,
    shp_run_null_cdf,
)
from .graphs import knn_digraph, min_weight_matching, mst, shp
from .kernels import DistanceMatrix, KernelSpec, PooledSample, kernel_distance, pairwise_matrix
from .madd import MaddMatrix, madd_matrix
from .stats import LabelVector, StatName, StatValue, t_cf, t_nbp, t_nn, t_runs

__version__ = "0.1.0"
