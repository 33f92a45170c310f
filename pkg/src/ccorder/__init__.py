"""
ccorder: joint PCA rank and correlated-signal count selection for two
high-dimensional data sets with few samples.

The main entry points are :func:`detect` for a single pair of data matrices,
:func:`generate` for synthetic scenarios, and :func:`run_experiment` for
Monte Carlo detection probabilities.
"""
from .cca import (
    CanonicalSpectrum,
    DataMatrixPair,
    SvdCache,
    economy_svd,
    full_canonical_correlations,
    max_rank,
    pca_reduce,
    reduced_canonical_correlations,
    spectrum_table,
)
from .config import preset, scenario
from .datagen import (
    GeneratedDataset,
    RandomUnitary,
    ScenarioConfig,
    SpatialAR1,
    SpatialMA,
    UlaSteering,
    White,
    generate,
    trial_rng,
)
from .detectors import (
    DetectorConfig,
    DetectorDecision,
    Method,
    bartlett_lawley,
    detect,
    full_dim_ic,
    glrt_lambda,
    ht_threshold,
    mdl_ic,
    mdl_threshold,
    min_step_ht,
    min_step_mdl_ic,
    min_step_mdl_threshold,
    traditional_series_test,
)
from .errors import (
    CcorderError,
    ComputationError,
    ConfigError,
    DegenerateStatisticError,
    SingularCovarianceError,
)
from .harness import (
    ExperimentSpec,
    MonteCarloReport,
    Sweep,
    emit_csv,
    run_experiment,
    run_statistic_histogram,
)
from .stats import ChiSquare, chi2_cdf, chi2_quantile, chi2_sf

__version__ = "0.1.0"
