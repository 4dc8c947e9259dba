"""Frechet means, finite sample stickiness bounds and Monte Carlo modulation
estimates on K-spiders."""

__version__ = "0.1.0"

from .spider import (  # noqa: E402
    ORIGIN,
    EmptySampleError,
    InvalidPointError,
    SampleFoldedSummary,
    SpiderPoint,
    SpiderSample,
    distance,
    fold,
    folded_sample_summary,
    frechet_function_value,
    frechet_sample_mean,
)
from .distributions import (  # noqa: E402
    AliasSampler,
    DiscreteSpiderDistribution,
    DistributionError,
    PopulationFoldedSummary,
    build_sampler,
    draw_sample,
    example_xt,
    load_distribution,
    population_folded_summary,
    population_frechet_mean,
    variance_about_mean,
)
from .bounds import (  # noqa: E402
    BERRY_ESSEEN_CONSTANT,
    BoundInputs,
    CertificationFailed,
    StickinessCertificate,
    bound_curve,
    certify,
    modulation_upper_bound,
    p_lower_k,
    p_upper,
    scan_range,
    std_normal_cdf,
)
from .montecarlo import (  # noqa: E402
    ModulationEstimate,
    SimulationConfig,
    estimate_modulation,
    modulation_curve,
    replicate,
)
