"""Minimal-gap statistics of fractional-part orbits on the circle.

Exact B-bit dyadic circle arithmetic, additive energy through difference
histograms, a smoothed pair-counting statistic with Monte-Carlo and exact
spectral moments, GCD sums, and seeded verification experiments.
"""

__version__ = "0.1.0"

from .circle import (  # noqa: E402
    Dyadic,
    GapReport,
    Orbit,
    angle_from_rational,
    circle_distance,
    default_bits,
    derive_rng,
    distinct_gap_count,
    minimal_gap,
    orbit,
    recommended_bits,
    sample_angle,
)
from .energy import (  # noqa: E402
    DifferenceHistogram,
    EnergyReport,
    additive_energy,
    additive_energy_bruteforce,
    difference_histogram,
    energy_scan,
)
from .errors import ConfigError, MingapsError, ResourceGuardError  # noqa: E402
from .experiments import (  # noqa: E402
    ExperimentConfig,
    ResultRow,
    ResultTable,
    checkpoint_grid,
    fit_exponent,
    prime_gap_diagnostic,
    run_config,
    scan_minimal_gap,
    three_gap_check,
    verify_ceiling,
    verify_floor,
)
from .paircount import (  # noqa: E402
    FourierVariance,
    PairCountResult,
    VarianceReport,
    fourier_variance,
    gcd_sum,
    kernel_bound_check,
    mc_report,
    pair_correlation,
    pair_count_of_orbit,
    sample_pair_counts,
    smoothed_pair_count,
)
from .sequences import (  # noqa: E402
    IntegerSequence,
    from_spec,
    generate_lacunary,
    generate_monomial,
    generate_naturals,
    generate_primes,
    generate_squarefree,
    load_sequence,
    write_sequence,
)
from .window import Window, get_window  # noqa: E402
