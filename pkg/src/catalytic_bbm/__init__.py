"""Catalytic branching Brownian motion: exact simulation plus a
verification harness for its closed-form and asymptotic behaviour."""

from .analytic import (DensityQuery, Params, delta_lambda,
                       expected_count_above, expected_population,
                       joint_position_localtime_density,
                       slln_limit_integral, speed_measure_density,
                       stationary_density, transition_density)
from .engine import (CapExceededError, EmptyPopulationError, GenealogyTree,
                     SimConfig, Snapshot, count_above, decorate,
                     grow_genealogy, leaf_counts_batch, population_curve,
                     rightmost, snapshot_positions_batch)
from .rng import GENERATOR_NAME, RngStream
from .sampler import (PositionLocalTime, sample_branch_threshold,
                      sample_hitting_time, sample_local_time,
                      sample_path_discretized,
                      sample_position_and_localtime,
                      sample_position_given_no_branch)
from .special import erfc, erfcx, std_normal_cdf, std_normal_quantile
from .spine import (InsufficientHitsError, many_to_one_estimate,
                    martingale_value, rare_event_probability,
                    single_particle_martingale_check)
from .stats import (EstimateReport, NonPositiveValueError, RateFit,
                    chi_square_test, empirical_scaled_sum,
                    empirical_slln_ratio, estimate_report, fit_rate,
                    ks_statistic)

__version__ = "0.1.0"
