"""Age of information in random-access Poisson networks.

Analytic average age of Geo/G/1/2 queues (with and without deadlines), the
meta distribution of the link success probability, bounds on the cdf of the
per-link average age, and slot-level simulators used as oracles.
"""

from .bounds import AgeCdfBounds, InversionError, age_cdf_bounds, age_of_mu, invert_age
from .curves import CdfCurve
from .deadline import age_report, average_age_deadline
from .meta import QuadratureSpec, System, inner_exponent, success_cdf, success_cdf_curve
from .params import (NetworkParams, ParameterError, Policy, RngSpec, TrafficParams,
                     load_config, split_stream, validate_params)
from .queue import AgeReport, DomainError, average_age, stationary_distribution
from .simulator import (InterferenceMode, LinkStats, SimulationError, aggregate,
                        run_isolated_queue, run_realization, run_realizations)
from .spatial import ActivityModel, mean_mu_alpha4, monte_carlo_mu_cdf, sample_mu

__version__ = "0.1.0"
