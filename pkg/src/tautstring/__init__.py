"""Taut strings around sampled Wiener paths, truncated variation, and their long-run limits."""
from .closed_forms import density_from_q, integrate_against_p_inf, m_limit, p_infinity, q_limit
from .energy import PhiSpec, energy, normalized_energy, parse_phi, phi_eval
from .errors import (
    ConfigurationError,
    InstanceTooLargeError,
    InvalidParameterError,
    NonConvergentError,
    OutOfDomainError,
)
from .sojourn import SojournMeasure, empirical_tail, ks_distance, limit_tail, merge_measures, sojourn_measure
from .taut_string import Boundary, PiecewiseLinearPath, TubeSpec, evaluate, make_pseudostring, taut_string
from .truncated_variation import Kind, TruncationReport, dtv_trunc, tv_trunc, tv_trunc_oracle, utv_trunc
from .wiener import SampledPath, SeedSpec, add_drift, effective_width, simulate_wiener

__version__ = "0.1.0"
