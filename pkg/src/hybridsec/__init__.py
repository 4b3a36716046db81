"""Secure multiuser massive-MIMO downlink with limited RF chains.

Analog, hybrid and full-digital data / artificial-noise precoders, Monte
Carlo ergodic secrecy rates, and their large-array closed forms.
"""

from ._backend import BACKEND
from .channel import ChannelRealization, SystemConfig, derive_lambda, generate_channels, validate_config
from .errors import ConfigError, DomainError, RankDeficiencyError, SingularMatrixError
from .metrics import (RateReport, TermStats, closed_form_sinr, eve_capacity_bound, eve_sinr,
                      mt_sinr_from_stats, ordering_check, secrecy_rate_bound)
from .montecarlo import EnsembleResult, EnsembleSpec, estimate_fluctuation_term, run_ensemble
from .numkernel import RngStream, null_space_basis, phase_only_project, sample_complex_gaussian
from .optimizer import PhiSearchSpec, optimize_phi
from .precoder import PrecoderSet, Scheme, build_precoders

__version__ = "0.1.0"
