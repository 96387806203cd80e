"""Certified LP upper bounds on the density of planar sets avoiding unit distances."""
from ._backend import BACKEND
from .bessel import omega2
from .constraints import GridSpec, TermSet
from .pipeline import (BoundReport, KappaSpectrum, autocorrelation, bisect_delta,
                       find_violated_configs, lp_value, refine_until_verified,
                       rows_from_config, witness_from_dual)
from .witness import WitnessCertificate, bound_from_witness, verify_nonneg

__version__ = "0.1.0"
