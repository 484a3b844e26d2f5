"""Bayesian joint latent class models for longitudinal and survival data.

Thin wrapper over the compiled core: simulation, MCMC fitting, DIC-based
class-count selection, dynamic survival prediction, and evaluation metrics.
"""

try:
    from ._jlcm import *  # installed wheel layout: jlcm/_jlcm*.so
except ImportError:  # build-tree layout: _jlcm*.so directly on PYTHONPATH
    from _jlcm import *

__version__ = "0.1.0"
