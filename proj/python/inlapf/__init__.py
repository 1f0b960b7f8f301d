"""Latent-chain state-space toolkit.

Approximate Gaussian fits, sequential particle filters, and chain-based
samplers for AR(1) latent models with Poisson or Gaussian observations.
The compiled extension lives inside the package when installed; during
development it may sit on PYTHONPATH next to the build tree instead.
"""

try:
    from ._core import (
        CoreError,
        build_proposal,
        gaussian_approx,
        kalman_loglik,
        pmmh,
        resample,
        run_filter,
        run_inla,
        simulate,
    )
except ImportError:  # build-tree layout: extension module beside the package
    from _core import (
        CoreError,
        build_proposal,
        gaussian_approx,
        kalman_loglik,
        pmmh,
        resample,
        run_filter,
        run_inla,
        simulate,
    )

__version__ = "0.1.0"

__all__ = [
    "CoreError",
    "build_proposal",
    "gaussian_approx",
    "kalman_loglik",
    "pmmh",
    "resample",
    "run_filter",
    "run_inla",
    "simulate",
    "__version__",
]
