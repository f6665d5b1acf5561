"""Squeezed vacuum in the amplitude-damping channel: closed forms and Fock-space oracles."""

from .analytic import (
    ChannelPoint,
    EvolvedParams,
    PhotonDistribution,
    evolved_density_matrix,
    evolved_params,
    mean_photon,
    photon_dist,
    photon_prob,
    tomogram_analytic,
    trace_identity,
    wigner_analytic,
)
from .channel import KrausFamily, apply_channel, kraus_family, lindblad_rk4
from .errors import AdcSimError, ConvergenceError, CutoffError, PositivityError, QuadratureError
from .fock import (
    FockDensityMatrix,
    QuadratureFrame,
    adaptive_cutoff,
    expect_number,
    number_state,
    purity,
    quadrature_variance,
    squeezed_vacuum,
    squeezed_vacuum_tail,
    tomogram_numeric,
    vacuum,
    wigner_numeric,
    wigner_numeric_grid,
)

__version__ = "0.1.0"
