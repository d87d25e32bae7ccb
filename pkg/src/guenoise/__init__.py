"""Exact finite-N GUE spectral form factors and GUE-averaged noisy channels."""

from .channels import (
    DepolarizingChannel,
    PauliVector,
    TwofoldCoefficients,
    avg_channel_apply,
    depolarizing_f,
    qubit_evolve,
    qubit_f,
    qubit_matel_means,
    qubit_variance_curves,
    twofold_apply,
    twofold_coefficients,
    typicality,
    variance_matel_gue_avg,
    variance_operator,
)
from .ensemble import EigenSystem, RngStream, eigen_decompose, gue_log_density, sample_gue, semicircle_density
from .montecarlo import McEstimate, mc_channel_average, mc_haar_unitary, mc_twofold, sff_mc, sff_mc_curve
from .oscillator import diag_sum, exp_x_element, laguerre, x_matrix
from .sff import SffCurve, kappa2, kappa4, kappa41, sff2, sff4, sff41, sff_curve
from .weingarten import cycle_type, enumerate_contractions, haar_mc_validate, weingarten_table

__version__ = "0.1.0"
