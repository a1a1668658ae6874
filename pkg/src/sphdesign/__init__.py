"""Spherical t-designs, quadrature, harmonic approximation, and framelet
denoising on the unit sphere."""

from .harmonics import (SphericalPoint, analysis_apply, cart_to_sph,
                        n_coeffs, sph_to_cart, synthesis_apply)
from .pointsets import (QuadraturePointSet, gauss_legendre_grid,
                        icosahedral_points, load_design, load_pointset,
                        save_pointset, spiral_points, uniform_random_points)
from .objective import DesignObjective, certify, objective_value, weyl_sums
from .optimizers import (LsRcgConfig, OptimResult, TrConfig, compute_design,
                         initial_pointset, ls_rcg, tr_pcg)
from .approximation import (ProjectionResult, SphericalSignal, add_noise,
                            degree_sweep, f_k_eval, indicator_signal,
                            project_cg, relative_l2_error, wendland_signal)
from .framelets import (FilterBank, FrameletCoefficients, MaskCascade,
                        QuadratureLadder, atom_energies, build_masks,
                        decompose, default_bank, design_ladder,
                        load_bank_csv, reconstruct, save_bank_csv)
from .denoise import (CapNeighborhood, DenoiseReport, ThresholdRule,
                      cap_indices, denoise_pipeline, denormalize_coeffs,
                      normalize_coeffs, snr, threshold_global,
                      threshold_local, threshold_residual)

__version__ = "0.1.0"

__all__ = [
    "SphericalPoint", "analysis_apply", "cart_to_sph", "n_coeffs",
    "sph_to_cart", "synthesis_apply",
    "QuadraturePointSet", "gauss_legendre_grid", "icosahedral_points",
    "load_design", "load_pointset", "save_pointset", "spiral_points",
    "uniform_random_points",
    "DesignObjective", "certify", "objective_value", "weyl_sums",
    "LsRcgConfig", "OptimResult", "TrConfig", "compute_design",
    "initial_pointset", "ls_rcg", "tr_pcg",
    "ProjectionResult", "SphericalSignal", "add_noise", "degree_sweep",
    "f_k_eval", "indicator_signal", "project_cg", "relative_l2_error",
    "wendland_signal",
    "FilterBank", "FrameletCoefficients", "MaskCascade", "QuadratureLadder",
    "atom_energies", "build_masks", "decompose", "default_bank",
    "design_ladder", "load_bank_csv", "reconstruct", "save_bank_csv",
    "CapNeighborhood", "DenoiseReport", "ThresholdRule", "cap_indices",
    "denoise_pipeline", "denormalize_coeffs", "normalize_coeffs", "snr",
    "threshold_global", "threshold_local", "threshold_residual",
    "__version__",
]
