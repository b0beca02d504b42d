"""Reconstruction of the initial velocity of weakly and strongly damped wave
equations from boundary data on the unit sphere."""

__version__ = "0.1.0"

from .model import DampingKind, DampingModel, multiplier, multiplier_time_l2, product_time_integral
from .specfun import ModeIndex, bessel_j, harmonic_dim, sph_harmonic
from .grids import RadialGrid, TimeGrid, adaptive_time_grid, radial_grid, uniform_time_grid
from .kernel import GramMatrix, KernelSpec, assemble_gram_matrix, gram_H, kernel_K, kernel_l2_norm
from .forward import ModeSeries, ReducedCoefficient, add_noise, analyze_sphere, forward_mode, synthesize_sphere
from .spectral import GramDecomposition, Regularization, eig_sym, regularized_inverse_apply
from .reconstruct import ReconstructionReport, data_to_g, hankel_synthesize, reconstruct_mode, rel_l2_error
from .phantom import PhantomSpec, phantom_coeff
