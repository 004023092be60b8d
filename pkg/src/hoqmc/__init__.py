"""Higher-order digital nets and randomly shifted QMC in weighted Sobolev spaces."""

from .gf_linalg import GFMatrix, mat_vec_mul, rank, rows_independent
from .kernel import (BernoulliTable, KernelParams, Weights, bernoulli, error_on_representer,
                     kernel, kernel_1d, worst_case_error)
from .nets import (Coordinate, GeneratingMatrices, PointSet, faure_matrices, generate_points,
                   interlace, interlaced_t_bound, read_matrices, sequence_to_net,
                   sobol_matrices, write_matrices)
from .quality import (DualNetElement, InterpolationCoeffs, enumerate_dual, exact_t_value,
                      interpolation_coeffs, min_dick_metric, mu, mu_vec, propagate_t,
                      verify_order_t)
from .shifts import (DigitalShift, apply_shift, best_shift_search, constant_C_tau, constant_D,
                     constant_G, mse_upper_bound_bd, rms_wce_mc, sample_shift,
                     theoretical_bound)

__version__ = "0.1.0"
