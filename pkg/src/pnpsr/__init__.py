"""Super-resolution of blurred, noisy LR images by alternating an FFT
deblurring step with a pluggable super-resolver.

Images are numpy float arrays of shape ``(H, W)`` or ``(H, W, C)`` with
nominal intensity range [0, 1]; kernels are 2-D nonnegative arrays summing
to one.
"""

from pnpsr.degrade import DegradationSpec, awgn, blur_circular, degrade
from pnpsr.dpsr import SolverParams, Trace, objective_value, run_dpsr, schedule_nus
from pnpsr.image import crop, edge_taper, pad_circular, resize_bicubic
from pnpsr.kernels import (
    delta_kernel,
    disk_kernel,
    gaussian_kernel,
    motion_kernel,
    psf_to_otf,
    read_kernel,
    write_kernel,
)
from pnpsr.metrics import psnr, ssim
from pnpsr.prior import (
    BicubicShrinkagePrior,
    ExternalPrior,
    SuperResolver,
    builtin_bicubic_shrinkage_prior,
    external_prior,
    shrinkage_denoise,
)
from pnpsr.solver import data_step, dense_oracle_solve

__all__ = [
    "BicubicShrinkagePrior",
    "DegradationSpec",
    "ExternalPrior",
    "SolverParams",
    "SuperResolver",
    "Trace",
    "awgn",
    "blur_circular",
    "builtin_bicubic_shrinkage_prior",
    "crop",
    "data_step",
    "degrade",
    "delta_kernel",
    "dense_oracle_solve",
    "disk_kernel",
    "edge_taper",
    "external_prior",
    "gaussian_kernel",
    "motion_kernel",
    "objective_value",
    "pad_circular",
    "psf_to_otf",
    "psnr",
    "read_kernel",
    "resize_bicubic",
    "run_dpsr",
    "schedule_nus",
    "shrinkage_denoise",
    "ssim",
    "write_kernel",
]
