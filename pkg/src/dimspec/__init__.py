"""Empirical Assouad and lower spectra of finite samples of fractal sets."""

from . import counting, estimator, generators, oracle
from ._backend import available as available_backends
from ._backend import kernels
from .counting import (inf_local_count, local_cover_count, mesh_cover_count, packing_count,
                       sup_local_count)
from .estimator import (TooFewScales, assouad_dim_estimate, assouad_spectrum_at, lower_box_dim,
                        lower_dim_estimate, lower_spectrum_at, spectrum_sweep, upper_box_dim)
from .geometry import (DEFAULT_GRID, FiniteApprox, HolderParams, MoranParams, Point,
                       ScaleSchedule, SequenceDescriptor, SpiralParams, ThetaGrid, Winding,
                       default_schedule, distance, validate_approx)
from .pointfile import read_points, write_points

__version__ = "0.1.0"
