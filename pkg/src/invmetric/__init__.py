"""Invariant metrics on the disk, ball and products, with Schwarz-type inequality checks."""
from .audit import normalization_audit
from .ball import (FinslerValue, distortion_M, gradient_D, invariant_gradient, kob_dist_ball,
                   kob_norm_ball, mobius_apply, mobius_derivative, s_factor)
from .core import decompose_along, fd_jacobian, hermitian_inner, norm, operator_norm
from .domains import Ball, Interval, PlanarDomain, ProductDomain, parse_domain, parse_space, polydisk
from .errors import DimensionError, DomainError, InvMetricError, UnknownSuiteError
from .families import FAMILY_KINDS, quasi_points, random_points, sample_family, sample_member
from .maps import HarmonicMap, HoloMap, compose, map_from_dict
from .oracle import OracleResult, PathProblem, closed_form_distance, path_length, path_oracle
from .planar import (Norm, chart_from_disk, chart_to_disk, covering_from_disk, hyp_density,
                     hyp_distance, kob_density, pseudo_hyperbolic)
from .product import (finsler_polydisk, finsler_product, kob_dist_polydisk, kob_dist_product,
                      real_projection_contract, strip_square)
from .suites import InequalitySuite, VerificationReport, run_all, run_suite, suite_ids

__version__ = "0.1.0"
