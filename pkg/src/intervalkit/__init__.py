"""Interval arithmetic in center/log-radius form, with calculus and IDE solvers."""

from .core import (ONE, ZERO, ExtendedInterval, Interval, OrderRelation, add,
                   classify_vs_classical, cmp_preceq, cmp_subset, cmp_total, div,
                   format_center_radius, format_endpoints, from_center_radius,
                   from_endpoints, from_real, gh_sub, h_sub, inv, moore_add,
                   moore_div, moore_mul, moore_scalar, moore_sub, mul, neg, phi,
                   pow_n, predict_vs_classical, scalar_mul, sub)
from .calculus import (DerivativeResult, GhDerivativeResult, IvfHandle, check_continuity,
                       derive, find_switching_points, gh_derive)
from .evaluate import (compile_components, eval_endpoint_pair, eval_interval,
                       eval_param, eval_value)
from .expr import parse, render
from .metric import (check_limit, distance, inner, metric_report, norm,
                     sup_distance)
from .ide import (ComparisonReport, GhBranch, GhResult, IdeProblem, compare,
                  enumerate_branches, solve, solve_gh, solve_new, solve_param_sweep,
                  solve_picard)
from .quadrature import (QuadratureResult, by_parts_sides, endpoint_integral, ftc_sides,
                         ir_integral, mult_integral, verify_by_parts, verify_ftc)
from .trajectory import Trajectory

__version__ = "0.1.0"
