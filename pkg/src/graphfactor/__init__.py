"""Exact subgraph-count factor algebra for G(n, p).

Everything arithmetic here is exact: densities are rationals a/b, factor
values are Fractions, and the number-theoretic predicates work on integers.
Floating point only enters the Monte Carlo estimators and the normal-law
reference curves, where it is unavoidable.

The package splits into layers that can be used independently:

  numtheory     rationals, binomials, integer square roots, continued
                fractions of quadratic surds
  smallgraphs   canonical forms, automorphisms and enumeration of the small
                pattern graphs
  hostgraphs    bitset host graphs, graph6 round trips, subgraph counting
  kernels       exhaustive and Monte Carlo counting kernels, with a compiled
                backend when the extension is importable
  algebra       scaled factor values, the X-to-g change of basis, products
                and identity verification
  ifs           integral factor systems: construction, verification,
                permissibility
  llt           joint local-limit comparisons, exact and Monte Carlo
  proportional  proportionality predicates and the Pell-equation searches

The command line front end lives in graphfactor.cli.
"""

from .algebra import (HostEvaluator, IdentityReport, ProblemContext,
                      StatVector, expand_x_in_g, product_expand,
                      run_identity_suite, scaled_factor_value, verify_identity)
from .hostgraphs import (HostGraph, count_subgraph_copies, count_upto4,
                         graph6_emit, graph6_parse, host_from_small,
                         sample_host)
from .ifs import IfsSystem, ifs_construct, ifs_verify, is_permissible, x_from_y, y_from_x
from .llt import (char_fn_compare, exact_joint_distribution, llt_error_report,
                  llt_prediction, mc_joint_estimate, sigma_table)
from .numtheory import (binom, cf_sqrt_period, format_rational, isqrt_exact,
                        parse_rational)
from .proportional import (hpc_scan, is_hat_proportional, is_hpc, is_pc,
                           is_spc, pell_fundamental, pell_iterate,
                           predicted_count_proportional, search_proportional,
                           smallest_hpc_half)
from .smallgraphs import GraphFamily, SmallGraph, family, graph_token, token_of

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ProblemContext", "StatVector", "HostEvaluator", "IdentityReport",
    "scaled_factor_value", "expand_x_in_g", "product_expand",
    "verify_identity", "run_identity_suite",
    "HostGraph", "graph6_parse", "graph6_emit", "host_from_small",
    "sample_host", "count_subgraph_copies", "count_upto4",
    "IfsSystem", "ifs_construct", "ifs_verify", "is_permissible",
    "x_from_y", "y_from_x",
    "exact_joint_distribution", "mc_joint_estimate", "llt_prediction",
    "llt_error_report", "char_fn_compare", "sigma_table",
    "binom", "isqrt_exact", "cf_sqrt_period", "parse_rational",
    "format_rational",
    "is_pc", "is_spc", "is_hpc", "is_hat_proportional", "hpc_scan",
    "smallest_hpc_half", "pell_fundamental", "pell_iterate",
    "search_proportional", "predicted_count_proportional",
    "SmallGraph", "GraphFamily", "family", "graph_token", "token_of",
]
