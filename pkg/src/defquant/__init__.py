"""defquant: symbolic-numeric workbench for deformation quantization.

Layers, bottom up:

- exactnum / exactpoly: exact Gaussian-rational scalars and sparse
  polynomial jets.
- graphs: admissible upper-half-plane graphs, enumeration, canonical forms.
- propagators: the one-parameter interpolation family of angle one-forms
  on the half-plane and the disk.
- weight_mc: configuration-space Monte Carlo graph weights, the two-valent
  disk integrals, polynomial-in-parameter fits, and the tiered weight
  source (exact table > cache > sampling).
- series: closed-form wheel/zeta recipes, shadow sums, harmonic identities.
- star: graph operators on polynomial data and the order-2 star product
  with error propagation into associativity residuals.
- weyl / fedosov: truncated formal Weyl algebra, the curved connection
  fixed point, Catalan-tree expansion, and the resulting star product.
- geodesics: covariant exponential-map series with an ODE oracle.
- acceptance / cli: the gated acceptance suite and the command-line front.
"""

from .exactnum import QC
from .exactpoly import Poly
from .graphs import (AdmissibleGraph, Edge, enumerate_graphs, fan_graph,
                     cycle_graph, wheel_graph, graph1_left, graph1_right,
                     graph2)
from .weight_mc import (MCResult, WeightSource, weight_mc,
                        two_valent_integral, two_valent_out_out_exact,
                        weight_poly_fit, funimp_residuals)
from .cache import WeightCache
from .series import (merkulov_wheel_zeta, shadow_sum, two_wheel_display,
                     harmonic_identity, merkulov_vanishing_check)
from .star import (PolyVectorField, PolyDiffOperator, StarProductSeries,
                   graph_operator, hkr_operator, star_order2,
                   associativity_residual, associativity_sigma,
                   so3_bivector, u2_vector_fields)
from .weyl import WeylElement
from .fedosov import (FedosovInput, flat_input, curvature_tensor,
                      curvature_element, solve_connection, catalan_expansion,
                      fedosov_taylor, fedosov_star, moyal_star_jets)
from .geodesics import (MetricJet, CovariantTensorJet, nabla_lower,
                        exp_map_series, geodesic_ode_oracle,
                        classical_fedosov_taylor)

__version__ = "0.1.0"
