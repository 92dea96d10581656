"""usol: spectral numerics for non-elliptic second-order Fourier multipliers.

Library layout:

  quadform     quadratic forms, graph coordinates for their level sets
  exponents    exact-rational exponent-region geometry and scaling predictions
  field        sampled torus fields, transforms, Lebesgue/Lorentz norms
  bumps        exact-support smooth cutoffs
  dyadic       dyadic decompositions of delta and p.v. 1/x
  multipliers  resolvent and localized slab multipliers, kernels
  surface      restriction-extension operators, polar coordinates, evolution
  extremizers  lower-bound families with known scaling laws
  normest      Lp->Lq operator-norm lower bounds and parameter sweeps
  harness      CLI, experiment drivers, CSV/SVG reports
"""

from .bumps import BumpKit, build_bump_kit
from .dyadic import PsiFunction, build_delta_psi, build_pv_psi
from .exponents import ExponentPair, RegionVerdict, classify, dual, predicted_slopes, sobolev_admissible, vertex
from .field import Grid, SampledField, fourier, inv_fourier, lorentz_p1, lorentz_qinf, lp_norm
from .quadform import GraphChart, QuadraticForm, eval_q, graph_height, rotate_to_graph

__all__ = [
    "BumpKit",
    "build_bump_kit",
    "PsiFunction",
    "build_delta_psi",
    "build_pv_psi",
    "ExponentPair",
    "RegionVerdict",
    "classify",
    "dual",
    "predicted_slopes",
    "sobolev_admissible",
    "vertex",
    "Grid",
    "SampledField",
    "fourier",
    "inv_fourier",
    "lp_norm",
    "lorentz_p1",
    "lorentz_qinf",
    "QuadraticForm",
    "GraphChart",
    "eval_q",
    "rotate_to_graph",
    "graph_height",
]

__version__ = "0.1.0"
