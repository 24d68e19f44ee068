"""Interval maps with infinite topological entropy and their numerical verification."""
from .entropy import (bowen_growth_estimate, bowen_spanning_estimate, count_branched_horseshoe,
                      entropy_lower_bound, expansivity_probe, lap_growth_estimate)
from .intervals import AffineMap, Interval
from .laps import branch_decomposition, lap_count, monotone_branches
from .maps import (BranchCapError, DyadicMap, FiniteMap, IntervalMapSpec, Piece, derivative_ae,
                   evaluate, make_f, make_identity, make_power, make_power_conj_tent, make_psi,
                   make_tent, make_truncated_f, make_xlogx)
from .measure import (conjugacy_residual, invariance_check, lebesgue, preimage_measure,
                      pullback_density, pullback_measure)
from .regularity import (Modulus, aux_holder_bound, gluing_bound, holder_exponent_estimate,
                         holder_seminorm, little_zygmund_profile, modulus_ratio_sup,
                         zygmund_ratio)
from .reports import EntropyReport, SeminormReport, Verdict
from .sobolev import (aux_sobolev_bound, sobolev_seminorm_f1_series,
                      sobolev_seminorm_quadrature)
from .zygmund import ZygmundMap, make_zygmund_map

__version__ = "0.1.0"
