"""Heat-semigroup parametrix and spectral zeta coefficients for matrix-valued
harmonic-oscillator systems, with a Fock-basis numerical oracle."""

from .closedform import ClosedForm, Estimate
from .fock import (PositivityError, SpectrumResult, build_matrix, compute_spectrum, eigenvalues,
                   heat_trace, hurwitz_partial_sum, zeta_partial_sum)
from .models import (ModelError, ModelSpec, builtin_model, harmonic_oscillator, jaynes_cummings,
                     jaynes_cummings_xi3)
from .parametrix import (HeatSymbol, homogeneity_check, hurwitz_shift, parametrix_expand,
                         solve_transport, structure_check, transport_rhs, vanishing_order)
from .symbols import PhaseSymbol, Poly, grade_decompose, poisson_bracket, weyl_product_term
from .verify import (VerificationReport, fit_integer_coefficients, heat_trace_compare,
                     residue_from_spectrum, verify_model)
from .zeta import (ContinuationTable, assemble_continuation, c_coefficient, continuation_table,
                   radial_integral, residue_at, sphere_monomial_average)

__version__ = "0.1.0"
