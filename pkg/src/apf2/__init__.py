"""apf2: almost-periodicity machinery over F_2^n at verifiable desk scale.

Fast transforms, exact period-set construction, oracle-access membership
tests, heavy Fourier coefficient search, and sumset subspace search, each
paired with an independent brute-force oracle.
"""

from .f2core import (AffineSubspace, BitVector, PointSet, Subspace, dot,
                     echelonize, enumerate_points, nullspace_basis,
                     orthogonal_complement)
from .fourier import (RealTable, SpectrumSet, chang_check, convolve,
                      convolve_power, indicator, inverse_wht, measure,
                      spec_rho, sumset_support, wht)
from .periodicity import (Certificate, GoodnessSpec, PeriodSet, RhoTable,
                          build_period_set, classical_bogolyubov,
                          exact_bogolyubov, good_estimator_set,
                          period_subspace, rho, rho_hat,
                          subspace_fourier_check, verify_iterated)
from .sampling import (AuditLog, FunctionOracle, ParamSchedule,
                       SamplingSession, hoeffding_samples, paper_parameters,
                       variance_hoeffding_samples)
from .glalgo import CoefficientList, estimate_coefficient, goldreich_levin
from .bogolyubov_algo import (BogolyubovResult, quasipoly_bogolyubov,
                              verify_certificate)
from .sumset_subspace import (RefinedReport, find_sumset_subspace,
                              parabola_monotone, refined_period_set,
                              refined_subspace)

__version__ = "0.1.0"
