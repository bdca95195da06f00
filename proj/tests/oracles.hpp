// oracles.hpp: reference implementations used only by the test suites.  These
// are deliberately independent of the library code paths they check: the
// cylinder-function references sum the ascending series in 128-bit floats,
// the integer-order values come from the standard recurrences, and the
// layered-medium reference integrates the spectral representation on the real
// axis with substitution-based handling of the branch points.
#ifndef RTM_TEST_ORACLES_HPP
#define RTM_TEST_ORACLES_HPP

#include <complex>
#include <functional>

namespace oracle {

// Ascending-series references, quad-precision internally.
double j0_series(double t);
double j1_series(double t);
double y0_series(double t);
double y1_series(double t);

// J_n, Y_n for integer n >= 0 (double precision; Miller's downward recurrence
// for J, upward recurrence for Y).
double jn(int n, double t);
double yn(int n, double t);
std::complex<double> hankel1_n(int n, double t);

// Adaptive Simpson quadrature of a complex integrand over [a, b].
std::complex<double> integrate(const std::function<std::complex<double>(double)>& f,
                               double a, double b, double tol, int depth = 48);

// Two-layer background field reference: real-axis spectral integration with
// square-root substitutions at the wavenumber branch points.  kappa1 applies
// for positive vertical coordinate, kappa2 below.  Absolute accuracy ~1e-7
// for points separated from the interface; intended for spot checks only.
std::complex<double> layered_green_reference(double kappa1, double kappa2,
                                             double x1, double x2,
                                             double z1, double z2,
                                             double tol = 1e-9);

} // namespace oracle

#endif
