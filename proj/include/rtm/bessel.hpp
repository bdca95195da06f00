// bessel.hpp: cylinder functions of orders zero and one on the positive real
// axis, double precision throughout.  J and Y are exposed separately and as a
// combined evaluation (CylinderValue) that shares the amplitude/phase work;
// first-kind Hankel values are thin wrappers over the pair.
#ifndef RTM_BESSEL_HPP
#define RTM_BESSEL_HPP

#include <complex>

namespace rtm {

struct CylinderValue {
    double j;   // first kind
    double y;   // second kind
};

// Order-zero / order-one pairs (J, Y).  t must be > 0: Y is singular at the
// origin and the functions are not defined for negative argument here.
// Throws std::domain_error on violation.
CylinderValue cylinder0(double t);
CylinderValue cylinder1(double t);

// Individual kinds.  bessel_j0/bessel_j1 accept t == 0.
double bessel_j0(double t);
double bessel_j1(double t);
double bessel_y0(double t);
double bessel_y1(double t);

// H^(1)_n = J_n + i Y_n, n = 0, 1.  Argument restrictions as for cylinder*.
std::complex<double> hankel1_0(double t);
std::complex<double> hankel1_1(double t);

} // namespace rtm

#endif
