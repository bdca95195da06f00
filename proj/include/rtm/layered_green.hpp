// layered_green.hpp: Green's function of the two-layer Helmholtz medium.
//
// The medium has wavenumber kappa1 above the line x2 = 0 and kappa2 below.
// G(x, z) solves (Laplacian + kappa^2(x)) G = -delta_z with the Sommerfeld
// radiation condition in each half-plane, and both G and its vertical
// derivative are continuous across the line.  Values are computed from the
// classical spectral (plane-wave) representation: a free-space term plus a
// reflected spectral integral when both points share a half-plane, or a
// single transmitted spectral integral when they straddle the line.  The
// integrals are evaluated on a contour detoured below the real axis to pass
// under the branch points, with adaptive Gauss panels.
#ifndef RTM_LAYERED_GREEN_HPP
#define RTM_LAYERED_GREEN_HPP

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtm/geometry.hpp"

namespace rtm {

// Free-space kernel (i/4) H0^(1)(kappa |x - z|) and its gradient in x.
// Both throw std::domain_error at x = z.
std::complex<double> free_space_green(double kappa, Vec2 x, Vec2 z);
std::array<std::complex<double>, 2> free_space_gradient(double kappa, Vec2 x, Vec2 z);

struct SommerfeldParams {
    // absolute accuracy target for each spectral integral
    double tolerance = 1e-9;
    // contour depth below the real axis, as a fraction of min(kappa1, kappa2);
    // the depth is additionally capped so the folded cosine cannot grow by
    // more than e^3 along the detour
    double detour_fraction = 0.4;
    // kernel evaluations allowed per integral before giving up
    int node_budget = 400000;
};

// Raised when an adaptive integral cannot reach the requested tolerance
// within its node budget; carries the achieved error estimate.
class QuadratureFailure : public std::runtime_error {
public:
    QuadratureFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class GreenEvaluator {
public:
    explicit GreenEvaluator(MediumConfig medium, SommerfeldParams params = {});

    const MediumConfig& medium() const { return medium_; }
    const SommerfeldParams& params() const { return params_; }

    // Full Green's function; throws std::domain_error at x = z.  Points with
    // x2 = 0 are treated as upper-side limits (the value is continuous
    // across the line, so the choice only selects the formula).
    std::complex<double> green(Vec2 x, Vec2 z) const;

    // G minus the free-space term of the shared half-plane; for straddling
    // pairs this is G itself.  Smooth through x = z, which is allowed here.
    std::complex<double> green_scattered(Vec2 x, Vec2 z) const;

    // Gradient of G in the first argument.
    std::array<std::complex<double>, 2> green_gradient(Vec2 x, Vec2 z) const;

    // Gradient of the scattered part in the first argument; like
    // green_scattered it stays finite at x = z.
    std::array<std::complex<double>, 2> green_scattered_gradient(Vec2 x, Vec2 z) const;

    // Row-major table [xs.size() x zs.size()] of G(x_i, z_j), evaluated in
    // parallel chunks.
    std::vector<std::complex<double>> green_table(const std::vector<Vec2>& xs,
                                                  const std::vector<Vec2>& zs) const;

    // Boundary-integral diagnostics on the circle of radius R, n-node
    // trapezoid rule with half-step angular offset.
    //
    // Residual of the cross-correlation identity
    //   integral over the circle of (conj(G(xi,x)) dG(xi,z)/dnu -
    //   d(conj(G(xi,x)))/dnu G(xi,z)) ds = 2i Im G(x, z);
    // returns the absolute defect.  Requires |x|, |z| < R.
    double verify_helmholtz_kirchhoff(Vec2 x, Vec2 z, double R, int n_quad) const;

    // Weighted correlation remainder
    //   zeta(x, z) = integral of kappa(xi) conj(G(x,xi)) G(xi,z) ds - Im G(x,z),
    // which should decay like 1/R.  Requires |x|, |z| < R.
    std::complex<double> zeta_remainder(Vec2 x, Vec2 z, double R, int n_quad) const;

private:
    std::complex<double> spectral_part(Vec2 x, Vec2 z, int deriv_component) const;

    MediumConfig medium_;
    SommerfeldParams params_;
};

} // namespace rtm

#endif
