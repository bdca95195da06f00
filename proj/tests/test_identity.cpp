#include "doctest.h"
#include "rtm/layered_green.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace rtm;
using cd = std::complex<double>;

// These cases exercise the two circle-integral diagnostics on the background
// field: the cross-correlation flux identity, whose defect should vanish with
// quadrature refinement, and the kappa-weighted correlation remainder, which
// measures how far a finite recording circle is from the ideal closure
// relation.  The remainder is expected to shrink at least like 1/R; measured
// decay is faster (about R^-1.7 at these radii) because the leading radiation
// corrections of the two factors cancel in the symmetric combination, so the
// regression bounds below accept the faster rate rather than demanding that
// the conservative 1/R envelope be saturated.

TEST_CASE("flux identity: free-space control at tight tolerance")
{
    GreenEvaluator ev({7.0, 7.0});
    const Vec2 x{0.0, 1.0}, z{1.0, 2.0};
    const double defect = ev.verify_helmholtz_kirchhoff(x, z, 10.0, 512);
    CHECK(defect <= 1e-6);
}

TEST_CASE("flux identity: layered medium within the quadrature budget")
{
    GreenEvaluator ev({10.0, 5.0});
    const Vec2 x{0.5, 0.8}, z{-0.3, -0.6};
    const double gmag = std::abs(ev.green(x, z));
    const double defect = ev.verify_helmholtz_kirchhoff(x, z, 6.0, 512);
    CHECK(defect <= 1e-3 * gmag);
    CHECK(defect <= 1e-5); // regression headroom over the measured 1.4e-7
}

TEST_CASE("flux identity: defect falls under node doubling")
{
    GreenEvaluator ev({10.0, 5.0});
    const Vec2 x{0.5, 0.8}, z{-0.3, -0.6};
    const double d128 = ev.verify_helmholtz_kirchhoff(x, z, 6.0, 128);
    const double d256 = ev.verify_helmholtz_kirchhoff(x, z, 6.0, 256);
    const double d512 = ev.verify_helmholtz_kirchhoff(x, z, 6.0, 512);
    CHECK(d256 < d128 / 4.0);
    CHECK(d512 < d256 / 4.0);
}

TEST_CASE("correlation remainder: decay in the recording radius")
{
    GreenEvaluator ev({10.0, 5.0});
    const Vec2 x{0.4, 0.5}, z{-0.6, -0.9};

    // eight nodes per short wavelength keeps every row quadrature-converged
    auto zeta = [&](double R) {
        return std::abs(ev.zeta_remainder(x, z, R, static_cast<int>(80 * R)));
    };

    const std::vector<double> radii = {10.0, 15.0, 20.0, 25.0, 30.0};
    std::vector<double> mag;
    for (double R : radii)
        mag.push_back(zeta(R));
    const double at40 = zeta(40.0);

    // doubling ratios: anything in [0.15, 0.65] is consistent with a decay
    // rate between 1/R and the observed super-convergent 1/R^2
    const double r1 = mag[2] / mag[0]; // R = 10 -> 20
    const double r2 = at40 / mag[2];   // R = 20 -> 40
    CHECK(r1 >= 0.15);
    CHECK(r1 <= 0.65);
    CHECK(r2 >= 0.15);
    CHECK(r2 <= 0.65);

    // a single-constant C/R envelope fits the sample to within 30% normwise
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        num += mag[i] / radii[i];
        den += 1.0 / (radii[i] * radii[i]);
    }
    const double c = num / den;
    double rss = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double res = mag[i] - c / radii[i];
        rss += res * res;
        ss += mag[i] * mag[i];
    }
    CHECK(std::sqrt(rss / ss) <= 0.30);
}

TEST_CASE("correlation remainder: matched half-spaces keep the decay law")
{
    GreenEvaluator ev({7.0, 7.0});
    const Vec2 x{0.4, 0.5}, z{-0.6, -0.9};
    const double z10 = std::abs(ev.zeta_remainder(x, z, 10.0, 800));
    const double z20 = std::abs(ev.zeta_remainder(x, z, 20.0, 1600));
    const double ratio = z20 / z10;
    CHECK(ratio >= 0.15);
    CHECK(ratio <= 0.65);
}

TEST_CASE("circle diagnostics reject invalid geometry")
{
    GreenEvaluator ev({10.0, 5.0});
    CHECK_THROWS_AS((void)ev.verify_helmholtz_kirchhoff({7.0, 0.5}, {0.0, -1.0}, 6.0, 128),
                    std::domain_error);
    CHECK_THROWS_AS((void)ev.zeta_remainder({0.2, 0.5}, {0.0, -9.0}, 6.0, 128),
                    std::domain_error);
    CHECK_THROWS_AS((void)ev.verify_helmholtz_kirchhoff({0.2, 0.5}, {0.0, -1.0}, 6.0, 4),
                    std::invalid_argument);
}
