#include "doctest.h"
#include "oracles.hpp"
#include "rtm/layered_green.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

using namespace rtm;
using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Five-point Laplacian of the background field in x, holding z fixed.
cd laplacian_x(const GreenEvaluator& ev, Vec2 x, Vec2 z, double h)
{
    const cd c = ev.green(x, z);
    const cd e = ev.green({x.x + h, x.y}, z);
    const cd w = ev.green({x.x - h, x.y}, z);
    const cd n = ev.green({x.x, x.y + h}, z);
    const cd s = ev.green({x.x, x.y - h}, z);
    return (e + w + n + s - 4.0 * c) / (h * h);
}

// One-sided boundary limit from height h: Richardson combination 2f(h) - f(2h)
// cancels the linear term, leaving an O(h^2) error.
cd edge_limit(const std::function<cd(double)>& f, double h)
{
    return 2.0 * f(h) - f(2.0 * h);
}

} // namespace

TEST_CASE("free-space kernel: pinned value, symmetry, and the Helmholtz equation")
{
    // (i/4) H_0^(1)(1) frozen from the quad-precision ascending series
    const cd g = free_space_green(1.0, {0.0, 0.0}, {1.0, 0.0});
    CHECK(g.real() == doctest::Approx(-0.02206424105391924).epsilon(1e-13));
    CHECK(g.imag() == doctest::Approx(0.19129942163949164).epsilon(1e-13));

    // depends on |x - z| only
    const cd a = free_space_green(3.0, {0.2, 0.7}, {-0.4, 1.1});
    const cd b = free_space_green(3.0, {-0.4, 1.1}, {0.2, 0.7});
    CHECK(std::abs(a - b) == 0.0);

    CHECK_THROWS_AS((void)free_space_green(2.0, {1.0, 1.0}, {1.0, 1.0}),
                    std::domain_error);

    // five-point Laplacian residual shrinks at second order in the stencil width
    const double kappa = 2.0;
    const Vec2 x{0.7, 0.3}, z{0.0, 0.0};
    auto resid = [&](double h) {
        const cd e = free_space_green(kappa, {x.x + h, x.y}, z);
        const cd w = free_space_green(kappa, {x.x - h, x.y}, z);
        const cd n = free_space_green(kappa, {x.x, x.y + h}, z);
        const cd s = free_space_green(kappa, {x.x, x.y - h}, z);
        const cd c = free_space_green(kappa, x, z);
        const cd lap = (e + w + n + s - 4.0 * c) / (h * h);
        return std::abs(lap + kappa * kappa * c) / std::abs(kappa * kappa * c);
    };
    const double r1 = resid(2e-2);
    const double r2 = resid(1e-2);
    CHECK(r1 < 1e-2);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("matched half-spaces reduce to the free-space kernel")
{
    GreenEvaluator ev({7.0, 7.0});
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);

    int straddling = 0;
    for (int trial = 0; trial < 30; ++trial) {
        Vec2 x{u(rng), u(rng)}, z{u(rng), u(rng)};
        if (std::abs(x.y) < 0.05 || std::abs(z.y) < 0.05 || norm(x - z) < 0.1)
            continue;
        if (x.y * z.y < 0.0)
            ++straddling;
        const cd g = ev.green(x, z);
        const cd phi = free_space_green(7.0, x, z);
        CHECK(std::abs(g - phi) <= 1e-8 * std::abs(phi));
    }
    CHECK(straddling >= 5); // the sample must exercise the transmitted branch

    // a wide separation stresses the oscillatory part of the transmitted path
    GreenEvaluator slow({3.0, 3.0});
    const Vec2 x{-6.5, 1.2}, z{6.5, -0.8};
    const cd g = slow.green(x, z);
    const cd phi = free_space_green(3.0, x, z);
    CHECK(std::abs(g - phi) <= 1e-8 * std::abs(phi));
}

TEST_CASE("background field agrees with the real-axis spectral oracle")
{
    struct Pair { double k1, k2; Vec2 x, z; };
    const Pair cases[] = {
        {10.0, 5.0, {0.3, 0.8}, {-0.4, 0.5}},    // both above
        {10.0, 5.0, {0.2, -0.6}, {-0.3, -1.1}},  // both below
        {10.0, 5.0, {0.5, 0.7}, {0.1, -0.9}},    // across the interface
        {10.0, 5.0, {-2.0, 1.4}, {2.5, 0.6}},    // wide horizontal offset
        {5.0, 10.0, {0.4, 0.9}, {-0.2, -0.7}},   // reversed contrast
    };
    for (const auto& c : cases) {
        GreenEvaluator ev({c.k1, c.k2});
        const cd got = ev.green(c.x, c.z);
        const cd want = oracle::layered_green_reference(c.k1, c.k2,
                                                        c.x.x, c.x.y,
                                                        c.z.x, c.z.y, 1e-10);
        CHECK(std::abs(got - want) <= 5e-8);
    }
}

TEST_CASE("reciprocity: swapping the two arguments leaves the field unchanged")
{
    GreenEvaluator ev({10.0, 5.0});
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-2.5, 2.5);

    int checked = 0;
    while (checked < 50) {
        Vec2 x{u(rng), u(rng)}, z{u(rng), u(rng)};
        if (std::abs(x.y) < 0.03 || std::abs(z.y) < 0.03 || norm(x - z) < 0.05)
            continue;
        const cd a = ev.green(x, z);
        const cd b = ev.green(z, x);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
        ++checked;
    }
}

TEST_CASE("scattered part: smooth remainder once the singular kernel is removed")
{
    GreenEvaluator ev({10.0, 5.0});

    // full field = singular kernel + scattered part, on either side
    {
        const Vec2 x{0.4, 0.6}, z{-0.3, 1.1};
        const cd whole = ev.green(x, z);
        const cd parts = free_space_green(10.0, x, z) + ev.green_scattered(x, z);
        CHECK(std::abs(whole - parts) <= 1e-10 * std::abs(whole));
    }
    {
        const Vec2 x{0.2, -0.8}, z{0.6, -0.4};
        const cd whole = ev.green(x, z);
        const cd parts = free_space_green(5.0, x, z) + ev.green_scattered(x, z);
        CHECK(std::abs(whole - parts) <= 1e-10 * std::abs(whole));
    }

    // matched half-spaces scatter nothing
    GreenEvaluator flat({6.0, 6.0});
    CHECK(std::abs(flat.green_scattered({0.3, 0.9}, {0.5, 0.4})) == 0.0);

    // the remainder stays finite and continuous through coincident arguments
    const Vec2 p{0.3, 0.5};
    const cd at = ev.green_scattered(p, p);
    CHECK(std::isfinite(at.real()));
    CHECK(std::isfinite(at.imag()));
    const cd near1 = ev.green_scattered({p.x + 1e-2, p.y + 1e-2}, p);
    const cd near2 = ev.green_scattered({p.x + 1e-3, p.y + 1e-3}, p);
    CHECK(std::abs(near2 - at) < std::abs(near1 - at));
    CHECK(std::abs(near2 - at) <= 2e-2 * std::abs(at));
}

TEST_CASE("gradient: finite-difference and closed-form checks")
{
    GreenEvaluator ev({10.0, 5.0});
    const Vec2 xs[] = {{2.0, 1.0}, {0.3, 0.8}, {0.2, -0.6}, {0.5, 0.7}};
    const Vec2 zs[] = {{0.0, -1.0}, {-0.4, 0.5}, {-0.3, -1.1}, {0.1, -0.9}};
    const double h = 1e-4;
    for (int i = 0; i < 4; ++i) {
        const auto grad = ev.green_gradient(xs[i], zs[i]);
        const cd dx = (ev.green({xs[i].x + h, xs[i].y}, zs[i]) -
                       ev.green({xs[i].x - h, xs[i].y}, zs[i])) / (2.0 * h);
        const cd dy = (ev.green({xs[i].x, xs[i].y + h}, zs[i]) -
                       ev.green({xs[i].x, xs[i].y - h}, zs[i])) / (2.0 * h);
        CHECK(std::abs(grad[0] - dx) <= 1e-6);
        CHECK(std::abs(grad[1] - dy) <= 1e-6);
    }

    // matched half-spaces: transmitted gradient equals the free-space gradient
    GreenEvaluator flat({4.0, 4.0});
    const Vec2 x{0.8, 0.9}, z{-0.5, -1.2};
    const auto got = flat.green_gradient(x, z);
    const auto want = free_space_gradient(4.0, x, z);
    CHECK(std::abs(got[0] - want[0]) <= 1e-8 * std::abs(want[0]));
    CHECK(std::abs(got[1] - want[1]) <= 1e-8 * std::abs(want[1]));

    // scattered-part gradient: full minus singular away from coincidence,
    // and finite at coincidence
    {
        const Vec2 a{0.2, -0.7}, b{0.5, -0.4};
        const auto gs = ev.green_scattered_gradient(a, b);
        const auto gg = ev.green_gradient(a, b);
        const auto gf = free_space_gradient(5.0, a, b);
        CHECK(std::abs(gs[0] - (gg[0] - gf[0])) <= 1e-10 * std::abs(gg[0]));
        CHECK(std::abs(gs[1] - (gg[1] - gf[1])) <= 1e-10 * std::abs(gg[1]));
        const auto at = ev.green_scattered_gradient(a, a);
        CHECK(std::isfinite(at[0].real()));
        CHECK(std::isfinite(at[1].imag()));
    }
}

TEST_CASE("background field satisfies the Helmholtz equation on both sides")
{
    GreenEvaluator ev({10.0, 5.0});
    const Vec2 z{-0.2, -1.3};
    for (const Vec2 x : {Vec2{0.3, 0.9}, Vec2{0.5, -0.6}}) {
        const double kap = ev.medium().kappa_at(x.y);
        const cd c = ev.green(x, z);
        auto rel = [&](double h) {
            return std::abs(laplacian_x(ev, x, z, h) + kap * kap * c) /
                   std::abs(kap * kap * c);
        };
        const double r1 = rel(2e-2);
        const double r2 = rel(1e-2);
        CHECK(r1 < 2e-2);
        CHECK(r2 < r1);                  // second-order stencil, noise floor aside
        CHECK(r1 / r2 > 2.5);
    }
}

TEST_CASE("transmission conditions hold across the interface")
{
    GreenEvaluator ev({10.0, 5.0});
    const Vec2 z{0.3, -0.9};
    const double h = 1e-3;
    for (double t : {-0.7, 0.2, 1.4}) {
        auto val = [&](double s) { return ev.green({t, s}, z); };
        auto dvert = [&](double s) { return ev.green_gradient({t, s}, z)[1]; };

        const cd above = edge_limit([&](double s) { return val(s); }, h);
        const cd below = edge_limit([&](double s) { return val(-s); }, h);
        CHECK(std::abs(above - below) <= 1e-3 * std::abs(above));

        const cd dup = edge_limit([&](double s) { return dvert(s); }, h);
        const cd ddn = edge_limit([&](double s) { return dvert(-s); }, h);
        CHECK(std::abs(dup - ddn) <= 3e-3 * std::abs(dup));
    }
}

TEST_CASE("radiated amplitude decays like the inverse square root of range")
{
    GreenEvaluator ev({10.0, 5.0});

    // Valid only along directions reached by a propagating ray.  For a source
    // below the interface and a receiver above, that requires the horizontal
    // wavenumber kappa1*cos(elevation) to stay under kappa2; steeper receivers
    // see an ordinary spreading wave, shallower ones only an evanescent tail.
    struct Probe { Vec2 z; double elevation; };
    const Probe probes[] = {
        {{0.3, 0.5}, 0.7},   // same side: any upward direction qualifies
        {{0.3, -0.5}, 1.25}, // across: cos(1.25) = 0.32 < kappa2/kappa1
    };
    for (const auto& p : probes) {
        const double ct = std::cos(p.elevation), st = std::sin(p.elevation);
        std::vector<double> scaled;
        for (double r : {50.0, 100.0, 200.0})
            scaled.push_back(std::abs(ev.green({r * ct, r * st}, p.z)) * std::sqrt(r));
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        CHECK(*hi / *lo < 1.25);
    }
}

TEST_CASE("evaluation grid helper matches pointwise calls")
{
    GreenEvaluator ev({10.0, 5.0});
    const std::vector<Vec2> xs = {{0.2, 0.5}, {-0.4, 1.0}, {0.8, -0.3}};
    const std::vector<Vec2> zs = {{0.0, -0.9}, {0.5, 0.6}, {-0.2, -1.4}, {1.1, 0.2}};
    const auto table = ev.green_table(xs, zs);
    REQUIRE(table.size() == xs.size() * zs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < zs.size(); ++j)
            CHECK(table[i * zs.size() + j] == ev.green(xs[i], zs[j]));
}

TEST_CASE("failure handling: quadrature budget and invalid arguments")
{
    GreenEvaluator ev({10.0, 5.0});
    CHECK_THROWS_AS((void)ev.green({0.4, 0.7}, {0.4, 0.7}), std::domain_error);

    SommerfeldParams tight;
    tight.node_budget = 60;
    GreenEvaluator starved({10.0, 5.0}, tight);
    bool threw = false;
    try {
        (void)starved.green({-8.0, 0.4}, {8.0, -0.3});
    } catch (const QuadratureFailure& f) {
        threw = true;
        CHECK(f.residual() > 0.0);
    }
    CHECK(threw);
}
