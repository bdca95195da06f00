#include "doctest.h"
#include "oracles.hpp"
#include "rtm/forward.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace rtm;
using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Separated solution for a sound-soft circle of radius a centered at c in a
// homogeneous medium: the field scattered from a point source at xs,
// evaluated at x, via the cylindrical multipole expansion about c.  Series
// coefficients J_n(ka)/H_n(ka); both observation and source radii must
// exceed a.
cd circle_scattered_reference(double kappa, Vec2 c, double a, Vec2 xs, Vec2 x)
{
    const double rs = norm(xs - c), rx = norm(x - c);
    const double ts = std::atan2(xs.y - c.y, xs.x - c.x);
    const double tx = std::atan2(x.y - c.y, x.x - c.x);
    cd sum{0.0, 0.0};
    for (int n = -50; n <= 50; ++n) {
        const int m = std::abs(n);
        const double ja = oracle::jn(m, kappa * a);
        const cd ha = oracle::hankel1_n(m, kappa * a);
        const cd hs = oracle::hankel1_n(m, kappa * rs);
        const cd hx = oracle::hankel1_n(m, kappa * rx);
        sum += (ja / ha) * hs * hx * std::exp(cd{0.0, n * (tx - ts)});
    }
    return -(cd{0.0, 1.0} / 4.0) * sum;
}

Scene matched_circle_scene()
{
    Scene scene = preset_scene("ex1_flat_circle");
    scene.medium = {5.0, 5.0};
    scene.acquisition = {20.0, 16, 16};
    return scene;
}

double frob(const std::vector<cd>& v)
{
    double s = 0.0;
    for (const cd& e : v)
        s += std::norm(e);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("matched medium, circular obstacle: solver matches the separated solution")
{
    const Scene scene = matched_circle_scene();
    GreenEvaluator green(scene.medium);
    ForwardSolver solver(scene, green, 6, 96);

    const Vec2 xs = scene.acquisition.source(3);
    const auto sol = solver.solve_source(xs);
    CHECK(sol.linear_residual <= 1e-10);

    const Vec2 center = scene.obstacle->center();
    double worst = 0.0;
    for (int k = 0; k < 16; ++k) {
        const Vec2 xr = scene.acquisition.receiver(k);
        const cd got = solver.evaluate_difference_field(sol, xr);
        const cd want = circle_scattered_reference(5.0, center, 0.5, xs, xr);
        worst = std::max(worst, std::abs(got - want));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("null scenes produce identically zero data")
{
    // flat interface, no obstacle: nothing scatters at all
    {
        Scene scene = preset_scene("ex1_flat_circle");
        scene.obstacle.reset();
        scene.acquisition = {20.0, 8, 8};
        GreenEvaluator green(scene.medium);
        ForwardSolver solver(scene, green);
        const auto data = solver.generate_dataset();
        double peak = 0.0;
        for (const cd& v : data.values)
            peak = std::max(peak, std::abs(v));
        CHECK(peak <= 1e-12);
    }
    // perturbed interface but matched wavenumbers: the contrast coefficient
    // vanishes, so the volume unknowns decouple and radiate nothing
    {
        Scene scene = preset_scene("ex1_spline_no_obstacle");
        scene.medium = {7.0, 7.0};
        scene.acquisition = {20.0, 8, 8};
        GreenEvaluator green(scene.medium);
        ForwardSolver solver(scene, green, 5);
        const auto data = solver.generate_dataset();
        double peak = 0.0;
        for (const cd& v : data.values)
            peak = std::max(peak, std::abs(v));
        CHECK(peak <= 1e-12);
    }
}

TEST_CASE("sound-soft condition: the total field vanishes on the obstacle")
{
    Scene scene = preset_scene("ex1_flat_circle");
    scene.acquisition = {20.0, 16, 16};
    GreenEvaluator green(scene.medium);
    ForwardSolver solver(scene, green, 6, 64);

    const auto sol = solver.solve_source(scene.acquisition.source(0));
    CHECK(sol.linear_residual <= 1e-10);

    // probe off the collocation nodes: half-step offsets along the boundary,
    // evaluated with the quadrature-consistent trace
    const auto& obstacle = *scene.obstacle;
    double on_boundary = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double t = 2.0 * kPi * (k + 0.5) / 64;
        on_boundary = std::max(on_boundary, std::abs(solver.evaluate_total_trace(sol, t)));
    }
    // reference magnitude on a circle half a radius outside the scatterer
    const Vec2 c = obstacle.center();
    double nearby = 0.0;
    for (int k = 0; k < 32; ++k) {
        const double t = 2.0 * kPi * k / 32;
        const Vec2 p{c.x + 1.0 * std::cos(t), c.y + 1.0 * std::sin(t)};
        nearby = std::max(nearby, std::abs(solver.evaluate_total_field(sol, p)));
    }
    CHECK(on_boundary <= 1e-3 * nearby);
}

TEST_CASE("reciprocity and radiation decay for a bumpy interface with obstacle")
{
    Scene scene = preset_scene("ex1_spline_no_obstacle");
    scene.obstacle = ObstacleBoundary{ObstacleKind::circle, {0.0, -4.0, 0.5}};
    scene.acquisition = {20.0, 12, 12};
    GreenEvaluator green(scene.medium);
    ForwardSolver solver(scene, green, 5, 48);

    const auto data = solver.generate_dataset();
    REQUIRE(data.n_sources == 12);
    REQUIRE(data.n_receivers == 12);

    // scattered wave reconstructed from the difference field: u_s = V + G_s,
    // which restores the physically symmetric quantity for coincident circles
    std::vector<cd> us(data.values.size());
    for (int r = 0; r < 12; ++r)
        for (int s = 0; s < 12; ++s)
            us[std::size_t(r) * 12 + s] =
                data.at(r, s) + green.green_scattered(scene.acquisition.receiver(r),
                                                      scene.acquisition.source(s));
    double asym2 = 0.0, all2 = 0.0;
    for (int r = 0; r < 12; ++r)
        for (int s = 0; s < 12; ++s) {
            asym2 += std::norm(us[std::size_t(r) * 12 + s] - us[std::size_t(s) * 12 + r]);
            all2 += std::norm(us[std::size_t(r) * 12 + s]);
        }
    CHECK(std::sqrt(asym2 / all2) <= 1e-3);

    // dataset entries coincide exactly with pointwise evaluation
    const auto sol7 = solver.solve_source(scene.acquisition.source(7));
    const cd direct = solver.evaluate_difference_field(sol7, scene.acquisition.receiver(3));
    CHECK(direct == data.at(3, 7));

    // |V| sqrt(r) stays level along a steep ray, where a transmitted
    // propagating wave exists for either half-space
    const double el = 1.25, ct = std::cos(el), st = std::sin(el);
    std::vector<double> scaled;
    for (double r : {50.0, 100.0, 200.0})
        scaled.push_back(std::abs(solver.evaluate_difference_field(sol7, {r * ct, r * st})) *
                         std::sqrt(r));
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    CHECK(*hi / *lo < 1.25);
}

TEST_CASE("refinement self-convergence of the data matrix")
{
    // boundary refinement on the layered circle scene
    {
        Scene scene = preset_scene("ex1_flat_circle");
        scene.acquisition = {20.0, 8, 8};
        GreenEvaluator green(scene.medium);
        const auto coarse = ForwardSolver(scene, green, 6, 32).generate_dataset();
        const auto fine = ForwardSolver(scene, green, 6, 64).generate_dataset();
        std::vector<cd> diff(coarse.values.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = coarse.values[i] - fine.values[i];
        CHECK(frob(diff) <= 1e-2 * frob(fine.values));
    }
    // volume refinement on the obstacle-free bumpy interface.  The square
    // cells cut the curved strip crudely at low resolution, so the coarse
    // level carries a sizable geometry error; what must hold is that the
    // error contracts as the cells shrink.  Measured against a resolution-12
    // reference, the 4 -> 8 and 8 -> 12 gaps are about 15% and 2.1%.
    {
        Scene scene = preset_scene("ex1_spline_no_obstacle");
        scene.acquisition = {20.0, 6, 6};
        GreenEvaluator green(scene.medium);
        const auto d4 = ForwardSolver(scene, green, 4).generate_dataset();
        const auto d8 = ForwardSolver(scene, green, 8).generate_dataset();
        const auto d12 = ForwardSolver(scene, green, 12).generate_dataset();
        auto gap = [&](const ScatteringDataset& a, const ScatteringDataset& b) {
            std::vector<cd> diff(a.values.size());
            for (std::size_t i = 0; i < diff.size(); ++i)
                diff[i] = a.values[i] - b.values[i];
            return frob(diff) / frob(b.values);
        };
        const double coarse_gap = gap(d4, d12);
        const double fine_gap = gap(d8, d12);
        CHECK(fine_gap <= 4e-2);
        CHECK(fine_gap <= coarse_gap / 2.5);
    }
}

TEST_CASE("noise model: exact relative norm and seeded determinism")
{
    ScatteringDataset base;
    base.n_receivers = 6;
    base.n_sources = 5;
    base.values.resize(30);
    for (int i = 0; i < 30; ++i)
        base.values[i] = cd{std::cos(0.7 * i + 0.2), std::sin(1.3 * i - 0.4)} / (1.0 + i);

    const auto noisy = add_noise(base, 0.1, 42);
    std::vector<cd> delta(30);
    for (int i = 0; i < 30; ++i)
        delta[i] = noisy.values[i] - base.values[i];
    CHECK(frob(delta) == doctest::Approx(0.1 * frob(base.values)).epsilon(1e-12));
    CHECK(noisy.noise_tau == 0.1);

    const auto again = add_noise(base, 0.1, 42);
    for (int i = 0; i < 30; ++i)
        CHECK(again.values[i] == noisy.values[i]);

    const auto other = add_noise(base, 0.1, 43);
    double moved = 0.0;
    for (int i = 0; i < 30; ++i)
        moved = std::max(moved, std::abs(other.values[i] - noisy.values[i]));
    CHECK(moved > 1e-6);
    std::vector<cd> delta2(30);
    for (int i = 0; i < 30; ++i)
        delta2[i] = other.values[i] - base.values[i];
    CHECK(frob(delta2) == doctest::Approx(0.1 * frob(base.values)).epsilon(1e-12));

    const auto untouched = add_noise(base, 0.0, 41);
    for (int i = 0; i < 30; ++i)
        CHECK(untouched.values[i] == base.values[i]);

    CHECK_THROWS_AS((void)add_noise(base, -0.5, 1), std::domain_error);
}

TEST_CASE("configuration errors are rejected at assembly")
{
    GreenEvaluator green({10.0, 5.0});

    // obstacle crossing the interface line
    {
        Scene scene = preset_scene("ex1_flat_circle");
        scene.obstacle->params = {0.0, -0.4, 0.5};
        CHECK_THROWS_AS(ForwardSolver(scene, green), std::invalid_argument);
    }
    // obstacle poking into the perturbed strip below a dipping profile
    {
        Scene scene = preset_scene("ex1_spline_no_obstacle");
        scene.obstacle = ObstacleBoundary{ObstacleKind::circle, {2.5, -0.5, 0.3}};
        CHECK_THROWS_AS(ForwardSolver(scene, green, 5), std::invalid_argument);
    }
    // odd boundary node count
    {
        Scene scene = preset_scene("ex1_flat_circle");
        CHECK_THROWS_AS(ForwardSolver(scene, green, 6, 33), std::invalid_argument);
    }
}
