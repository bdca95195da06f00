#include "rtm/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rtm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Validates that a profile's parameter list splits into (a, b, c) triples.
std::size_t triple_count(const std::vector<double>& params, const char* what) {
    if (params.size() % 3 != 0) {
        throw std::invalid_argument(std::string(what) + ": parameter count must be a multiple of 3");
    }
    return params.size() / 3;
}
} // namespace

double cubic_bspline(double t) {
    const double a = std::fabs(t);
    if (a >= 2.0) return 0.0;
    if (a <= 1.0) return 0.5 * a * a * a - a * a + 2.0 / 3.0;
    return -a * a * a / 6.0 + a * a - 2.0 * a + 4.0 / 3.0;
}

double smooth_cutoff(double t) {
    const double a = std::fabs(t);
    if (a <= 4.0) return 1.0;
    if (a >= 5.0) return 0.0;
    // Exponent runs from -inf at 4+ to +inf at 5-, so the value blends
    // monotonically from 1 to 0 with all derivatives vanishing at both ends.
    return 1.0 / (1.0 + std::exp(1.0 / (5.0 - a) + 1.0 / (4.0 - a)));
}

double InterfaceProfile::operator()(double t) const {
    switch (kind) {
        case ProfileKind::flat:
            return 0.0;
        case ProfileKind::spline: {
            double sum = 0.0;
            for (std::size_t i = 0; i + 2 < params.size(); i += 3) {
                sum += params[i] * cubic_bspline(params[i + 1] * t + params[i + 2]);
            }
            return sum;
        }
        case ProfileKind::gauss: {
            const double window = smooth_cutoff(t);
            if (window == 0.0) return 0.0;
            double sum = 0.0;
            for (std::size_t i = 0; i + 2 < params.size(); i += 3) {
                const double d = t - params[i + 2];
                sum += params[i] * std::exp(-params[i + 1] * d * d);
            }
            return sum * window;
        }
        case ProfileKind::piecewise: {
            for (std::size_t i = 0; i + 2 < params.size(); i += 3) {
                if (t >= params[i] && t <= params[i + 1]) return params[i + 2];
            }
            return 0.0;
        }
    }
    return 0.0;
}

double InterfaceProfile::support_radius() const {
    switch (kind) {
        case ProfileKind::flat:
            return 0.0;
        case ProfileKind::spline: {
            const std::size_t n = triple_count(params, "spline profile");
            double radius = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double stretch = params[3 * k + 1];
                const double shift = params[3 * k + 2];
                if (stretch == 0.0) throw std::invalid_argument("spline profile: zero stretch");
                // The bump a*B(stretch*t + shift) lives where |stretch*t + shift| < 2.
                const double e1 = (-2.0 - shift) / stretch;
                const double e2 = (2.0 - shift) / stretch;
                radius = std::max({radius, std::fabs(e1), std::fabs(e2)});
            }
            return radius;
        }
        case ProfileKind::gauss:
            // The Gaussians themselves never vanish; compact support comes
            // entirely from the cutoff window.
            triple_count(params, "gauss profile");
            return 5.0;
        case ProfileKind::piecewise: {
            const std::size_t n = triple_count(params, "piecewise profile");
            double radius = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                radius = std::max({radius, std::fabs(params[3 * k]), std::fabs(params[3 * k + 1])});
            }
            return radius;
        }
    }
    return 0.0;
}

int chi(const InterfaceProfile& f, Vec2 x) {
    if (x.y == 0.0) return 0;
    const double h = f(x.x);
    if (x.y > 0.0) return x.y < h ? +1 : 0;
    return x.y > h ? -1 : 0;
}

// ---------------------------------------------------------------------------
// Obstacle curves

Vec2 ObstacleBoundary::center() const {
    return {params.at(0), params.at(1)};
}

Vec2 ObstacleBoundary::position(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    switch (kind) {
        case ObstacleKind::circle: {
            const double r = params.at(2);
            return center() + Vec2{r * c, r * s};
        }
        case ObstacleKind::rounded_square: {
            const double a = params.at(2);
            return center() + Vec2{a * (c * c * c + c), a * (s * s * s + s)};
        }
        case ObstacleKind::rounded_triangle: {
            const double rho = params.at(2) + params.at(3) * std::cos(3.0 * theta);
            return center() + Vec2{rho * c, rho * s};
        }
    }
    return center();
}

Vec2 ObstacleBoundary::derivative(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    switch (kind) {
        case ObstacleKind::circle: {
            const double r = params.at(2);
            return {-r * s, r * c};
        }
        case ObstacleKind::rounded_square: {
            const double a = params.at(2);
            return {-a * s * (3.0 * c * c + 1.0), a * c * (3.0 * s * s + 1.0)};
        }
        case ObstacleKind::rounded_triangle: {
            const double rho = params.at(2) + params.at(3) * std::cos(3.0 * theta);
            const double drho = -3.0 * params.at(3) * std::sin(3.0 * theta);
            return {drho * c - rho * s, drho * s + rho * c};
        }
    }
    return {0.0, 0.0};
}

Vec2 ObstacleBoundary::second_derivative(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    switch (kind) {
        case ObstacleKind::circle: {
            const double r = params.at(2);
            return {-r * c, -r * s};
        }
        case ObstacleKind::rounded_square: {
            const double a = params.at(2);
            return {a * (6.0 * c * s * s - 3.0 * c * c * c - c),
                    a * (6.0 * s * c * c - 3.0 * s * s * s - s)};
        }
        case ObstacleKind::rounded_triangle: {
            const double rho = params.at(2) + params.at(3) * std::cos(3.0 * theta);
            const double drho = -3.0 * params.at(3) * std::sin(3.0 * theta);
            const double ddrho = -9.0 * params.at(3) * std::cos(3.0 * theta);
            // (rho e)'' = (rho'' - rho) e + 2 rho' e_perp with e = (c, s).
            return {(ddrho - rho) * c - 2.0 * drho * s, (ddrho - rho) * s + 2.0 * drho * c};
        }
    }
    return {0.0, 0.0};
}

Vec2 ObstacleBoundary::outward_normal(double theta) const {
    const Vec2 d = derivative(theta);
    const double len = norm(d);
    // Counterclockwise traversal keeps the interior on the left, so rotating
    // the tangent by -90 degrees points away from the obstacle.
    return {d.y / len, -d.x / len};
}

// ---------------------------------------------------------------------------
// Perturbation region

double PerturbationRegion::signed_area() const {
    double area = 0.0;
    for (const auto& cell : cells) area += cell.sign * cell.weight;
    return area;
}

PerturbationRegion build_region(const InterfaceProfile& f, const MediumConfig& medium,
                                int resolution) {
    if (resolution < 4) {
        throw std::invalid_argument("build_region: resolution must be at least 4 cells per wavelength");
    }
    const double delta = (kTwoPi / medium.max_kappa()) / resolution;

    PerturbationRegion region;
    region.cell_size = delta;
    if (f.kind == ProfileKind::flat) return region;

    const double radius = f.support_radius();
    if (!(radius > 0.0)) return region;

    // Column spans along x1.  A piecewise profile is meshed segment by
    // segment so its jump abscissae fall exactly on column boundaries and
    // every cell is a true rectangle; the smooth kinds use one span across
    // the whole support.
    std::vector<std::pair<double, double>> spans;
    if (f.kind == ProfileKind::piecewise) {
        for (std::size_t i = 0; i + 2 < f.params.size(); i += 3) {
            if (f.params[i + 1] > f.params[i]) spans.emplace_back(f.params[i], f.params[i + 1]);
        }
    } else {
        spans.emplace_back(-radius, radius);
    }

    for (const auto& [lo, hi] : spans) {
        const int ncol = std::max(1, static_cast<int>(std::ceil((hi - lo) / delta)));
        const double width = (hi - lo) / ncol;
        for (int i = 0; i < ncol; ++i) {
            const double tc = lo + (i + 0.5) * width;
            const double h = f(tc);
            if (std::fabs(h) < 1e-14) continue;
            const int nrow = std::max(1, static_cast<int>(std::ceil(std::fabs(h) / delta)));
            const double height = std::fabs(h) / nrow;
            const int sign = h > 0.0 ? +1 : -1;
            for (int r = 0; r < nrow; ++r) {
                const double yc = sign * (r + 0.5) * height;
                region.cells.push_back({{tc, yc}, width * height, sign});
            }
        }
    }
    return region;
}

// ---------------------------------------------------------------------------
// Acquisition circle and grid

Vec2 Acquisition::source(int k) const {
    const double theta = kTwoPi * (k + 0.5) / n_sources;
    return {radius * std::cos(theta), radius * std::sin(theta)};
}

Vec2 Acquisition::receiver(int k) const {
    const double theta = kTwoPi * (k + 0.5) / n_receivers;
    return {radius * std::cos(theta), radius * std::sin(theta)};
}

double SamplingGrid::xat(int i) const {
    if (nx <= 1) return 0.5 * (x0 + x1);
    return x0 + (x1 - x0) * i / (nx - 1);
}

double SamplingGrid::yat(int j) const {
    if (ny <= 1) return 0.5 * (y0 + y1);
    return y0 + (y1 - y0) * j / (ny - 1);
}

// ---------------------------------------------------------------------------
// Presets

Scene preset_scene(const std::string& name) {
    Scene scene;  // defaults: kappa1 = 10, kappa2 = 5, R = 100, N = 1024
    if (name == "ex1_flat_circle") {
        scene.obstacle = ObstacleBoundary{ObstacleKind::circle, {0.0, -4.0, 0.5}};
    } else if (name == "ex1_spline_no_obstacle") {
        scene.interface_profile = {ProfileKind::spline, {1.0, 2.0, 4.0, -0.6, 2.0, -5.0}};
    } else if (name == "ex2_gauss_square" || name == "ex2_gauss_square_up4" ||
               name == "ex2_gauss_square_up5") {
        scene.interface_profile = {ProfileKind::gauss,
                                   {0.6, 6.0, -3.0, 0.5, 7.0, 0.0, 0.5, 8.0, 3.0}};
        double cy = -6.0;
        if (name == "ex2_gauss_square_up4") cy = -2.0;
        if (name == "ex2_gauss_square_up5") cy = -1.0;
        scene.obstacle = ObstacleBoundary{ObstacleKind::rounded_square, {3.0, cy, 0.3}};
    } else if (name == "ex3_piecewise_triangle") {
        scene.interface_profile = {ProfileKind::piecewise,
                                   {-1.0, 1.0, 0.2, -4.0, -3.0, 0.3, 3.0, 4.0, 0.3}};
        scene.obstacle = ObstacleBoundary{ObstacleKind::rounded_triangle, {-3.0, -6.0, 0.5, 0.1}};
    } else {
        throw std::invalid_argument("unknown preset scene: " + name);
    }
    return scene;
}

std::vector<std::string> preset_names() {
    return {"ex1_flat_circle",     "ex1_spline_no_obstacle", "ex2_gauss_square",
            "ex2_gauss_square_up4", "ex2_gauss_square_up5",  "ex3_piecewise_triangle"};
}

} // namespace rtm
