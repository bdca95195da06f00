// geometry.hpp: scene description for the two-layer scattering problems.
// Covers the interface profile (a compactly supported perturbation of the
// line x2 = 0), the boundary curve of a buried impenetrable obstacle, the
// medium wavenumbers, the signed perturbation region between interface and
// line, the measurement circle, and the imaging grid.
#ifndef RTM_GEOMETRY_HPP
#define RTM_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rtm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Centered cubic B-spline: support [-2, 2], unit integral, value 2/3 at 0.
double cubic_bspline(double t);

// C-infinity cutoff: 1 on [-4, 4], 0 outside (-5, 5), strictly between
// otherwise.
double smooth_cutoff(double t);

// ---------------------------------------------------------------------------
// Interface profile x2 = f(x1)

enum class ProfileKind {
    flat,       // f = 0 everywhere
    spline,     // sum of scaled/shifted cubic B-splines
    gauss,      // sum of Gaussians, windowed by smooth_cutoff
    piecewise,  // piecewise-constant bump heights on closed intervals
};

struct InterfaceProfile {
    ProfileKind kind = ProfileKind::flat;
    // spline:    triples (amplitude, stretch, shift): a * B(stretch*t + shift)
    // gauss:     triples (amplitude, rate, center):   a * exp(-rate*(t-center)^2)
    // piecewise: triples (lo, hi, height), closed intervals, first match wins
    std::vector<double> params;

    double operator()(double t) const;
    // Smallest s with f == 0 outside [-s, s].  Zero for flat.
    double support_radius() const;
};

// Sign of the medium perturbation at x: +1 strictly between the line and a
// positive interface bump, -1 strictly between a negative bump and the line,
// 0 elsewhere (boundaries included).
int chi(const InterfaceProfile& f, Vec2 x);

// ---------------------------------------------------------------------------
// Obstacle boundary, parameterized over [0, 2pi), counterclockwise.

enum class ObstacleKind {
    circle,            // params: cx, cy, radius
    rounded_square,    // params: cx, cy, scale;  c + s(cos^3+cos, sin^3+sin)
    rounded_triangle,  // params: cx, cy, base, wobble;  c + (b + w cos 3t)(cos, sin)
};

struct ObstacleBoundary {
    ObstacleKind kind = ObstacleKind::circle;
    std::vector<double> params;

    Vec2 position(double theta) const;
    Vec2 derivative(double theta) const;
    Vec2 second_derivative(double theta) const;
    Vec2 center() const;
    // Unit normal pointing out of the obstacle into the surrounding medium.
    Vec2 outward_normal(double theta) const;
};

struct MediumConfig {
    double kappa1 = 10.0;  // upper half-plane
    double kappa2 = 5.0;   // lower half-plane
    double beta() const { return kappa1 * kappa1 - kappa2 * kappa2; }
    double max_kappa() const { return kappa1 > kappa2 ? kappa1 : kappa2; }
    double min_kappa() const { return kappa1 < kappa2 ? kappa1 : kappa2; }
    // wavenumber by vertical position; the interface itself is assigned the
    // upper value (a measure-zero convention, never load-bearing)
    double kappa_at(double x2) const { return x2 > 0.0 ? kappa1 : (x2 < 0.0 ? kappa2 : kappa1); }
};

// ---------------------------------------------------------------------------
// Perturbation region: axis-aligned cells between the line x2 = 0 and the
// graph of f, clipped column by column, midpoint nodes.

struct RegionCell {
    Vec2 node;      // cell midpoint
    double weight;  // cell area
    int sign;       // chi value on the cell
};

struct PerturbationRegion {
    std::vector<RegionCell> cells;
    double cell_size = 0.0;  // nominal linear cell dimension

    double signed_area() const;
};

// resolution = cells per minimum wavelength (2 pi / max_kappa); must be >= 4.
// Piecewise profiles are meshed per constant segment so the jump abscissae
// land exactly on cell boundaries.
PerturbationRegion build_region(const InterfaceProfile& f, const MediumConfig& medium,
                                int resolution);

// ---------------------------------------------------------------------------
// Acquisition circle and imaging grid

struct Acquisition {
    double radius = 100.0;
    int n_sources = 1024;
    int n_receivers = 1024;

    // Equiangular placement with spacing 2 pi / n, offset by half a spacing
    // so no point falls on the line x2 = 0.
    Vec2 source(int k) const;
    Vec2 receiver(int k) const;
};

struct SamplingGrid {
    double x0 = -5.0, x1 = 5.0;
    double y0 = -8.95, y1 = 1.05;
    int nx = 100, ny = 100;

    double xat(int i) const;
    double yat(int j) const;
    // row-major: index = j * nx + i, rows ordered by increasing y
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
};

// ---------------------------------------------------------------------------
// Scene: everything the forward and imaging stages need.

struct Scene {
    InterfaceProfile interface_profile;
    std::optional<ObstacleBoundary> obstacle;
    MediumConfig medium;
    Acquisition acquisition;
    SamplingGrid grid;
    double noise_tau = 0.0;
    unsigned long long seed = 1;
};

// Named configurations; throws std::invalid_argument for unknown names.
// Available: ex1_flat_circle, ex1_spline_no_obstacle, ex2_gauss_square,
// ex2_gauss_square_up4, ex2_gauss_square_up5, ex3_piecewise_triangle.
Scene preset_scene(const std::string& name);
std::vector<std::string> preset_names();

} // namespace rtm

#endif
