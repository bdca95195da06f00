// Migration imaging over a sampling grid.  The expensive part is tabulating
// the layered Green's function between every grid point and every circle
// point; the contractions that follow are cheap dense sums kept in a fixed
// order so the field is reproducible bit for bit.
#include "rtm/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rtm/parallel.hpp"

namespace rtm {
namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_dataset_shape(const ScatteringDataset& data) {
    const auto& acq = data.acquisition;
    if (data.n_sources < 1 || data.n_receivers < 1)
        throw std::invalid_argument("dataset is empty: " + std::to_string(data.n_receivers) +
                                    " receivers x " + std::to_string(data.n_sources) + " sources");
    if (data.n_sources != acq.n_sources || data.n_receivers != acq.n_receivers)
        throw std::invalid_argument(
            "dataset shape " + std::to_string(data.n_receivers) + "x" +
            std::to_string(data.n_sources) + " does not match its acquisition (" +
            std::to_string(acq.n_receivers) + "x" + std::to_string(acq.n_sources) + ")");
    const auto expected = std::size_t(data.n_receivers) * data.n_sources;
    if (data.values.size() != expected)
        throw std::invalid_argument("dataset holds " + std::to_string(data.values.size()) +
                                    " entries, expected " + std::to_string(expected));
}

void check_grid_inside(const SamplingGrid& grid, const Acquisition& acq) {
    const double cx = std::max(std::abs(grid.x0), std::abs(grid.x1));
    const double cy = std::max(std::abs(grid.y0), std::abs(grid.y1));
    if (std::hypot(cx, cy) >= acq.radius)
        throw std::invalid_argument("sampling grid reaches outside the measurement circle");
}

std::vector<Vec2> grid_points(const SamplingGrid& grid) {
    std::vector<Vec2> pts;
    pts.reserve(grid.size());
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) pts.push_back({grid.xat(i), grid.yat(j)});
    return pts;
}

std::vector<Vec2> circle_points(const Acquisition& acq, bool receivers) {
    const int n = receivers ? acq.n_receivers : acq.n_sources;
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) pts.push_back(receivers ? acq.receiver(k) : acq.source(k));
    return pts;
}

} // namespace

IndicatorField indicator(const ScatteringDataset& data, const SamplingGrid& grid,
                         const GreenEvaluator& green) {
    check_dataset_shape(data);
    check_grid_inside(grid, data.acquisition);

    const int ns = data.n_sources;
    const int nr = data.n_receivers;
    const auto pts = grid_points(grid);
    const auto recv = circle_points(data.acquisition, true);

    // With matching counts the half-offset placement puts sources and
    // receivers on the same points, so one table serves both contractions.
    const auto recv_table = green.green_table(pts, recv);
    const std::vector<cd>* src_table = &recv_table;
    std::vector<cd> src_table_storage;
    std::vector<Vec2> src = recv;
    if (ns != nr) {
        src = circle_points(data.acquisition, false);
        src_table_storage = green.green_table(pts, src);
        src_table = &src_table_storage;
    }

    const auto& medium = green.medium();
    std::vector<double> ws(ns);
    for (int s = 0; s < ns; ++s) ws[s] = medium.kappa_at(src[s].y);

    // Receiver weights folded into a source-major copy of conj(V) so the
    // inner contraction runs over contiguous memory.
    std::vector<cd> weighted(std::size_t(ns) * nr);
    for (int r = 0; r < nr; ++r) {
        const double wr = medium.kappa_at(recv[r].y);
        for (int s = 0; s < ns; ++s)
            weighted[std::size_t(s) * nr + r] = wr * std::conj(data.at(r, s));
    }

    const double R = data.acquisition.radius;
    const double scale = (kTwoPi * R / ns) * (kTwoPi * R / nr);

    IndicatorField field;
    field.grid = grid;
    field.values.assign(pts.size(), 0.0);
    field.acquisition = data.acquisition;
    field.medium = medium;
    field.noise_tau = data.noise_tau;
    field.seed = data.seed;

    parallel_for(pts.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t z = begin; z < end; ++z) {
            const cd* gr = &recv_table[z * nr];
            const cd* gs = &(*src_table)[z * ns];
            cd acc = 0.0;
            for (int s = 0; s < ns; ++s) {
                const cd* row = &weighted[std::size_t(s) * nr];
                cd a = 0.0;
                for (int r = 0; r < nr; ++r) a += row[r] * gr[r];
                acc += ws[s] * gs[s] * a;
            }
            field.values[z] = -scale * std::imag(acc);
        }
    });
    return field;
}

std::vector<cd> back_propagate(const ScatteringDataset& data, int s, const SamplingGrid& grid,
                               const GreenEvaluator& green) {
    check_dataset_shape(data);
    check_grid_inside(grid, data.acquisition);
    if (s < 0 || s >= data.n_sources)
        throw std::out_of_range("source index " + std::to_string(s) + " outside 0.." +
                                std::to_string(data.n_sources - 1));

    const int nr = data.n_receivers;
    const auto pts = grid_points(grid);
    const auto table = green.green_table(pts, circle_points(data.acquisition, true));

    std::vector<cd> column(nr);
    for (int r = 0; r < nr; ++r) column[r] = std::conj(data.at(r, s));

    const double factor = -kTwoPi * data.acquisition.radius / nr;
    std::vector<cd> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t z = begin; z < end; ++z) {
            const cd* g = &table[z * nr];
            cd w = 0.0;
            for (int r = 0; r < nr; ++r) w += g[r] * column[r];
            out[z] = factor * w;
        }
    });
    return out;
}

IndicatorField normalize(const IndicatorField& field) {
    if (field.values.empty())
        throw std::domain_error("indicator field has no value range to rescale");
    const auto [lo_it, hi_it] = std::minmax_element(field.values.begin(), field.values.end());
    if (!(*hi_it > *lo_it))
        throw std::domain_error("indicator field has no value range to rescale");
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    IndicatorField out = field;
    for (double& v : out.values) v = (v - lo) / span;
    return out;
}

namespace {

// Discretized reference set for distance queries: the obstacle as a closed
// polygon and the perturbation region as one vertical segment per sampled
// column.  Sampled at a few thousand points, so distances carry an error of
// half a sample spacing, well below the thresholds they are compared to.
struct ReferenceSet {
    std::vector<Vec2> loop;
    std::vector<std::array<double, 3>> columns;  // x, y_low, y_high
    const InterfaceProfile* profile = nullptr;

    bool empty() const { return loop.empty() && columns.empty(); }

    bool inside_obstacle(Vec2 p) const {
        bool in = false;
        for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
            const Vec2 a = loop[i];
            const Vec2 b = loop[j];
            if ((a.y > p.y) != (b.y > p.y) &&
                p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
                in = !in;
        }
        return in;
    }

    double distance(Vec2 p) const {
        if (!loop.empty() && inside_obstacle(p)) return 0.0;
        if (profile && chi(*profile, p) != 0) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2 q : loop) best = std::min(best, norm(p - q));
        for (const auto& [x, ylo, yhi] : columns) {
            const double dy = p.y - std::clamp(p.y, ylo, yhi);
            best = std::min(best, std::hypot(p.x - x, dy));
        }
        return best;
    }
};

ReferenceSet build_reference(const Scene& scene) {
    ReferenceSet set;
    set.profile = &scene.interface_profile;
    if (scene.obstacle) {
        const int n = 2048;
        set.loop.reserve(n);
        for (int k = 0; k < n; ++k) set.loop.push_back(scene.obstacle->position(kTwoPi * k / n));
    }
    const double s = scene.interface_profile.support_radius();
    if (s > 0.0) {
        const int n = 2048;
        for (int k = 0; k < n; ++k) {
            const double x = -s + 2.0 * s * (k + 0.5) / n;
            const double f = scene.interface_profile(x);
            if (f != 0.0) set.columns.push_back({x, std::min(0.0, f), std::max(0.0, f)});
        }
    }
    return set;
}

} // namespace

PeakReport peak_report(const IndicatorField& field, const Scene& scene) {
    const ReferenceSet set = build_reference(scene);
    const SamplingGrid& grid = field.grid;

    std::size_t arg = 0;
    double peak = -1.0;
    for (std::size_t z = 0; z < field.values.size(); ++z) {
        const double a = std::abs(field.values[z]);
        if (a > peak) {
            peak = a;
            arg = z;
        }
    }

    PeakReport report;
    const int j = static_cast<int>(arg) / grid.nx;
    const int i = static_cast<int>(arg) % grid.nx;
    report.location = {grid.xat(i), grid.yat(j)};
    report.distance = set.empty() ? std::numeric_limits<double>::infinity()
                                  : set.distance(report.location);

    double near_max = 0.0;
    double far_max = 0.0;
    if (!set.empty()) {
        for (std::size_t z = 0; z < field.values.size(); ++z) {
            const Vec2 p{grid.xat(static_cast<int>(z) % grid.nx),
                         grid.yat(static_cast<int>(z) / grid.nx)};
            const double d = set.distance(p);
            const double a = std::abs(field.values[z]);
            if (d <= 0.5)
                near_max = std::max(near_max, a);
            else if (d > 1.5)
                far_max = std::max(far_max, a);
        }
    }
    report.contrast =
        far_max > 0.0 ? near_max / far_max : std::numeric_limits<double>::infinity();
    return report;
}

} // namespace rtm
