// Text persistence and seeded randomness.  Numbers are printed through
// snprintf with 17 significant digits so doubles survive a round trip, and
// parsed with strict full-token consumption so a stray character fails
// loudly with its line number instead of truncating silently.
#include "rtm/dataio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace rtm {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

const char* kDatasetMarker = "# rtm dataset v1";
const char* kConfigMarker = "# rtm config v1";

std::string real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& tok, int line) {
    const char* c = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(c, &end);
    if (end == c || *end != '\0' || !std::isfinite(v))
        fail_line(line, "cannot parse real '" + tok + "'");
    return v;
}

long long parse_int(const std::string& tok, int line) {
    const char* c = tok.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(c, &end, 10);
    if (end == c || *end != '\0')
        fail_line(line, "cannot parse integer '" + tok + "'");
    return v;
}

std::vector<double> parse_real_list(const std::string& value, int line) {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_real(trim(item), line));
    return out;
}

std::string join_real_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += real17(v[k]);
    }
    return out;
}

ProfileKind profile_kind_from(const std::string& name, int line) {
    if (name == "flat") return ProfileKind::flat;
    if (name == "spline") return ProfileKind::spline;
    if (name == "gauss") return ProfileKind::gauss;
    if (name == "piecewise") return ProfileKind::piecewise;
    fail_line(line, "unknown interface.kind '" + name + "'");
}

const char* profile_kind_name(ProfileKind k) {
    switch (k) {
        case ProfileKind::flat: return "flat";
        case ProfileKind::spline: return "spline";
        case ProfileKind::gauss: return "gauss";
        case ProfileKind::piecewise: return "piecewise";
    }
    return "flat";
}

ObstacleKind obstacle_kind_from(const std::string& name, int line) {
    if (name == "circle") return ObstacleKind::circle;
    if (name == "rounded_square") return ObstacleKind::rounded_square;
    if (name == "rounded_triangle") return ObstacleKind::rounded_triangle;
    fail_line(line, "unknown obstacle.kind '" + name + "'");
}

const char* obstacle_kind_name(ObstacleKind k) {
    switch (k) {
        case ObstacleKind::circle: return "circle";
        case ObstacleKind::rounded_square: return "rounded_square";
        case ObstacleKind::rounded_triangle: return "rounded_triangle";
    }
    return "circle";
}

void validate_config(const RunConfig& config) {
    const Scene& scene = config.scene;
    const auto count = scene.interface_profile.params.size();
    switch (scene.interface_profile.kind) {
        case ProfileKind::flat:
            if (count != 0)
                throw std::invalid_argument("interface.params must be empty for a flat interface");
            break;
        case ProfileKind::spline:
        case ProfileKind::gauss:
        case ProfileKind::piecewise:
            if (count == 0 || count % 3 != 0)
                throw std::invalid_argument(
                    "interface.params must hold one or more (a, b, c) triples");
            break;
    }
    if (scene.obstacle) {
        const auto n = scene.obstacle->params.size();
        const bool triangle = scene.obstacle->kind == ObstacleKind::rounded_triangle;
        if (n != (triangle ? 4u : 3u))
            throw std::invalid_argument(std::string("obstacle.params for ") +
                                        obstacle_kind_name(scene.obstacle->kind) + " needs " +
                                        (triangle ? "4" : "3") + " values");
        if (scene.obstacle->params.back() <= 0.0 && !triangle)
            throw std::invalid_argument("obstacle size parameter must be positive");
        if (triangle && scene.obstacle->params[2] <= 0.0)
            throw std::invalid_argument("obstacle size parameter must be positive");
    }
    if (scene.medium.kappa1 <= 0.0 || scene.medium.kappa2 <= 0.0)
        throw std::invalid_argument("wavenumbers must be positive");
    if (scene.acquisition.radius <= 0.0)
        throw std::invalid_argument("acquisition.R must be positive");
    if (scene.acquisition.n_sources < 1 || scene.acquisition.n_receivers < 1)
        throw std::invalid_argument("acquisition.ns and acquisition.nr must be at least 1");
    if (scene.grid.nx < 1 || scene.grid.ny < 1)
        throw std::invalid_argument("grid.nx and grid.ny must be at least 1");
    if (!(scene.grid.x1 > scene.grid.x0) || !(scene.grid.y1 > scene.grid.y0))
        throw std::invalid_argument("grid extents must satisfy x0 < x1 and y0 < y1");
    if (scene.noise_tau < 0.0)
        throw std::invalid_argument("noise.tau must be nonnegative");
}

} // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& text, const RunConfig& base) {
    RunConfig config = base;
    std::optional<std::string> obstacle_kind;
    std::optional<std::vector<double>> obstacle_params;
    int obstacle_kind_line = 0, obstacle_params_line = 0;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) {
            const std::string comment = trim(raw.substr(hash));
            if (comment.rfind("# rtm config v", 0) == 0 && comment != kConfigMarker)
                fail_line(line, "unsupported config version '" + comment + "'");
            raw.erase(hash);
        }
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail_line(line, "expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        Scene& scene = config.scene;
        if (key == "interface.kind") {
            scene.interface_profile.kind = profile_kind_from(value, line);
            scene.interface_profile.params.clear();
        } else if (key == "interface.params") {
            scene.interface_profile.params = parse_real_list(value, line);
        } else if (key == "obstacle.kind") {
            obstacle_kind = value;
            obstacle_kind_line = line;
        } else if (key == "obstacle.params") {
            obstacle_params = parse_real_list(value, line);
            obstacle_params_line = line;
        } else if (key == "medium.kappa1") {
            scene.medium.kappa1 = parse_real(value, line);
        } else if (key == "medium.kappa2") {
            scene.medium.kappa2 = parse_real(value, line);
        } else if (key == "acquisition.R") {
            scene.acquisition.radius = parse_real(value, line);
        } else if (key == "acquisition.ns") {
            scene.acquisition.n_sources = static_cast<int>(parse_int(value, line));
        } else if (key == "acquisition.nr") {
            scene.acquisition.n_receivers = static_cast<int>(parse_int(value, line));
        } else if (key == "grid.x0") {
            scene.grid.x0 = parse_real(value, line);
        } else if (key == "grid.x1") {
            scene.grid.x1 = parse_real(value, line);
        } else if (key == "grid.y0") {
            scene.grid.y0 = parse_real(value, line);
        } else if (key == "grid.y1") {
            scene.grid.y1 = parse_real(value, line);
        } else if (key == "grid.nx") {
            scene.grid.nx = static_cast<int>(parse_int(value, line));
        } else if (key == "grid.ny") {
            scene.grid.ny = static_cast<int>(parse_int(value, line));
        } else if (key == "noise.tau") {
            scene.noise_tau = parse_real(value, line);
        } else if (key == "seed") {
            const long long s = parse_int(value, line);
            if (s < 0) fail_line(line, "seed must be nonnegative");
            scene.seed = static_cast<unsigned long long>(s);
        } else if (key == "output_dir") {
            if (value.empty()) fail_line(line, "output_dir must not be empty");
            config.output_dir = value;
        } else {
            fail_line(line, "unknown key '" + key + "'");
        }
    }

    if (obstacle_kind) {
        if (*obstacle_kind == "none") {
            if (obstacle_params)
                fail_line(obstacle_params_line, "obstacle.params given for obstacle.kind none");
            config.scene.obstacle.reset();
        } else {
            ObstacleBoundary ob;
            ob.kind = obstacle_kind_from(*obstacle_kind, obstacle_kind_line);
            if (obstacle_params)
                ob.params = *obstacle_params;
            else if (config.scene.obstacle && config.scene.obstacle->kind == ob.kind)
                ob.params = config.scene.obstacle->params;
            config.scene.obstacle = ob;
        }
    } else if (obstacle_params) {
        if (!config.scene.obstacle)
            fail_line(obstacle_params_line, "obstacle.params without an obstacle.kind");
        config.scene.obstacle->params = *obstacle_params;
    }

    validate_config(config);
    return config;
}

RunConfig parse_config(const std::string& text) { return parse_config(text, default_config()); }

std::string format_config(const RunConfig& config) {
    const Scene& scene = config.scene;
    std::string out;
    out += kConfigMarker;
    out += '\n';
    out += std::string("interface.kind = ") + profile_kind_name(scene.interface_profile.kind) + "\n";
    out += "interface.params = " + join_real_list(scene.interface_profile.params) + "\n";
    if (scene.obstacle) {
        out += std::string("obstacle.kind = ") + obstacle_kind_name(scene.obstacle->kind) + "\n";
        out += "obstacle.params = " + join_real_list(scene.obstacle->params) + "\n";
    } else {
        out += "obstacle.kind = none\n";
    }
    out += "medium.kappa1 = " + real17(scene.medium.kappa1) + "\n";
    out += "medium.kappa2 = " + real17(scene.medium.kappa2) + "\n";
    out += "acquisition.R = " + real17(scene.acquisition.radius) + "\n";
    out += "acquisition.ns = " + std::to_string(scene.acquisition.n_sources) + "\n";
    out += "acquisition.nr = " + std::to_string(scene.acquisition.n_receivers) + "\n";
    out += "grid.x0 = " + real17(scene.grid.x0) + "\n";
    out += "grid.x1 = " + real17(scene.grid.x1) + "\n";
    out += "grid.y0 = " + real17(scene.grid.y0) + "\n";
    out += "grid.y1 = " + real17(scene.grid.y1) + "\n";
    out += "grid.nx = " + std::to_string(scene.grid.nx) + "\n";
    out += "grid.ny = " + std::to_string(scene.grid.ny) + "\n";
    out += "noise.tau = " + real17(scene.noise_tau) + "\n";
    out += "seed = " + std::to_string(scene.seed) + "\n";
    out += "output_dir = " + config.output_dir + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Dataset files

void write_dataset(const ScatteringDataset& data, std::ostream& out) {
    out << kDatasetMarker << '\n';
    out << "# ns " << data.n_sources << " nr " << data.n_receivers << " R "
        << real17(data.acquisition.radius) << " kappa1 " << real17(data.medium.kappa1)
        << " kappa2 " << real17(data.medium.kappa2) << " tau " << real17(data.noise_tau)
        << " seed " << data.seed << '\n';
    for (int r = 0; r < data.n_receivers; ++r)
        for (int s = 0; s < data.n_sources; ++s) {
            const auto v = data.at(r, s);
            out << r << ' ' << s << ' ' << real17(v.real()) << ' ' << real17(v.imag()) << '\n';
        }
}

namespace {

[[noreturn]] void format_fail(int line, const std::string& what) {
    throw FormatError("line " + std::to_string(line) + ": " + what);
}

} // namespace

ScatteringDataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kDatasetMarker)
        throw FormatError("missing dataset version marker '" + std::string(kDatasetMarker) + "'");
    if (!std::getline(in, line)) throw FormatError("missing dataset header line");

    std::istringstream header(line);
    std::string hash, t_ns, t_nr, t_r, t_k1, t_k2, t_tau, t_seed;
    ScatteringDataset data;
    unsigned long long seed = 0;
    header >> hash >> t_ns >> data.n_sources >> t_nr >> data.n_receivers >> t_r >>
        data.acquisition.radius >> t_k1 >> data.medium.kappa1 >> t_k2 >> data.medium.kappa2 >>
        t_tau >> data.noise_tau >> t_seed >> seed;
    if (!header || hash != "#" || t_ns != "ns" || t_nr != "nr" || t_r != "R" ||
        t_k1 != "kappa1" || t_k2 != "kappa2" || t_tau != "tau" || t_seed != "seed")
        throw FormatError("malformed dataset header: '" + line + "'");
    if (data.n_sources < 1 || data.n_receivers < 1)
        throw FormatError("dataset header declares an empty matrix");
    data.seed = seed;
    data.acquisition.n_sources = data.n_sources;
    data.acquisition.n_receivers = data.n_receivers;
    data.values.resize(std::size_t(data.n_receivers) * data.n_sources);

    int lineno = 2;
    for (int r = 0; r < data.n_receivers; ++r)
        for (int s = 0; s < data.n_sources; ++s) {
            if (!std::getline(in, line))
                throw FormatError("dataset ends early at entry (" + std::to_string(r) + ", " +
                                  std::to_string(s) + ")");
            ++lineno;
            std::istringstream row(line);
            int fr = -1, fs = -1;
            double re = 0.0, im = 0.0;
            std::string extra;
            row >> fr >> fs >> re >> im;
            if (!row || (row >> extra))
                format_fail(lineno, "malformed dataset entry '" + line + "'");
            if (fr != r || fs != s)
                format_fail(lineno, "entry indices (" + std::to_string(fr) + ", " +
                                        std::to_string(fs) + ") out of sequence, expected (" +
                                        std::to_string(r) + ", " + std::to_string(s) + ")");
            data.at(r, s) = {re, im};
        }
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) format_fail(lineno, "unexpected trailing content");
    }
    return data;
}

void write_dataset(const ScatteringDataset& data, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_dataset(data, f);
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

ScatteringDataset read_dataset(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_dataset(f);
}

// ---------------------------------------------------------------------------
// Indicator files

void write_indicator(const IndicatorField& field, std::ostream& out) {
    const SamplingGrid& g = field.grid;
    out << g.nx << ' ' << g.ny << ' ' << real17(g.x0) << ' ' << real17(g.x1) << ' '
        << real17(g.y0) << ' ' << real17(g.y1) << '\n';
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out << ' ';
            out << real17(field.at(i, j));
        }
        out << '\n';
    }
}

IndicatorField read_indicator(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("missing indicator header line");
    IndicatorField field;
    SamplingGrid& g = field.grid;
    {
        std::istringstream header(line);
        std::string extra;
        header >> g.nx >> g.ny >> g.x0 >> g.x1 >> g.y0 >> g.y1;
        if (!header || (header >> extra))
            throw FormatError("malformed indicator header: '" + line + "'");
    }
    if (g.nx < 1 || g.ny < 1) throw FormatError("indicator header declares an empty grid");
    field.values.resize(g.size());

    int lineno = 1;
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(in, line))
            throw FormatError("indicator ends early at row " + std::to_string(j));
        ++lineno;
        std::istringstream row(line);
        for (int i = 0; i < g.nx; ++i) {
            double v = 0.0;
            if (!(row >> v)) format_fail(lineno, "row holds fewer than nx values");
            field.at(i, j) = v;
        }
        std::string extra;
        if (row >> extra) format_fail(lineno, "row holds more than nx values");
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) format_fail(lineno, "unexpected trailing content");
    }
    return field;
}

void write_indicator(const IndicatorField& field, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_indicator(field, f);
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

IndicatorField read_indicator(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_indicator(f);
}

// ---------------------------------------------------------------------------
// PGM rendering

void write_pgm(const IndicatorField& field, std::ostream& out) {
    const IndicatorField scaled = normalize(field);
    const SamplingGrid& g = field.grid;
    out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    // top row of the image is the top of the y-range
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i) {
            const long byte = std::lround(255.0 * scaled.at(i, j));
            out.put(static_cast<char>(static_cast<unsigned char>(byte)));
        }
}

void write_pgm(const IndicatorField& field, const std::string& path) {
    // rescale first so a degenerate field leaves no half-written file behind
    const IndicatorField scaled = normalize(field);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_pgm(scaled, f);
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Seeded normals and verification tables

namespace {

// splitmix-style finalizer: a fixed bijective scramble of 64-bit counters,
// reproducible across platforms and library versions
std::uint64_t mix64(std::uint64_t v) {
    v ^= v >> 30;
    v *= 0xBF58476D1CE4E5B9ull;
    v ^= v >> 27;
    v *= 0x94D049BB133111EBull;
    v ^= v >> 31;
    return v;
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = mix64(seed + 0x9E3779B97F4A7C15ull * (counter + 1));
    return (double(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

} // namespace

std::vector<double> seeded_normals(std::uint64_t seed, std::size_t n) {
    std::vector<double> out;
    out.reserve(n + 1);
    for (std::uint64_t pair = 0; out.size() < n; ++pair) {
        const double u1 = uniform01(seed, 2 * pair);
        const double u2 = uniform01(seed, 2 * pair + 1);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        out.push_back(rad * std::cos(kTwoPi * u2));
        if (out.size() < n) out.push_back(rad * std::sin(kTwoPi * u2));
    }
    return out;
}

std::string format_report(const std::vector<VerificationRow>& rows) {
    const std::vector<std::string> headers = {"check", "params", "residual", "threshold", "pass"};
    std::vector<std::array<std::string, 5>> cells;
    cells.reserve(rows.size());
    char buf[32];
    for (const auto& row : rows) {
        std::array<std::string, 5> c;
        c[0] = row.check;
        c[1] = row.params;
        std::snprintf(buf, sizeof buf, "%.3e", row.residual);
        c[2] = buf;
        std::snprintf(buf, sizeof buf, "%.3e", row.threshold);
        c[3] = buf;
        c[4] = row.pass ? "yes" : "no";
        cells.push_back(std::move(c));
    }
    std::array<std::size_t, 5> width{};
    for (int k = 0; k < 5; ++k) width[k] = headers[k].size();
    for (const auto& c : cells)
        for (int k = 0; k < 5; ++k) width[k] = std::max(width[k], c[k].size());

    const auto emit = [&](const std::array<std::string, 5>& c) {
        std::string line;
        for (int k = 0; k < 5; ++k) {
            if (k) line += " | ";
            line += c[k];
            if (k < 4) line.append(width[k] - c[k].size(), ' ');
        }
        line += '\n';
        return line;
    };
    std::string out = emit({headers[0], headers[1], headers[2], headers[3], headers[4]});
    for (const auto& c : cells) out += emit(c);
    return out;
}

bool all_pass(const std::vector<VerificationRow>& rows) {
    return std::all_of(rows.begin(), rows.end(),
                       [](const VerificationRow& r) { return r.pass; });
}

} // namespace rtm
