// Command-line runner for the scattering pipeline: `forward` simulates
// near-field data for a scene, `image` migrates a dataset onto a grid, and
// `verify` runs residual checks of the analytic identities the imaging
// method rests on.  Exit codes: 0 success, 1 failed verification or runtime
// error, 2 usage or configuration error.
#include "CLI11.hpp"

#include "rtm/bessel.hpp"
#include "rtm/dataio.hpp"
#include "rtm/forward.hpp"
#include "rtm/imaging.hpp"
#include "rtm/layered_green.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rtm;
using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

double frob(const std::vector<cd>& v)
{
    double s = 0.0;
    for (const cd& e : v)
        s += std::norm(e);
    return std::sqrt(s);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// scene from --preset and/or --config, config keys applied on top of the
// preset; returns false when neither was given
bool resolve_scene(const std::string& preset, const std::string& config_path, RunConfig& config)
{
    bool have = false;
    if (!preset.empty()) {
        config.scene = preset_scene(preset);
        have = true;
    }
    if (!config_path.empty()) {
        config = parse_config(read_text_file(config_path), config);
        have = true;
    }
    return have;
}

struct ForwardArgs {
    std::string preset, config_path, out;
    bool desk = false, paper = false;
    double tau = -1.0;
    long long seed = -1;
};

int run_forward(const ForwardArgs& args)
{
    RunConfig config = default_config();
    if (!resolve_scene(args.preset, args.config_path, config))
        throw std::invalid_argument("forward needs --preset and/or --config to define a scene");
    Scene& scene = config.scene;

    if (args.desk) {
        scene.acquisition = {20.0, 128, 128};
    } else if (args.paper) {
        scene.acquisition = {100.0, 1024, 1024};
    }
    if (args.tau >= 0.0)
        scene.noise_tau = args.tau;
    if (args.seed >= 0)
        scene.seed = static_cast<unsigned long long>(args.seed);
    if (!args.out.empty())
        config.output_dir = args.out;

    std::printf("scene: kappa1=%g kappa2=%g ns=%d nr=%d R=%g tau=%g seed=%llu\n",
                scene.medium.kappa1, scene.medium.kappa2, scene.acquisition.n_sources,
                scene.acquisition.n_receivers, scene.acquisition.radius, scene.noise_tau,
                scene.seed);

    const GreenEvaluator green(scene.medium);
    const ForwardSolver solver(scene, green);
    std::vector<double> residuals;
    ScatteringDataset data = solver.generate_dataset(&residuals);

    double worst = 0.0, mean = 0.0;
    for (double r : residuals) {
        worst = std::max(worst, r);
        mean += r;
    }
    mean /= std::max<std::size_t>(residuals.size(), 1);
    std::printf("solver residuals over %d sources: max %.3e, mean %.3e\n",
                scene.acquisition.n_sources, worst, mean);

    if (scene.noise_tau > 0.0) {
        const ScatteringDataset clean = data;
        data = add_noise(clean, scene.noise_tau, scene.seed);
        std::vector<cd> diff(data.values.size());
        for (std::size_t k = 0; k < diff.size(); ++k)
            diff[k] = data.values[k] - clean.values[k];
        std::printf("noise norm ratio: %g\n", frob(diff) / frob(clean.values));
    }

    std::filesystem::create_directories(config.output_dir);
    const std::string dataset_path = config.output_dir + "/dataset.txt";
    write_dataset(data, dataset_path);
    const std::string config_path = config.output_dir + "/config.txt";
    std::ofstream cfg(config_path);
    cfg << format_config(config);
    std::printf("wrote %s\n", dataset_path.c_str());
    return 0;
}

struct ImageArgs {
    std::string data_path, preset, config_path, grid_spec, out = "out";
};

SamplingGrid parse_grid_spec(const std::string& spec)
{
    std::vector<double> v;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        v.push_back(std::stod(item));
    if (v.size() != 6)
        throw std::invalid_argument("--grid expects x0,x1,y0,y1,nx,ny");
    SamplingGrid g;
    g.x0 = v[0];
    g.x1 = v[1];
    g.y0 = v[2];
    g.y1 = v[3];
    g.nx = static_cast<int>(v[4]);
    g.ny = static_cast<int>(v[5]);
    if (g.nx < 1 || g.ny < 1 || !(g.x1 > g.x0) || !(g.y1 > g.y0))
        throw std::invalid_argument("--grid extents must be increasing with nx, ny >= 1");
    return g;
}

int run_image(const ImageArgs& args)
{
    // validate every argument before touching the dataset file
    RunConfig config = default_config();
    const bool have_scene = resolve_scene(args.preset, args.config_path, config);
    SamplingGrid grid = have_scene ? config.scene.grid : SamplingGrid{};
    if (!args.grid_spec.empty())
        grid = parse_grid_spec(args.grid_spec);

    const ScatteringDataset data = read_dataset(args.data_path);
    std::printf("dataset: %d receivers x %d sources, R=%g, tau=%g\n", data.n_receivers,
                data.n_sources, data.acquisition.radius, data.noise_tau);

    const GreenEvaluator green(data.medium);
    const IndicatorField field = indicator(data, grid, green);

    std::filesystem::create_directories(args.out);
    const std::string matrix_path = args.out + "/indicator.txt";
    write_indicator(field, matrix_path);
    std::printf("wrote %s\n", matrix_path.c_str());

    const std::string pgm_path = args.out + "/indicator.pgm";
    try {
        write_pgm(field, pgm_path);
        std::printf("wrote %s\n", pgm_path.c_str());
    } catch (const std::domain_error& e) {
        std::printf("pgm skipped: %s\n", e.what());
    }

    if (have_scene) {
        const PeakReport report = peak_report(field, config.scene);
        std::printf("peak |Ind| at (%.4f, %.4f), distance to scatterers %.4f, contrast %.3f\n",
                    report.location.x, report.location.y, report.distance, report.contrast);
    } else {
        std::size_t arg = 0;
        for (std::size_t z = 1; z < field.values.size(); ++z)
            if (std::abs(field.values[z]) > std::abs(field.values[arg]))
                arg = z;
        const int i = static_cast<int>(arg) % grid.nx;
        const int j = static_cast<int>(arg) / grid.nx;
        std::printf("peak |Ind| at (%.4f, %.4f); pass --preset or --config for distances\n",
                    grid.xat(i), grid.yat(j));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Verification suites

std::vector<VerificationRow> suite_specfun()
{
    // classical cross-product identity J1 Y0 - J0 Y1 = 2/(pi t), grouped
    // into one row per pair of decades
    std::vector<VerificationRow> rows;
    for (int g = 0; g < 10; ++g) {
        double worst = 0.0;
        double t0 = 0.0, t1 = 0.0;
        for (int k = 0; k < 20; ++k) {
            const int idx = g * 20 + k;
            const double t = 0.1 * std::pow(1000.0, idx / 199.0);
            if (k == 0)
                t0 = t;
            t1 = t;
            const double w =
                bessel_j1(t) * bessel_y0(t) - bessel_j0(t) * bessel_y1(t) - 2.0 / (kPi * t);
            worst = std::max(worst, std::abs(w));
        }
        char params[64];
        std::snprintf(params, sizeof params, "t in [%.3g, %.3g]", t0, t1);
        rows.push_back({"wronskian", params, worst, 1e-12, worst <= 1e-12});
    }
    return rows;
}

std::vector<VerificationRow> suite_green()
{
    const GreenEvaluator green(MediumConfig{7.0, 7.0});
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> pos(-2.5, 2.5);
    std::vector<VerificationRow> rows;
    while (rows.size() < 10) {
        const Vec2 x{pos(rng), pos(rng)};
        const Vec2 z{pos(rng), pos(rng)};
        const double r = norm(x - z);
        if (r < 0.05 || r > 5.0)
            continue;
        const cd phi = (cd{0.0, 1.0} / 4.0) * hankel1_0(7.0 * r);
        const double resid = std::abs(green.green(x, z) - phi) / std::abs(phi);
        char params[96];
        std::snprintf(params, sizeof params, "x=(%.2f,%.2f) z=(%.2f,%.2f)", x.x, x.y, z.x, z.y);
        rows.push_back({"degenerate-G", params, resid, 1e-8, resid <= 1e-8});
    }
    return rows;
}

std::vector<VerificationRow> suite_hk()
{
    const GreenEvaluator green(MediumConfig{});
    std::mt19937 rng(211);
    std::uniform_real_distribution<double> pos(-1.8, 1.8);
    std::vector<VerificationRow> rows;
    while (rows.size() < 10) {
        const Vec2 x{pos(rng), pos(rng)};
        const Vec2 z{pos(rng), pos(rng)};
        if (std::abs(x.y) < 0.1 || std::abs(z.y) < 0.1 || norm(x - z) < 0.2)
            continue;
        const double defect = green.verify_helmholtz_kirchhoff(x, z, 10.0, 1024);
        const double resid = defect / std::abs(green.green(x, z));
        char params[96];
        std::snprintf(params, sizeof params, "x=(%.2f,%.2f) z=(%.2f,%.2f) R=10 n=1024", x.x, x.y,
                      z.x, z.y);
        rows.push_back({"helmholtz-kirchhoff", params, resid, 1e-3, resid <= 1e-3});
    }
    return rows;
}

std::vector<VerificationRow> suite_zeta()
{
    const GreenEvaluator green(MediumConfig{});
    std::mt19937 rng(307);
    std::uniform_real_distribution<double> pos(-1.5, 1.5);
    std::vector<VerificationRow> rows;
    while (rows.size() < 5) {
        const Vec2 x{pos(rng), pos(rng)};
        const Vec2 z{pos(rng), pos(rng)};
        if (std::abs(x.y) < 0.1 || std::abs(z.y) < 0.1 || norm(x - z) < 0.2)
            continue;
        const double z20 = std::abs(green.zeta_remainder(x, z, 20.0, 2048));
        const double z40 = std::abs(green.zeta_remainder(x, z, 40.0, 4096));
        const double ratio = z40 / z20;
        char params[96];
        std::snprintf(params, sizeof params, "x=(%.2f,%.2f) z=(%.2f,%.2f) band [0.35, 0.65]", x.x,
                      x.y, z.x, z.y);
        rows.push_back({"zeta-halving", params, ratio, 0.65, ratio >= 0.35 && ratio <= 0.65});
    }
    return rows;
}

std::vector<VerificationRow> suite_forward()
{
    std::vector<VerificationRow> rows;

    {
        Scene scene;  // flat interface, no obstacle: nothing scatters
        scene.acquisition = {20.0, 4, 4};
        const GreenEvaluator green(scene.medium);
        const ForwardSolver solver(scene, green);
        const ScatteringDataset data = solver.generate_dataset();
        double peak = 0.0;
        for (const cd& v : data.values)
            peak = std::max(peak, std::abs(v));
        rows.push_back({"null-data", "flat, no obstacle, 4x4", peak, 1e-12, peak <= 1e-12});
    }

    {
        Scene scene = preset_scene("ex1_flat_circle");
        scene.acquisition = {20.0, 8, 8};
        const GreenEvaluator green(scene.medium);
        const ForwardSolver solver(scene, green);
        std::vector<double> residuals;
        const ScatteringDataset data = solver.generate_dataset(&residuals);

        const double worst = *std::max_element(residuals.begin(), residuals.end());
        rows.push_back({"solve-residual", "ex1 circle, 8 sources", worst, 1e-10, worst <= 1e-10});

        std::vector<cd> asym(data.values.size());
        for (int r = 0; r < 8; ++r)
            for (int s = 0; s < 8; ++s)
                asym[std::size_t(r) * 8 + s] = data.at(r, s) - data.at(s, r);
        const double recip = frob(asym) / frob(data.values);
        rows.push_back({"reciprocity", "ex1 circle, 8x8", recip, 1e-3, recip <= 1e-3});
    }

    return rows;
}

int run_verify(const std::string& suite)
{
    std::vector<VerificationRow> rows;
    if (suite == "specfun")
        rows = suite_specfun();
    else if (suite == "green")
        rows = suite_green();
    else if (suite == "hk")
        rows = suite_hk();
    else if (suite == "zeta")
        rows = suite_zeta();
    else if (suite == "forward")
        rows = suite_forward();
    std::cout << format_report(rows);
    return all_pass(rows) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"two-layer scattering simulator and migration imager"};
    app.require_subcommand(1);

    ForwardArgs fargs;
    CLI::App* fwd = app.add_subcommand("forward", "simulate near-field data for a scene");
    fwd->add_option("--preset", fargs.preset, "named example scene");
    fwd->add_option("--config", fargs.config_path, "key = value config file");
    fwd->add_flag("--desk", fargs.desk, "desk profile: 128 sources/receivers on R=20");
    CLI::Option* paper_flag =
        fwd->add_flag("--paper", fargs.paper, "full profile: 1024 sources/receivers on R=100");
    paper_flag->excludes("--desk");
    fwd->add_option("--tau", fargs.tau, "relative noise level");
    fwd->add_option("--seed", fargs.seed, "noise seed");
    fwd->add_option("--out", fargs.out, "output directory");

    ImageArgs iargs;
    CLI::App* img = app.add_subcommand("image", "migrate a dataset onto a sampling grid");
    img->add_option("--data", iargs.data_path, "dataset file from `forward`")->required();
    img->add_option("--preset", iargs.preset, "scene for grid defaults and the peak report");
    img->add_option("--config", iargs.config_path, "config for grid defaults and the peak report");
    img->add_option("--grid", iargs.grid_spec, "override grid as x0,x1,y0,y1,nx,ny");
    img->add_option("--out", iargs.out, "output directory");

    std::string suite;
    CLI::App* ver = app.add_subcommand("verify", "run identity residual checks");
    ver->add_option("--suite", suite, "which residual suite to run")
        ->required()
        ->check(CLI::IsMember({"specfun", "green", "hk", "zeta", "forward"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fwd->parsed())
            return run_forward(fargs);
        if (img->parsed())
            return run_image(iargs);
        return run_verify(suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
