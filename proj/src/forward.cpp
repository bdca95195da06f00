#include "rtm/forward.hpp"

#include "rtm/bessel.hpp"
#include "rtm/dataio.hpp"
#include "rtm/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace rtm {

using cd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr cd kI{0.0, 1.0};

// Quadrature weights for the periodic logarithmic kernel: with n equispaced
// nodes t_j = 2 pi j / n (n even), the rule
//   integral over [0, 2pi) of log(4 sin^2((t - s)/2)) g(s) ds
//     ~ sum_j R[(i - j) mod n] g(t_j)
// at t = t_i integrates every trigonometric monomial of degree < n/2 exactly
// against the log factor, which is what makes the boundary discretization
// spectrally accurate for analytic curves.
std::vector<double> log_kernel_weights(int n)
{
    std::vector<double> r(n);
    for (int d = 0; d < n; ++d) {
        double s = 0.0;
        for (int m = 1; m < n / 2; ++m)
            s += std::cos(2.0 * kPi * m * d / n) / m;
        s += std::cos(kPi * d) / n;
        r[d] = -4.0 * kPi * s / n;
    }
    return r;
}

// Integral of the free-space kernel over a disc of the cell's area, centered
// at the singularity: 2 pi (i/4) integral_0^a H_0(kappa rho) rho d rho.
cd self_cell_integral(double kappa, double area)
{
    const double a = std::sqrt(area / kPi);
    const double t = kappa * a;
    const double re = a * bessel_j1(t) / kappa;
    const double im = a * bessel_y1(t) / kappa + 2.0 / (kPi * kappa * kappa);
    return 2.0 * kPi * (kI / 4.0) * cd{re, im};
}

struct BoundaryNodes {
    std::vector<double> t;       // parameter values
    std::vector<Vec2> y;         // positions
    std::vector<double> len;     // |x'(t)|
    std::vector<Vec2> nu;        // unit normal into the obstacle
    std::vector<Vec2> d1, d2;    // curve derivatives, for diagonal limits
};

} // namespace

struct ForwardSolver::Impl {
    Scene scene;
    const GreenEvaluator* green = nullptr;
    PerturbationRegion region;
    BoundaryNodes bd;
    double eta = 1.0;
    double beta = 0.0;
    int nv = 0, nb = 0;
    Eigen::MatrixXcd matrix;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;

    cd boundary_kernel(Vec2 x, int j) const
    {
        const auto grad = green->green_gradient(bd.y[j], x);
        const cd dn = grad[0] * bd.nu[j].x + grad[1] * bd.nu[j].y;
        return (dn - kI * eta * green->green(x, bd.y[j])) * bd.len[j];
    }

    // Single shared solve path: generate_dataset feeds the same right-hand
    // sides through this routine as solve_source, so the two agree exactly.
    ForwardSolution solve_from_rhs(Vec2 x_s, const Eigen::VectorXcd& rhs) const
    {
        ForwardSolution sol;
        sol.source = x_s;
        Eigen::VectorXcd x = lu.solve(rhs);
        x += lu.solve(rhs - matrix * x); // one refinement pass
        const double resid = (matrix * x - rhs).norm() / rhs.norm();
        if (!(resid <= 1e-10)) {
            std::ostringstream msg;
            msg << "direct solve residual " << resid << " exceeds 1e-10";
            throw SolverFailure(msg.str());
        }
        sol.linear_residual = resid;
        sol.field_on_region.assign(x.data(), x.data() + nv);
        sol.density.assign(x.data() + nv, x.data() + nv + nb);
        return sol;
    }

    // Shared accumulation for dataset entries and point evaluations; the
    // fixed summation order is what lets the two paths agree bit for bit.
    cd contract(const cd* pkernel, const cd* phi, const cd* gkernel, const cd* u) const
    {
        cd acc{0.0, 0.0};
        const double wb = 2.0 * kPi / (nb > 0 ? nb : 1);
        for (int j = 0; j < nb; ++j)
            acc += wb * pkernel[j] * phi[j];
        for (int k = 0; k < nv; ++k) {
            const auto& cell = region.cells[k];
            acc -= beta * cell.weight * double(cell.sign) * gkernel[k] * u[k];
        }
        return acc;
    }
};

ForwardSolver::~ForwardSolver() = default;

const Scene& ForwardSolver::scene() const { return impl_->scene; }
const PerturbationRegion& ForwardSolver::region() const { return impl_->region; }
double ForwardSolver::coupling_eta() const { return impl_->eta; }

ForwardSolver::ForwardSolver(const Scene& scene, const GreenEvaluator& green,
                             int volume_resolution, int boundary_nodes)
    : impl_(std::make_unique<Impl>())
{
    Impl& im = *impl_;
    im.scene = scene;
    im.green = &green;
    im.beta = scene.medium.beta();
    im.eta = std::max(scene.medium.kappa2, 1.0);
    im.region = build_region(scene.interface_profile, scene.medium, volume_resolution);
    im.nv = static_cast<int>(im.region.cells.size());

    if (scene.obstacle) {
        if (boundary_nodes < 8 || boundary_nodes % 2 != 0)
            throw std::invalid_argument("boundary_nodes must be even and at least 8");
        im.nb = boundary_nodes;

        // reject configurations where the obstacle meets the interface or
        // pokes into the perturbed strip between the interface and the line
        for (int s = 0; s < 512; ++s) {
            const Vec2 p = scene.obstacle->position(2.0 * kPi * s / 512);
            const double lid = std::min(0.0, scene.interface_profile(p.x));
            if (p.y >= lid - 1e-9)
                throw std::invalid_argument(
                    "obstacle must lie strictly below the interface and the "
                    "perturbed region");
        }

        auto& bd = im.bd;
        bd.t.resize(im.nb);
        bd.y.resize(im.nb);
        bd.len.resize(im.nb);
        bd.nu.resize(im.nb);
        bd.d1.resize(im.nb);
        bd.d2.resize(im.nb);
        for (int j = 0; j < im.nb; ++j) {
            const double t = 2.0 * kPi * j / im.nb;
            bd.t[j] = t;
            bd.y[j] = scene.obstacle->position(t);
            bd.d1[j] = scene.obstacle->derivative(t);
            bd.d2[j] = scene.obstacle->second_derivative(t);
            bd.len[j] = norm(bd.d1[j]);
            const Vec2 out = scene.obstacle->outward_normal(t);
            bd.nu[j] = {-out.x, -out.y};
        }
    }

    const int n = im.nv + im.nb;
    if (n == 0)
        return; // nothing scatters; solves degenerate to V = 0

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    const auto& cells = im.region.cells;
    const double kappa2 = scene.medium.kappa2;

    // volume block: identity plus the contrast operator, with the log
    // singularity of the diagonal handled by an equal-area disc integral
    parallel_for(static_cast<std::size_t>(im.nv), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
            for (int k = 0; k < im.nv; ++k) {
                cd gmk;
                if (static_cast<int>(m) == k) {
                    const double kap = scene.medium.kappa_at(cells[k].node.y);
                    gmk = self_cell_integral(kap, cells[k].weight) +
                          im.green->green_scattered(cells[k].node, cells[k].node) *
                              cells[k].weight;
                } else {
                    gmk = im.green->green(cells[m].node, cells[k].node) * cells[k].weight;
                }
                a(m, k) = (static_cast<int>(m) == k ? 1.0 : 0.0) +
                          im.beta * double(cells[k].sign) * gmk;
            }
            for (int j = 0; j < im.nb; ++j)
                a(m, im.nv + j) = -(2.0 * kPi / im.nb) * im.boundary_kernel(cells[m].node, j);
        }
    });

    // boundary block: exterior trace of the combined-field potential.  The
    // free-space part of the kernel splits into a periodic-log factor and a
    // smooth remainder; the layered correction is smooth outright.
    if (im.nb > 0) {
        const auto logw = log_kernel_weights(im.nb);
        const auto& bd = im.bd;
        parallel_for(static_cast<std::size_t>(im.nb), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t ii = lo; ii < hi; ++ii) {
                const int i = static_cast<int>(ii);
                for (int k = 0; k < im.nv; ++k)
                    a(im.nv + i, k) = -im.beta * double(cells[k].sign) * cells[k].weight *
                                      im.green->green(bd.y[i], cells[k].node);
                for (int j = 0; j < im.nb; ++j) {
                    cd log_part, smooth_part;
                    if (i == j) {
                        const double l = bd.len[i];
                        // curvature limit of the double-layer kernel; the
                        // second-order term of nu(tau) contributes -<x'',nu>
                        // and flips the naive half-curvature sign
                        const double kdiag =
                            (bd.d2[i].y * bd.d1[i].x - bd.d2[i].x * bd.d1[i].y) /
                            (4.0 * kPi * l * l);
                        const cd sdiag =
                            (kI / 4.0 - kEulerGamma / (2.0 * kPi) -
                             std::log(kappa2 * l / 2.0) / (2.0 * kPi)) * l;
                        log_part = -kI * im.eta * (-l / (4.0 * kPi));
                        smooth_part = kdiag - kI * im.eta * sdiag;
                    } else {
                        const Vec2 diff = bd.y[j] - bd.y[i];
                        const double r = norm(diff);
                        const double proj = (diff.x * bd.nu[j].x + diff.y * bd.nu[j].y) / r;
                        const double logfac =
                            std::log(4.0 * std::pow(std::sin((bd.t[i] - bd.t[j]) / 2.0), 2));
                        const cd kfull = -(kI * kappa2 / 4.0) * hankel1_1(kappa2 * r) *
                                         proj * bd.len[j];
                        const double k1 = (kappa2 / (4.0 * kPi)) *
                                          bessel_j1(kappa2 * r) * proj * bd.len[j];
                        const cd sfull = (kI / 4.0) * hankel1_0(kappa2 * r) * bd.len[j];
                        const double s1 = -bessel_j0(kappa2 * r) * bd.len[j] / (4.0 * kPi);
                        log_part = k1 - kI * im.eta * s1;
                        smooth_part = (kfull - k1 * logfac) -
                                      kI * im.eta * (sfull - s1 * logfac);
                    }
                    const auto gsg = im.green->green_scattered_gradient(bd.y[j], bd.y[i]);
                    const cd layered =
                        (gsg[0] * bd.nu[j].x + gsg[1] * bd.nu[j].y -
                         kI * im.eta * im.green->green_scattered(bd.y[i], bd.y[j])) *
                        bd.len[j];
                    const int d = (i - j + im.nb) % im.nb;
                    a(im.nv + i, im.nv + j) =
                        (i == j ? cd{-0.5, 0.0} : cd{0.0, 0.0}) +
                        logw[d] * log_part +
                        (2.0 * kPi / im.nb) * (smooth_part + layered);
                }
            }
        });
    }

    im.matrix = std::move(a);
    im.lu.compute(im.matrix);
    const double rc = im.lu.rcond();
    if (!(rc > 1e-14)) {
        std::ostringstream msg;
        msg << "forward system numerically singular (rcond estimate " << rc << ")";
        throw SolverFailure(msg.str());
    }
}

ForwardSolution ForwardSolver::solve_source(Vec2 x_s) const
{
    const Impl& im = *impl_;
    const int n = im.nv + im.nb;
    if (n == 0) {
        ForwardSolution sol;
        sol.source = x_s;
        return sol;
    }
    Eigen::VectorXcd rhs(n);
    for (int m = 0; m < im.nv; ++m)
        rhs(m) = im.green->green(im.region.cells[m].node, x_s);
    for (int i = 0; i < im.nb; ++i)
        rhs(im.nv + i) = -im.green->green(im.bd.y[i], x_s);
    return im.solve_from_rhs(x_s, rhs);
}

cd ForwardSolver::evaluate_difference_field(const ForwardSolution& sol, Vec2 x) const
{
    const Impl& im = *impl_;
    if (im.nv + im.nb == 0)
        return {0.0, 0.0};
    std::vector<cd> pk(im.nb), gk(im.nv);
    for (int j = 0; j < im.nb; ++j)
        pk[j] = im.boundary_kernel(x, j);
    for (int k = 0; k < im.nv; ++k)
        gk[k] = im.green->green(x, im.region.cells[k].node);
    return im.contract(pk.data(), sol.density.data(), gk.data(), sol.field_on_region.data());
}

cd ForwardSolver::evaluate_total_field(const ForwardSolution& sol, Vec2 x) const
{
    return impl_->green->green(x, sol.source) + evaluate_difference_field(sol, x);
}

cd ForwardSolver::evaluate_total_trace(const ForwardSolution& sol, double t) const
{
    const Impl& im = *impl_;
    if (!im.scene.obstacle)
        throw std::logic_error("evaluate_total_trace: scene has no obstacle");

    const auto& bd = im.bd;
    const int n = im.nb;
    const Vec2 x = im.scene.obstacle->position(t);
    const double kappa2 = im.scene.medium.kappa2;

    // Off-node weights for the periodic log kernel and the trigonometric
    // cardinal functions; at a node both collapse to the collocation values,
    // so this expression extends the assembled rows rather than replacing
    // them.
    cd trace{0.0, 0.0};
    cd phi_t{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
        const double dt = t - bd.t[j];
        double sum_log = 0.0, sum_card = 0.0;
        for (int m = 1; m < n / 2; ++m) {
            const double c = std::cos(m * dt);
            sum_log += c / m;
            sum_card += c;
        }
        const double chalf = std::cos(0.5 * n * dt);
        const double rj = -4.0 * kPi / n * (sum_log + chalf / n);
        const double lj = (1.0 + 2.0 * sum_card + chalf) / n;
        phi_t += lj * sol.density[j];

        cd log_part, smooth_part;
        const double s2 = 4.0 * std::pow(std::sin(0.5 * dt), 2);
        if (s2 < 1e-14) {
            const Vec2 d1 = im.scene.obstacle->derivative(t);
            const Vec2 d2 = im.scene.obstacle->second_derivative(t);
            const double l = norm(d1);
            const double kdiag = (d2.y * d1.x - d2.x * d1.y) / (4.0 * kPi * l * l);
            const cd sdiag = (kI / 4.0 - kEulerGamma / (2.0 * kPi) -
                              std::log(kappa2 * l / 2.0) / (2.0 * kPi)) * l;
            log_part = -kI * im.eta * (-l / (4.0 * kPi));
            smooth_part = kdiag - kI * im.eta * sdiag;
        } else {
            const Vec2 diff = bd.y[j] - x;
            const double r = norm(diff);
            const double proj = (diff.x * bd.nu[j].x + diff.y * bd.nu[j].y) / r;
            const double logfac = std::log(s2);
            const cd kfull = -(kI * kappa2 / 4.0) * hankel1_1(kappa2 * r) * proj * bd.len[j];
            const double k1 = (kappa2 / (4.0 * kPi)) * bessel_j1(kappa2 * r) * proj *
                              bd.len[j];
            const cd sfull = (kI / 4.0) * hankel1_0(kappa2 * r) * bd.len[j];
            const double s1 = -bessel_j0(kappa2 * r) * bd.len[j] / (4.0 * kPi);
            log_part = k1 - kI * im.eta * s1;
            smooth_part = (kfull - k1 * logfac) - kI * im.eta * (sfull - s1 * logfac);
        }
        const auto gsg = im.green->green_scattered_gradient(bd.y[j], x);
        const cd layered = (gsg[0] * bd.nu[j].x + gsg[1] * bd.nu[j].y -
                            kI * im.eta * im.green->green_scattered(x, bd.y[j])) *
                           bd.len[j];
        trace += rj * log_part * sol.density[j] +
                 (2.0 * kPi / n) * (smooth_part + layered) * sol.density[j];
    }
    trace -= 0.5 * phi_t;

    for (int k = 0; k < im.nv; ++k) {
        const auto& cell = im.region.cells[k];
        trace -= im.beta * cell.weight * double(cell.sign) *
                 im.green->green(x, cell.node) * sol.field_on_region[k];
    }
    return im.green->green(x, sol.source) + trace;
}

ScatteringDataset ForwardSolver::generate_dataset(std::vector<double>* residuals) const
{
    const Impl& im = *impl_;
    const Acquisition& acq = im.scene.acquisition;
    ScatteringDataset data;
    data.n_receivers = acq.n_receivers;
    data.n_sources = acq.n_sources;
    data.acquisition = acq;
    data.medium = im.scene.medium;
    data.seed = im.scene.seed;
    data.values.assign(std::size_t(acq.n_receivers) * acq.n_sources, cd{0.0, 0.0});
    if (residuals)
        residuals->assign(acq.n_sources, 0.0);

    const int n = im.nv + im.nb;
    if (n == 0)
        return data;

    std::vector<Vec2> sources(acq.n_sources), receivers(acq.n_receivers);
    for (int s = 0; s < acq.n_sources; ++s)
        sources[s] = acq.source(s);
    for (int r = 0; r < acq.n_receivers; ++r)
        receivers[r] = acq.receiver(r);

    std::vector<Vec2> vnodes(im.nv);
    for (int k = 0; k < im.nv; ++k)
        vnodes[k] = im.region.cells[k].node;

    // per-source right-hand sides; the tables evaluate the same expressions
    // solve_source uses, just in parallel chunks
    std::vector<cd> gv, gb;
    if (im.nv > 0)
        gv = im.green->green_table(vnodes, sources);
    if (im.nb > 0)
        gb = im.green->green_table(im.bd.y, sources);

    // receiver kernels, shared by every source
    std::vector<cd> pk(std::size_t(acq.n_receivers) * std::max(im.nb, 1));
    std::vector<cd> gk(std::size_t(acq.n_receivers) * std::max(im.nv, 1));
    if (im.nv > 0) {
        const auto table = im.green->green_table(receivers, vnodes);
        std::copy(table.begin(), table.end(), gk.begin());
    }
    if (im.nb > 0) {
        parallel_for(std::size_t(acq.n_receivers) * im.nb,
                     [&](std::size_t lo, std::size_t hi) {
                         for (std::size_t idx = lo; idx < hi; ++idx) {
                             const int r = static_cast<int>(idx / im.nb);
                             const int j = static_cast<int>(idx % im.nb);
                             pk[idx] = im.boundary_kernel(receivers[r], j);
                         }
                     });
    }

    parallel_for(static_cast<std::size_t>(acq.n_sources),
                 [&](std::size_t lo, std::size_t hi) {
                     Eigen::VectorXcd rhs(n);
                     for (std::size_t s = lo; s < hi; ++s) {
                         for (int m = 0; m < im.nv; ++m)
                             rhs(m) = gv[std::size_t(m) * acq.n_sources + s];
                         for (int i = 0; i < im.nb; ++i)
                             rhs(im.nv + i) = -gb[std::size_t(i) * acq.n_sources + s];
                         ForwardSolution sol;
                         try {
                             sol = im.solve_from_rhs(sources[s], rhs);
                         } catch (const SolverFailure& e) {
                             std::ostringstream msg;
                             msg << e.what() << " (source index " << s << ")";
                             throw SolverFailure(msg.str());
                         }
                         if (residuals)
                             (*residuals)[s] = sol.linear_residual;
                         for (int r = 0; r < acq.n_receivers; ++r)
                             data.at(r, static_cast<int>(s)) = im.contract(
                                 pk.data() + std::size_t(r) * im.nb, sol.density.data(),
                                 gk.data() + std::size_t(r) * im.nv,
                                 sol.field_on_region.data());
                     }
                 });
    return data;
}

ScatteringDataset add_noise(const ScatteringDataset& data, double tau, std::uint64_t seed)
{
    if (tau < 0.0)
        throw std::domain_error("noise level tau must be nonnegative");
    ScatteringDataset out = data;
    out.noise_tau = tau;
    out.seed = seed;
    if (tau == 0.0)
        return out;

    // real and imaginary perturbations come in pairs from the shared stream
    const auto draws = seeded_normals(seed, 2 * data.values.size());
    std::vector<cd> lambda(data.values.size());
    double lnorm2 = 0.0, vnorm2 = 0.0;
    for (std::size_t idx = 0; idx < lambda.size(); ++idx) {
        lambda[idx] = {draws[2 * idx], draws[2 * idx + 1]};
        lnorm2 += std::norm(lambda[idx]);
        vnorm2 += std::norm(data.values[idx]);
    }
    if (lnorm2 == 0.0 || vnorm2 == 0.0)
        return out;

    const double scale = tau * std::sqrt(vnorm2 / lnorm2);
    for (std::size_t idx = 0; idx < lambda.size(); ++idx)
        out.values[idx] += scale * lambda[idx];
    return out;
}

} // namespace rtm
