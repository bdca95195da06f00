// Forward scattering solver for the layered medium with a buried sound-soft
// obstacle.  The unknown difference field V = u - G is represented through a
// combined double/single layer potential on the obstacle boundary plus a
// contrast volume term over the region where the interface departs from the
// flat line, both built on the layered background kernel.  Collocating that
// representation at the volume nodes and taking its exterior trace on the
// boundary yields one dense linear system whose matrix is independent of the
// source; each point source only changes the right-hand side.
#ifndef RTM_FORWARD_HPP
#define RTM_FORWARD_HPP

#include "rtm/geometry.hpp"
#include "rtm/layered_green.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace rtm {

// Discrete unknowns for one point source: the total field at the volume
// nodes and the combined-field density at the boundary nodes.  Either vector
// may be empty when the scene lacks the corresponding scatterer.
struct ForwardSolution {
    Vec2 source{};
    std::vector<std::complex<double>> field_on_region;
    std::vector<std::complex<double>> density;
    double linear_residual = 0.0; // relative residual of the direct solve
};

// Near-field data matrix V(x_r, x_s), stored receiver-major: entry (r, s)
// lives at values[r * n_sources + s].
struct ScatteringDataset {
    int n_receivers = 0;
    int n_sources = 0;
    std::vector<std::complex<double>> values;
    Acquisition acquisition;
    MediumConfig medium;
    double noise_tau = 0.0;
    std::uint64_t seed = 0;

    std::complex<double>& at(int r, int s) { return values[std::size_t(r) * n_sources + s]; }
    const std::complex<double>& at(int r, int s) const {
        return values[std::size_t(r) * n_sources + s];
    }
};

class ForwardSolver {
public:
    // Discretizes and factorizes immediately: volume cells sized by
    // volume_resolution points per shortest wavelength, boundary_nodes
    // equispaced parameter nodes on the obstacle (must be even).  Throws
    // std::invalid_argument when the obstacle touches the perturbed region
    // or the interface, and SolverFailure if the system is near-singular.
    ForwardSolver(const Scene& scene, const GreenEvaluator& green,
                  int volume_resolution = 6, int boundary_nodes = 64);
    ~ForwardSolver();

    ForwardSolver(const ForwardSolver&) = delete;
    ForwardSolver& operator=(const ForwardSolver&) = delete;

    const Scene& scene() const;
    const PerturbationRegion& region() const;
    double coupling_eta() const;

    // Solves the factorized system for one source position.
    ForwardSolution solve_source(Vec2 x_s) const;

    // Difference field V(x, x_s) radiated by a solved source, for x away
    // from the obstacle boundary and the volume cells.
    std::complex<double> evaluate_difference_field(const ForwardSolution& sol, Vec2 x) const;

    // Total field u = G + V, used for boundary-condition residual checks.
    std::complex<double> evaluate_total_field(const ForwardSolution& sol, Vec2 x) const;

    // Exterior trace of the total field on the obstacle boundary at curve
    // parameter t.  Point evaluation of the layer potential breaks down on
    // the boundary itself, so the trace is taken with the same log-kernel
    // quadrature the solver collocates with, plus trigonometric
    // interpolation of the density between nodes.  This is the quantity the
    // sound-soft condition drives to zero.  Throws std::logic_error when the
    // scene has no obstacle.
    std::complex<double> evaluate_total_trace(const ForwardSolution& sol, double t) const;

    // Solves every source of the scene's acquisition and tabulates V at the
    // receivers.  The receiver kernels are shared across sources; entries
    // match evaluate_difference_field bit for bit.  When residuals is given
    // it receives the relative solve residual per source.
    ScatteringDataset generate_dataset(std::vector<double>* residuals = nullptr) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Additive complex Gaussian noise scaled to a relative level: the
// perturbation is tau * ||V||_F in the Frobenius norm, exactly by
// construction.  The draws come from a counter-based generator, so a given
// (seed, shape) pair yields the same matrix on every platform.  tau = 0
// returns the input unchanged.  Negative tau throws std::domain_error.
ScatteringDataset add_noise(const ScatteringDataset& data, double tau, std::uint64_t seed);

// Raised when the assembled system cannot be solved reliably; carries a
// reciprocal condition estimate in the message.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rtm

#endif
