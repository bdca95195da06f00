// Spectral evaluation of the two-layer Green's function.
//
// Every value is assembled from half-line integrals of the form
//
//   integral over xi in [0, inf) of  C(beta1, beta2) * cos(xi*Delta) * E(xi)
//
// with beta_j = sqrt(kappa_j^2 - xi^2) on the branch with Im beta_j >= 0,
// Delta the horizontal offset, and E an exponential in the vertical
// coordinates that decays once xi passes the larger wavenumber.  The
// integrand has branch points at xi = kappa_j on the real axis; the contour
// drops to depth h below the axis, runs under both branch points, and
// returns to the axis at xi_b past them:
//
//   0 -> -ih -> xi_b - ih -> xi_b -> two rays at +-45 degrees
//
// The principal square root is the physical branch everywhere up to xi_b:
// between the axis and the detour the argument kappa^2 - xi^2 stays in the
// closed upper half-plane.  The detour depth is capped at 3/|Delta| so the
// folded cosine grows by at most e^3.  No poles exist on or between the
// contours: both betas have nonnegative real and imaginary parts there, so
// beta1 + beta2 can only vanish where both wavenumbers coincide with xi, in
// which case the reflection coefficient vanishes identically first.
//
// Past xi_b the cosine is split into its two exponential halves and each is
// carried along a ray turned 45 degrees into its decaying half-plane, with
// the betas continued as i*sqrt(xi^2 - kappa^2); that continuation is
// analytic in both wedges (its branch cuts are the segment between the
// branch points and the imaginary axis) and matches the physical boundary
// value on the real tail.  On the rays the combined phase advances a bounded
// number of radians before the envelope cuts off, so the work per point does
// not grow when the vertical offsets shrink.
//
// Each leg is integrated by adaptive Gauss panels (16-point value, 8-point
// error reference), seeded densely enough to resolve the known oscillation
// rates.
#include "rtm/layered_green.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rtm/bessel.hpp"
#include "rtm/parallel.hpp"

namespace rtm {
namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr cd kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Gauss-Legendre rules, generated once by Newton iteration on the Legendre
// recurrence (accurate to ~1e-15, plenty below the panel error estimator).

struct GaussRule {
    int n = 0;
    std::array<double, 16> x{};
    std::array<double, 16> w{};
};

GaussRule make_rule(int n) {
    GaussRule rule;
    rule.n = n;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double step = p0 / dp;
            t -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        rule.x[i] = t;
        rule.x[n - 1 - i] = -t;
        rule.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return rule;
}

const GaussRule& rule8() {
    static const GaussRule r = make_rule(8);
    return r;
}
const GaussRule& rule16() {
    static const GaussRule r = make_rule(16);
    return r;
}

// ---------------------------------------------------------------------------
// Integrand on the contour

struct SpectralKernel {
    bool cross = false;  // points straddle the line
    int deriv = 0;       // 0 value, 1 d/dx1, 2 d/dx2
    double ka = 0.0;     // same side: wavenumber of the shared half-plane
    double kb = 0.0;     // same side: the other wavenumber; cross: ka upper, kb lower
    double delta = 0.0;  // x1 - z1
    double ha = 0.0;     // same side: |x2| + |z2|; cross: height of the upper point
    double hb = 0.0;     // cross only: depth of the lower point
    int d2_beta = 0;     // which beta multiplies a vertical derivative (0: ka, 1: kb)
    double d2_sign = 1.0;
    // 0 evaluates the folded form with cos(xi*Delta); +1 / -1 evaluate the
    // exp(+-i*xi*|Delta|)/2 halves with beta_j = i*sqrt(xi^2 - kappa_j^2), the
    // continuation that is analytic in the wedges |arg(xi - xi_b)| <= pi/4 of
    // the right half-plane and matches the physical branch on the real tail.
    // The +1 half decays when the ray turns into the upper half-plane, the -1
    // half when it turns down.
    int tail = 0;

    cd operator()(cd xi) const {
        const cd xi2 = xi * xi;
        cd ba, bb;
        if (tail == 0) {
            ba = std::sqrt(cd(ka * ka, 0.0) - xi2);
            bb = std::sqrt(cd(kb * kb, 0.0) - xi2);
        } else {
            ba = kI * std::sqrt(xi2 - cd(ka * ka, 0.0));
            bb = kI * std::sqrt(xi2 - cd(kb * kb, 0.0));
        }
        cd coeff, expo;
        if (!cross) {
            coeff = (ba - bb) / ((ba + bb) * ba);
            expo = std::exp(kI * ba * ha);
        } else {
            coeff = 2.0 / (ba + bb);
            expo = std::exp(kI * (ba * ha + bb * hb));
        }
        if (deriv == 2) coeff *= cd(0.0, d2_sign) * (d2_beta == 0 ? ba : bb);
        cd ang;
        if (tail == 0) {
            ang = (deriv == 1) ? cd(-1.0, 0.0) * xi * std::sin(xi * delta)
                               : std::cos(xi * delta);
        } else {
            // cos(xi*D) = (e^{i xi |D|} + e^{-i xi |D|})/2 and
            // -xi*sin(xi*D) = sgn(D)*(i xi/2)(e^{i xi |D|} - e^{-i xi |D|})
            const double sgn = delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0);
            const cd phase =
                0.5 * std::exp(cd(0.0, tail > 0 ? std::fabs(delta) : -std::fabs(delta)) * xi);
            ang = (deriv == 1) ? cd(0.0, sgn * (tail > 0 ? 1.0 : -1.0)) * xi * phase : phase;
        }
        return coeff * ang * expo;
    }
};

// ---------------------------------------------------------------------------
// Adaptive panels along a straight complex segment

template <class F>
cd panel_sum(const F& f, cd a, cd b, const GaussRule& rule) {
    const cd mid = 0.5 * (a + b);
    const cd half = 0.5 * (b - a);
    cd acc{0.0, 0.0};
    for (int i = 0; i < rule.n; ++i) acc += rule.w[i] * f(mid + half * rule.x[i]);
    return half * acc;
}

struct Segment {
    cd a, b;
    double tol;
    int depth;
};

template <class F>
cd integrate_leg(const F& f, cd a, cd b, double tol, int init_panels, int& budget,
                 double& unresolved) {
    cd total{0.0, 0.0};
    std::vector<Segment> work;
    work.reserve(static_cast<std::size_t>(init_panels) + 64);
    const cd step = (b - a) / static_cast<double>(init_panels);
    for (int i = init_panels - 1; i >= 0; --i) {
        work.push_back({a + static_cast<double>(i) * step, a + static_cast<double>(i + 1) * step,
                        tol / init_panels, 0});
    }
    while (!work.empty()) {
        const Segment seg = work.back();
        work.pop_back();
        const cd fine = panel_sum(f, seg.a, seg.b, rule16());
        const cd coarse = panel_sum(f, seg.a, seg.b, rule8());
        budget -= 24;
        const double err = std::abs(fine - coarse);
        if (err <= seg.tol || seg.depth >= 48 || budget <= 0) {
            total += fine;
            if (err > seg.tol) unresolved += err;
        } else {
            const cd mid = 0.5 * (seg.a + seg.b);
            work.push_back({mid, seg.b, 0.5 * seg.tol, seg.depth + 1});
            work.push_back({seg.a, mid, 0.5 * seg.tol, seg.depth + 1});
        }
    }
    return total;
}

int clamp_panels(double estimate, int lo, int hi) {
    if (!(estimate > lo)) return lo;
    if (estimate > hi) return hi;
    return static_cast<int>(estimate);
}

// Half-line integral of the kernel along the detoured contour.
cd contour_integral(const SpectralKernel& kernel, const SommerfeldParams& params) {
    const double kmin = std::min(kernel.ka, kernel.kb);
    const double kmax = std::max(kernel.ka, kernel.kb);
    const double absd = std::fabs(kernel.delta);
    const double h = std::min(params.detour_fraction * kmin, 3.0 / std::max(absd, 1e-300));
    const double xi_b = kmax + 0.5 * kmin;

    // amplitude model of the tail integrand for choosing the ray length
    int p;
    double amp;
    double hsum;
    if (!kernel.cross) {
        p = 3;
        amp = std::fabs(kernel.ka * kernel.ka - kernel.kb * kernel.kb) / 4.0 + 1e-30;
        hsum = kernel.ha;
    } else {
        p = 1;
        amp = 1.0;
        hsum = kernel.ha + kernel.hb;
    }
    if (kernel.deriv != 0) p -= 1;
    amp *= 4.0;  // safety margin over the asymptotic coefficient

    int budget = params.node_budget;
    double unresolved = 0.0;
    const double leg_tol = 0.25 * params.tolerance;
    cd total{0.0, 0.0};

    // leg A: 0 down to -ih
    total += integrate_leg(kernel, cd(0.0, 0.0), cd(0.0, -h), leg_tol, 2, budget, unresolved);
    // leg B: horizontal run under the branch points; oscillation comes from
    // the cosine (rate |Delta|) and from Re beta sweeping 0..kappa (rate ~
    // heights * kappa)
    {
        const double periods = (absd * xi_b + 1.3 * hsum * kmax) / (2.0 * kPi);
        const int init = clamp_panels(std::ceil(periods / 2.5), 2, 2000);
        total += integrate_leg(kernel, cd(0.0, -h), cd(xi_b, -h), leg_tol, init, budget,
                               unresolved);
    }
    // leg C: back up to the axis
    total += integrate_leg(kernel, cd(xi_b, -h), cd(xi_b, 0.0), leg_tol, 2, budget, unresolved);
    // Tail past xi_b.  Splitting the cosine into exponential halves lets each
    // half turn 45 degrees into the half-plane where its phase decays, so the
    // number of oscillations to resolve stays O(1) no matter how small the
    // heights are.  Along a ray xi = xi_b + t*exp(+-i*pi/4) the envelope
    // shrinks like exp(-rate*t) with rate = (|Delta| + heights)/sqrt(2); the
    // ray is cut where the remaining integral is below a twentieth of the
    // requested tolerance, taking whichever of the exponential and algebraic
    // envelopes gives up first.  When the rate is tiny the ray gets very
    // long and the integrand decays algebraically over several decades, so
    // the panels are laid out in doubling blocks rather than uniformly.
    {
        const double rate = (absd + hsum) * std::sqrt(0.5);
        if (!(rate > 1e-14)) {
            throw QuadratureFailure("spectral tail has no decay channel", rate);
        }
        const double tail_target = 0.05 * params.tolerance;
        double t_end =
            1.2 * std::max(10.0 / rate,
                           std::log(std::max(amp / (rate * tail_target), 10.0)) / rate);
        if (p >= 2) {
            const double xi_alg =
                std::pow(amp / ((p - 1) * tail_target), 1.0 / (p - 1));
            t_end = std::min(t_end, std::max(1.5 * xi_alg, 10.0));
        }
        SpectralKernel half = kernel;
        for (const int dir : {1, -1}) {
            half.tail = dir;
            const cd ray = std::polar(1.0, dir * 0.25 * kPi);
            double a_t = 0.0;
            double b_t = std::min(t_end, std::max(1.0, kmax));
            for (int block = 0; block < 64 && a_t < t_end; ++block) {
                const int init = clamp_panels(
                    std::ceil(rate * (b_t - a_t) / (2.0 * kPi * 2.5)) + 1, 1, 64);
                total += integrate_leg(half, cd(xi_b, 0.0) + a_t * ray,
                                       cd(xi_b, 0.0) + b_t * ray, 0.125 * leg_tol, init,
                                       budget, unresolved);
                a_t = b_t;
                b_t = std::min(t_end, 2.0 * b_t);
            }
        }
    }

    if (unresolved > params.tolerance) {
        throw QuadratureFailure("adaptive contour integration exhausted its node budget",
                                unresolved);
    }
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// Free-space kernel

std::complex<double> free_space_green(double kappa, Vec2 x, Vec2 z) {
    const double r = norm(x - z);
    if (r == 0.0) throw std::domain_error("free_space_green: coincident points");
    return 0.25 * kI * hankel1_0(kappa * r);
}

std::array<std::complex<double>, 2> free_space_gradient(double kappa, Vec2 x, Vec2 z) {
    const double r = norm(x - z);
    if (r == 0.0) throw std::domain_error("free_space_gradient: coincident points");
    const cd factor = -0.25 * kI * kappa * hankel1_1(kappa * r) / r;
    return {factor * (x.x - z.x), factor * (x.y - z.y)};
}

// ---------------------------------------------------------------------------
// GreenEvaluator

GreenEvaluator::GreenEvaluator(MediumConfig medium, SommerfeldParams params)
    : medium_(medium), params_(params) {
    if (!(medium_.kappa1 > 0.0) || !(medium_.kappa2 > 0.0)) {
        throw std::invalid_argument("GreenEvaluator: wavenumbers must be positive");
    }
}

// Shared setup for the value and both gradient components.  deriv_component:
// -1 value, 0 horizontal derivative, 1 vertical derivative.
std::complex<double> GreenEvaluator::spectral_part(Vec2 x, Vec2 z, int deriv_component) const {
    const bool x_upper = x.y >= 0.0;
    const bool z_upper = z.y >= 0.0;

    SpectralKernel kernel;
    kernel.delta = x.x - z.x;
    kernel.deriv = deriv_component + 1;
    if (x_upper == z_upper) {
        if (medium_.kappa1 == medium_.kappa2) return {0.0, 0.0};  // reflection vanishes
        kernel.cross = false;
        kernel.ka = x_upper ? medium_.kappa1 : medium_.kappa2;
        kernel.kb = x_upper ? medium_.kappa2 : medium_.kappa1;
        kernel.ha = std::fabs(x.y) + std::fabs(z.y);
        kernel.d2_beta = 0;
        kernel.d2_sign = x_upper ? 1.0 : -1.0;
    } else {
        kernel.cross = true;
        kernel.ka = medium_.kappa1;
        kernel.kb = medium_.kappa2;
        kernel.ha = x_upper ? x.y : z.y;
        kernel.hb = x_upper ? -z.y : -x.y;
        kernel.d2_beta = x_upper ? 0 : 1;
        kernel.d2_sign = x_upper ? 1.0 : -1.0;
    }
    // (i/4pi) * 2 from folding the full-line representation onto [0, inf)
    return (kI / (2.0 * kPi)) * contour_integral(kernel, params_);
}

std::complex<double> GreenEvaluator::green(Vec2 x, Vec2 z) const {
    if (x.x == z.x && x.y == z.y) throw std::domain_error("green: coincident points");
    const bool same_side = (x.y >= 0.0) == (z.y >= 0.0);
    cd value = spectral_part(x, z, -1);
    if (same_side) {
        const double ks = x.y >= 0.0 ? medium_.kappa1 : medium_.kappa2;
        value += free_space_green(ks, x, z);
    }
    return value;
}

std::complex<double> GreenEvaluator::green_scattered(Vec2 x, Vec2 z) const {
    return spectral_part(x, z, -1);
}

std::array<std::complex<double>, 2> GreenEvaluator::green_gradient(Vec2 x, Vec2 z) const {
    if (x.x == z.x && x.y == z.y) throw std::domain_error("green_gradient: coincident points");
    std::array<cd, 2> grad{spectral_part(x, z, 0), spectral_part(x, z, 1)};
    if ((x.y >= 0.0) == (z.y >= 0.0)) {
        const double ks = x.y >= 0.0 ? medium_.kappa1 : medium_.kappa2;
        const auto free_grad = free_space_gradient(ks, x, z);
        grad[0] += free_grad[0];
        grad[1] += free_grad[1];
    }
    return grad;
}

std::array<std::complex<double>, 2> GreenEvaluator::green_scattered_gradient(Vec2 x, Vec2 z) const {
    return {spectral_part(x, z, 0), spectral_part(x, z, 1)};
}

std::vector<std::complex<double>> GreenEvaluator::green_table(const std::vector<Vec2>& xs,
                                                              const std::vector<Vec2>& zs) const {
    std::vector<cd> table(xs.size() * zs.size());
    parallel_for(table.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            table[idx] = green(xs[idx / zs.size()], zs[idx % zs.size()]);
        }
    });
    return table;
}

double GreenEvaluator::verify_helmholtz_kirchhoff(Vec2 x, Vec2 z, double R, int n_quad) const {
    if (norm(x) >= R || norm(z) >= R) {
        throw std::domain_error("verify_helmholtz_kirchhoff: points must lie inside the circle");
    }
    if (n_quad < 8) throw std::invalid_argument("verify_helmholtz_kirchhoff: too few nodes");

    // Half-step offset keeps nodes off the interface line, where the
    // integrand has a curvature kink; the trapezoid rule then converges at
    // its regular second order.
    std::vector<cd> contrib(n_quad);
    parallel_for(static_cast<std::size_t>(n_quad), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double theta = 2.0 * kPi * (k + 0.5) / n_quad;
            const Vec2 nu{std::cos(theta), std::sin(theta)};
            const Vec2 xi{R * nu.x, R * nu.y};
            const cd gx = green(xi, x);
            const cd gz = green(xi, z);
            const auto dgx = green_gradient(xi, x);
            const auto dgz = green_gradient(xi, z);
            const cd dn_x = dgx[0] * nu.x + dgx[1] * nu.y;
            const cd dn_z = dgz[0] * nu.x + dgz[1] * nu.y;
            contrib[k] = std::conj(gx) * dn_z - std::conj(dn_x) * gz;
        }
    });
    cd integral{0.0, 0.0};
    for (const cd& c : contrib) integral += c;  // fixed order
    integral *= 2.0 * kPi * R / n_quad;

    const cd target = 2.0 * kI * std::imag(green(x, z));
    return std::abs(integral - target);
}

std::complex<double> GreenEvaluator::zeta_remainder(Vec2 x, Vec2 z, double R, int n_quad) const {
    if (norm(x) >= R || norm(z) >= R) {
        throw std::domain_error("zeta_remainder: points must lie inside the circle");
    }
    if (n_quad < 8) throw std::invalid_argument("zeta_remainder: too few nodes");

    std::vector<cd> contrib(n_quad);
    parallel_for(static_cast<std::size_t>(n_quad), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double theta = 2.0 * kPi * (k + 0.5) / n_quad;
            const Vec2 xi{R * std::cos(theta), R * std::sin(theta)};
            contrib[k] = medium_.kappa_at(xi.y) * std::conj(green(x, xi)) * green(xi, z);
        }
    });
    cd integral{0.0, 0.0};
    for (const cd& c : contrib) integral += c;
    integral *= 2.0 * kPi * R / n_quad;
    return integral - std::imag(green(x, z));
}

} // namespace rtm
