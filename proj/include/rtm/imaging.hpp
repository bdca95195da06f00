// imaging.hpp: reverse-time-migration indicator on a sampling grid.
// The indicator cross-correlates back-propagated receiver data with
// re-emitted source fields, both propagated with the two-layer Green's
// function, and takes the negative imaginary part.  Peaks of the resulting
// real field mark the interface perturbation and the buried obstacle.
#ifndef RTM_IMAGING_HPP
#define RTM_IMAGING_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "rtm/forward.hpp"
#include "rtm/geometry.hpp"
#include "rtm/layered_green.hpp"

namespace rtm {

// Real-valued indicator sampled on a grid, with enough metadata to
// reconstruct where the numbers came from.  values is row-major with index
// j * nx + i, rows ordered by increasing y, matching SamplingGrid.
struct IndicatorField {
    SamplingGrid grid;
    std::vector<double> values;
    Acquisition acquisition;
    MediumConfig medium;
    double noise_tau = 0.0;
    std::uint64_t seed = 0;

    double& at(int i, int j) { return values[std::size_t(j) * grid.nx + i]; }
    double at(int i, int j) const { return values[std::size_t(j) * grid.nx + i]; }
};

// Migration indicator of the dataset over the grid:
//
//   Ind(z) = -Im{ (2 pi R / N_s)(2 pi R / N_r) sum_s sum_r
//                 kappa(x_r) kappa(x_s) G(z, x_s) G(z, x_r) conj(V(r, s)) }
//
// where kappa is the wavenumber of the half-plane each source or receiver
// sits in.  The double sum is evaluated per grid point as two contractions,
// receiver sum first, in fixed index order, so repeated calls are
// bit-identical.  Green's function tables over (grid x circle) are built
// once up front; with equal source and receiver counts the two circles
// carry the same points and a single table serves both roles.  Throws
// std::invalid_argument when the dataset shape disagrees with its
// acquisition or the grid reaches outside the measurement circle.
IndicatorField indicator(const ScatteringDataset& data, const SamplingGrid& grid,
                         const GreenEvaluator& green);

// Back-propagated field of one source column,
//
//   W(z, x_s) = -(2 pi R / N_r) sum_r G(z, x_r) conj(V(r, s)),
//
// row-major over the grid.  Diagnostic view of the intermediate migration
// step; note the indicator additionally weights every receiver term by its
// half-plane wavenumber, so summing these plain fields over s does not
// reproduce indicator() while the circle crosses the interface.  Throws
// std::out_of_range for a bad source index.
std::vector<std::complex<double>> back_propagate(const ScatteringDataset& data, int s,
                                                 const SamplingGrid& grid,
                                                 const GreenEvaluator& green);

// Affine rescale of the values onto [0, 1]; grid and metadata pass through.
// The map is increasing, so the location of the maximum is preserved, and
// applying it twice gives the same field bit for bit.  Throws
// std::domain_error when the field is constant and no such map exists.
IndicatorField normalize(const IndicatorField& field);

// Where the indicator peaks and how cleanly, measured against the scene
// geometry.  The reference set is the closed obstacle (boundary plus
// interior) together with the closure of the perturbation region between
// the interface and the line x2 = 0.
struct PeakReport {
    Vec2 location;     // grid node maximizing |value|, first hit wins on ties
    double distance;   // from that node to the reference set; +inf if empty
    double contrast;   // max |value| within 0.5 of the set over max |value|
                       // beyond 1.5; +inf when nothing lies beyond 1.5
};

PeakReport peak_report(const IndicatorField& field, const Scene& scene);

} // namespace rtm

#endif
