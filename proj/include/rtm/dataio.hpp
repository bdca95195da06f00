// dataio.hpp: plain-text persistence for the pipeline, plus the seeded
// normal draws behind the noise model.  Every writer is deterministic byte
// for byte, and every numeric field is written with enough digits that a
// write/read round trip reproduces the doubles exactly.
#ifndef RTM_DATAIO_HPP
#define RTM_DATAIO_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtm/forward.hpp"
#include "rtm/geometry.hpp"
#include "rtm/imaging.hpp"

namespace rtm {

// Raised when a file being read is not in the expected format: wrong or
// missing version marker, malformed numbers, shape disagreements.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Run configuration

// A Scene plus where to put the outputs; everything a pipeline run needs.
struct RunConfig {
    Scene scene;
    std::string output_dir = "out";
};

// The documented defaults: flat interface, no obstacle, kappa1 = 10,
// kappa2 = 5, measurement circle R = 100 with 1024 sources and receivers.
RunConfig default_config();

// Applies `key = value` lines on top of a base config (defaults when
// omitted), so a file only needs to mention what it changes.  `#` starts a
// comment.  Recognized keys: interface.kind, interface.params,
// obstacle.kind (none to remove), obstacle.params, medium.kappa1,
// medium.kappa2, acquisition.R, acquisition.ns, acquisition.nr, grid.x0,
// grid.x1, grid.y0, grid.y1, grid.nx, grid.ny, noise.tau, seed,
// output_dir.  Throws std::invalid_argument naming the offending key or
// line for unknown keys, malformed numbers, or inconsistent shape lists.
RunConfig parse_config(const std::string& text, const RunConfig& base);
RunConfig parse_config(const std::string& text);

// Inverse of parse_config up to comments: emits every key in a fixed order
// with 17 significant digits.
std::string format_config(const RunConfig& config);

// ---------------------------------------------------------------------------
// Dataset files

// Writes the near-field matrix as text: a version marker, one metadata
// header line, then one `r s Re Im` line per entry, receivers outermost.
void write_dataset(const ScatteringDataset& data, std::ostream& out);
void write_dataset(const ScatteringDataset& data, const std::string& path);

// Reads the format back; throws FormatError on version, shape, index
// sequence, or number-parse problems (messages carry the line number).
ScatteringDataset read_dataset(std::istream& in);
ScatteringDataset read_dataset(const std::string& path);

// ---------------------------------------------------------------------------
// Indicator files

// Text matrix: first line `nx ny x0 x1 y0 y1`, then ny rows of nx reals in
// order of increasing y.  The reader recovers grid and values; acquisition
// metadata is not part of this format.
void write_indicator(const IndicatorField& field, std::ostream& out);
void write_indicator(const IndicatorField& field, const std::string& path);
IndicatorField read_indicator(std::istream& in);
IndicatorField read_indicator(const std::string& path);

// Binary 8-bit PGM of the normalized field, maxval 255, row 0 at the top of
// the y-range.  Throws std::domain_error for a constant field, which has no
// normalization.
void write_pgm(const IndicatorField& field, std::ostream& out);
void write_pgm(const IndicatorField& field, const std::string& path);

// ---------------------------------------------------------------------------
// Random draws and verification reports

// n standard normal draws by Box-Muller over a fixed counter-based uniform
// generator: platform-independent, and the same (seed, index) always gives
// the same number.  The noise model draws its perturbations from this
// stream.
std::vector<double> seeded_normals(std::uint64_t seed, std::size_t n);

// One row of a verification table.
struct VerificationRow {
    std::string check;
    std::string params;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Aligned plain-text table `check | params | residual | threshold | pass`.
std::string format_report(const std::vector<VerificationRow>& rows);

bool all_pass(const std::vector<VerificationRow>& rows);

} // namespace rtm

#endif
