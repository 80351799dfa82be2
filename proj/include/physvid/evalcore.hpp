#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "physvid/image.hpp"

namespace physvid::eval {

// Foreground threshold on the per-pixel distance to the median background.
inline constexpr double kForegroundThreshold = 0.15;
inline constexpr int kMinForegroundArea = 10;  // pixels

struct MotionTrack {
    // Per-frame foreground centroids in pixel coordinates; nullopt where the
    // foreground area is below kMinForegroundArea.
    std::vector<std::optional<std::array<double, 2>>> centroids;
    bool direction_defined = false;  // net displacement above the noise floor

    int first_valid() const;
    int last_valid() const;
};

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Median-background subtraction; centroid weighted by difference magnitude.
MotionTrack track_centroid(const Video& video);

// Angle in degrees ([0,180]) between the net first-to-last centroid
// displacement (world orientation, y up) and the target direction.
double direction_error(const Video& video, double target_angle);

// Scalar motion proxies used by monotonicity probes. These segment bodies
// against the scene's two dominant colors (background and floor, estimated
// from frame 0) instead of the temporal median, so bodies that come to rest
// stay visible. Each returns nullopt when the measurement is undefined.
std::optional<double> slide_distance(const Video& video);      // net |displacement|, px
std::optional<double> rebound_apex(const Video& video);        // post-drop apex height, px
std::optional<double> squash_ratio(const Video& video);        // min vertical/horizontal spread
std::optional<double> max_displacement(const Video& video);    // max |displacement| over frames

enum class ProbeAttribute { Friction, Restitution, Deformation, Force };

// Proxy + expected ordering for one attribute: slide distance decreasing in
// friction, apex increasing in restitution, squash decreasing in
// deformability... wait, squash_ratio decreases as deformability increases.
std::optional<double> probe_proxy(ProbeAttribute attr, const Video& video);
bool probe_increasing(ProbeAttribute attr);

struct ProbeResult {
    double ordered_fraction = 0.0;
    int counted = 0;
    int excluded = 0;
};

// Fraction of seed-matched level triples whose proxies are strictly ordered
// in the attribute's expected direction. `source` yields the clip for one
// (level, seed) pair, or nullopt to exclude the whole triple.
ProbeResult monotonicity_probe(
    ProbeAttribute attr, const std::vector<double>& levels,
    const std::vector<uint64_t>& seeds,
    const std::function<std::optional<Video>(double level, uint64_t seed)>& source);

}  // namespace physvid::eval
