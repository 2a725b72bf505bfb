#pragma once

#include "motionspc/landmark.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace motionspc {

/// Standard normal draws from std::mt19937_64 via the Box-Muller transform.
///
/// Each uniform is u = ((r >> 11) + 0.5) / 2^53 for one raw 64-bit output r,
/// so u lies strictly inside (0, 1). A pair (u1, u2) yields
/// sqrt(-2 ln u1) cos(2 pi u2) followed by sqrt(-2 ln u1) sin(2 pi u2).
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

struct Burst {
    std::int64_t start_frame = 0;
    std::int64_t duration = 1;
    Vec3 amplitude = Vec3::Zero();
    std::vector<LandmarkId> landmarks;
};

/// A resting pose in normalized image coordinates for all 33 landmarks.
std::map<LandmarkId, Vec3> default_base_pose();

struct SynthSpec {
    std::uint64_t seed = 7;
    std::int64_t n_frames = 1100;
    double fps = LandmarkStream::kDefaultFps;
    LandmarkSelection selection = full_selection();
    std::map<LandmarkId, Vec3> base_pose = default_base_pose();
    Vec3 jitter_std = Vec3::Constant(0.002);
    std::vector<Burst> bursts;
    std::optional<TaskCode> task;
    std::string participant = "synthetic";
};

/// Throws Error(InvalidSpec) naming the violated constraint.
void validate_spec(const SynthSpec& spec);

/// Frame t, landmark i = base_pose[i] + jitter + every active burst. Jitter is
/// drawn for each frame, then each selected landmark in ascending order, then
/// x, y, z, whatever the jitter scale.
LandmarkStream generate(const SynthSpec& spec);

/// Copy of `stream` with `displacement` added at the frame whose index is
/// `frame_index`. Throws Error(FrameOutOfRange), Error(MissingLandmark).
LandmarkStream inject_anomaly(const LandmarkStream& stream, std::int64_t frame_index,
                              const std::map<LandmarkId, Vec3>& displacement);

}  // namespace motionspc
