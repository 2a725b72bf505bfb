#include "motionspc/synth.hpp"

#include "motionspc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace motionspc {

double GaussianSource::uniform() {
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
}

double GaussianSource::normal() {
    if (spare_) {
        const double out = *spare_;
        spare_.reset();
        return out;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

std::map<LandmarkId, Vec3> default_base_pose() {
    // Upright worker facing the camera, roughly centred in the frame.
    static constexpr double pose[LandmarkId::kCount][3] = {
        {0.500, 0.180, -0.30},  // nose
        {0.490, 0.165, -0.28}, {0.485, 0.165, -0.28}, {0.480, 0.166, -0.28},
        {0.510, 0.165, -0.28}, {0.515, 0.165, -0.28}, {0.520, 0.166, -0.28},
        {0.470, 0.175, -0.18}, {0.530, 0.175, -0.18},
        {0.490, 0.200, -0.26}, {0.510, 0.200, -0.26},
        {0.440, 0.290, -0.12}, {0.560, 0.290, -0.12},  // shoulders
        {0.420, 0.400, -0.10}, {0.580, 0.400, -0.10},  // elbows
        {0.450, 0.500, -0.15}, {0.550, 0.500, -0.15},  // wrists
        {0.455, 0.525, -0.16}, {0.545, 0.525, -0.16},
        {0.460, 0.530, -0.17}, {0.540, 0.530, -0.17},
        {0.465, 0.515, -0.16}, {0.535, 0.515, -0.16},
        {0.465, 0.560, 0.00},  {0.535, 0.560, 0.00},   // hips
        {0.460, 0.730, 0.02},  {0.540, 0.730, 0.02},   // knees
        {0.460, 0.890, 0.10},  {0.540, 0.890, 0.10},
        {0.455, 0.910, 0.11},  {0.545, 0.910, 0.11},
        {0.470, 0.930, 0.02},  {0.530, 0.930, 0.02},
    };
    std::map<LandmarkId, Vec3> out;
    for (int i = 0; i < LandmarkId::kCount; ++i) out.emplace(LandmarkId(i), Vec3(pose[i][0], pose[i][1], pose[i][2]));
    return out;
}

void validate_spec(const SynthSpec& spec) {
    auto fail = [](const std::string& why) { return Error(ErrorCode::InvalidSpec, why); };
    if (spec.n_frames < 2) throw fail("n_frames must be at least 2");
    if (!std::isfinite(spec.fps) || spec.fps <= 0.0) throw fail("fps must be positive");
    if (!spec.jitter_std.allFinite() || (spec.jitter_std.array() < 0.0).any()) {
        throw fail("jitter_std must be non-negative");
    }
    for (LandmarkId id : spec.selection.ids()) {
        if (!spec.base_pose.count(id)) throw fail("base_pose lacks landmark " + std::to_string(id.index()));
    }
    for (const auto& b : spec.bursts) {
        if (b.duration < 1) throw fail("burst duration must be at least 1");
        if (b.start_frame < 0 || b.start_frame + b.duration > spec.n_frames) {
            throw fail("burst [" + std::to_string(b.start_frame) + ", " + std::to_string(b.start_frame + b.duration) +
                       ") leaves [0, " + std::to_string(spec.n_frames) + ")");
        }
        if (!b.amplitude.allFinite()) throw fail("burst amplitude must be finite");
        for (LandmarkId id : b.landmarks) {
            if (!spec.selection.contains(id)) {
                throw fail("burst landmark " + std::to_string(id.index()) + " is not generated");
            }
        }
    }
}

LandmarkStream generate(const SynthSpec& spec) {
    validate_spec(spec);
    GaussianSource noise(spec.seed);
    std::vector<LandmarkFrame> frames;
    frames.reserve(static_cast<std::size_t>(spec.n_frames));
    for (std::int64_t t = 0; t < spec.n_frames; ++t) {
        std::vector<LandmarkPoint> points;
        points.reserve(spec.selection.size());
        for (LandmarkId id : spec.selection.ids()) {
            Vec3 position = spec.base_pose.at(id);
            for (int a = 0; a < 3; ++a) position[a] += spec.jitter_std[a] * noise.normal();
            for (const auto& b : spec.bursts) {
                if (t < b.start_frame || t >= b.start_frame + b.duration) continue;
                for (LandmarkId hit : b.landmarks)
                    if (hit == id) position += b.amplitude;
            }
            points.push_back({id, position, std::nullopt});
        }
        frames.emplace_back(t, std::move(points));
    }
    StreamMetadata meta;
    meta.task = spec.task;
    meta.participant = spec.participant;
    meta.source = "synthetic:mt19937_64:seed=" + std::to_string(spec.seed);
    return LandmarkStream(spec.fps, std::move(frames), std::move(meta));
}

LandmarkStream inject_anomaly(const LandmarkStream& stream, std::int64_t frame_index,
                              const std::map<LandmarkId, Vec3>& displacement) {
    std::vector<LandmarkFrame> frames = stream.frames();
    auto it = std::find_if(frames.begin(), frames.end(), [&](const auto& f) { return f.frame_index() == frame_index; });
    if (it == frames.end()) {
        throw Error(ErrorCode::FrameOutOfRange, "no frame with index " + std::to_string(frame_index));
    }
    std::vector<LandmarkPoint> points = it->points();
    for (const auto& [id, delta] : displacement) {
        auto p = std::find_if(points.begin(), points.end(), [&](const auto& q) { return q.id == id; });
        if (p == points.end()) {
            throw Error(ErrorCode::MissingLandmark, "frame " + std::to_string(frame_index) + " lacks landmark " +
                                                        std::to_string(id.index()));
        }
        p->position += delta;
    }
    *it = LandmarkFrame(frame_index, std::move(points), it->filled());
    return LandmarkStream(stream.fps(), std::move(frames), stream.metadata());
}

}  // namespace motionspc
