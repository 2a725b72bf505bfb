#include "motionspc/landmark.hpp"

#include "motionspc/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace motionspc {

namespace {

constexpr std::array<std::string_view, LandmarkId::kCount> kLandmarkNames = {
    "nose",           "left_eye_inner",  "left_eye",        "left_eye_outer", "right_eye_inner",
    "right_eye",      "right_eye_outer", "left_ear",        "right_ear",      "mouth_left",
    "mouth_right",    "left_shoulder",   "right_shoulder",  "left_elbow",     "right_elbow",
    "left_wrist",     "right_wrist",     "left_pinky",      "right_pinky",    "left_index",
    "right_index",    "left_thumb",      "right_thumb",     "left_hip",       "right_hip",
    "left_knee",      "right_knee",      "left_ankle",      "right_ankle",    "left_heel",
    "right_heel",     "left_foot_index", "right_foot_index",
};

std::vector<LandmarkId> ids_of(std::initializer_list<int> indices) {
    std::vector<LandmarkId> out;
    for (int i : indices) out.emplace_back(i);
    return out;
}

}  // namespace

LandmarkId::LandmarkId(int index) : index_(index) {
    if (index < 0 || index >= kCount) {
        throw Error(ErrorCode::InvalidArgument, "landmark index " + std::to_string(index) + " outside [0, 32]");
    }
}

std::string_view LandmarkId::name() const noexcept { return kLandmarkNames[static_cast<std::size_t>(index_)]; }

char axis_char(Axis axis) {
    switch (axis) {
        case Axis::X: return 'x';
        case Axis::Y: return 'y';
        case Axis::Z: return 'z';
    }
    return '?';
}

// ---------------------------------------------------------------------------

std::string TaskCode::to_string() const {
    std::string out(3, ' ');
    out[0] = size == ObjectSize::Large ? 'L' : 'S';
    out[1] = guidance == Guidance::Guided ? 'G' : 'U';
    out[2] = action == Action::Insert ? 'I' : 'P';
    return out;
}

TaskCode parse_task_code(std::string_view code) {
    auto fail = [&](const std::string& why) {
        return Error(ErrorCode::InvalidTaskCode, "'" + std::string(code) + "': " + why);
    };
    if (code.size() != 3) throw fail("expected exactly 3 characters");

    TaskCode task{};
    switch (code[0]) {
        case 'L': task.size = ObjectSize::Large; break;
        case 'S': task.size = ObjectSize::Small; break;
        default: throw fail("size must be L or S");
    }
    switch (code[1]) {
        case 'G': task.guidance = Guidance::Guided; break;
        case 'U': task.guidance = Guidance::Unguided; break;
        default: throw fail("guidance must be G or U");
    }
    switch (code[2]) {
        case 'I': task.action = Action::Insert; break;
        case 'P': task.action = Action::Place; break;
        default: throw fail("action must be I or P");
    }
    return task;
}

std::array<TaskCode, 8> all_task_codes() {
    std::array<TaskCode, 8> out{};
    std::size_t k = 0;
    for (auto size : {ObjectSize::Large, ObjectSize::Small})
        for (auto guidance : {Guidance::Guided, Guidance::Unguided})
            for (auto action : {Action::Insert, Action::Place}) out[k++] = TaskCode{size, guidance, action};
    return out;
}

// ---------------------------------------------------------------------------

LandmarkFrame::LandmarkFrame(std::int64_t frame_index, std::vector<LandmarkPoint> points,
                             std::vector<LandmarkId> filled)
    : frame_index_(frame_index), points_(std::move(points)), filled_(std::move(filled)) {
    if (frame_index_ < 0) {
        throw Error(ErrorCode::InvalidArgument, "negative frame index " + std::to_string(frame_index_));
    }
    std::sort(points_.begin(), points_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    auto dup = std::adjacent_find(points_.begin(), points_.end(),
                                  [](const auto& a, const auto& b) { return a.id == b.id; });
    if (dup != points_.end()) {
        throw Error(ErrorCode::InvalidArgument, "frame " + std::to_string(frame_index_) +
                                                    ": duplicate landmark " + std::to_string(dup->id.index()));
    }
    std::sort(filled_.begin(), filled_.end());
    filled_.erase(std::unique(filled_.begin(), filled_.end()), filled_.end());
}

const LandmarkPoint* LandmarkFrame::find(LandmarkId id) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), id,
                               [](const LandmarkPoint& p, LandmarkId key) { return p.id < key; });
    return (it != points_.end() && it->id == id) ? &*it : nullptr;
}

bool LandmarkFrame::is_filled(LandmarkId id) const {
    return std::binary_search(filled_.begin(), filled_.end(), id);
}

LandmarkStream::LandmarkStream(double fps, std::vector<LandmarkFrame> frames, StreamMetadata metadata)
    : fps_(fps), frames_(std::move(frames)), metadata_(std::move(metadata)) {
    if (!std::isfinite(fps_) || fps_ <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "fps must be positive and finite");
    }
}

void require_ordered(const LandmarkStream& stream) {
    if (stream.empty()) throw Error(ErrorCode::EmptyStream, "stream has no frames");
    const auto& frames = stream.frames();
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].frame_index() <= frames[i - 1].frame_index()) {
            throw Error(ErrorCode::InvalidArgument,
                        "frame indices not strictly increasing at frame " + std::to_string(frames[i].frame_index()));
        }
    }
}

// ---------------------------------------------------------------------------

LandmarkSelection::LandmarkSelection(std::vector<LandmarkId> ids, std::string label)
    : ids_(std::move(ids)), label_(std::move(label)) {
    if (ids_.empty()) throw Error(ErrorCode::InvalidArgument, "landmark selection is empty");
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
        throw Error(ErrorCode::InvalidArgument, "landmark selection contains duplicates");
    }
}

bool LandmarkSelection::contains(LandmarkId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

LandmarkSelection small_task_selection() {
    return LandmarkSelection(ids_of({13, 14, 15, 16, 17, 18, 19, 20, 21, 22}), "S");
}

LandmarkSelection large_task_selection() { return LandmarkSelection(ids_of({11, 12, 13, 14, 25, 26}), "L"); }

LandmarkSelection full_selection() {
    std::vector<LandmarkId> ids;
    for (int i = 0; i < LandmarkId::kCount; ++i) ids.emplace_back(i);
    return LandmarkSelection(std::move(ids), "all");
}

LandmarkSelection selection_for_task(const TaskCode& task) {
    return task.size == ObjectSize::Small ? small_task_selection() : large_task_selection();
}

std::vector<ColumnLabel> column_labels(const LandmarkSelection& selection) {
    std::vector<ColumnLabel> out;
    out.reserve(selection.dimension());
    for (LandmarkId id : selection.ids())
        for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) out.push_back({id, axis});
    return out;
}

FeatureMatrix select_features(const LandmarkStream& stream, const LandmarkSelection& selection) {
    require_ordered(stream);
    const auto n = static_cast<Eigen::Index>(stream.size());
    const auto p = static_cast<Eigen::Index>(selection.dimension());

    FeatureMatrix out;
    out.values.resize(n, p);
    out.frame_indices.reserve(stream.size());
    out.columns = column_labels(selection);

    Eigen::Index row = 0;
    for (const auto& frame : stream.frames()) {
        Eigen::Index col = 0;
        for (LandmarkId id : selection.ids()) {
            const LandmarkPoint* point = frame.find(id);
            if (!point) {
                throw Error(ErrorCode::MissingLandmark, "frame " + std::to_string(frame.frame_index()) +
                                                            " lacks landmark " + std::to_string(id.index()));
            }
            out.values.block<1, 3>(row, col) = point->position.transpose();
            col += 3;
        }
        out.frame_indices.push_back(frame.frame_index());
        ++row;
    }
    return out;
}

// ---------------------------------------------------------------------------

GapFiller::GapFiller(LandmarkSelection selection, GapOptions options)
    : selection_(std::move(selection)), options_(options) {}

LandmarkFrame GapFiller::fill(const LandmarkFrame& frame) {
    if (options_.policy == GapPolicy::None) return frame;

    std::vector<LandmarkPoint> points = frame.points();
    std::vector<LandmarkId> filled = frame.filled();
    for (LandmarkId id : selection_.ids()) {
        auto it = std::find_if(points.begin(), points.end(), [&](const auto& p) { return p.id == id; });
        const bool observed = it != points.end() &&
                              (!it->visibility || *it->visibility >= options_.visibility_threshold);
        if (observed) {
            last_seen_.insert_or_assign(id, it->position);
            continue;
        }
        auto prior = last_seen_.find(id);
        if (prior == last_seen_.end()) {
            throw Error(ErrorCode::MissingLandmark, "frame " + std::to_string(frame.frame_index()) +
                                                        ": landmark " + std::to_string(id.index()) +
                                                        " has no prior observation to carry forward");
        }
        if (it != points.end()) {
            it->position = prior->second;
        } else {
            points.push_back({id, prior->second, std::nullopt});
        }
        filled.push_back(id);
    }
    return LandmarkFrame(frame.frame_index(), std::move(points), std::move(filled));
}

LandmarkStream apply_gap_policy(const LandmarkStream& stream, const LandmarkSelection& selection,
                                const GapOptions& options) {
    GapFiller filler(selection, options);
    std::vector<LandmarkFrame> frames;
    frames.reserve(stream.size());
    for (const auto& frame : stream.frames()) frames.push_back(filler.fill(frame));
    return LandmarkStream(stream.fps(), std::move(frames), stream.metadata());
}

// ---------------------------------------------------------------------------

std::string_view to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::EmptyStream: return "empty_stream";
        case IssueKind::NonMonotonicFrameIndex: return "non_monotonic_frame_index";
        case IssueKind::NonFiniteCoordinate: return "non_finite_coordinate";
        case IssueKind::VisibilityOutOfRange: return "visibility_out_of_range";
        case IssueKind::UnusualFps: return "unusual_fps";
    }
    return "unknown";
}

ValidationReport validate_stream(const LandmarkStream& stream) {
    ValidationReport report;
    report.frame_count = stream.size();
    report.fps = stream.fps();

    // Video sources run between a few and a few hundred frames per second.
    if (stream.fps() < 1.0 || stream.fps() > 1000.0) {
        report.issues.push_back({IssueKind::UnusualFps, std::nullopt,
                                 "fps " + std::to_string(stream.fps()) + " outside [1, 1000]"});
    }
    if (stream.empty()) {
        report.issues.push_back({IssueKind::EmptyStream, std::nullopt, "stream has no frames"});
        return report;
    }

    std::map<LandmarkId, std::size_t> present;
    bool have_range = false;
    const auto& frames = stream.frames();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& frame = frames[i];
        if (i > 0 && frame.frame_index() <= frames[i - 1].frame_index()) {
            report.issues.push_back({IssueKind::NonMonotonicFrameIndex, frame.frame_index(),
                                     "frame index " + std::to_string(frame.frame_index()) + " follows " +
                                         std::to_string(frames[i - 1].frame_index())});
        }
        for (const auto& point : frame.points()) {
            ++present[point.id];
            if (!point.position.allFinite()) {
                report.issues.push_back({IssueKind::NonFiniteCoordinate, frame.frame_index(),
                                         "landmark " + std::to_string(point.id.index()) + " has a non-finite coordinate"});
                continue;
            }
            if (point.visibility && !(*point.visibility >= 0.0 && *point.visibility <= 1.0)) {
                report.issues.push_back({IssueKind::VisibilityOutOfRange, frame.frame_index(),
                                         "landmark " + std::to_string(point.id.index()) + " visibility outside [0, 1]"});
            }
            for (int a = 0; a < 3; ++a) {
                auto& range = report.coordinate_range[static_cast<std::size_t>(a)];
                const double v = point.position[a];
                if (!have_range) {
                    range = {v, v};
                } else {
                    range.min = std::min(range.min, v);
                    range.max = std::max(range.max, v);
                }
            }
            have_range = true;
        }
    }
    const auto total = static_cast<double>(frames.size());
    for (const auto& [id, count] : present) {
        report.missing_rate[id] = static_cast<double>(frames.size() - count) / total;
    }
    return report;
}

}  // namespace motionspc
