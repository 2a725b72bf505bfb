#pragma once

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionspc {

using Vec3 = Eigen::Vector3d;

/// Index into the 33-point body topology emitted by the pose estimator.
class LandmarkId {
public:
    static constexpr int kCount = 33;

    /// Throws Error(InvalidArgument) outside [0, 32].
    explicit LandmarkId(int index);

    int index() const noexcept { return index_; }
    std::string_view name() const noexcept;

    friend auto operator<=>(LandmarkId, LandmarkId) = default;

private:
    int index_;
};

enum class Axis { X = 0, Y = 1, Z = 2 };
char axis_char(Axis axis);

// ---------------------------------------------------------------------------
// Task taxonomy

enum class ObjectSize { Large, Small };
enum class Guidance { Guided, Unguided };
enum class Action { Insert, Place };

struct TaskCode {
    ObjectSize size;
    Guidance guidance;
    Action action;

    std::string to_string() const;
    friend auto operator<=>(const TaskCode&, const TaskCode&) = default;
};

/// Decodes "{L,S}{G,U}{I,P}". Throws Error(InvalidTaskCode).
TaskCode parse_task_code(std::string_view code);

/// The eight valid codes in lexical order of their string form.
std::array<TaskCode, 8> all_task_codes();

// ---------------------------------------------------------------------------
// Frames and streams

struct LandmarkPoint {
    LandmarkId id;
    Vec3 position;
    std::optional<double> visibility;

    friend bool operator==(const LandmarkPoint&, const LandmarkPoint&) = default;
};

/// One video frame worth of landmarks. Points are held sorted by id; the
/// input order never matters. `filled` lists ids whose position was supplied
/// by the gap policy rather than observed.
class LandmarkFrame {
public:
    /// Throws Error(InvalidArgument) on duplicate ids or a negative index.
    LandmarkFrame(std::int64_t frame_index, std::vector<LandmarkPoint> points,
                  std::vector<LandmarkId> filled = {});

    std::int64_t frame_index() const noexcept { return frame_index_; }
    const std::vector<LandmarkPoint>& points() const noexcept { return points_; }
    const std::vector<LandmarkId>& filled() const noexcept { return filled_; }

    const LandmarkPoint* find(LandmarkId id) const;
    bool is_filled(LandmarkId id) const;

    friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;

private:
    std::int64_t frame_index_;
    std::vector<LandmarkPoint> points_;
    std::vector<LandmarkId> filled_;
};

struct StreamMetadata {
    std::optional<TaskCode> task;
    std::string participant;
    std::string source;
    std::string unit_label = "normalized";

    friend bool operator==(const StreamMetadata&, const StreamMetadata&) = default;
};

class LandmarkStream {
public:
    static constexpr double kDefaultFps = 30.0;

    /// Throws Error(InvalidArgument) unless fps is finite and positive.
    LandmarkStream(double fps, std::vector<LandmarkFrame> frames, StreamMetadata metadata = {});

    double fps() const noexcept { return fps_; }
    const std::vector<LandmarkFrame>& frames() const noexcept { return frames_; }
    const StreamMetadata& metadata() const noexcept { return metadata_; }
    std::size_t size() const noexcept { return frames_.size(); }
    bool empty() const noexcept { return frames_.empty(); }

    double timestamp_s(const LandmarkFrame& frame) const {
        return static_cast<double>(frame.frame_index()) / fps_;
    }

    friend bool operator==(const LandmarkStream&, const LandmarkStream&) = default;

private:
    double fps_;
    std::vector<LandmarkFrame> frames_;
    StreamMetadata metadata_;
};

/// Throws Error(EmptyStream) or Error(InvalidArgument) when frame indices are
/// not strictly increasing.
void require_ordered(const LandmarkStream& stream);

// ---------------------------------------------------------------------------
// Selections and feature matrices

class LandmarkSelection {
public:
    /// Sorts ascending. Throws Error(InvalidArgument) on empty input or duplicates.
    LandmarkSelection(std::vector<LandmarkId> ids, std::string label = {});

    const std::vector<LandmarkId>& ids() const noexcept { return ids_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dimension() const noexcept { return 3 * ids_.size(); }
    bool contains(LandmarkId id) const;

    friend bool operator==(const LandmarkSelection&, const LandmarkSelection&) = default;

private:
    std::vector<LandmarkId> ids_;
    std::string label_;
};

/// Elbows, wrists and finger joints: {13..22}.
LandmarkSelection small_task_selection();
/// Shoulders, elbows and knees: {11, 12, 13, 14, 25, 26}.
LandmarkSelection large_task_selection();
/// All 33 landmarks.
LandmarkSelection full_selection();
/// Only the object size of the task matters.
LandmarkSelection selection_for_task(const TaskCode& task);

struct ColumnLabel {
    LandmarkId id;
    Axis axis;

    friend bool operator==(const ColumnLabel&, const ColumnLabel&) = default;
};

/// Columns laid out as (landmark ascending) x (x, y, z).
std::vector<ColumnLabel> column_labels(const LandmarkSelection& selection);

/// n x p observations; row r was taken at `frame_indices[r]`.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::vector<std::int64_t> frame_indices;
    std::vector<ColumnLabel> columns;

    Eigen::Index rows() const noexcept { return values.rows(); }
    Eigen::Index cols() const noexcept { return values.cols(); }
};

/// Throws Error(EmptyStream) or Error(MissingLandmark).
FeatureMatrix select_features(const LandmarkStream& stream, const LandmarkSelection& selection);

// ---------------------------------------------------------------------------
// Gap policy

enum class GapPolicy { None, CarryForward };

struct GapOptions {
    GapPolicy policy = GapPolicy::CarryForward;
    /// Points below this visibility count as unobserved under CarryForward.
    double visibility_threshold = 0.5;
};

/// Streaming carry-forward of the last observed position for each selected
/// landmark. Stateful; feed frames in order.
class GapFiller {
public:
    GapFiller(LandmarkSelection selection, GapOptions options);

    /// Throws Error(MissingLandmark) when a selected landmark has never been
    /// observed. With GapPolicy::None the frame is returned unchanged.
    LandmarkFrame fill(const LandmarkFrame& frame);

private:
    LandmarkSelection selection_;
    GapOptions options_;
    std::map<LandmarkId, Vec3> last_seen_;
};

LandmarkStream apply_gap_policy(const LandmarkStream& stream, const LandmarkSelection& selection,
                                const GapOptions& options);

// ---------------------------------------------------------------------------
// Validation

enum class IssueKind {
    EmptyStream,
    NonMonotonicFrameIndex,
    NonFiniteCoordinate,
    VisibilityOutOfRange,
    UnusualFps,
};

std::string_view to_string(IssueKind kind);

struct ValidationIssue {
    IssueKind kind;
    std::optional<std::int64_t> frame_index;
    std::string message;
};

struct AxisRange {
    double min = 0.0;
    double max = 0.0;
};

struct ValidationReport {
    std::size_t frame_count = 0;
    double fps = 0.0;
    std::vector<ValidationIssue> issues;
    /// Fraction of frames lacking each landmark seen anywhere in the stream.
    std::map<LandmarkId, double> missing_rate;
    std::array<AxisRange, 3> coordinate_range{};

    bool ok() const noexcept { return issues.empty(); }
};

ValidationReport validate_stream(const LandmarkStream& stream);

}  // namespace motionspc
