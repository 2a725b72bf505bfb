#pragma once

#include "motionspc/landmark.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace motionspc {

/// Frame-progression step. A step of s compares frames s + 1 apart, so the
/// step counts the frames skipped in between.
class StepSpec {
public:
    /// Throws Error(InvalidArgument) for negative steps.
    explicit StepSpec(int step);

    int step() const noexcept { return step_; }
    int lag() const noexcept { return step_ + 1; }

    friend bool operator==(StepSpec, StepSpec) = default;

private:
    int step_;
};

using MotionVectors = std::map<LandmarkId, Vec3>;

struct MotionRecord {
    std::int64_t frame_index;  ///< the later of the two compared frames
    MotionVectors vectors;
    double amount;    ///< sum of displacement norms, normalized units
    double velocity;  ///< mean per-landmark speed, units / s
    std::optional<double> acceleration;  ///< units / s^2; absent for the first `lag` records
};

struct MotionSeries {
    StepSpec step;
    LandmarkSelection selection;
    std::vector<MotionRecord> records;

    std::vector<double> amounts() const;
    std::vector<double> velocities() const;
    /// Only the records that carry an acceleration.
    std::vector<double> accelerations() const;
    std::vector<std::int64_t> frame_indices() const;
};

/// Per-landmark displacement `current - previous`. Throws Error(MissingLandmark).
MotionVectors motion_vectors(const LandmarkFrame& current, const LandmarkFrame& previous,
                             const LandmarkSelection& selection);

double motion_amount(const MotionVectors& vectors);

/// One record per frame position t in [lag, n - 1].
///
/// velocity_t = M_t / (|selection| * dt) and
/// acceleration_t = (velocity_t - velocity_{t-lag}) / dt, where dt is the
/// time between the compared frames (lag / fps for an unbroken stream).
///
/// Throws Error(StreamTooShort) when n <= lag, Error(MissingLandmark).
MotionSeries motion_series(const LandmarkStream& stream, const LandmarkSelection& selection, StepSpec step);

/// Flattened motion vectors as a feature matrix; row r is frame position r + lag.
FeatureMatrix motion_feature_matrix(const LandmarkStream& stream, const LandmarkSelection& selection,
                                    StepSpec step);

/// Population root-mean-square deviation around the mean. Throws Error(EmptySeries).
double rmsd(std::span<const double> series);

/// Incremental counterpart of motion_feature_matrix for live monitoring.
/// Holds the last `lag` frames.
class MotionTracker {
public:
    MotionTracker(LandmarkSelection selection, StepSpec step);

    /// Returns the flattened motion vector ending at `frame` once `lag`
    /// earlier frames are buffered. A frame missing a selected landmark
    /// throws Error(MissingLandmark) and is not buffered.
    std::optional<Eigen::VectorXd> push(const LandmarkFrame& frame);

    std::size_t dimension() const noexcept { return selection_.dimension(); }

private:
    LandmarkSelection selection_;
    StepSpec step_;
    std::deque<Eigen::VectorXd> history_;
};

/// Selected coordinates of one frame in feature-column order.
/// Throws Error(MissingLandmark).
Eigen::VectorXd frame_features(const LandmarkFrame& frame, const LandmarkSelection& selection);

}  // namespace motionspc
