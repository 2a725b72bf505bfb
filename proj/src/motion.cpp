#include "motionspc/motion.hpp"

#include "motionspc/error.hpp"

#include <algorithm>
#include <cmath>

namespace motionspc {

namespace {

const LandmarkPoint& require_point(const LandmarkFrame& frame, LandmarkId id) {
    const LandmarkPoint* point = frame.find(id);
    if (!point) {
        throw Error(ErrorCode::MissingLandmark,
                    "frame " + std::to_string(frame.frame_index()) + " lacks landmark " + std::to_string(id.index()));
    }
    return *point;
}

}  // namespace

StepSpec::StepSpec(int step) : step_(step) {
    if (step < 0) throw Error(ErrorCode::InvalidArgument, "step must be non-negative");
}

std::vector<double> MotionSeries::amounts() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.amount);
    return out;
}

std::vector<double> MotionSeries::velocities() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.velocity);
    return out;
}

std::vector<double> MotionSeries::accelerations() const {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.acceleration) out.push_back(*r.acceleration);
    return out;
}

std::vector<std::int64_t> MotionSeries::frame_indices() const {
    std::vector<std::int64_t> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.frame_index);
    return out;
}

MotionVectors motion_vectors(const LandmarkFrame& current, const LandmarkFrame& previous,
                             const LandmarkSelection& selection) {
    MotionVectors out;
    for (LandmarkId id : selection.ids()) {
        out.emplace(id, require_point(current, id).position - require_point(previous, id).position);
    }
    return out;
}

double motion_amount(const MotionVectors& vectors) {
    double total = 0.0;
    for (const auto& [id, v] : vectors) total += v.norm();
    return total;
}

MotionSeries motion_series(const LandmarkStream& stream, const LandmarkSelection& selection, StepSpec step) {
    require_ordered(stream);
    const auto n = stream.size();
    const auto lag = static_cast<std::size_t>(step.lag());
    if (n <= lag) {
        throw Error(ErrorCode::StreamTooShort, "stream of " + std::to_string(n) + " frames is too short for lag " +
                                                   std::to_string(lag));
    }

    const auto& frames = stream.frames();
    const auto landmarks = static_cast<double>(selection.size());
    MotionSeries series{step, selection, {}};
    series.records.reserve(n - lag);
    for (std::size_t t = lag; t < n; ++t) {
        const auto& current = frames[t];
        const auto& previous = frames[t - lag];
        const double dt = static_cast<double>(current.frame_index() - previous.frame_index()) / stream.fps();

        MotionRecord record{current.frame_index(), motion_vectors(current, previous, selection), 0.0, 0.0, {}};
        record.amount = motion_amount(record.vectors);
        record.velocity = record.amount / (landmarks * dt);
        if (series.records.size() >= lag) {
            const auto& earlier = series.records[series.records.size() - lag];
            record.acceleration = (record.velocity - earlier.velocity) / dt;
        }
        series.records.push_back(std::move(record));
    }
    return series;
}

Eigen::VectorXd frame_features(const LandmarkFrame& frame, const LandmarkSelection& selection) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(selection.dimension()));
    Eigen::Index col = 0;
    for (LandmarkId id : selection.ids()) {
        out.segment<3>(col) = require_point(frame, id).position;
        col += 3;
    }
    return out;
}

FeatureMatrix motion_feature_matrix(const LandmarkStream& stream, const LandmarkSelection& selection,
                                    StepSpec step) {
    require_ordered(stream);
    const auto n = stream.size();
    const auto lag = static_cast<std::size_t>(step.lag());
    if (n <= lag) {
        throw Error(ErrorCode::StreamTooShort, "stream of " + std::to_string(n) + " frames is too short for lag " +
                                                   std::to_string(lag));
    }
    const auto& frames = stream.frames();
    FeatureMatrix out;
    out.values.resize(static_cast<Eigen::Index>(n - lag), static_cast<Eigen::Index>(selection.dimension()));
    out.columns = column_labels(selection);
    out.frame_indices.reserve(n - lag);
    for (std::size_t t = lag; t < n; ++t) {
        const auto row = static_cast<Eigen::Index>(t - lag);
        out.values.row(row) =
            (frame_features(frames[t], selection) - frame_features(frames[t - lag], selection)).transpose();
        out.frame_indices.push_back(frames[t].frame_index());
    }
    return out;
}

double rmsd(std::span<const double> series) {
    if (series.empty()) throw Error(ErrorCode::EmptySeries, "RMSD of an empty series");
    // Corrected two-pass sum of squares; the correction term cancels the
    // rounding error of the first-pass mean.
    const double n = static_cast<double>(series.size());
    double sum = 0.0;
    for (double x : series) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    double residual = 0.0;
    for (double x : series) {
        const double d = x - mean;
        ss += d * d;
        residual += d;
    }
    return std::sqrt(std::max(0.0, ss - residual * residual / n) / n);
}

MotionTracker::MotionTracker(LandmarkSelection selection, StepSpec step)
    : selection_(std::move(selection)), step_(step) {}

std::optional<Eigen::VectorXd> MotionTracker::push(const LandmarkFrame& frame) {
    Eigen::VectorXd current = frame_features(frame, selection_);
    const auto lag = static_cast<std::size_t>(step_.lag());
    std::optional<Eigen::VectorXd> out;
    if (history_.size() == lag) {
        out = current - history_.front();
        history_.pop_front();
    }
    history_.push_back(std::move(current));
    return out;
}

}  // namespace motionspc
