#pragma once

#include "motionspc/landmark.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace fixtures {

using namespace motionspc;

/// Stream whose landmark `id` sits at position(frame, id) for every selected id.
inline LandmarkStream make_stream(std::int64_t n_frames, const LandmarkSelection& selection,
                                  const std::function<Vec3(std::int64_t, LandmarkId)>& position, double fps = 30.0,
                                  StreamMetadata meta = {}) {
    std::vector<LandmarkFrame> frames;
    frames.reserve(static_cast<std::size_t>(n_frames));
    for (std::int64_t t = 0; t < n_frames; ++t) {
        std::vector<LandmarkPoint> points;
        for (LandmarkId id : selection.ids()) points.push_back({id, position(t, id), std::nullopt});
        frames.emplace_back(t, std::move(points));
    }
    return LandmarkStream(fps, std::move(frames), std::move(meta));
}

/// Gaussian random walk per landmark; every coordinate is distinct with
/// probability one.
inline LandmarkStream random_walk(std::mt19937_64& rng, std::int64_t n_frames, const LandmarkSelection& selection,
                                  double fps = 30.0) {
    std::normal_distribution<double> step(0.0, 0.01);
    std::uniform_real_distribution<double> start(0.0, 1.0);
    std::vector<Vec3> current;
    for (std::size_t i = 0; i < selection.size(); ++i) current.emplace_back(start(rng), start(rng), start(rng));
    std::vector<LandmarkFrame> frames;
    for (std::int64_t t = 0; t < n_frames; ++t) {
        std::vector<LandmarkPoint> points;
        for (std::size_t i = 0; i < selection.size(); ++i) {
            if (t > 0) current[i] += Vec3(step(rng), step(rng), step(rng));
            points.push_back({selection.ids()[i], current[i], std::nullopt});
        }
        frames.emplace_back(t, std::move(points));
    }
    return LandmarkStream(fps, std::move(frames));
}

/// Copy of `stream` with every position mapped through `f`.
inline LandmarkStream transform(const LandmarkStream& stream, const std::function<Vec3(const Vec3&)>& f) {
    std::vector<LandmarkFrame> frames;
    for (const auto& frame : stream.frames()) {
        std::vector<LandmarkPoint> points;
        for (const auto& p : frame.points()) points.push_back({p.id, f(p.position), p.visibility});
        frames.emplace_back(frame.frame_index(), std::move(points), frame.filled());
    }
    return LandmarkStream(stream.fps(), std::move(frames), stream.metadata());
}

/// Reverses frame order while keeping frame indices ascending.
inline LandmarkStream reversed(const LandmarkStream& stream) {
    std::vector<LandmarkFrame> frames;
    const auto& src = stream.frames();
    for (std::size_t k = 0; k < src.size(); ++k) {
        const auto& from = src[src.size() - 1 - k];
        frames.emplace_back(src[k].frame_index(), from.points(), from.filled());
    }
    return LandmarkStream(stream.fps(), std::move(frames), stream.metadata());
}

/// n x p matrix of independent standard normals, optionally mixed by a random
/// linear map so columns are correlated.
inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, bool correlated = true) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = z(rng);
    if (!correlated) return x;
    Eigen::MatrixXd mix(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) mix(i, j) = (i == j ? 1.0 : 0.3 * z(rng));
    Eigen::RowVectorXd shift(p);
    for (Eigen::Index j = 0; j < p; ++j) shift(j) = 5.0 * z(rng);
    return (x * mix).rowwise() + shift;
}

inline std::vector<std::vector<long double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<long double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
    return rows;
}

inline std::vector<long double> to_row(const Eigen::VectorXd& v) {
    return std::vector<long double>(v.data(), v.data() + v.size());
}

}  // namespace fixtures
