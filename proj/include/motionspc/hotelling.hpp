#pragma once

#include "motionspc/landmark.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace motionspc {

enum class CovarianceEstimator { Sample, SuccessiveDifferences };
enum class LimitFamily { F, Beta };
enum class InverseStrategy { Auto, Exact, PseudoInverse };
enum class InverseMethod { Exact, PseudoInverse };
enum class FeatureKind { Positions, MotionVectors };
enum class Phase { I, II };

std::string_view to_string(CovarianceEstimator v);
std::string_view to_string(LimitFamily v);
std::string_view to_string(InverseMethod v);
std::string_view to_string(FeatureKind v);

CovarianceEstimator parse_estimator(std::string_view text);
LimitFamily parse_limit_family(std::string_view text);
FeatureKind parse_feature_kind(std::string_view text);

struct Phase1Options {
    double alpha = 0.0027;
    CovarianceEstimator estimator = CovarianceEstimator::Sample;
    LimitFamily limit_family = LimitFamily::F;
    InverseStrategy inverse = InverseStrategy::Auto;
    /// Eigenvalues below this fraction of the largest are discarded by the
    /// pseudo-inverse.
    double rank_tolerance = 1e-10;
    FeatureKind feature_kind = FeatureKind::MotionVectors;
    std::optional<int> feature_step;
};

/// Phase I (retrospective) model: mean, covariance, its (pseudo-)inverse and
/// the control limits. Immutable once fitted.
class PhaseIModel {
public:
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
    const Eigen::MatrixXd& inverse() const noexcept { return inverse_; }
    InverseMethod inverse_method() const noexcept { return inverse_method_; }
    /// Number of covariance directions retained by the inverse.
    Eigen::Index rank() const noexcept { return rank_; }
    Eigen::Index dimension() const noexcept { return mean_.size(); }
    Eigen::Index sample_size() const noexcept { return n_; }
    double alpha() const noexcept { return alpha_; }
    double ucl() const noexcept { return ucl_; }
    double lcl() const noexcept { return 0.0; }
    CovarianceEstimator estimator() const noexcept { return estimator_; }
    LimitFamily limit_family() const noexcept { return limit_family_; }
    FeatureKind feature_kind() const noexcept { return feature_kind_; }
    std::optional<int> feature_step() const noexcept { return feature_step_; }

    /// S^+ = W W^T; T^2 is evaluated as |W^T (x - m)|^2, never negative.
    const Eigen::MatrixXd& whitener() const noexcept { return whitener_; }

private:
    friend PhaseIModel fit_phase1(const Eigen::MatrixXd& data, const Phase1Options& options);

    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd inverse_;
    Eigen::MatrixXd whitener_;
    InverseMethod inverse_method_ = InverseMethod::Exact;
    Eigen::Index rank_ = 0;
    Eigen::Index n_ = 0;
    double alpha_ = 0.0;
    double ucl_ = 0.0;
    CovarianceEstimator estimator_ = CovarianceEstimator::Sample;
    LimitFamily limit_family_ = LimitFamily::F;
    FeatureKind feature_kind_ = FeatureKind::MotionVectors;
    std::optional<int> feature_step_;
};

/// Mean and covariance of the rows of `data` with control limits.
///
/// Sample:                 S = 1/(n-1) sum (x_i - m)(x_i - m)^T
/// SuccessiveDifferences:  S = 1/(2(n-1)) sum (x_{i+1} - x_i)(x_{i+1} - x_i)^T
///
/// InverseStrategy::Auto uses a Cholesky inverse when n > p and no eigenvalue
/// falls below the rank tolerance, and the eigen pseudo-inverse otherwise.
/// The control limit is computed with the retained rank as the dimension.
///
/// Throws Error(InsufficientData), Error(DegenerateCovariance),
/// Error(InvalidArgument) for alpha outside (0, 1), Error(InvalidShape) when
/// the chosen limit family is undefined for (rank, n).
PhaseIModel fit_phase1(const Eigen::MatrixXd& data, const Phase1Options& options = {});
PhaseIModel fit_phase1(const FeatureMatrix& data, const Phase1Options& options = {});

/// (x - m) S^-1 (x - m)^T. Throws Error(DimensionMismatch).
double tsquared(const PhaseIModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

struct TsquaredSeries {
    std::vector<double> values;
    std::vector<std::int64_t> frame_indices;
    Phase phase = Phase::I;
};

/// Row-wise T^2. Throws Error(DimensionMismatch).
TsquaredSeries tsquared_series(const PhaseIModel& model, const FeatureMatrix& data, Phase phase = Phase::I);

/// p(n-1)/(n-p) * F^-1(1 - alpha; p, n - p). Throws Error(InvalidShape) when
/// n <= p, Error(InvalidArgument) for alpha outside (0, 1).
double ucl(Eigen::Index p, Eigen::Index n, double alpha);

/// Beta-distribution limit for individual observations:
/// (n-1)^2/n * B^-1(1 - alpha; p/2, (d - p - 1)/2), with d = n for the sample
/// estimator and d = 2(n-1)^2/(3n-4) for successive differences.
double beta_ucl(Eigen::Index p, Eigen::Index n, double alpha, CovarianceEstimator estimator);

double control_limit(Eigen::Index p, Eigen::Index n, double alpha, LimitFamily family,
                     CovarianceEstimator estimator);

struct WarningEvent {
    std::int64_t frame_index;
    double tsquared;
    double ucl;
    double excess_ratio;

    friend bool operator==(const WarningEvent&, const WarningEvent&) = default;
};

/// Values strictly above `ucl`.
std::size_t warning_count(std::span<const double> values, double ucl);
std::size_t warning_count(const TsquaredSeries& series, double ucl);
std::vector<WarningEvent> warnings_in(const TsquaredSeries& series, double ucl);

struct Observation {
    std::int64_t frame_index;
    Eigen::VectorXd values;
};

struct RejectedObservation {
    std::int64_t frame_index;
    std::string message;
};

/// Online Phase II evaluation against a fixed model. Holds a reference; the
/// model must outlive the monitor.
class Phase2Monitor {
public:
    explicit Phase2Monitor(const PhaseIModel& model) : model_(model) {}

    struct Outcome {
        double tsquared;
        std::optional<WarningEvent> warning;
    };

    /// Throws Error(DimensionMismatch).
    Outcome observe(std::int64_t frame_index, const Eigen::Ref<const Eigen::VectorXd>& x) const;

    const PhaseIModel& model() const noexcept { return model_; }

private:
    const PhaseIModel& model_;
};

struct Phase2Result {
    TsquaredSeries series;
    std::vector<WarningEvent> warnings;
    std::vector<RejectedObservation> rejected;
};

/// Processes `incoming` in order; wrong-sized vectors are recorded in
/// `rejected` and skipped.
Phase2Result monitor_phase2(const PhaseIModel& model, std::span<const Observation> incoming);

}  // namespace motionspc
