#include "motionspc/hotelling.hpp"

#include "motionspc/error.hpp"

#include <Eigen/QR>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include <cmath>

namespace motionspc {

std::string_view to_string(CovarianceEstimator v) {
    return v == CovarianceEstimator::Sample ? "sample" : "successive-differences";
}
std::string_view to_string(LimitFamily v) { return v == LimitFamily::F ? "f" : "beta"; }
std::string_view to_string(InverseMethod v) { return v == InverseMethod::Exact ? "exact" : "pseudo-inverse"; }
std::string_view to_string(FeatureKind v) { return v == FeatureKind::Positions ? "positions" : "motion-vectors"; }

CovarianceEstimator parse_estimator(std::string_view text) {
    if (text == "sample") return CovarianceEstimator::Sample;
    if (text == "successive-differences") return CovarianceEstimator::SuccessiveDifferences;
    throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + std::string(text) + "'");
}

LimitFamily parse_limit_family(std::string_view text) {
    if (text == "f") return LimitFamily::F;
    if (text == "beta") return LimitFamily::Beta;
    throw Error(ErrorCode::InvalidArgument, "unknown limit family '" + std::string(text) + "'");
}

FeatureKind parse_feature_kind(std::string_view text) {
    if (text == "positions") return FeatureKind::Positions;
    if (text == "motion-vectors") return FeatureKind::MotionVectors;
    throw Error(ErrorCode::InvalidArgument, "unknown feature kind '" + std::string(text) + "'");
}

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
}

bool rows_identical(const Eigen::MatrixXd& data) {
    for (Eigen::Index i = 1; i < data.rows(); ++i)
        if (data.row(i) != data.row(0)) return false;
    return true;
}

}  // namespace

PhaseIModel fit_phase1(const Eigen::MatrixXd& data, const Phase1Options& options) {
    require_alpha(options.alpha);
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (p == 0) throw Error(ErrorCode::InvalidArgument, "feature matrix has no columns");
    if (n < 2) throw Error(ErrorCode::InsufficientData, "Phase I needs at least 2 observations");
    if (!data.allFinite()) throw Error(ErrorCode::InvalidArgument, "feature matrix has non-finite entries");
    if (rows_identical(data)) throw Error(ErrorCode::DegenerateCovariance, "all Phase I observations are identical");

    PhaseIModel model;
    model.n_ = n;
    model.alpha_ = options.alpha;
    model.estimator_ = options.estimator;
    model.limit_family_ = options.limit_family;
    model.feature_kind_ = options.feature_kind;
    model.feature_step_ = options.feature_step;
    model.mean_ = data.colwise().mean().transpose();

    // S = A^T A, with A the scaled centred rows or successive differences.
    Eigen::MatrixXd factor_input;
    if (options.estimator == CovarianceEstimator::Sample) {
        factor_input = (data.rowwise() - model.mean_.transpose()) / std::sqrt(static_cast<double>(n - 1));
    } else {
        factor_input = (data.bottomRows(n - 1) - data.topRows(n - 1)) / std::sqrt(2.0 * static_cast<double>(n - 1));
    }
    model.covariance_ = factor_input.transpose() * factor_input;
    model.covariance_ = 0.5 * (model.covariance_ + model.covariance_.transpose());

    bool use_exact = options.inverse == InverseStrategy::Exact;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen;
    Eigen::Index kept = 0;
    double threshold = 0.0;
    if (options.inverse != InverseStrategy::Exact) {
        eigen.compute(model.covariance_);
        if (eigen.info() != Eigen::Success) {
            throw Error(ErrorCode::DegenerateCovariance, "eigendecomposition of the covariance failed");
        }
        const double largest = eigen.eigenvalues().maxCoeff();
        if (!(largest > 0.0)) throw Error(ErrorCode::DegenerateCovariance, "covariance is zero");
        threshold = options.rank_tolerance * largest;
        kept = (eigen.eigenvalues().array() >= threshold).count();
        use_exact = options.inverse == InverseStrategy::Auto && kept == p && n > p;
    }

    if (use_exact) {
        if (n <= p) {
            throw Error(ErrorCode::InsufficientData, "exact inverse needs more observations (" + std::to_string(n) +
                                                         ") than dimensions (" + std::to_string(p) + ")");
        }
        if (factor_input.rows() < p) {
            throw Error(ErrorCode::InsufficientData, "exact inverse needs at least as many differences as dimensions");
        }
        // QR of A gives the Cholesky factor S = R^T R without squaring the
        // condition number of A.
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(factor_input);
        const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
        // A pivot below tolerance * largest diagonal entry means numerical singularity.
        const Eigen::VectorXd pivots = r.diagonal().cwiseAbs2();
        if (!r.allFinite() || pivots.minCoeff() < options.rank_tolerance * model.covariance_.diagonal().maxCoeff()) {
            throw Error(ErrorCode::DegenerateCovariance, "covariance is not positive definite");
        }
        // S^-1 = R^-1 R^-T, so W = R^-1.
        model.whitener_ = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        model.inverse_method_ = InverseMethod::Exact;
        model.rank_ = p;
    } else {
        // Eigenvalues come sorted ascending; keep the trailing `kept` columns.
        const Eigen::MatrixXd basis = eigen.eigenvectors().rightCols(kept);
        const Eigen::VectorXd scale = eigen.eigenvalues().tail(kept).cwiseSqrt().cwiseInverse();
        model.whitener_ = basis * scale.asDiagonal();
        model.inverse_method_ = InverseMethod::PseudoInverse;
        model.rank_ = kept;
    }
    model.inverse_ = model.whitener_ * model.whitener_.transpose();
    model.ucl_ = control_limit(model.rank_, n, options.alpha, options.limit_family, options.estimator);
    return model;
}

PhaseIModel fit_phase1(const FeatureMatrix& data, const Phase1Options& options) {
    return fit_phase1(data.values, options);
}

double tsquared(const PhaseIModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != model.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "vector has dimension " + std::to_string(x.size()) +
                                                      ", model expects " + std::to_string(model.dimension()));
    }
    return (model.whitener().transpose() * (x - model.mean())).squaredNorm();
}

TsquaredSeries tsquared_series(const PhaseIModel& model, const FeatureMatrix& data, Phase phase) {
    if (data.cols() != model.dimension()) {
        throw Error(ErrorCode::DimensionMismatch, "feature matrix has " + std::to_string(data.cols()) +
                                                      " columns, model expects " + std::to_string(model.dimension()));
    }
    TsquaredSeries out;
    out.phase = phase;
    const Eigen::MatrixXd projected = (data.values.rowwise() - model.mean().transpose()) * model.whitener();
    const Eigen::VectorXd values = projected.rowwise().squaredNorm();
    out.values.assign(values.data(), values.data() + values.size());
    out.frame_indices = data.frame_indices;
    return out;
}

double ucl(Eigen::Index p, Eigen::Index n, double alpha) {
    require_alpha(alpha);
    if (p < 1 || n <= p) {
        throw Error(ErrorCode::InvalidShape, "F limit needs n > p >= 1 (p=" + std::to_string(p) +
                                                 ", n=" + std::to_string(n) + ")");
    }
    const auto pd = static_cast<double>(p);
    const auto nd = static_cast<double>(n);
    boost::math::fisher_f_distribution<double> dist(pd, nd - pd);
    const double quantile = boost::math::quantile(dist, 1.0 - alpha);
    return pd * (nd - 1.0) / (nd - pd) * quantile;
}

double beta_ucl(Eigen::Index p, Eigen::Index n, double alpha, CovarianceEstimator estimator) {
    require_alpha(alpha);
    const auto pd = static_cast<double>(p);
    const auto nd = static_cast<double>(n);
    const double dof = estimator == CovarianceEstimator::Sample
                           ? nd
                           : 2.0 * (nd - 1.0) * (nd - 1.0) / (3.0 * nd - 4.0);
    if (p < 1 || n < 2 || !(dof - pd - 1.0 > 0.0)) {
        throw Error(ErrorCode::InvalidShape, "beta limit undefined for p=" + std::to_string(p) +
                                                 ", n=" + std::to_string(n));
    }
    boost::math::beta_distribution<double> dist(pd / 2.0, (dof - pd - 1.0) / 2.0);
    return (nd - 1.0) * (nd - 1.0) / nd * boost::math::quantile(dist, 1.0 - alpha);
}

double control_limit(Eigen::Index p, Eigen::Index n, double alpha, LimitFamily family,
                     CovarianceEstimator estimator) {
    return family == LimitFamily::F ? ucl(p, n, alpha) : beta_ucl(p, n, alpha, estimator);
}

std::size_t warning_count(std::span<const double> values, double ucl) {
    std::size_t count = 0;
    for (double v : values)
        if (v > ucl) ++count;
    return count;
}

std::size_t warning_count(const TsquaredSeries& series, double ucl) { return warning_count(series.values, ucl); }

std::vector<WarningEvent> warnings_in(const TsquaredSeries& series, double ucl) {
    std::vector<WarningEvent> out;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double t = series.values[i];
        if (t > ucl) out.push_back({series.frame_indices[i], t, ucl, t / ucl});
    }
    return out;
}

Phase2Monitor::Outcome Phase2Monitor::observe(std::int64_t frame_index,
                                              const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Outcome out{tsquared(model_, x), std::nullopt};
    if (out.tsquared > model_.ucl()) {
        out.warning = WarningEvent{frame_index, out.tsquared, model_.ucl(), out.tsquared / model_.ucl()};
    }
    return out;
}

Phase2Result monitor_phase2(const PhaseIModel& model, std::span<const Observation> incoming) {
    Phase2Monitor monitor(model);
    Phase2Result result;
    result.series.phase = Phase::II;
    for (const auto& obs : incoming) {
        try {
            auto outcome = monitor.observe(obs.frame_index, obs.values);
            result.series.values.push_back(outcome.tsquared);
            result.series.frame_indices.push_back(obs.frame_index);
            if (outcome.warning) result.warnings.push_back(*outcome.warning);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DimensionMismatch) throw;
            result.rejected.push_back({obs.frame_index, e.what()});
        }
    }
    return result;
}

}  // namespace motionspc
