#include "motionspc/error.hpp"
#include "motionspc/hotelling.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace motionspc;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

Eigen::MatrixXd five_points() {
    Eigen::MatrixXd x(5, 2);
    x << 0, 0, 1, 0, 0, 1, 1, 1, 2, 2;
    return x;
}

double sum_of(const TsquaredSeries& s) {
    long double total = 0.0L;
    for (double v : s.values) total += v;
    return static_cast<double>(total);
}

FeatureMatrix as_features(const Eigen::MatrixXd& x, std::int64_t first_frame = 0) {
    FeatureMatrix fm;
    fm.values = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) fm.frame_indices.push_back(first_frame + i);
    return fm;
}

}  // namespace

TEST_CASE("five-point example") {
    // Mean (0.8, 0.8); S = [[0.7, 0.45], [0.45, 0.7]]; T^2(2, 2) = 2 * 1.2^2 / 1.15 = 288/115.
    const auto model = fit_phase1(five_points());
    CHECK(model.inverse_method() == InverseMethod::Exact);
    CHECK(model.mean().isApprox(Eigen::Vector2d(0.8, 0.8)));
    CHECK(model.covariance()(0, 0) == doctest::Approx(0.7));
    CHECK(model.covariance()(0, 1) == doctest::Approx(0.45));
    CHECK(model.covariance()(1, 1) == doctest::Approx(0.7));
    const double t = tsquared(model, Eigen::Vector2d(2, 2));
    CHECK(oracle::relative_error(t, 288.0L / 115.0L) < 1e-12);
    const auto series = tsquared_series(model, as_features(five_points()));
    CHECK(sum_of(series) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(model.lcl() == 0.0);
    CHECK(model.rank() == 2);
    CHECK(model.sample_size() == 5);
}

TEST_CASE("Phase I T^2 sums to p(n-1)") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> pick_p(2, 12);
        const int p = pick_p(rng);
        std::uniform_int_distribution<int> pick_n(p + 2, 120);
        const int n = pick_n(rng);
        const auto x = fixtures::random_matrix(rng, n, p);
        const auto model = fit_phase1(x);
        REQUIRE(model.inverse_method() == InverseMethod::Exact);
        const double expected = static_cast<double>(p) * (n - 1);
        CHECK(oracle::relative_error(sum_of(tsquared_series(model, as_features(x))), expected) < 1e-9);
    }
}

TEST_CASE("T^2 agrees with a brute-force inverse") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const int p = 1 + trial % 8;
        const int n = p + 5 + trial;
        const auto x = fixtures::random_matrix(rng, n, p);
        const auto probe = fixtures::random_matrix(rng, 1, p).row(0).transpose().eval();
        const auto model = fit_phase1(x);
        const long double want = oracle::tsquared(fixtures::to_rows(x), fixtures::to_row(probe));
        CHECK(oracle::relative_error(tsquared(model, probe), want) < 1e-8);

        Phase1Options pinv;
        pinv.inverse = InverseStrategy::PseudoInverse;
        const auto alt = fit_phase1(x, pinv);
        CHECK(alt.inverse_method() == InverseMethod::PseudoInverse);
        CHECK(alt.rank() == p);
        CHECK(oracle::relative_error(tsquared(alt, probe), tsquared(model, probe)) < 1e-8);
        CHECK((model.whitener() * model.whitener().transpose() - model.inverse()).norm() <
              1e-9 * model.inverse().norm());
    }
}

TEST_CASE("successive-differences covariance") {
    std::mt19937_64 rng(8);
    const auto x = fixtures::random_matrix(rng, 30, 3);
    Phase1Options opts;
    opts.estimator = CovarianceEstimator::SuccessiveDifferences;
    const auto model = fit_phase1(x, opts);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
    for (Eigen::Index i = 0; i + 1 < x.rows(); ++i) {
        const Eigen::VectorXd d = (x.row(i + 1) - x.row(i)).transpose();
        s += d * d.transpose();
    }
    s /= 2.0 * (x.rows() - 1);
    CHECK((model.covariance() - s).norm() < 1e-12 * s.norm());
    CHECK(model.ucl() == doctest::Approx(control_limit(3, 30, opts.alpha, LimitFamily::F,
                                                       CovarianceEstimator::SuccessiveDifferences)));
}

TEST_CASE("rank-deficient data falls back to the pseudo-inverse") {
    std::mt19937_64 rng(13);
    Eigen::MatrixXd x(40, 3);
    x.leftCols(2) = fixtures::random_matrix(rng, 40, 2);
    x.col(2) = x.col(0) + x.col(1);
    const auto model = fit_phase1(x);
    CHECK(model.inverse_method() == InverseMethod::PseudoInverse);
    CHECK(model.rank() == 2);
    CHECK(model.ucl() == doctest::Approx(ucl(2, 40, model.alpha())));
    // Within the data's span T^2 equals the T^2 of the independent columns.
    const auto reduced = fit_phase1(Eigen::MatrixXd(x.leftCols(2)));
    const Eigen::Vector3d probe(0.3, -1.1, -0.8);
    CHECK(tsquared(model, probe) == doctest::Approx(tsquared(reduced, probe.head(2))).epsilon(1e-8));
    CHECK(sum_of(tsquared_series(model, as_features(x))) == doctest::Approx(2.0 * 39).epsilon(1e-9));

    Phase1Options exact;
    exact.inverse = InverseStrategy::Exact;
    CHECK(code_of([&] { fit_phase1(x, exact); }) == ErrorCode::DegenerateCovariance);
}

TEST_CASE("more dimensions than observations") {
    std::mt19937_64 rng(17);
    const auto x = fixtures::random_matrix(rng, 6, 10);
    const auto model = fit_phase1(x);
    CHECK(model.inverse_method() == InverseMethod::PseudoInverse);
    CHECK(model.rank() == 5);
    CHECK(model.ucl() == doctest::Approx(ucl(5, 6, model.alpha())));
    Phase1Options exact;
    exact.inverse = InverseStrategy::Exact;
    CHECK(code_of([&] { fit_phase1(x, exact); }) == ErrorCode::InsufficientData);
}

TEST_CASE("fit_phase1 preconditions") {
    CHECK(code_of([] { fit_phase1(Eigen::MatrixXd(1, 3)); }) == ErrorCode::InsufficientData);
    CHECK(code_of([] { fit_phase1(Eigen::MatrixXd::Ones(10, 3)); }) == ErrorCode::DegenerateCovariance);
    for (double alpha : {0.0, 1.0, -0.1, 2.0}) {
        Phase1Options o;
        o.alpha = alpha;
        CHECK(code_of([&] { fit_phase1(five_points(), o); }) == ErrorCode::InvalidArgument);
    }
    const auto model = fit_phase1(five_points());
    CHECK(code_of([&] { tsquared(model, Eigen::Vector3d(1, 2, 3)); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { tsquared_series(model, as_features(Eigen::MatrixXd::Zero(2, 3))); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("F control limit") {
    // P(F(2, d) > x) = (1 + 2x/d)^(-d/2) gives the p = 2 quantile in closed form.
    const double want = 2.0 * 9.0 / 8.0 * (8.0 / 2.0) * (std::pow(0.05, -2.0 / 8.0) - 1.0);
    CHECK(oracle::relative_error(ucl(2, 10, 0.05), want) < 1e-12);
    CHECK(ucl(2, 10, 0.05) == doctest::Approx(10.03).epsilon(0.005));

    for (auto [p, n] : std::vector<std::pair<int, int>>{{3, 20}, {5, 50}, {10, 200}, {30, 619}}) {
        const auto ref = oracle::ucl(p, n, 0.0027L);
        CHECK(oracle::relative_error(ucl(p, n, 0.0027), ref) < 1e-6);
    }
    double previous = ucl(4, 40, 1e-6);
    for (double alpha : {1e-4, 0.0027, 0.01, 0.05, 0.2, 0.5, 0.9}) {
        const double current = ucl(4, 40, alpha);
        CHECK(current < previous);
        previous = current;
    }
    CHECK(code_of([] { ucl(5, 5, 0.05); }) == ErrorCode::InvalidShape);
    CHECK(code_of([] { ucl(2, 10, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("beta control limit") {
    // Beta(1, b) has quantile 1 - (1 - q)^(1/b).
    for (int n : {10, 25, 400}) {
        const double b = (n - 3) / 2.0;
        const double want = (n - 1.0) * (n - 1.0) / n * (1.0 - std::pow(0.01, 1.0 / b));
        CHECK(oracle::relative_error(beta_ucl(2, n, 0.01, CovarianceEstimator::Sample), want) < 1e-10);

        const double d = 2.0 * (n - 1.0) * (n - 1.0) / (3.0 * n - 4.0);
        const double bd = (d - 3.0) / 2.0;
        const double want_sd = (n - 1.0) * (n - 1.0) / n * (1.0 - std::pow(0.01, 1.0 / bd));
        CHECK(oracle::relative_error(beta_ucl(2, n, 0.01, CovarianceEstimator::SuccessiveDifferences), want_sd) <
              1e-10);
    }
    CHECK(code_of([] { beta_ucl(9, 10, 0.01, CovarianceEstimator::Sample); }) == ErrorCode::InvalidShape);

    Phase1Options opts;
    opts.limit_family = LimitFamily::Beta;
    const auto model = fit_phase1(five_points(), opts);
    CHECK(model.ucl() == doctest::Approx(beta_ucl(2, 5, opts.alpha, CovarianceEstimator::Sample)));
    CHECK(model.lcl() == 0.0);
}

TEST_CASE("Phase I values never exceed the beta bound") {
    // Each Phase I T^2 is at most (n-1)^2/n, the support end of the beta limit.
    std::mt19937_64 rng(31);
    const auto x = fixtures::random_matrix(rng, 25, 4);
    const auto series = tsquared_series(fit_phase1(x), as_features(x));
    for (double v : series.values) CHECK(v <= 24.0 * 24.0 / 25.0 + 1e-9);
}

TEST_CASE("warnings are strict exceedances") {
    const std::vector<double> values{1.0, 5.0, 5.0000001, 9.0};
    CHECK(warning_count(values, 5.0) == 2);
    TsquaredSeries s{values, {10, 11, 12, 13}, Phase::II};
    const auto events = warnings_in(s, 5.0);
    REQUIRE(events.size() == 2);
    CHECK(events[0].frame_index == 12);
    CHECK(events[1].frame_index == 13);
    CHECK(events[1].excess_ratio == doctest::Approx(9.0 / 5.0));
    CHECK(events[1].ucl == 5.0);
}

TEST_CASE("Phase II monitoring") {
    const auto model = fit_phase1(five_points());
    const Phase2Monitor monitor(model);
    const auto quiet = monitor.observe(7, Eigen::Vector2d(0.8, 0.8));
    CHECK(quiet.tsquared == doctest::Approx(0.0));
    CHECK_FALSE(quiet.warning);
    const auto loud = monitor.observe(8, Eigen::Vector2d(40, -40));
    REQUIRE(loud.warning);
    CHECK(loud.warning->frame_index == 8);
    CHECK(loud.warning->tsquared == loud.tsquared);

    const std::vector<Observation> incoming{{1, Eigen::Vector2d(0.8, 0.8)},
                                            {2, Eigen::Vector3d(1, 2, 3)},
                                            {3, Eigen::Vector2d(40, -40)}};
    const auto result = monitor_phase2(model, incoming);
    CHECK(result.series.phase == Phase::II);
    CHECK(result.series.frame_indices == std::vector<std::int64_t>{1, 3});
    REQUIRE(result.rejected.size() == 1);
    CHECK(result.rejected[0].frame_index == 2);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].frame_index == 3);
}

TEST_CASE("enum spellings round-trip") {
    for (auto e : {CovarianceEstimator::Sample, CovarianceEstimator::SuccessiveDifferences})
        CHECK(parse_estimator(to_string(e)) == e);
    for (auto f : {LimitFamily::F, LimitFamily::Beta}) CHECK(parse_limit_family(to_string(f)) == f);
    for (auto k : {FeatureKind::Positions, FeatureKind::MotionVectors}) CHECK(parse_feature_kind(to_string(k)) == k);
    CHECK(code_of([] { parse_estimator("pooled"); }) == ErrorCode::InvalidArgument);
}
