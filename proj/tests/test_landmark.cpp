#include "motionspc/error.hpp"
#include "motionspc/landmark.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

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

LandmarkFrame frame_with(std::int64_t idx, std::vector<std::pair<int, double>> ids_vis) {
    std::vector<LandmarkPoint> points;
    for (auto [id, vis] : ids_vis) {
        points.push_back({LandmarkId(id), Vec3(id * 0.01, idx * 0.1, 0.5),
                          vis < 0 ? std::nullopt : std::optional<double>(vis)});
    }
    return LandmarkFrame(idx, std::move(points));
}

}  // namespace

TEST_CASE("landmark ids cover the 33-point topology") {
    CHECK(LandmarkId(0).name() == "nose");
    CHECK(LandmarkId(15).name() == "left_wrist");
    CHECK(LandmarkId(32).name() == "right_foot_index");
    CHECK(code_of([] { LandmarkId(-1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { LandmarkId(33); }) == ErrorCode::InvalidArgument);
    std::set<std::string_view> names;
    for (int i = 0; i < LandmarkId::kCount; ++i) names.insert(LandmarkId(i).name());
    CHECK(names.size() == 33);
}

TEST_CASE("task codes decode size, guidance and action") {
    const TaskCode sgi = parse_task_code("SGI");
    CHECK(sgi.size == ObjectSize::Small);
    CHECK(sgi.guidance == Guidance::Guided);
    CHECK(sgi.action == Action::Insert);
    const TaskCode lup = parse_task_code("LUP");
    CHECK(lup.size == ObjectSize::Large);
    CHECK(lup.guidance == Guidance::Unguided);
    CHECK(lup.action == Action::Place);

    for (const TaskCode& t : all_task_codes()) CHECK(parse_task_code(t.to_string()) == t);
    std::set<std::string> codes;
    for (const TaskCode& t : all_task_codes()) codes.insert(t.to_string());
    CHECK(codes.size() == 8);

    for (std::string_view bad : {"", "SG", "SGIX", "XGI", "SXI", "SGX", "sgi"}) {
        CHECK(code_of([&] { parse_task_code(bad); }) == ErrorCode::InvalidTaskCode);
    }
}

TEST_CASE("task selections follow object size only") {
    std::vector<int> small, large;
    const auto s = small_task_selection(), l = large_task_selection();
    for (LandmarkId id : s.ids()) small.push_back(id.index());
    for (LandmarkId id : l.ids()) large.push_back(id.index());
    CHECK(small == std::vector<int>{13, 14, 15, 16, 17, 18, 19, 20, 21, 22});
    CHECK(large == std::vector<int>{11, 12, 13, 14, 25, 26});
    CHECK(small_task_selection().dimension() == 30);
    CHECK(large_task_selection().dimension() == 18);
    CHECK(full_selection().size() == 33);

    for (const TaskCode& t : all_task_codes()) {
        const auto expected = t.size == ObjectSize::Small ? small_task_selection() : large_task_selection();
        CHECK(selection_for_task(t).ids() == expected.ids());
    }
}

TEST_CASE("selections sort and reject duplicates") {
    LandmarkSelection s({LandmarkId(5), LandmarkId(2), LandmarkId(9)});
    CHECK(s.ids().front() == LandmarkId(2));
    CHECK(s.contains(LandmarkId(9)));
    CHECK_FALSE(s.contains(LandmarkId(3)));
    CHECK(code_of([] { LandmarkSelection({}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { LandmarkSelection({LandmarkId(1), LandmarkId(1)}); }) == ErrorCode::InvalidArgument);

    const auto cols = column_labels(s);
    REQUIRE(cols.size() == 9);
    CHECK(cols[0] == ColumnLabel{LandmarkId(2), Axis::X});
    CHECK(cols[4] == ColumnLabel{LandmarkId(5), Axis::Y});
    CHECK(cols[8] == ColumnLabel{LandmarkId(9), Axis::Z});
}

TEST_CASE("frames sort points and reject duplicates") {
    LandmarkFrame f(3, {{LandmarkId(7), Vec3(1, 2, 3), std::nullopt}, {LandmarkId(1), Vec3(4, 5, 6), 0.9}});
    CHECK(f.points().front().id == LandmarkId(1));
    REQUIRE(f.find(LandmarkId(7)) != nullptr);
    CHECK(f.find(LandmarkId(7))->position == Vec3(1, 2, 3));
    CHECK(f.find(LandmarkId(2)) == nullptr);
    CHECK(code_of([] {
              LandmarkFrame(0, {{LandmarkId(1), Vec3::Zero(), std::nullopt}, {LandmarkId(1), Vec3::Ones(), std::nullopt}});
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { LandmarkFrame(-1, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stream construction and ordering") {
    CHECK(code_of([] { LandmarkStream(0.0, {}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { LandmarkStream(std::numeric_limits<double>::quiet_NaN(), {}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { require_ordered(LandmarkStream(30.0, {})); }) == ErrorCode::EmptyStream);

    LandmarkStream shuffled(30.0, {frame_with(2, {{0, -1}}), frame_with(1, {{0, -1}})});
    CHECK(code_of([&] { require_ordered(shuffled); }) == ErrorCode::InvalidArgument);
    LandmarkStream gappy(25.0, {frame_with(0, {{0, -1}}), frame_with(4, {{0, -1}})});
    CHECK_NOTHROW(require_ordered(gappy));
    CHECK(gappy.timestamp_s(gappy.frames()[1]) == doctest::Approx(0.16));
}

TEST_CASE("feature matrix layout") {
    const auto sel = LandmarkSelection({LandmarkId(3), LandmarkId(8)});
    const auto stream = fixtures::make_stream(4, sel, [](std::int64_t t, LandmarkId id) {
        return Vec3(static_cast<double>(t), id.index(), 10.0 * static_cast<double>(t) + id.index());
    });
    const FeatureMatrix fm = select_features(stream, sel);
    REQUIRE(fm.rows() == 4);
    REQUIRE(fm.cols() == 6);
    CHECK(fm.frame_indices == std::vector<std::int64_t>{0, 1, 2, 3});
    CHECK(fm.values(2, 0) == 2.0);
    CHECK(fm.values(2, 1) == 3.0);
    CHECK(fm.values(2, 2) == 23.0);
    CHECK(fm.values(2, 5) == 28.0);

    const auto wider = LandmarkSelection({LandmarkId(3), LandmarkId(9)});
    CHECK(code_of([&] { select_features(stream, wider); }) == ErrorCode::MissingLandmark);
    CHECK(code_of([&] { select_features(LandmarkStream(30.0, {}), sel); }) == ErrorCode::EmptyStream);
}

TEST_CASE("carry-forward fills missing and low-visibility landmarks") {
    const LandmarkSelection sel({LandmarkId(1), LandmarkId(2)});
    LandmarkStream stream(30.0, {frame_with(0, {{1, 0.9}, {2, 0.9}}), frame_with(1, {{1, 0.9}}),
                                 frame_with(2, {{1, 0.9}, {2, 0.2}}), frame_with(3, {{1, 0.9}, {2, 0.8}})});
    const auto filled = apply_gap_policy(stream, sel, GapOptions{GapPolicy::CarryForward, 0.5});
    const Vec3 first = stream.frames()[0].find(LandmarkId(2))->position;
    CHECK(filled.frames()[1].find(LandmarkId(2))->position == first);
    CHECK(filled.frames()[1].is_filled(LandmarkId(2)));
    CHECK(filled.frames()[2].find(LandmarkId(2))->position == first);
    CHECK(filled.frames()[2].is_filled(LandmarkId(2)));
    CHECK_FALSE(filled.frames()[3].is_filled(LandmarkId(2)));
    CHECK(filled.frames()[3].find(LandmarkId(2))->position == stream.frames()[3].find(LandmarkId(2))->position);
    CHECK_FALSE(filled.frames()[0].is_filled(LandmarkId(1)));

    LandmarkStream late(30.0, {frame_with(0, {{1, 0.9}}), frame_with(1, {{1, 0.9}, {2, 0.9}})});
    CHECK(code_of([&] { apply_gap_policy(late, sel, GapOptions{}); }) == ErrorCode::MissingLandmark);
    CHECK(apply_gap_policy(late, sel, GapOptions{GapPolicy::None, 0.5}) == late);
}

TEST_CASE("validation reports issues without throwing") {
    const auto clean = fixtures::make_stream(10, small_task_selection(),
                                             [](std::int64_t t, LandmarkId id) { return Vec3(t * 0.01, id.index() * 0.02, 0); });
    const auto ok = validate_stream(clean);
    CHECK(ok.ok());
    CHECK(ok.frame_count == 10);
    CHECK(ok.missing_rate.size() == 10);
    CHECK(ok.missing_rate.at(LandmarkId(13)) == 0.0);
    CHECK(ok.coordinate_range[0].max == doctest::Approx(0.09));

    LandmarkStream bad(5000.0, {frame_with(3, {{0, 1.5}}), frame_with(2, {{0, 0.5}, {1, -1}}),
                                LandmarkFrame(4, {{LandmarkId(0), Vec3(std::nan(""), 0, 0), std::nullopt}})});
    const auto report = validate_stream(bad);
    std::set<IssueKind> kinds;
    for (const auto& i : report.issues) kinds.insert(i.kind);
    CHECK(kinds.count(IssueKind::UnusualFps) == 1);
    CHECK(kinds.count(IssueKind::NonMonotonicFrameIndex) == 1);
    CHECK(kinds.count(IssueKind::VisibilityOutOfRange) == 1);
    CHECK(kinds.count(IssueKind::NonFiniteCoordinate) == 1);
    CHECK(report.missing_rate.at(LandmarkId(1)) == doctest::Approx(2.0 / 3.0));

    const auto empty = validate_stream(LandmarkStream(30.0, {}));
    REQUIRE(empty.issues.size() == 1);
    CHECK(empty.issues[0].kind == IssueKind::EmptyStream);
}
