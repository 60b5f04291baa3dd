#include "distbrush/engine.hpp"
#include "distbrush/error.hpp"
#include "distbrush/fixtures/agent.hpp"
#include "distbrush/fixtures/generate.hpp"
#include "distbrush/rng.hpp"
#include "distbrush/serialize.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace distbrush;

namespace {

struct Small {
    fixtures::Fixture fx;
    std::shared_ptr<const SnnModel> model;
};

Small small_fixture(std::size_t perCluster = 30) {
    fixtures::FixtureSpec spec;
    spec.nPerCluster = perCluster;
    spec.seed = 42;
    Small s{fixtures::generate(spec), nullptr};
    s.model = std::make_shared<const SnnModel>(build_snn_model(build_knn(s.fx.data, 8)));
    return s;
}

PointId densest_in(const SnnModel& m, const std::vector<int>& truth, int cls) {
    PointId best = 0;
    bool found = false;
    for (PointId i = 0; i < truth.size(); ++i) {
        if (truth[i] == cls && (!found || m.density()[i] > m.density()[best])) {
            best = i;
            found = true;
        }
    }
    return best;
}

void check_lens_invariants(const Session& s) {
    const SessionState& st = s.state();
    REQUIRE(st.lens);
    REQUIRE(st.closeness);
    for (std::size_t i = 0; i < st.live.size(); ++i) {
        if (st.closeness->classes[i] == NeighborClass::NonNeighbor) {
            CHECK_FALSE(convex_contains(st.lens->outer, st.live[i]));
        }
        if (st.closeness->classes[i] == NeighborClass::TrueNeighbor) {
            CHECK(convex_contains(st.lens->inner, st.live[i], 1e-9));
        }
    }
}

} // namespace

TEST_CASE("new session") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    CHECK(session.state().phase == Phase::Idle);
    CHECK(session.state().brushes.empty());
    CHECK(session.state().live == s.fx.projection.positions);
    CHECK(session.export_labels() == std::vector<int>(60, -1));
    Projection shorter = s.fx.projection;
    shorter.positions.pop_back();
    CHECK_THROWS_AS(Session(s.fx.data, shorter, s.model), AlignmentError);
    SessionConfig bad;
    bad.painterMinFraction = 0;
    CHECK_THROWS_AS(Session(s.fx.data, s.fx.projection, s.model, bad), ParameterError);
}

TEST_CASE("transient lens reverts exactly") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    const PointId p = densest_in(*s.model, s.fx.truth, 0);
    session.handle(MoveTo{s.fx.projection.positions[p]});
    CHECK(session.state().phase == Phase::Inspect);
    REQUIRE(session.state().seeds);
    const auto before = session.state().live;
    CHECK(session.handle(PauseElapsed{100}).status == EventStatus::Ignored);
    CHECK(session.handle(PauseElapsed{}).status == EventStatus::Applied);
    CHECK(session.state().phase == Phase::TransientLens);
    CHECK(session.state().lens);
    check_lens_invariants(session);
    CHECK(session.state().live != before);
    session.handle(MoveTo{s.fx.projection.positions[p] + Point2{1e-3, 0}});
    CHECK(session.state().phase == Phase::Inspect);
    CHECK(session.state().live == before);
    CHECK_FALSE(session.state().lens);
}

TEST_CASE("press then release captures seeds and covered points") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    const PointId p = densest_in(*s.model, s.fx.truth, 1);
    session.handle(MoveTo{s.fx.projection.positions[p]});
    session.handle(PauseElapsed{});
    std::set<PointId> expected(session.state().seeds->members.begin(), session.state().seeds->members.end());
    for (PointId q : covered_points(session.state().live, session.state().painter)) {
        expected.insert(q);
    }
    CHECK(session.handle(Press{}).status == EventStatus::Applied);
    CHECK(session.state().phase == Phase::Brushing);
    check_lens_invariants(session);
    CHECK(session.handle(Release{}).status == EventStatus::Applied);
    CHECK(session.state().phase == Phase::Inspect);
    REQUIRE(session.state().brushes.size() == 1);
    const Brush& b = session.state().brushes[0];
    CHECK(std::set<PointId>(b.points.begin(), b.points.end()) == expected);
    CHECK(b.id == 1);
    CHECK(b.active);
    for (PointId q : b.points) {
        CHECK(session.export_labels()[q] == 1);
    }
}

TEST_CASE("ignored and rejected events") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    CHECK(session.handle(Release{}).status == EventStatus::Ignored);
    CHECK(session.handle(PauseElapsed{}).status == EventStatus::Ignored);
    CHECK(session.handle(SwitchBrush{4}).status == EventStatus::Rejected);
    CHECK(session.handle(SetThetaIn{1.0}).status == EventStatus::Rejected);
    CHECK(session.handle(SetThetaOut{-0.1}).status == EventStatus::Rejected);
    CHECK(session.handle(MoveTo{{std::nan(""), 0}}).status == EventStatus::Rejected);
    CHECK(session.handle(Wheel{std::numeric_limits<double>::infinity()}).status == EventStatus::Rejected);
    // Painter over empty space: no seeds, press is a no-op.
    session.handle(MoveTo{{1e6, 1e6}});
    CHECK(session.handle(Press{}).status == EventStatus::Ignored);
    CHECK(session.handle(ToggleContext{}).status == EventStatus::Applied);
    CHECK(session.state().phase == Phase::Contextualized);
    CHECK(session.handle(Press{}).status == EventStatus::Rejected);
    CHECK(session.handle(NewBrush{}).status == EventStatus::Rejected);
    CHECK(session.handle(ToggleContext{}).status == EventStatus::Applied);
    CHECK(session.state().phase == Phase::Inspect);
}

TEST_CASE("wheel clamps the painter radius") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    session.handle(Wheel{1e9});
    CHECK(session.state().painter.radius == session.state().painterMax);
    session.handle(Wheel{-1e9});
    CHECK(session.state().painter.radius == session.state().painterMin);
}

TEST_CASE("contextualize") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    SUBCASE("identity without brushing") {
        const auto ends = session.contextualize();
        for (std::size_t i = 0; i < ends.size(); ++i) {
            CHECK(ends[i].from == ends[i].to);
        }
    }
    SUBCASE("after a brush, endpoints lead back to the original rows; twice restores") {
        const PointId p = densest_in(*s.model, s.fx.truth, 0);
        session.handle(MoveTo{s.fx.projection.positions[p]});
        session.handle(PauseElapsed{});
        session.handle(Press{});
        CHECK_THROWS_AS(session.contextualize(), PhaseError);
        CHECK(session.handle(ToggleContext{}).status == EventStatus::Rejected);
        session.handle(Release{});
        const auto relocated = session.state().live;
        const auto ends = session.contextualize();
        for (std::size_t i = 0; i < ends.size(); ++i) {
            CHECK(ends[i].from == relocated[i]);
            CHECK(ends[i].to == s.fx.projection.positions[i]);
        }
        CHECK(session.state().live == s.fx.projection.positions);
        session.contextualize();
        CHECK(session.state().live == relocated);
        CHECK(session.state().phase == Phase::Inspect);
    }
}

TEST_CASE("heatmap order follows brushes, then unbrushed ascending") {
    // Eight points on a line, k = 1: no point shares a neighbor with 5 or 7.
    std::vector<double> v;
    for (int i = 0; i < 8; ++i) {
        v.push_back(10.0 * i);
        v.push_back(0.0);
    }
    const Dataset d(8, 2, v);
    Projection proj;
    for (int i = 0; i < 8; ++i) {
        proj.positions.push_back({10.0 * i, 0.0});
    }
    auto model = std::make_shared<const SnnModel>(build_snn_model(build_knn(d, 1)));
    Session session(d, proj, model);
    CHECK(session.heatmap_order() == std::vector<PointId>{0, 1, 2, 3, 4, 5, 6, 7});
    session.handle(Wheel{1.0 - session.state().painter.radius});
    session.handle(MoveTo{{50, 0}});
    session.handle(PauseElapsed{});
    session.handle(Press{});
    session.handle(MoveTo{{20, 0}});
    session.handle(Release{});
    session.handle(NewBrush{});
    session.handle(MoveTo{{70, 0}});
    session.handle(PauseElapsed{});
    session.handle(Press{});
    session.handle(Release{});
    REQUIRE(session.state().brushes.size() == 2);
    CHECK(session.state().brushes[0].points == std::vector<PointId>{5, 2});
    CHECK(session.state().brushes[1].points == std::vector<PointId>{7});
    CHECK(session.heatmap_order() == std::vector<PointId>{5, 2, 7, 0, 1, 3, 4, 6});
    CHECK(session.export_labels() == std::vector<int>{-1, -1, 1, -1, -1, 1, -1, 2});
    CHECK(session.state().brushes[1].colorTag != session.state().brushes[0].colorTag);
}

TEST_CASE("overwrite mode decides what happens to another brush's points") {
    const Small s = small_fixture();
    const PointId p = densest_in(*s.model, s.fx.truth, 0);

    auto first_brush = [&](Session& session) {
        session.handle(MoveTo{s.fx.projection.positions[p]});
        session.handle(PauseElapsed{});
        session.handle(Press{});
        session.handle(Release{});
        session.handle(NewBrush{});
    };

    SUBCASE("off: attracted points go back and stay in their brush") {
        Session session(s.fx.data, s.fx.projection, s.model);
        first_brush(session);
        const std::vector<PointId> owned = session.state().brushes[0].points;
        const auto before = session.state().live;
        session.handle(MoveTo{before[p]});
        session.handle(PauseElapsed{});
        session.handle(Press{});
        bool moved = false;
        for (PointId q : owned) {
            moved = moved || !(session.state().live[q] == before[q]);
        }
        CHECK(moved);
        session.handle(Release{});
        for (PointId q : owned) {
            CHECK(session.state().live[q] == before[q]);
            CHECK(session.export_labels()[q] == 1);
        }
    }
    SUBCASE("on: covered points change brush") {
        Session session(s.fx.data, s.fx.projection, s.model);
        first_brush(session);
        const std::vector<PointId> owned = session.state().brushes[0].points;
        session.handle(SetOverwrite{true});
        session.handle(MoveTo{session.state().live[p]});
        session.handle(PauseElapsed{});
        session.handle(Press{});
        session.handle(Release{});
        CHECK(session.export_labels()[p] == 2);
        const auto& b1 = session.state().brushes[0].points;
        CHECK(std::find(b1.begin(), b1.end(), p) == b1.end());
    }
}

TEST_CASE("drag mode translates the active brush") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    const PointId p = densest_in(*s.model, s.fx.truth, 0);
    const Point2 at = s.fx.projection.positions[p];
    session.handle(MoveTo{at});
    session.handle(PauseElapsed{});
    session.handle(Press{});
    session.handle(Release{});
    const auto before = session.state().live;
    const auto members = session.state().brushes[0].points;
    session.handle(SetDrag{true});
    CHECK(session.handle(Press{}).status == EventStatus::Applied);
    session.handle(MoveTo{at + Point2{2, -1}});
    session.handle(Release{});
    for (std::size_t i = 0; i < before.size(); ++i) {
        const bool member = std::find(members.begin(), members.end(), i) != members.end();
        if (member) {
            CHECK(session.state().live[i].x == doctest::Approx(before[i].x + 2));
            CHECK(session.state().live[i].y == doctest::Approx(before[i].y - 1));
        } else {
            CHECK(session.state().live[i] == before[i]);
        }
    }
}

TEST_CASE("switching brushes and theta updates") {
    const Small s = small_fixture();
    Session session(s.fx.data, s.fx.projection, s.model);
    const PointId p = densest_in(*s.model, s.fx.truth, 0);
    session.handle(MoveTo{s.fx.projection.positions[p]});
    session.handle(PauseElapsed{});
    session.handle(Press{});
    CHECK(session.handle(SetThetaIn{0.2}).status == EventStatus::Applied);
    check_lens_invariants(session);
    session.handle(Release{});
    session.handle(NewBrush{});
    CHECK(session.state().activeBrush == 2);
    CHECK(session.handle(SwitchBrush{1}).status == EventStatus::Applied);
    CHECK(session.state().activeBrush == 1);
    CHECK(session.state().brushes[0].active);
    CHECK_FALSE(session.state().brushes[1].active);
    CHECK(session.state().params.thetaIn == 0.2);
}

TEST_CASE("traces age out") {
    const Small s = small_fixture(60);
    fixtures::AgentConfig ac;
    const auto traj = fixtures::run_agent(s.fx.data, s.fx.projection, s.model, {}, ac);
    Session session(s.fx.data, s.fx.projection, s.model);
    std::size_t maxTraces = 0;
    for (const auto& e : traj.events) {
        session.handle(e.event);
        maxTraces = std::max(maxTraces, session.state().traces.size());
        for (const Trace& t : session.state().traces) {
            CHECK(t.age < session.config().traceLifetime);
        }
    }
    for (int i = 0; i < 30; ++i) {
        session.handle(MoveTo{{1e6, 1e6}});
    }
    CHECK(session.state().traces.empty());
}

TEST_CASE("random event streams keep brushes disjoint, the heatmap a permutation, and replay deterministic") {
    const Small s = small_fixture();
    const std::size_t n = s.fx.data.size();
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Rng rng(seed);
        std::vector<Event> events;
        for (int i = 0; i < 150; ++i) {
            const auto pick = rng.below(12);
            const PointId q = static_cast<PointId>(rng.below(n));
            const Point2 at = s.fx.projection.positions[q];
            switch (pick) {
            case 0:
            case 1:
            case 2:
            case 3:
                events.push_back(MoveTo{at + Point2{rng.normal(0, 0.05), rng.normal(0, 0.05)}});
                break;
            case 4:
                events.push_back(PauseElapsed{});
                break;
            case 5:
                events.push_back(Press{});
                break;
            case 6:
                events.push_back(Release{});
                break;
            case 7:
                events.push_back(Wheel{rng.normal(0, 0.05)});
                break;
            case 8:
                events.push_back(NewBrush{});
                break;
            case 9:
                events.push_back(SetOverwrite{rng.below(2) == 1});
                break;
            case 10:
                events.push_back(SetThetaIn{rng.uniform(0.0, 0.6)});
                break;
            default:
                events.push_back(SwitchBrush{1 + static_cast<int>(rng.below(3))});
                break;
            }
        }
        Session a(s.fx.data, s.fx.projection, s.model);
        Session b(s.fx.data, s.fx.projection, s.model);
        for (const Event& e : events) {
            a.handle(e);
            b.handle(e);
            std::vector<int> seen(n, 0);
            for (const Brush& br : a.state().brushes) {
                for (PointId p : br.points) {
                    CHECK(seen[p] == 0);
                    seen[p] = 1;
                    CHECK(a.state().owner[p] == br.id);
                }
            }
        }
        auto order = a.heatmap_order();
        std::sort(order.begin(), order.end());
        for (PointId i = 0; i < n; ++i) {
            CHECK(order[i] == i);
        }
        CHECK(snapshot_to_json(a).dump() == snapshot_to_json(b).dump());
    }
}
