#include "distbrush/error.hpp"
#include "distbrush/fixtures/generate.hpp"
#include "distbrush/seeds.hpp"

#include <doctest.h>

#include <algorithm>

using namespace distbrush;

TEST_CASE("covered points") {
    const std::vector<Point2> grid{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}};
    CHECK(covered_points(grid, {{0.5, 0.5}, 0.1}).empty());
    CHECK(covered_points(grid, {{2, 1}, 1e-9}) == std::vector<PointId>{6});
    // Radius 1 around (1,0): itself and its three lattice neighbors at distance exactly 1.
    CHECK(covered_points(grid, {{1, 0}, 1.0}) == std::vector<PointId>{0, 1, 2, 5});
    CHECK(covered_points(grid, {{1.5, 0}, 0.6}) == std::vector<PointId>{1, 2});
    CHECK(covered_points(grid, {{1.5, 0.5}, 0.75}) == std::vector<PointId>{1, 2, 5, 6});
    CHECK_THROWS_AS(covered_points(grid, {{0, 0}, 0.0}), ParameterError);
}

TEST_CASE("seed selection") {
    fixtures::FixtureSpec spec;
    spec.nPerCluster = 40;
    const auto fx = fixtures::generate(spec);
    const SnnModel m = build_snn_model(build_knn(fx.data, 8));
    const ClosenessParams params;

    SUBCASE("singleton cover") {
        const std::vector<PointId> one{17};
        const SeedSet s = select_seeds(m, params, one);
        CHECK(s.center == 17);
        CHECK(s.members == one);
    }
    SUBCASE("cover across both blobs stays in the center's blob") {
        std::vector<PointId> cover;
        for (PointId i = 0; i < 80; i += 3) {
            cover.push_back(i);
        }
        const SeedSet s = select_seeds(m, params, cover);
        CHECK(std::binary_search(s.members.begin(), s.members.end(), s.center));
        const int blob = fx.truth[s.center];
        for (PointId q : s.members) {
            CHECK(fx.truth[q] == blob);
            CHECK(std::binary_search(cover.begin(), cover.end(), q));
            if (q != s.center) {
                CHECK(normalized_sim(m, s.center, q) > params.thetaIn);
            }
        }
        const auto& dens = m.density();
        for (PointId q : cover) {
            CHECK(dens[q] <= dens[s.center]);
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(select_seeds(m, params, {}), EmptyCoverError);
    }
}

TEST_CASE("density ties go to the lowest index") {
    // A 4-cycle lattice: every point has the same density.
    const Dataset d(4, 2, {0, 0, 1, 0, 1, 1, 0, 1});
    const SnnModel m = build_snn_model(build_knn(d, 2));
    const std::vector<PointId> cover{3, 1, 2};
    REQUIRE(m.density()[1] == m.density()[3]);
    CHECK(select_seeds(m, {0.0, 0.5}, cover).center == 1);
}
