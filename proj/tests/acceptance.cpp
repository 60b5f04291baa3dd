// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "../tools/cli.hpp"
#include "distbrush/closeness.hpp"
#include "distbrush/engine.hpp"
#include "distbrush/fixtures/agent.hpp"
#include "distbrush/fixtures/generate.hpp"
#include "distbrush/fixtures/oracles.hpp"
#include "distbrush/lens.hpp"
#include "distbrush/metrics.hpp"
#include "distbrush/rng.hpp"
#include "distbrush/seeds.hpp"
#include "distbrush/serialize.hpp"
#include "distbrush/snn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace distbrush;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(DISTBRUSH_TEST_DATA) / "golden";

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) {
            detail = why;
        }
        pass = false;
    }
};

fixtures::Matrix to_matrix(const Dataset& d) {
    fixtures::Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto r = d.row(i);
        m[i].assign(r.begin(), r.end());
    }
    return m;
}

fixtures::FixtureSpec random_spec(Rng& rng, std::size_t maxN) {
    fixtures::FixtureSpec spec;
    spec.seed = rng.next();
    switch (rng.below(4)) {
    case 0:
        spec.kind = fixtures::FixtureKind::TwoBlobs;
        spec.nPerCluster = 5 + rng.below(maxN / 2 - 4);
        break;
    case 1:
        spec.kind = fixtures::FixtureKind::ThreeBlobs;
        spec.nPerCluster = 5 + rng.below(maxN / 3 - 4);
        break;
    case 2:
        spec.kind = fixtures::FixtureKind::HypersphereShells;
        spec.clusters = 2 + rng.below(2);
        spec.nPerCluster = 5 + rng.below(maxN / spec.clusters - 4);
        spec.separation = 12.0;
        break;
    default:
        spec.kind = fixtures::FixtureKind::GridLattice;
        spec.clusters = 1;
        spec.nPerCluster = 9 + rng.below(maxN - 8);
        break;
    }
    spec.M = 4 + spec.cluster_count() + rng.below(6);
    return spec;
}

// 1. snn_similarity and build_snn_model against the brute-force score matrix.
Outcome snn_oracle() {
    Outcome o;
    Rng rng(101);
    std::size_t pairs = 0;
    for (int f = 0; f < 20; ++f) {
        const auto fx = fixtures::generate(random_spec(rng, 200));
        const std::size_t n = fx.data.size();
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 20));
        const KnnIndex index = build_knn(fx.data, k);
        const SnnModel model = build_snn_model(index);
        const auto oracle = fixtures::oracle_snn(to_matrix(fx.data), k);
        for (PointId p = 0; p < n; ++p) {
            for (PointId q = 0; q < n; ++q) {
                if (p == q) {
                    continue;
                }
                const std::uint64_t want = oracle[p][q];
                if (model.sim(p, q) != want || snn_similarity(index, p, q) != want) {
                    o.fail("fixture " + std::to_string(f) + " mismatch at (" + std::to_string(p) + "," +
                           std::to_string(q) + ")");
                }
                ++pairs;
            }
        }
    }
    if (o.pass) {
        o.detail = std::to_string(pairs) + " pairs over 20 fixtures equal";
    }
    return o;
}

// 2. Closeness range, classification invariants, oracle equality, cut monotonicity.
Outcome closeness_contract() {
    Outcome o;
    Rng rng(202);
    const ClosenessParams defaults;
    const std::vector<fixtures::FixtureKind> kinds = {fixtures::FixtureKind::TwoBlobs, fixtures::FixtureKind::ThreeBlobs,
                                                      fixtures::FixtureKind::HypersphereShells,
                                                      fixtures::FixtureKind::GridLattice};
    for (const auto kind : kinds) {
        fixtures::FixtureSpec spec;
        spec.kind = kind;
        spec.nPerCluster = 40;
        spec.clusters = kind == fixtures::FixtureKind::GridLattice ? 1 : 2;
        spec.separation = kind == fixtures::FixtureKind::HypersphereShells ? 12.0 : 10.0;
        const auto fx = fixtures::generate(spec);
        const SnnModel model = build_snn_model(build_knn(fx.data, 8));
        const std::size_t n = fx.data.size();
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<PointId> cluster;
            for (PointId i = 0; i < n; ++i) {
                if (rng.below(4) == 0) {
                    cluster.push_back(i);
                }
            }
            if (cluster.empty()) {
                cluster.push_back(0);
            }
            const std::set<PointId> in(cluster.begin(), cluster.end());
            const ClosenessResult r = classify(model, defaults, cluster);
            for (PointId p = 0; p < n; ++p) {
                const double v = r.values[p];
                if (!(v >= 0.0 && v <= 1.0)) {
                    o.fail("value out of range");
                }
                const bool member = in.count(p) != 0;
                if ((r.classes[p] == NeighborClass::Member) != member) {
                    o.fail("Member class does not match membership");
                }
                if (!member) {
                    const NeighborClass want = v == 1.0   ? NeighborClass::TrueNeighbor
                                               : v == 0.0 ? NeighborClass::NonNeighbor
                                                          : NeighborClass::Uncertain;
                    if (r.classes[p] != want) {
                        o.fail("class does not follow value");
                    }
                }
                if (v != closeness(model, defaults, p, cluster)) {
                    o.fail("classify and closeness disagree");
                }
            }
        }
    }

    int boundaryDraws = 0;
    for (int draw = 0; draw < 100; ++draw) {
        const auto fx = fixtures::generate(random_spec(rng, 120));
        const std::size_t n = fx.data.size();
        const std::size_t k = 2 + rng.below(std::min<std::size_t>(n - 2, 12));
        const SnnModel model = build_snn_model(build_knn(fx.data, k));
        const auto sim = fixtures::oracle_snn(to_matrix(fx.data), k);
        const PointId p = static_cast<PointId>(rng.below(n));
        std::vector<PointId> cluster;
        std::vector<std::size_t> clusterOracle;
        for (std::size_t i : rng.sample_without_replacement(n, 1 + rng.below(n / 2))) {
            cluster.push_back(static_cast<PointId>(i));
            clusterOracle.push_back(i);
        }
        ClosenessParams a;
        a.thetaIn = rng.uniform(0.0, 0.95);
        // Every other draw puts thetaIn exactly on one of p's similarities to exercise the strict cut.
        std::vector<double> ties;
        for (PointId q : cluster) {
            const double r = static_cast<double>(sim[p][q]) / static_cast<double>(model.sim_max());
            if (q != p && sim[p][q] > 0 && r < 1.0) {
                ties.push_back(r);
            }
        }
        if (draw % 2 == 0 && !ties.empty()) {
            a.thetaIn = ties[rng.below(ties.size())];
            ++boundaryDraws;
        }
        ClosenessParams b = a;
        b.thetaIn = rng.uniform(a.thetaIn, 0.99);
        const double v = closeness(model, a, p, cluster);
        const auto want = fixtures::oracle_closeness(sim, model.sim_max(), a.thetaIn, p, clusterOracle);
        if (v != want.value) {
            o.fail("draw " + std::to_string(draw) + ": closeness differs from oracle");
        }
        if (!(v >= 0.0 && v <= 1.0)) {
            o.fail("draw " + std::to_string(draw) + ": value out of range");
        }
        if (cluster_cut(model, b, p, cluster).size() > cluster_cut(model, a, p, cluster).size()) {
            o.fail("draw " + std::to_string(draw) + ": cut grew with thetaIn");
        }
    }
    if (o.pass) {
        o.detail = "4 fixture kinds x 5 clusters classified; 100 draws (" + std::to_string(boundaryDraws) +
                   " on a cut boundary) equal to oracle, cuts monotone";
    }
    return o;
}

// 3. Seeds under a painter that covers both blobs come from one blob.
Outcome seed_purity() {
    Outcome o;
    int pure = 0;
    const ClosenessParams params;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        fixtures::FixtureSpec spec;
        spec.seed = 5000 + trial;
        const auto fx = fixtures::generate(spec);
        const SnnModel model = build_snn_model(build_knn(fx.data, 10));
        Rng rng(trial);
        const Point2 mid{(fx.centers[0][0] + fx.centers[1][0]) / 2, (fx.centers[0][1] + fx.centers[1][1]) / 2};
        Painter painter{mid + Point2{rng.normal(0, 0.1), rng.normal(0, 0.1)}, 0.4};
        std::vector<PointId> covered;
        for (;;) {
            covered = covered_points(fx.projection.positions, painter);
            std::set<int> blobs;
            for (PointId q : covered) {
                blobs.insert(fx.truth[q]);
            }
            if (blobs.size() == 2) {
                break;
            }
            painter.radius *= 1.25;
        }
        const SeedSet seeds = select_seeds(model, params, covered);
        std::set<int> blobs;
        for (PointId q : seeds.members) {
            blobs.insert(fx.truth[q]);
        }
        pure += blobs.size() == 1 ? 1 : 0;
    }
    o.detail = std::to_string(pure) + "/100 trials single-blob";
    if (pure != 100) {
        o.fail(o.detail);
    }
    return o;
}

std::vector<Point2> random_brush(Rng& rng) {
    const std::size_t n = 1 + rng.below(60);
    const Point2 c{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double sx = rng.uniform(0.05, 2.0), sy = rng.uniform(0.05, 2.0);
    const double a = rng.uniform(0, M_PI);
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.normal(0, sx), v = rng.normal(0, sy);
        pts.push_back(c + Point2{std::cos(a) * u - std::sin(a) * v, std::sin(a) * u + std::cos(a) * v});
    }
    return pts;
}

Lens random_lens(Rng& rng) {
    const LensConfig cfg;
    const auto pts = random_brush(rng);
    const InnerBoundary inner = build_inner(pts, pts[0], cfg);
    return make_lens(inner.polygon, lens_margin(inner.polygon, cfg));
}

double angle_between(Point2 a, Point2 b) { return std::abs(std::atan2(cross(a, b), dot(a, b))); }

// 4. Convexity, containment, exact corner offsets, ray continuity.
Outcome lens_geometry() {
    Outcome o;
    Rng rng(404);
    double worstJump = 0.0;
    double worstOffset = 0.0;
    for (int l = 0; l < 10; ++l) {
        const Lens lens = random_lens(rng);
        const std::string tag = "lens " + std::to_string(l) + ": ";
        if (!is_convex_ccw(lens.inner) || !is_simple(lens.inner)) {
            o.fail(tag + "inner not convex and simple");
        }
        if (!is_convex_ccw(lens.outer) || !is_simple(lens.outer)) {
            o.fail(tag + "outer not convex");
        }
        for (std::size_t i = 0; i < lens.inner.size(); ++i) {
            if (!convex_contains_strict(lens.outer, lens.inner[i])) {
                o.fail(tag + "outer does not contain inner");
            }
            const double off = std::abs(distance(lens.outer[i], lens.inner[i]) - lens.margin);
            worstOffset = std::max(worstOffset, off);
            if (off > 1e-9) {
                o.fail(tag + "corner offset differs from margin");
            }
        }
        Point2 prev{};
        Point2 first{};
        for (int s = 0; s < 3600; ++s) {
            const double a = 2.0 * M_PI * s / 3600.0;
            const Point2 p = lens.centroid + Point2{std::cos(a), std::sin(a)} * lens.innerDiameter;
            const Point2 dir = relocation_ray(lens, p).direction;
            if (s == 0) {
                first = dir;
            } else {
                worstJump = std::max(worstJump, angle_between(prev, dir));
            }
            prev = dir;
        }
        worstJump = std::max(worstJump, angle_between(prev, first));
    }
    const double jumpDeg = worstJump * 180.0 / M_PI;
    if (jumpDeg >= 5.0) {
        o.fail("max angular jump " + std::to_string(jumpDeg) + " deg");
    }
    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "10 lenses; max ray jump %.3f deg; max offset error %.2e", jumpDeg,
                      worstOffset);
        o.detail = buf;
    }
    return o;
}

// 5. Plan targets honor the neighbor classes.
Outcome relocation_correctness() {
    Outcome o;
    Rng rng(505);
    std::size_t checkedPairs = 0;
    for (int cfg = 0; cfg < 50; ++cfg) {
        const Lens lens = random_lens(rng);
        ClosenessParams params;
        params.thetaOut = rng.uniform(0.2, 0.8);
        const double reach = 2.0 * (lens.innerDiameter + lens.margin);
        ClosenessResult cr;
        std::vector<Point2> live;
        auto add = [&](Point2 p, NeighborClass c, double v) {
            live.push_back(p);
            cr.classes.push_back(c);
            cr.values.push_back(v);
        };
        for (int i = 0; i < 200; ++i) {
            Point2 p = lens.centroid + Point2{rng.uniform(-reach, reach), rng.uniform(-reach, reach)};
            if (distance(p, lens.centroid) < 1e-9) {
                p = p + Point2{reach / 10, 0};
            }
            switch (rng.below(4)) {
            case 0:
                add(p, NeighborClass::Member, 1.0);
                break;
            case 1:
                add(p, NeighborClass::TrueNeighbor, 1.0);
                break;
            case 2:
                add(p, NeighborClass::NonNeighbor, 0.0);
                break;
            default:
                add(p, NeighborClass::Uncertain, rng.uniform(0.01, 0.99));
                break;
            }
        }
        // Uncertain points sharing rays from the centroid.
        std::vector<std::vector<std::size_t>> rays;
        for (int r = 0; r < 4; ++r) {
            const double a = rng.uniform(0, 2 * M_PI);
            const Point2 u{std::cos(a), std::sin(a)};
            rays.emplace_back();
            for (int j = 0; j < 5; ++j) {
                rays.back().push_back(live.size());
                add(lens.centroid + u * rng.uniform(0.05, 1.0) * reach, NeighborClass::Uncertain,
                    rng.uniform(params.thetaOut, 0.999));
            }
        }
        const RelocationPlan plan = build_plan(lens, cr, params, live);
        std::vector<Point2> after = live;
        apply_plan(plan, after);
        const std::string tag = "config " + std::to_string(cfg) + ": ";
        for (std::size_t i = 0; i < after.size(); ++i) {
            switch (cr.classes[i]) {
            case NeighborClass::NonNeighbor:
                if (convex_contains(lens.outer, after[i])) {
                    o.fail(tag + "NonNeighbor inside outer");
                }
                break;
            case NeighborClass::TrueNeighbor:
            case NeighborClass::Member:
                if (!convex_contains(lens.inner, after[i], 1e-9)) {
                    o.fail(tag + "TrueNeighbor or member outside inner");
                }
                break;
            case NeighborClass::Uncertain:
                if (plan.classOf[i] == RelocationClass::AnnulusPlace &&
                    (!convex_contains(lens.outer, after[i], 1e-9) ||
                     convex_contains_strict(lens.inner, after[i], 1e-9))) {
                    o.fail(tag + "Uncertain target outside the annulus");
                }
                break;
            }
        }
        for (const auto& ray : rays) {
            for (std::size_t a : ray) {
                for (std::size_t b : ray) {
                    if (plan.classOf[a] != RelocationClass::AnnulusPlace) {
                        o.fail(tag + "ray point not placed in the annulus");
                    }
                    if (cr.values[a] > cr.values[b] &&
                        distance(after[a], lens.centroid) > distance(after[b], lens.centroid) + 1e-9) {
                        o.fail(tag + "annulus order not monotone in closeness");
                    }
                    ++checkedPairs;
                }
            }
        }
    }
    if (o.pass) {
        o.detail = "50 configurations; " + std::to_string(checkedPairs) + " same-ray pairs ordered";
    }
    return o;
}

struct Golden {
    Dataset data;
    Projection projection;
    Trajectory traj;
};

Golden load_golden(const std::string& name) {
    return {load_dataset(kGolden / (name + "_dataset.csv")), load_projection(kGolden / (name + "_projection.csv")),
            parse_trajectory(read_file(kGolden / (name + "_trajectory.json")))};
}

// 6. Bundled trajectories reproduce the labeling.
Outcome golden_trajectories() {
    Outcome o;
    std::string detail;
    const std::vector<std::pair<std::string, fixtures::FixtureSpec>> tasks = {
        {"easy_twoBlobs", fixtures::easy_task_spec()}, {"hard_threeBlobs", fixtures::hard_task_spec()}};
    for (const auto& [name, spec] : tasks) {
        const Golden g = load_golden(name);
        if (dataset_to_csv(g.data) != dataset_to_csv(fixtures::generate(spec).data)) {
            o.fail(name + ": bundled dataset differs from the generated fixture");
        }
        SessionConfig config;
        apply_session_overrides(g.traj.params, config);
        auto model = std::make_shared<const SnnModel>(build_snn_model(build_knn(g.data, 10)));
        Session session(g.data, g.projection, model, config);
        fixtures::replay(session, g.traj);
        const ClusteringScores s = clustering_scores(session.export_labels(), *g.data.labels());
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s ami %.4f arand %.4f vmeasure %.4f unassigned %.3f", name.c_str(), s.ami,
                      s.arand, s.vmeasure, s.unassignedFraction);
        detail += (detail.empty() ? "" : "; ") + std::string(buf);
        if (s.ami < 0.95 || s.arand < 0.95 || s.vmeasure < 0.95) {
            o.fail(buf);
        }
    }
    if (o.pass) {
        o.detail = detail;
    }
    return o;
}

// 7. Scripted labeling after distortion.
Outcome distortion_robustness() {
    Outcome o;
    const auto fx = fixtures::generate(fixtures::easy_task_spec());
    auto model = std::make_shared<const SnnModel>(build_snn_model(build_knn(fx.data, 10)));
    std::vector<double> ami;
    std::string detail;
    for (double p : {0.0, 0.2, 0.4, 0.6}) {
        const Projection distorted{distort_projection(fx.projection.positions, p, 77)};
        const Trajectory traj = fixtures::run_agent(fx.data, distorted, model, {}, {});
        Session session(fx.data, distorted, model);
        fixtures::replay(session, traj);
        ami.push_back(clustering_scores(session.export_labels(), fx.truth).ami);
        char buf[64];
        std::snprintf(buf, sizeof buf, "ami(%.1f)=%.4f", p, ami.back());
        detail += (detail.empty() ? "" : " ") + std::string(buf);
    }
    o.detail = detail;
    if (!(ami[2] >= 0.9 * ami[0])) {
        o.fail(detail + " (ami at 0.4 below 0.9 x ami at 0)");
    }
    return o;
}

// 8. Metric sanity.
Outcome metric_sanity() {
    Outcome o;
    Rng rng(808);
    for (int f = 0; f < 5; ++f) {
        const std::size_t n = 20 + rng.below(180);
        std::vector<double> v;
        std::vector<Point2> pos;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 p{rng.normal(), rng.normal()};
            v.push_back(p.x);
            v.push_back(p.y);
            pos.push_back(p);
        }
        const QualityScores q = trust_continuity(Dataset(n, 2, v), pos, 1 + rng.below(20));
        if (q.trustworthiness != 1.0 || q.continuity != 1.0) {
            o.fail("identity projection does not score exactly 1");
        }
    }
    for (const auto& spec : {fixtures::easy_task_spec(), fixtures::hard_task_spec()}) {
        const auto fx = fixtures::generate(spec);
        const ClusteringScores s = clustering_scores(fx.truth, fx.truth);
        if (s.ami != 1.0 || s.arand != 1.0 || s.vmeasure != 1.0 || s.homogeneity != 1.0 || s.completeness != 1.0) {
            o.fail("predicted = truth does not score exactly 1");
        }
    }
    for (int f = 0; f < 10; ++f) {
        const auto fx = fixtures::generate(random_spec(rng, 200));
        const std::size_t n = fx.data.size();
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 30));
        std::vector<Point2> pos = fx.projection.positions;
        for (Point2& p : pos) {
            p = p + Point2{rng.normal(0, 0.3), rng.normal(0, 0.3)};
        }
        fixtures::Matrix low;
        for (const Point2& p : pos) {
            low.push_back({p.x, p.y});
        }
        const QualityScores q = trust_continuity(fx.data, pos, k);
        const auto want = fixtures::oracle_trust_continuity(to_matrix(fx.data), low, k);
        if (q.trustworthiness != want.trustworthiness || q.continuity != want.continuity) {
            o.fail("T&C differs from the rank oracle on fixture " + std::to_string(f));
        }
    }
    if (o.pass) {
        o.detail = "identity T=C=1, truth scores 1, 10 fixtures equal to rank oracle";
    }
    return o;
}

// 9. Two CLI replays give identical bytes.
Outcome replay_determinism() {
    Outcome o;
    const fs::path tmp = fs::temp_directory_path() / "distbrush_acceptance_replay";
    fs::remove_all(tmp);
    std::vector<std::string> files;
    for (const char* run : {"a", "b"}) {
        std::ostringstream out, err;
        const int code = cli::run({"replay", "--dataset", (kGolden / "easy_twoBlobs_dataset.csv").string(),
                                   "--projection", (kGolden / "easy_twoBlobs_projection.csv").string(),
                                   "--trajectory", (kGolden / "easy_twoBlobs_trajectory.json").string(), "--out",
                                   (tmp / run).string()},
                                  out, err);
        if (code != cli::kOk) {
            o.fail("replay exited with " + std::to_string(code) + ": " + err.str());
            fs::remove_all(tmp);
            return o;
        }
    }
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(tmp / "a")) {
        const fs::path other = tmp / "b" / e.path().filename();
        if (!fs::exists(other) || read_file(e.path()) != read_file(other)) {
            o.fail(e.path().filename().string() + " differs");
        }
        ++compared;
    }
    fs::remove_all(tmp);
    if (compared < 4) {
        o.fail("expected at least 4 output files, found " + std::to_string(compared));
    }
    if (o.pass) {
        o.detail = std::to_string(compared) + " output files byte-identical";
    }
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budgetSeconds; // 0: no limit
    std::function<Outcome()> check;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "SNN oracle equivalence", 10.0, snn_oracle},
        {2, "closeness contract", 0.0, closeness_contract},
        {3, "seed purity", 0.0, seed_purity},
        {4, "lens geometry", 0.0, lens_geometry},
        {5, "relocation correctness", 0.0, relocation_correctness},
        {6, "end-to-end scripted labeling", 30.0, golden_trajectories},
        {7, "distortion robustness", 60.0, distortion_robustness},
        {8, "metric sanity", 0.0, metric_sanity},
        {9, "replay determinism", 0.0, replay_determinism},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budgetSeconds > 0.0 && secs >= c.budgetSeconds) {
            o.fail("took " + std::to_string(secs) + " s, budget " + std::to_string(c.budgetSeconds) + " s");
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
