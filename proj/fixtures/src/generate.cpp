#include "distbrush/fixtures/generate.hpp"
#include "distbrush/error.hpp"
#include "distbrush/metrics.hpp"
#include "distbrush/rng.hpp"

#include <cmath>
#include <string>

namespace distbrush::fixtures {

const char* to_string(FixtureKind k) {
    switch (k) {
    case FixtureKind::TwoBlobs:
        return "twoBlobs";
    case FixtureKind::ThreeBlobs:
        return "threeBlobs";
    case FixtureKind::HypersphereShells:
        return "hypersphereShells";
    case FixtureKind::GridLattice:
        return "gridLattice";
    }
    return "?";
}

std::size_t FixtureSpec::cluster_count() const {
    switch (kind) {
    case FixtureKind::TwoBlobs:
        return 2;
    case FixtureKind::ThreeBlobs:
        return 3;
    default:
        return clusters;
    }
}

void FixtureSpec::validate() const {
    const std::size_t k = cluster_count();
    if (k < 1) {
        throw ParameterError("fixture needs at least one cluster");
    }
    if (nPerCluster < 1 || nPerCluster * k < 2) {
        throw ParameterError("fixture needs at least two points");
    }
    if (M < 2 + k) {
        throw ParameterError("fixture dimension must be at least 2 + clusters, got " + std::to_string(M));
    }
    if (!(separation >= 0.0) || !(projectedOffset >= 0.0) || !(shellNoise >= 0.0)) {
        throw ParameterError("fixture lengths must be nonnegative");
    }
}

namespace {

std::vector<std::vector<double>> simplex_centers(const FixtureSpec& spec) {
    const std::size_t k = spec.cluster_count();
    std::vector<std::vector<double>> centers(k, std::vector<double>(spec.M, 0.0));
    const double axis = spec.separation / std::sqrt(2.0);
    for (std::size_t c = 0; c < k; ++c) {
        centers[c][2 + c] = axis;
        if (k > 1) {
            const double angle = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(k);
            // Projected centers on a circle whose chord between neighbors is projectedOffset.
            const double r = spec.projectedOffset / (2.0 * std::sin(M_PI / static_cast<double>(k)));
            centers[c][0] = r * std::cos(angle);
            centers[c][1] = r * std::sin(angle);
        }
    }
    return centers;
}

} // namespace

Fixture generate(const FixtureSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t k = spec.cluster_count();
    const std::size_t M = spec.M;
    const std::size_t n = k * spec.nPerCluster;
    Fixture fx;
    fx.centers = simplex_centers(spec);
    std::vector<double> values;
    values.reserve(n * M);
    fx.truth.reserve(n);
    const double axisSigma = 1.0 / std::sqrt(static_cast<double>(M));

    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.nPerCluster))));
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < spec.nPerCluster; ++i) {
            std::vector<double> x(M);
            switch (spec.kind) {
            case FixtureKind::TwoBlobs:
            case FixtureKind::ThreeBlobs:
                for (double& v : x) {
                    v = rng.normal(0.0, axisSigma);
                }
                break;
            case FixtureKind::HypersphereShells: {
                double norm = 0.0;
                do {
                    norm = 0.0;
                    for (double& v : x) {
                        v = rng.normal();
                        norm += v * v;
                    }
                    norm = std::sqrt(norm);
                } while (norm == 0.0);
                const double radius = 1.0 + spec.shellNoise * rng.uniform(-1.0, 1.0);
                for (double& v : x) {
                    v *= radius / norm;
                }
                break;
            }
            case FixtureKind::GridLattice: {
                const double step = 2.0 / static_cast<double>(side);
                x[0] = (static_cast<double>(i % side) + 0.5) * step - 1.0;
                x[1] = (static_cast<double>(i / side) + 0.5) * step - 1.0;
                for (std::size_t d = 2; d < M; ++d) {
                    x[d] = rng.normal(0.0, 1e-3);
                }
                break;
            }
            }
            for (std::size_t d = 0; d < M; ++d) {
                values.push_back(x[d] + fx.centers[c][d]);
            }
            fx.truth.push_back(static_cast<int>(c));
        }
    }

    fx.data = Dataset(n, M, std::move(values), fx.truth);
    fx.projection.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fx.projection.positions[i] = {fx.data.at(i, 0), fx.data.at(i, 1)};
    }
    if (k >= 2) {
        fx.silhouette = silhouette(fx.data, fx.truth);
        const bool checked = spec.kind != FixtureKind::GridLattice;
        if (checked && fx.silhouette < 0.5) {
            throw ParameterError("fixture is not separable enough: silhouette " + std::to_string(fx.silhouette));
        }
    }
    return fx;
}

FixtureSpec easy_task_spec() {
    FixtureSpec s;
    s.kind = FixtureKind::TwoBlobs;
    s.nPerCluster = 250;
    s.M = 10;
    s.separation = 10.0;
    s.projectedOffset = 1.0;
    s.seed = 20240611;
    return s;
}

FixtureSpec hard_task_spec() {
    FixtureSpec s;
    s.kind = FixtureKind::ThreeBlobs;
    s.nPerCluster = 150;
    s.M = 10;
    s.separation = 10.0;
    s.projectedOffset = 1.0;
    s.seed = 20240612;
    return s;
}

} // namespace distbrush::fixtures
