#include "distbrush/fixtures/oracles.hpp"
#include "distbrush/error.hpp"

#include <algorithm>
#include <string>

namespace distbrush::fixtures {

namespace {

void check_size(std::size_t n) {
    if (n > kOracleMaxN) {
        throw SizeError("oracle limited to " + std::to_string(kOracleMaxN) + " points, got " + std::to_string(n));
    }
}

double sq(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        s += (a[d] - b[d]) * (a[d] - b[d]);
    }
    return s;
}

std::vector<std::size_t> sorted_others(const Matrix& points, std::size_t i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (j != i) {
            others.push_back(j);
        }
    }
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        const double da = sq(points[i], points[a]);
        const double db = sq(points[i], points[b]);
        if (da != db) {
            return da < db;
        }
        return a < b;
    });
    return others;
}

} // namespace

std::vector<std::vector<std::size_t>> oracle_knn(const Matrix& points, std::size_t k) {
    check_size(points.size());
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto others = sorted_others(points, i);
        others.resize(k);
        out.push_back(others);
    }
    return out;
}

IntMatrix oracle_snn(const Matrix& points, std::size_t k) {
    const std::size_t n = points.size();
    check_size(n);
    const auto nn = oracle_knn(points, k);
    IntMatrix sim(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) {
                continue;
            }
            std::uint64_t s = 0;
            for (std::size_t m = 0; m < k; ++m) {
                for (std::size_t r = 0; r < k; ++r) {
                    if (nn[p][m] == nn[q][r]) {
                        s += (k - m) * (k - r); // ranks m+1, r+1: (k+1-(m+1)) (k+1-(r+1))
                    }
                }
            }
            sim[p][q] = s;
        }
    }
    return sim;
}

OracleCloseness oracle_closeness(const IntMatrix& sim, std::uint64_t simMax, double thetaIn, std::size_t p,
                                 const std::vector<std::size_t>& cluster) {
    const std::size_t n = sim.size();
    check_size(n);
    OracleCloseness out;
    if (std::find(cluster.begin(), cluster.end(), p) != cluster.end()) {
        out.value = 1.0;
        out.saturated = true;
        out.member = true;
        return out;
    }
    // Both averages carry the same 1/simMax factor, so integer sums suffice.
    std::uint64_t cutSum = 0, cutCount = 0, allSum = 0, allCount = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (q == p) {
            continue;
        }
        if (sim[p][q] > 0) {
            allSum += sim[p][q];
            allCount += 1;
        }
    }
    for (std::size_t q : cluster) {
        const double normalized = static_cast<double>(sim[p][q]) / static_cast<double>(simMax);
        if (normalized > thetaIn) {
            cutSum += sim[p][q];
            cutCount += 1;
        }
    }
    if (cutCount == 0) {
        return out;
    }
    // A / A0 = (cutSum * allCount) / (allSum * cutCount), formed exactly before dividing.
    const unsigned __int128 num = static_cast<unsigned __int128>(cutSum) * allCount;
    const unsigned __int128 den = static_cast<unsigned __int128>(allSum) * cutCount;
    if (num >= den) {
        out.value = 1.0;
        out.saturated = true;
    } else {
        out.value = static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }
    return out;
}

std::vector<std::vector<std::size_t>> oracle_ranks(const Matrix& points) {
    const std::size_t n = points.size();
    check_size(n);
    std::vector<std::vector<std::size_t>> rank(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto others = sorted_others(points, i);
        for (std::size_t r = 0; r < others.size(); ++r) {
            rank[i][others[r]] = r + 1;
        }
    }
    return rank;
}

OracleTC oracle_trust_continuity(const Matrix& high, const Matrix& low, std::size_t k) {
    const std::size_t n = high.size();
    check_size(n);
    const auto rh = oracle_ranks(high);
    const auto rl = oracle_ranks(low);
    double t = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            if (rl[i][j] <= k && rh[i][j] > k) {
                t += static_cast<double>(rh[i][j] - k);
            }
            if (rh[i][j] <= k && rl[i][j] > k) {
                c += static_cast<double>(rl[i][j] - k);
            }
        }
    }
    const double N = static_cast<double>(n), K = static_cast<double>(k);
    const double denom = 2.0 * K < N ? N * K * (2.0 * N - 3.0 * K - 1.0) : N * (N - K) * (N - K - 1.0);
    const double w = denom > 0.0 ? 2.0 / denom : 0.0;
    return {1.0 - w * t, 1.0 - w * c};
}

} // namespace distbrush::fixtures
