#include "distbrush/metrics.hpp"
#include "distbrush/error.hpp"
#include "distbrush/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace distbrush {

namespace {

// rank[j] = 1-based position of j in the ordering of all other points by (distance, index).
void ranks_from(std::size_t i, std::size_t n, const std::function<double(std::size_t, std::size_t)>& dist,
                std::vector<std::pair<double, std::size_t>>& scratch, std::vector<std::size_t>& rank,
                std::vector<std::size_t>& order) {
    scratch.clear();
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
            scratch.emplace_back(dist(i, j), j);
        }
    }
    std::sort(scratch.begin(), scratch.end());
    order.resize(scratch.size());
    rank.assign(n, 0);
    for (std::size_t r = 0; r < scratch.size(); ++r) {
        order[r] = scratch[r].second;
        rank[scratch[r].second] = r + 1;
    }
}

double rank_normalizer(std::size_t n, std::size_t k) {
    const double N = static_cast<double>(n);
    const double K = static_cast<double>(k);
    const double denom = 2 * k < n ? N * K * (2.0 * N - 3.0 * K - 1.0) : N * (N - K) * (N - K - 1.0);
    return denom > 0.0 ? 2.0 / denom : 0.0;
}

} // namespace

QualityScores trust_continuity(const Dataset& data, std::span<const Point2> positions, std::size_t kEval) {
    const std::size_t n = data.size();
    if (positions.size() != n) {
        throw AlignmentError("positions do not match the dataset size");
    }
    if (kEval < 1 || kEval > n - 1) {
        throw ParameterError("kEval must lie in [1, n-1]");
    }
    const auto mdDist = [&](std::size_t a, std::size_t b) { return data.squared_distance(a, b); };
    const auto lowDist = [&](std::size_t a, std::size_t b) {
        const Point2 d = positions[a] - positions[b];
        return dot(d, d);
    };

    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(n);
    std::vector<std::size_t> mdRank, lowRank, mdOrder, lowOrder;
    double trustPenalty = 0.0;
    double contPenalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ranks_from(i, n, mdDist, scratch, mdRank, mdOrder);
        ranks_from(i, n, lowDist, scratch, lowRank, lowOrder);
        for (std::size_t r = 0; r < kEval; ++r) {
            const std::size_t j = lowOrder[r];
            if (mdRank[j] > kEval) {
                trustPenalty += static_cast<double>(mdRank[j] - kEval);
            }
            const std::size_t m = mdOrder[r];
            if (lowRank[m] > kEval) {
                contPenalty += static_cast<double>(lowRank[m] - kEval);
            }
        }
    }
    const double norm = rank_normalizer(n, kEval);
    return {1.0 - norm * trustPenalty, 1.0 - norm * contPenalty, kEval};
}

namespace {

struct Contingency {
    std::vector<std::vector<double>> cells; // [truth class][predicted cluster]
    std::vector<double> rowSums;
    std::vector<double> colSums;
    double total = 0.0;
};

Contingency contingency(std::span<const int> predicted, std::span<const int> truth) {
    std::map<int, std::size_t> rowId, colId;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == -1) {
            continue;
        }
        rowId.try_emplace(truth[i], rowId.size());
        colId.try_emplace(predicted[i], colId.size());
    }
    Contingency c;
    c.cells.assign(rowId.size(), std::vector<double>(colId.size(), 0.0));
    c.rowSums.assign(rowId.size(), 0.0);
    c.colSums.assign(colId.size(), 0.0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == -1) {
            continue;
        }
        const std::size_t r = rowId[truth[i]];
        const std::size_t k = colId[predicted[i]];
        c.cells[r][k] += 1.0;
        c.rowSums[r] += 1.0;
        c.colSums[k] += 1.0;
        c.total += 1.0;
    }
    return c;
}

double entropy(const std::vector<double>& counts, double total) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    }
    return h;
}

double mutual_information(const Contingency& c) {
    double mi = 0.0;
    for (std::size_t r = 0; r < c.rowSums.size(); ++r) {
        for (std::size_t k = 0; k < c.colSums.size(); ++k) {
            const double nij = c.cells[r][k];
            if (nij > 0.0) {
                mi += nij / c.total * std::log(c.total * nij / (c.rowSums[r] * c.colSums[k]));
            }
        }
    }
    return std::max(mi, 0.0);
}

// Expected mutual information under the hypergeometric model of random labelings.
double expected_mutual_information(const Contingency& c) {
    const double N = c.total;
    const double lgN = std::lgamma(N + 1.0);
    double emi = 0.0;
    for (double a : c.rowSums) {
        for (double b : c.colSums) {
            const double lo = std::max(1.0, a + b - N);
            const double hi = std::min(a, b);
            const double fixed = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(N - a + 1.0) +
                                 std::lgamma(N - b + 1.0) - lgN;
            for (double nij = lo; nij <= hi; nij += 1.0) {
                const double logP = fixed - std::lgamma(nij + 1.0) - std::lgamma(a - nij + 1.0) -
                                    std::lgamma(b - nij + 1.0) - std::lgamma(N - a - b + nij + 1.0);
                emi += nij / N * std::log(N * nij / (a * b)) * std::exp(logP);
            }
        }
    }
    return emi;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

// Labelings equal up to renaming: one nonzero cell per row and per column.
bool is_bijection(const Contingency& c) {
    if (c.rowSums.size() != c.colSums.size()) {
        return false;
    }
    for (std::size_t r = 0; r < c.rowSums.size(); ++r) {
        for (std::size_t k = 0; k < c.colSums.size(); ++k) {
            if (c.cells[r][k] != 0.0 && (c.cells[r][k] != c.rowSums[r] || c.cells[r][k] != c.colSums[k])) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

ClusteringScores clustering_scores(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw ValidationError("predicted and truth labels differ in length");
    }
    {
        std::vector<int> classes(truth.begin(), truth.end());
        std::sort(classes.begin(), classes.end());
        if (std::unique(classes.begin(), classes.end()) - classes.begin() < 2) {
            throw ValidationError("truth labels need at least 2 classes");
        }
    }
    ClusteringScores s;
    const Contingency c = contingency(predicted, truth);
    s.unassignedFraction = 1.0 - c.total / static_cast<double>(truth.size());
    if (c.total == 0.0) {
        return s;
    }

    if (is_bijection(c)) {
        s.ami = s.arand = s.vmeasure = s.homogeneity = s.completeness = 1.0;
        return s;
    }

    const double hTruth = entropy(c.rowSums, c.total);
    const double hPred = entropy(c.colSums, c.total);
    const double mi = mutual_information(c);

    if (c.rowSums.size() == 1 && c.colSums.size() == 1) {
        s.ami = 1.0;
    } else {
        const double emi = expected_mutual_information(c);
        double denom = std::max(hTruth, hPred) - emi;
        const double eps = std::numeric_limits<double>::epsilon();
        denom = denom < 0.0 ? std::min(denom, -eps) : std::max(denom, eps);
        s.ami = (mi - emi) / denom;
    }

    double sumCells = 0.0;
    for (const auto& row : c.cells) {
        for (double v : row) {
            sumCells += choose2(v);
        }
    }
    double sumRows = 0.0;
    for (double a : c.rowSums) {
        sumRows += choose2(a);
    }
    double sumCols = 0.0;
    for (double b : c.colSums) {
        sumCols += choose2(b);
    }
    const double totalPairs = choose2(c.total);
    const double expected = totalPairs > 0.0 ? sumRows * sumCols / totalPairs : 0.0;
    const double maxIndex = 0.5 * (sumRows + sumCols);
    s.arand = maxIndex == expected ? 1.0 : (sumCells - expected) / (maxIndex - expected);

    // Conditional entropies from MI: H(T|P) = H(T) - MI, H(P|T) = H(P) - MI.
    s.homogeneity = hTruth == 0.0 ? 1.0 : std::clamp(mi / hTruth, 0.0, 1.0);
    s.completeness = hPred == 0.0 ? 1.0 : std::clamp(mi / hPred, 0.0, 1.0);
    s.vmeasure = s.homogeneity + s.completeness == 0.0
                     ? 0.0
                     : 2.0 * s.homogeneity * s.completeness / (s.homogeneity + s.completeness);
    return s;
}

namespace {

double silhouette_impl(std::size_t n, std::span<const int> labels,
                       const std::function<double(std::size_t, std::size_t)>& dist) {
    if (labels.size() != n) {
        throw ValidationError("label count does not match point count");
    }
    std::map<int, std::size_t> classId;
    for (int l : labels) {
        if (l != -1) {
            classId.try_emplace(l, classId.size());
        }
    }
    if (classId.size() < 2) {
        throw ValidationError("silhouette needs at least 2 labeled classes");
    }
    std::vector<std::size_t> cls(n, 0);
    std::vector<double> classSize(classId.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != -1) {
            cls[i] = classId[labels[i]];
            classSize[cls[i]] += 1.0;
        }
    }
    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> sums(classId.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == -1) {
            continue;
        }
        ++counted;
        if (classSize[cls[i]] <= 1.0) {
            continue; // singleton contributes 0
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && labels[j] != -1) {
                sums[cls[j]] += dist(i, j);
            }
        }
        const double a = sums[cls[i]] / (classSize[cls[i]] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums.size(); ++c) {
            if (c != cls[i]) {
                b = std::min(b, sums[c] / classSize[c]);
            }
        }
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return counted ? total / static_cast<double>(counted) : 0.0;
}

} // namespace

double silhouette(const Dataset& data, std::span<const int> labels) {
    return silhouette_impl(data.size(), labels,
                           [&](std::size_t a, std::size_t b) { return std::sqrt(data.squared_distance(a, b)); });
}

double silhouette(std::span<const Point2> positions, std::span<const int> labels) {
    return silhouette_impl(positions.size(), labels,
                           [&](std::size_t a, std::size_t b) { return distance(positions[a], positions[b]); });
}

std::vector<Point2> normalize_unit_square(std::span<const Point2> positions) {
    std::vector<Point2> out(positions.begin(), positions.end());
    if (out.empty()) {
        return out;
    }
    Point2 lo = out[0];
    Point2 hi = out[0];
    for (const Point2& p : out) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double side = std::max(hi.x - lo.x, hi.y - lo.y);
    const double scale = side > 0.0 ? 1.0 / side : 1.0;
    for (Point2& p : out) {
        p = (p - lo) * scale;
    }
    return out;
}

std::vector<Point2> distort_projection(std::span<const Point2> positions, double proportion, std::uint64_t seed) {
    if (!(proportion >= 0.0 && proportion <= 1.0)) {
        throw ParameterError("distortion proportion must lie in [0, 1]");
    }
    std::vector<Point2> out = normalize_unit_square(positions);
    const std::size_t n = out.size();
    const auto count = static_cast<std::size_t>(std::ceil(proportion * static_cast<double>(n) - 1e-9));
    Rng rng(seed);
    for (std::size_t i : rng.sample_without_replacement(n, count)) {
        const double x = rng.normal(0.5, kDistortionSigma);
        const double y = rng.normal(0.5, kDistortionSigma);
        out[i] = {x, y};
    }
    return out;
}

} // namespace distbrush
