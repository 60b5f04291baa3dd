#pragma once

// Deliberately naive reference implementations. They take plain matrices and
// share no code with the library, so agreement is meaningful.

#include <cstdint>
#include <vector>

namespace distbrush::fixtures {

using Matrix = std::vector<std::vector<double>>;
using IntMatrix = std::vector<std::vector<std::uint64_t>>;

inline constexpr std::size_t kOracleMaxN = 500;

/// Row i: the k nearest other points, ascending (squared distance, index).
std::vector<std::vector<std::size_t>> oracle_knn(const Matrix& points, std::size_t k);

/// Full n x n raw shared-neighbor score matrix (zero diagonal).
IntMatrix oracle_snn(const Matrix& points, std::size_t k);

struct OracleCloseness {
    double value = 0.0;
    /// Exact clamp outcome: the cut average reaches the overall average.
    bool saturated = false;
    bool member = false;
};

/// Closeness of p to `cluster` from a raw score matrix with maximum simMax.
OracleCloseness oracle_closeness(const IntMatrix& sim, std::uint64_t simMax, double thetaIn, std::size_t p,
                                 const std::vector<std::size_t>& cluster);

/// Full rank matrix: rank[i][j] is the 1-based position of j among i's others.
std::vector<std::vector<std::size_t>> oracle_ranks(const Matrix& points);

struct OracleTC {
    double trustworthiness = 0.0;
    double continuity = 0.0;
};

OracleTC oracle_trust_continuity(const Matrix& high, const Matrix& low, std::size_t k);

} // namespace distbrush::fixtures
