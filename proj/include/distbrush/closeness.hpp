#pragma once

#include "distbrush/snn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace distbrush {

/// Slider values. thetaIn is a cutoff on normalized similarity; thetaOut is
/// the closeness an outside Uncertain point needs before it is attracted.
struct ClosenessParams {
    double thetaIn = 0.35;
    double thetaOut = 0.5;

    void validate() const;
};

enum class NeighborClass : std::uint8_t { Member, TrueNeighbor, Uncertain, NonNeighbor };

const char* to_string(NeighborClass c);

struct ClosenessResult {
    std::vector<double> values;
    std::vector<NeighborClass> classes;
};

/// Dense membership mask for a cluster, sized to the model.
std::vector<std::uint8_t> membership_mask(std::size_t n, std::span<const PointId> cluster);

/// Members q of the cluster with normalized_sim(p, q) > thetaIn. p itself is never included.
std::vector<PointId> cluster_cut(const SnnModel& model, const ClosenessParams& params, PointId p,
                                 std::span<const PointId> cluster);

/// Mean normalized similarity of p over cluster_cut, or 0 if the cut is empty.
double avg_similarity(const SnnModel& model, const ClosenessParams& params, PointId p,
                      std::span<const PointId> cluster);

/// min(A(thetaIn, p, C) / A(0, p, P \ {p}), 1). Members of C get 1.
double closeness(const SnnModel& model, const ClosenessParams& params, PointId p, std::span<const PointId> cluster);

ClosenessResult classify(const SnnModel& model, const ClosenessParams& params, std::span<const PointId> cluster);

} // namespace distbrush
