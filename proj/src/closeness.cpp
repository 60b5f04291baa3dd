#include "distbrush/closeness.hpp"
#include "distbrush/error.hpp"

#include <cmath>

namespace distbrush {

void ClosenessParams::validate() const {
    if (!(thetaIn >= 0.0 && thetaIn < 1.0)) {
        throw ParameterError("thetaIn must lie in [0, 1), got " + std::to_string(thetaIn));
    }
    if (!(thetaOut >= 0.0 && thetaOut <= 1.0)) {
        throw ParameterError("thetaOut must lie in [0, 1], got " + std::to_string(thetaOut));
    }
}

const char* to_string(NeighborClass c) {
    switch (c) {
    case NeighborClass::Member:
        return "Member";
    case NeighborClass::TrueNeighbor:
        return "TrueNeighbor";
    case NeighborClass::Uncertain:
        return "Uncertain";
    case NeighborClass::NonNeighbor:
        return "NonNeighbor";
    }
    return "?";
}

std::vector<std::uint8_t> membership_mask(std::size_t n, std::span<const PointId> cluster) {
    std::vector<std::uint8_t> mask(n, 0);
    for (PointId q : cluster) {
        if (q >= n) {
            throw IndexError("cluster member " + std::to_string(q) + " out of range");
        }
        mask[q] = 1;
    }
    return mask;
}

namespace {

void check_inputs(const SnnModel& model, const ClosenessParams& params, PointId p, std::span<const PointId> cluster) {
    params.validate();
    if (cluster.empty()) {
        throw ParameterError("cluster must be nonempty");
    }
    if (p >= model.size()) {
        throw IndexError("point index " + std::to_string(p) + " out of range");
    }
}

bool above_cut(std::uint64_t score, std::uint64_t simMax, double thetaIn) {
    return static_cast<double>(score) / static_cast<double>(simMax) > thetaIn;
}

// Sums of raw scores over the cut and over p's full positive support.
struct Support {
    std::uint64_t cutSum = 0;
    std::uint64_t cutCount = 0;
    std::uint64_t allSum = 0;
    std::uint64_t allCount = 0;
};

Support support(const SnnModel& model, double thetaIn, PointId p, const std::vector<std::uint8_t>& mask) {
    Support s;
    for (const SimEntry& e : model.row(p)) {
        s.allSum += e.score;
        ++s.allCount;
        if (mask[e.other] && above_cut(e.score, model.sim_max(), thetaIn)) {
            s.cutSum += e.score;
            ++s.cutCount;
        }
    }
    return s;
}

double closeness_from_support(const Support& s) {
    if (s.cutCount == 0) {
        return 0.0;
    }
    if (s.allSum == 0) {
        // No positive similarity anywhere, but a nonempty cut: cannot happen
        // with raw scores, kept for the documented convention.
        return 1.0;
    }
    // Compare cutSum/cutCount against allSum/allCount without rounding.
    const unsigned __int128 lhs = static_cast<unsigned __int128>(s.cutSum) * s.allCount;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(s.allSum) * s.cutCount;
    if (lhs >= rhs) {
        return 1.0;
    }
    return static_cast<double>(static_cast<long double>(lhs) / static_cast<long double>(rhs));
}

} // namespace

std::vector<PointId> cluster_cut(const SnnModel& model, const ClosenessParams& params, PointId p,
                                 std::span<const PointId> cluster) {
    check_inputs(model, params, p, cluster);
    std::vector<PointId> out;
    for (PointId q : cluster) {
        if (q == p) {
            continue;
        }
        if (q >= model.size()) {
            throw IndexError("cluster member " + std::to_string(q) + " out of range");
        }
        if (above_cut(model.sim(p, q), model.sim_max(), params.thetaIn)) {
            out.push_back(q);
        }
    }
    return out;
}

double avg_similarity(const SnnModel& model, const ClosenessParams& params, PointId p,
                      std::span<const PointId> cluster) {
    const auto cut = cluster_cut(model, params, p, cluster);
    if (cut.empty()) {
        return 0.0;
    }
    std::uint64_t total = 0;
    for (PointId q : cut) {
        total += model.sim(p, q);
    }
    return static_cast<double>(total) / (static_cast<double>(cut.size()) * static_cast<double>(model.sim_max()));
}

double closeness(const SnnModel& model, const ClosenessParams& params, PointId p, std::span<const PointId> cluster) {
    check_inputs(model, params, p, cluster);
    const auto mask = membership_mask(model.size(), cluster);
    if (mask[p]) {
        return 1.0;
    }
    return closeness_from_support(support(model, params.thetaIn, p, mask));
}

ClosenessResult classify(const SnnModel& model, const ClosenessParams& params, std::span<const PointId> cluster) {
    params.validate();
    if (cluster.empty()) {
        throw ParameterError("cluster must be nonempty");
    }
    const std::size_t n = model.size();
    const auto mask = membership_mask(n, cluster);
    ClosenessResult res;
    res.values.resize(n);
    res.classes.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        if (mask[p]) {
            res.values[p] = 1.0;
            res.classes[p] = NeighborClass::Member;
            continue;
        }
        const double v = closeness_from_support(support(model, params.thetaIn, static_cast<PointId>(p), mask));
        res.values[p] = v;
        res.classes[p] = v == 1.0   ? NeighborClass::TrueNeighbor
                         : v == 0.0 ? NeighborClass::NonNeighbor
                                    : NeighborClass::Uncertain;
    }
    return res;
}

} // namespace distbrush
