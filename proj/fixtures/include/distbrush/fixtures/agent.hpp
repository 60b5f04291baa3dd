#pragma once

#include "distbrush/engine.hpp"
#include "distbrush/serialize.hpp"

#include <memory>

namespace distbrush::fixtures {

struct AgentConfig {
    /// Number of brushes to paint.
    std::size_t clusters = 2;
    /// Painter radius as a fraction of the projection extent.
    double painterFraction = 0.02;
    /// Moves allowed per brush before the stroke is released.
    std::size_t maxMovesPerBrush = 1000;
    /// Milliseconds between recorded events.
    std::int64_t stepMs = 16;
};

/// A scripted user. For each brush it hovers the densest unbrushed point,
/// waits for the transient lens, presses, then keeps moving the painter onto
/// unbrushed points that the lens pulled into its inner region until none are
/// left, and releases. It sees only the session state, never ground truth.
Trajectory run_agent(const Dataset& data, const Projection& projection, std::shared_ptr<const SnnModel> model,
                     const SessionConfig& config, const AgentConfig& agent);

/// Replays a trajectory; rejected events raise TrajectoryError.
void replay(Session& session, const Trajectory& traj);

} // namespace distbrush::fixtures
