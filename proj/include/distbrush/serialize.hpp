#pragma once

#include "distbrush/engine.hpp"
#include "distbrush/lens.hpp"
#include "distbrush/snn.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace distbrush {

using json = nlohmann::json;

struct TimedEvent {
    std::int64_t t = 0;
    Event event;
};

/// Replay contract: {"params": {...}, "events": [{"t": ms, "type": "MoveTo", "x": .., "y": ..}, ...]}.
struct Trajectory {
    json params = json::object();
    std::vector<TimedEvent> events;
};

json event_to_json(const TimedEvent& e);
/// Throws TrajectoryError naming `index` for malformed events.
TimedEvent event_from_json(const json& j, std::size_t index);

Trajectory parse_trajectory(const std::string& text);
std::string trajectory_to_string(const Trajectory& traj);

json session_config_to_json(const SessionConfig& config);
/// Applies any recognised keys; unknown keys raise ParameterError.
void apply_session_overrides(const json& overrides, SessionConfig& config);

json point_to_json(Point2 p);
json polygon_to_json(const Polygon& poly);
json lens_to_json(const Lens& lens);
json plan_to_json(const RelocationPlan& plan);
json snapshot_to_json(const Session& session);
json labels_to_json(const std::vector<int>& labels);
std::vector<int> labels_from_json(const json& j);

/// Precomputed kNN + SNN cache, keyed by dataset content hash and k.
json model_cache_to_json(const KnnIndex& index, const SnnModel& model, const std::string& datasetHash);
/// Rebuilds the model from the cached neighbor lists and checks the stored scores.
SnnModel model_from_cache(const json& j, std::size_t expectedN, std::size_t expectedK);

} // namespace distbrush
