#include "distbrush/serialize.hpp"
#include "distbrush/error.hpp"

#include <cmath>

namespace distbrush {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double number_field(const json& j, const char* key, std::size_t index) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw TrajectoryError(index, std::string("missing numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

bool bool_field(const json& j, const char* key, std::size_t index) {
    if (!j.contains(key) || !j[key].is_boolean()) {
        throw TrajectoryError(index, std::string("missing boolean field '") + key + "'");
    }
    return j[key].get<bool>();
}

} // namespace

json event_to_json(const TimedEvent& e) {
    json j;
    j["t"] = e.t;
    j["type"] = event_name(e.event);
    std::visit(Overloaded{
                   [&](const MoveTo& m) {
                       j["x"] = m.pos.x;
                       j["y"] = m.pos.y;
                   },
                   [&](const Wheel& w) { j["delta"] = w.delta; },
                   [&](const PauseElapsed& p) {
                       if (p.elapsedMs >= 0) {
                           j["ms"] = p.elapsedMs;
                       }
                   },
                   [&](const SetThetaIn& s) { j["value"] = s.value; },
                   [&](const SetThetaOut& s) { j["value"] = s.value; },
                   [&](const SwitchBrush& s) { j["id"] = s.id; },
                   [&](const SetOverwrite& s) { j["on"] = s.on; },
                   [&](const SetDrag& s) { j["on"] = s.on; },
                   [](const auto&) {},
               },
               e.event);
    return j;
}

TimedEvent event_from_json(const json& j, std::size_t index) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw TrajectoryError(index, "event must be an object with a string 'type'");
    }
    TimedEvent out;
    if (j.contains("t")) {
        if (!j["t"].is_number_integer()) {
            throw TrajectoryError(index, "'t' must be an integer");
        }
        out.t = j["t"].get<std::int64_t>();
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "MoveTo") {
        out.event = MoveTo{{number_field(j, "x", index), number_field(j, "y", index)}};
    } else if (type == "Wheel") {
        out.event = Wheel{number_field(j, "delta", index)};
    } else if (type == "PauseElapsed") {
        PauseElapsed p;
        if (j.contains("ms")) {
            if (!j["ms"].is_number_integer()) {
                throw TrajectoryError(index, "'ms' must be an integer");
            }
            p.elapsedMs = j["ms"].get<std::int64_t>();
        }
        out.event = p;
    } else if (type == "Press") {
        out.event = Press{};
    } else if (type == "Release") {
        out.event = Release{};
    } else if (type == "SetThetaIn") {
        out.event = SetThetaIn{number_field(j, "value", index)};
    } else if (type == "SetThetaOut") {
        out.event = SetThetaOut{number_field(j, "value", index)};
    } else if (type == "ToggleContext") {
        out.event = ToggleContext{};
    } else if (type == "SwitchBrush") {
        if (!j.contains("id") || !j["id"].is_number_integer()) {
            throw TrajectoryError(index, "SwitchBrush needs an integer 'id'");
        }
        out.event = SwitchBrush{j["id"].get<int>()};
    } else if (type == "NewBrush") {
        out.event = NewBrush{};
    } else if (type == "SetOverwrite") {
        out.event = SetOverwrite{bool_field(j, "on", index)};
    } else if (type == "SetDrag") {
        out.event = SetDrag{bool_field(j, "on", index)};
    } else {
        throw TrajectoryError(index, "unknown event type '" + type + "'");
    }
    return out;
}

Trajectory parse_trajectory(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("trajectory JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("events") || !doc["events"].is_array()) {
        throw ParseError("trajectory must be an object with an \"events\" array");
    }
    Trajectory traj;
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) {
            throw ParseError("trajectory params must be an object");
        }
        traj.params = doc["params"];
    }
    const auto& events = doc["events"];
    traj.events.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        traj.events.push_back(event_from_json(events[i], i));
    }
    return traj;
}

std::string trajectory_to_string(const Trajectory& traj) {
    json doc;
    doc["params"] = traj.params;
    auto& events = doc["events"] = json::array();
    for (const TimedEvent& e : traj.events) {
        events.push_back(event_to_json(e));
    }
    return doc.dump(1) + "\n";
}

json session_config_to_json(const SessionConfig& c) {
    return json{
        {"thetaIn", c.params.thetaIn},
        {"thetaOut", c.params.thetaOut},
        {"gridResolution", c.lens.gridResolution},
        {"alphaFraction", c.lens.alphaFraction},
        {"bandwidthFactor", c.lens.bandwidthFactor},
        {"marginFraction", c.lens.marginFraction},
        {"vertexMergeFraction", c.lens.vertexMergeFraction},
        {"pauseThresholdMs", c.pauseThresholdMs},
        {"traceLifetime", c.traceLifetime},
        {"painterRadiusFraction", c.painterRadiusFraction},
        {"painterMinFraction", c.painterMinFraction},
        {"painterMaxFraction", c.painterMaxFraction},
        {"minBandwidthFraction", c.minBandwidthFraction},
    };
}

void apply_session_overrides(const json& overrides, SessionConfig& c) {
    if (!overrides.is_object()) {
        throw ParameterError("session parameters must be a JSON object");
    }
    for (const auto& [key, value] : overrides.items()) {
        if (!value.is_number()) {
            throw ParameterError("parameter '" + key + "' must be numeric");
        }
        const double v = value.get<double>();
        if (key == "thetaIn") {
            c.params.thetaIn = v;
        } else if (key == "thetaOut") {
            c.params.thetaOut = v;
        } else if (key == "gridResolution") {
            c.lens.gridResolution = static_cast<int>(v);
        } else if (key == "alphaFraction") {
            c.lens.alphaFraction = v;
        } else if (key == "bandwidthFactor") {
            c.lens.bandwidthFactor = v;
        } else if (key == "marginFraction") {
            c.lens.marginFraction = v;
        } else if (key == "vertexMergeFraction") {
            c.lens.vertexMergeFraction = v;
        } else if (key == "pauseThresholdMs") {
            c.pauseThresholdMs = static_cast<std::int64_t>(v);
        } else if (key == "traceLifetime") {
            c.traceLifetime = static_cast<int>(v);
        } else if (key == "painterRadiusFraction") {
            c.painterRadiusFraction = v;
        } else if (key == "painterMinFraction") {
            c.painterMinFraction = v;
        } else if (key == "painterMaxFraction") {
            c.painterMaxFraction = v;
        } else if (key == "minBandwidthFraction") {
            c.minBandwidthFraction = v;
        } else {
            throw ParameterError("unknown session parameter '" + key + "'");
        }
    }
    c.validate();
}

json point_to_json(Point2 p) { return json::array({p.x, p.y}); }

json polygon_to_json(const Polygon& poly) {
    json arr = json::array();
    for (const Point2& p : poly) {
        arr.push_back(point_to_json(p));
    }
    return arr;
}

json lens_to_json(const Lens& lens) {
    return json{
        {"inner", polygon_to_json(lens.inner)},
        {"outer", polygon_to_json(lens.outer)},
        {"bisectors", polygon_to_json(lens.bisectors)},
        {"centroid", point_to_json(lens.centroid)},
        {"margin", lens.margin},
    };
}

json plan_to_json(const RelocationPlan& plan) {
    json moves = json::array();
    for (const Relocation& m : plan.moves) {
        moves.push_back(json{{"index", m.index},
                             {"class", to_string(plan.classOf[m.index])},
                             {"from", point_to_json(m.from)},
                             {"to", point_to_json(m.to)}});
    }
    json traces = json::array();
    for (const Relocation& t : plan.traces) {
        traces.push_back(json{{"index", t.index}, {"from", point_to_json(t.from)}, {"to", point_to_json(t.to)}});
    }
    return json{{"moves", moves}, {"traces", traces}};
}

json snapshot_to_json(const Session& session) {
    const SessionState& s = session.state();
    json doc;
    doc["phase"] = to_string(s.phase);
    doc["live"] = polygon_to_json(s.live);
    json brushes = json::array();
    for (const Brush& b : s.brushes) {
        brushes.push_back(json{{"id", b.id}, {"color", b.colorTag}, {"points", b.points}, {"active", b.active}});
    }
    doc["brushes"] = brushes;
    doc["activeBrush"] = s.activeBrush ? json(*s.activeBrush) : json(nullptr);
    doc["painter"] = json{{"center", point_to_json(s.painter.center)}, {"radius", s.painter.radius}};
    doc["params"] = json{{"thetaIn", s.params.thetaIn}, {"thetaOut", s.params.thetaOut}};
    doc["modes"] = json{{"overwrite", s.modes.overwrite}, {"drag", s.modes.drag}};
    doc["lens"] = s.lens ? lens_to_json(*s.lens) : json(nullptr);
    json traces = json::array();
    for (const Trace& t : s.traces) {
        traces.push_back(
            json{{"index", t.index}, {"from", point_to_json(t.from)}, {"to", point_to_json(t.to)}, {"age", t.age}});
    }
    doc["traces"] = traces;
    if (s.seeds) {
        doc["seeds"] = json{{"center", s.seeds->center}, {"members", s.seeds->members}};
    } else {
        doc["seeds"] = nullptr;
    }
    doc["closeness"] = s.closeness ? json(s.closeness->values) : json(nullptr);
    doc["densityNorm"] = session.model().density_norm();
    return doc;
}

json labels_to_json(const std::vector<int>& labels) { return json{{"labels", labels}}; }

std::vector<int> labels_from_json(const json& j) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("labels")) {
            throw ParseError("labels JSON needs a \"labels\" array");
        }
        arr = &j["labels"];
    }
    if (!arr->is_array()) {
        throw ParseError("labels must be an array of integers");
    }
    std::vector<int> out;
    out.reserve(arr->size());
    for (const auto& v : *arr) {
        if (!v.is_number_integer()) {
            throw ParseError("labels must be integers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

json model_cache_to_json(const KnnIndex& index, const SnnModel& model, const std::string& datasetHash) {
    json rows = json::array();
    for (std::size_t p = 0; p < model.size(); ++p) {
        json row = json::array();
        for (const SimEntry& e : model.row(static_cast<PointId>(p))) {
            row.push_back(json::array({e.other, e.score}));
        }
        rows.push_back(std::move(row));
    }
    json neighbors = json::array();
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto nb = index.neighbors(i);
        neighbors.push_back(std::vector<PointId>(nb.begin(), nb.end()));
    }
    return json{{"datasetHash", datasetHash}, {"n", index.size()}, {"k", index.k()},
                {"neighbors", neighbors},      {"sim", rows}};
}

SnnModel model_from_cache(const json& j, std::size_t expectedN, std::size_t expectedK) {
    try {
        const std::size_t n = j.at("n").get<std::size_t>();
        const std::size_t k = j.at("k").get<std::size_t>();
        if (n != expectedN || k != expectedK) {
            throw ValidationError("cache was built for different n or k");
        }
        std::vector<PointId> flat;
        flat.reserve(n * k);
        const auto& nb = j.at("neighbors");
        if (nb.size() != n) {
            throw ValidationError("cache neighbor table has the wrong size");
        }
        for (const auto& row : nb) {
            if (row.size() != k) {
                throw ValidationError("cache neighbor row has the wrong width");
            }
            for (const auto& v : row) {
                flat.push_back(v.get<PointId>());
            }
        }
        for (PointId id : flat) {
            if (id >= n) {
                throw ValidationError("cache neighbor index out of range");
            }
        }
        SnnModel model = build_snn_model(KnnIndex(n, k, std::move(flat)));
        const auto& sim = j.at("sim");
        for (std::size_t p = 0; p < n; ++p) {
            const auto& row = sim.at(p);
            const auto mine = model.row(static_cast<PointId>(p));
            if (row.size() != mine.size()) {
                throw ValidationError("cached similarity row disagrees with the neighbor table");
            }
            for (std::size_t e = 0; e < mine.size(); ++e) {
                if (row[e].at(0).get<PointId>() != mine[e].other || row[e].at(1).get<std::uint64_t>() != mine[e].score) {
                    throw ValidationError("cached similarity row disagrees with the neighbor table");
                }
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model cache: ") + e.what());
    }
}

} // namespace distbrush
