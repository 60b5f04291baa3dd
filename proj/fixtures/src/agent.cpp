#include "distbrush/fixtures/agent.hpp"
#include "distbrush/error.hpp"

#include <algorithm>
#include <limits>

namespace distbrush::fixtures {

namespace {

class Recorder {
public:
    Recorder(Session& s, Trajectory& t, std::int64_t stepMs) : session_(s), traj_(t), stepMs_(stepMs) {}

    EventResult emit(const Event& e) {
        const EventResult r = session_.handle(e);
        if (r.status == EventStatus::Rejected) {
            throw TrajectoryError(traj_.events.size(), std::string("agent produced a rejected event: ") + r.reason);
        }
        traj_.events.push_back({clock_, e});
        clock_ += stepMs_;
        return r;
    }

    void wait(std::int64_t ms) { clock_ += ms; }

private:
    Session& session_;
    Trajectory& traj_;
    std::int64_t stepMs_;
    std::int64_t clock_ = 0;
};

std::optional<PointId> densest_unbrushed(const Session& s) {
    const auto& dens = s.model().density();
    std::optional<PointId> best;
    for (std::size_t i = 0; i < dens.size(); ++i) {
        if (s.state().owner[i] >= 0) {
            continue;
        }
        if (!best || dens[i] > dens[*best]) {
            best = static_cast<PointId>(i);
        }
    }
    return best;
}

// Unbrushed point strictly inside the inner lens nearest to the painter.
std::optional<PointId> next_target(const Session& s) {
    const SessionState& st = s.state();
    if (!st.lens) {
        return std::nullopt;
    }
    std::optional<PointId> best;
    double bestDist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.live.size(); ++i) {
        if (st.owner[i] >= 0 || !convex_contains_strict(st.lens->inner, st.live[i])) {
            continue;
        }
        const double d = distance(st.live[i], st.painter.center);
        if (d < bestDist) {
            bestDist = d;
            best = static_cast<PointId>(i);
        }
    }
    return best;
}

// Distance from p to the boundary of the inner lens, 0 when p is outside it.
double clearance(const Session& s, Point2 p) {
    const SessionState& st = s.state();
    if (!st.lens || !convex_contains(st.lens->inner, p)) {
        return 0.0;
    }
    const Polygon& poly = st.lens->inner;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        const Point2 ab = b - a;
        const double len2 = dot(ab, ab);
        const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, distance(p, a + ab * t));
    }
    return best;
}

// Radius that keeps the painter disc inside the inner lens around `center`.
double safe_radius(const Session& s, Point2 center, double preferred) {
    return std::min(preferred, 0.9 * clearance(s, center));
}

} // namespace

Trajectory run_agent(const Dataset& data, const Projection& projection, std::shared_ptr<const SnnModel> model,
                     const SessionConfig& config, const AgentConfig& agent) {
    Session session(data, projection, std::move(model), config);
    Trajectory traj;
    traj.params = session_config_to_json(config);
    Recorder rec(session, traj, agent.stepMs);

    const double target = agent.painterFraction * session.extent();
    if (target != session.state().painter.radius) {
        rec.emit(Wheel{target - session.state().painter.radius});
    }
    for (std::size_t b = 0; b < agent.clusters; ++b) {
        const auto start = densest_unbrushed(session);
        if (!start) {
            break;
        }
        if (b > 0) {
            rec.emit(NewBrush{});
        }
        rec.emit(MoveTo{session.state().live[*start]});
        rec.wait(session.state().pauseThresholdMs);
        if (rec.emit(PauseElapsed{}).status != EventStatus::Applied) {
            continue;
        }
        const auto resize = [&](double radius) {
            const double clamped = std::clamp(radius, session.state().painterMin, session.state().painterMax);
            if (clamped != session.state().painter.radius) {
                rec.emit(Wheel{clamped - session.state().painter.radius});
            }
        };
        // Shrinking never covers new points, so it is safe before moving; growing waits until the
        // painter sits at its new center under the rebuilt lens.
        resize(safe_radius(session, session.state().painter.center, target));
        if (rec.emit(Press{}).status != EventStatus::Applied) {
            continue;
        }
        for (std::size_t m = 0; m < agent.maxMovesPerBrush; ++m) {
            const auto next = next_target(session);
            if (!next) {
                break;
            }
            const Point2 dest = session.state().live[*next];
            const double wanted = safe_radius(session, dest, target);
            if (wanted < session.state().painter.radius) {
                resize(wanted);
            }
            rec.emit(MoveTo{dest});
            const double grown = safe_radius(session, dest, target);
            if (grown > session.state().painter.radius) {
                resize(grown);
            }
        }
        rec.emit(Release{});
        resize(target);
    }
    return traj;
}

void replay(Session& session, const Trajectory& traj) {
    for (std::size_t i = 0; i < traj.events.size(); ++i) {
        const EventResult r = session.handle(traj.events[i].event);
        if (r.status == EventStatus::Rejected) {
            throw TrajectoryError(i, r.reason);
        }
    }
}

} // namespace distbrush::fixtures
