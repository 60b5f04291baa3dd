#pragma once

#include "distbrush/closeness.hpp"
#include "distbrush/dataset.hpp"
#include "distbrush/lens.hpp"
#include "distbrush/seeds.hpp"
#include "distbrush/snn.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace distbrush {

// --- events -----------------------------------------------------------------

struct MoveTo {
    Point2 pos;
};
struct Wheel {
    double delta = 0.0;
};
struct PauseElapsed {
    std::int64_t elapsedMs = -1; // negative: exactly the configured threshold
};
struct Press {};
struct Release {};
struct SetThetaIn {
    double value = 0.0;
};
struct SetThetaOut {
    double value = 0.0;
};
struct ToggleContext {};
struct SwitchBrush {
    int id = 0;
};
struct NewBrush {};
struct SetOverwrite {
    bool on = false;
};
struct SetDrag {
    bool on = false;
};

using Event = std::variant<MoveTo, Wheel, PauseElapsed, Press, Release, SetThetaIn, SetThetaOut, ToggleContext,
                           SwitchBrush, NewBrush, SetOverwrite, SetDrag>;

const char* event_name(const Event& e);

// --- state ------------------------------------------------------------------

enum class Phase : std::uint8_t { Idle, Inspect, TransientLens, Brushing, Contextualized };

const char* to_string(Phase p);

struct Brush {
    int id = 0;
    std::string colorTag;
    /// Insertion order.
    std::vector<PointId> points;
    bool active = false;
};

struct Trace {
    PointId index;
    Point2 from;
    Point2 to;
    int age = 0;
};

struct Modes {
    bool overwrite = false;
    bool drag = false;
};

/// Session-wide settings. Painter sizes and the lens floors are fractions of
/// the projection extent (the larger side of its bounding box).
struct SessionConfig {
    ClosenessParams params;
    LensConfig lens;
    std::int64_t pauseThresholdMs = 500;
    /// MoveTo events a trace survives.
    int traceLifetime = 30;
    double painterRadiusFraction = 0.05;
    double painterMinFraction = 0.005;
    double painterMaxFraction = 0.5;
    double minBandwidthFraction = 0.01;

    void validate() const;
};

struct SessionState {
    std::vector<Point2> original;
    std::vector<Point2> live;
    std::vector<Brush> brushes;
    std::optional<int> activeBrush;
    Phase phase = Phase::Idle;
    Painter painter;
    double painterMin = 0.0;
    double painterMax = 0.0;
    ClosenessParams params;
    Modes modes;
    std::vector<Trace> traces;
    std::optional<Lens> lens;
    std::int64_t pauseThresholdMs = 500;

    /// Seeds driving Step-2 coloring and the transient lens.
    std::optional<SeedSet> seeds;
    /// Closeness of every point to the current seeds (Inspect/TransientLens)
    /// or to the active brush (Brushing).
    std::optional<ClosenessResult> closeness;
    /// Brush id owning each point, -1 when unbrushed.
    std::vector<int> owner;
};

enum class EventStatus : std::uint8_t { Applied, Ignored, Rejected };

struct EventResult {
    EventStatus status = EventStatus::Applied;
    std::string reason;
    bool positionsChanged = false;
    bool lensChanged = false;
};

/// Start and end of every point's animated transition.
struct Endpoint {
    Point2 from;
    Point2 to;
};

/// The interactive brushing state machine. Single writer; snapshots via state().
class Session {
public:
    Session(const Dataset& data, const Projection& projection, std::shared_ptr<const SnnModel> model,
            SessionConfig config = {});

    EventResult handle(const Event& event);

    /// Swaps between the relocated layout and the original projection.
    /// Throws PhaseError while brushing.
    std::vector<Endpoint> contextualize();

    const SessionState& state() const noexcept { return state_; }
    const SessionConfig& config() const noexcept { return config_; }
    const SnnModel& model() const noexcept { return *model_; }
    double extent() const noexcept { return extent_; }

    /// Brushes in creation order (members in insertion order), then unbrushed ascending.
    std::vector<PointId> heatmap_order() const;

    /// Owning brush id per point, -1 when unbrushed.
    std::vector<int> export_labels() const;

    const Brush* find_brush(int id) const;

private:
    struct TransientSnapshot {
        std::vector<Point2> live;
        std::vector<Trace> traces;
    };

    EventResult on_move(Point2 pos);
    EventResult on_wheel(double delta);
    EventResult on_pause(std::int64_t elapsedMs);
    EventResult on_press();
    EventResult on_release();
    EventResult on_theta(std::optional<double> thetaIn, std::optional<double> thetaOut);
    EventResult on_toggle_context();
    EventResult on_switch(int id);
    EventResult on_new_brush();

    Brush* active_brush();
    void create_brush();
    void refresh_inspect();
    void inspect_union_seeds();
    bool enter_transient();
    void revert_transient();
    void relens();
    void capture(const std::vector<PointId>& points);
    void end_stroke();
    void age_traces();
    void remember_origin(PointId i, Point2 pos);
    void apply_and_track(const RelocationPlan& plan);
    LensConfig resolved_lens_config() const;
    PointId densest(std::span<const PointId> points) const;

    SessionConfig config_;
    std::shared_ptr<const SnnModel> model_;
    SessionState state_;
    double extent_ = 1.0;
    int nextBrushId_ = 1;

    std::optional<TransientSnapshot> transient_;
    std::vector<Point2> contextSaved_;
    Phase contextPrevPhase_ = Phase::Idle;
    bool dragStroke_ = false;
    /// Pre-stroke position of every point moved during the current stroke.
    std::vector<std::optional<Point2>> strokeOrigin_;
};

} // namespace distbrush
