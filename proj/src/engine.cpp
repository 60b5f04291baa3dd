#include "distbrush/engine.hpp"
#include "distbrush/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace distbrush {

namespace {

constexpr std::array<const char*, 10> kPalette = {"blue",  "orange", "green", "red",  "purple",
                                                  "brown", "pink",   "olive", "cyan", "gray"};

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

EventResult ignored(std::string why) { return {EventStatus::Ignored, std::move(why), false, false}; }
EventResult rejected(std::string why) { return {EventStatus::Rejected, std::move(why), false, false}; }

} // namespace

const char* event_name(const Event& e) {
    return std::visit(Overloaded{[](const MoveTo&) { return "MoveTo"; }, [](const Wheel&) { return "Wheel"; },
                                 [](const PauseElapsed&) { return "PauseElapsed"; },
                                 [](const Press&) { return "Press"; }, [](const Release&) { return "Release"; },
                                 [](const SetThetaIn&) { return "SetThetaIn"; },
                                 [](const SetThetaOut&) { return "SetThetaOut"; },
                                 [](const ToggleContext&) { return "ToggleContext"; },
                                 [](const SwitchBrush&) { return "SwitchBrush"; },
                                 [](const NewBrush&) { return "NewBrush"; },
                                 [](const SetOverwrite&) { return "SetOverwrite"; },
                                 [](const SetDrag&) { return "SetDrag"; }},
                      e);
}

const char* to_string(Phase p) {
    switch (p) {
    case Phase::Idle:
        return "Idle";
    case Phase::Inspect:
        return "Inspect";
    case Phase::TransientLens:
        return "TransientLens";
    case Phase::Brushing:
        return "Brushing";
    case Phase::Contextualized:
        return "Contextualized";
    }
    return "?";
}

void SessionConfig::validate() const {
    params.validate();
    lens.validate();
    if (pauseThresholdMs < 0) {
        throw ParameterError("pause threshold must be nonnegative");
    }
    if (traceLifetime < 0) {
        throw ParameterError("trace lifetime must be nonnegative");
    }
    if (!(painterMinFraction > 0.0 && painterMinFraction <= painterRadiusFraction &&
          painterRadiusFraction <= painterMaxFraction)) {
        throw ParameterError("painter fractions must satisfy 0 < min <= radius <= max");
    }
    if (!(minBandwidthFraction > 0.0)) {
        throw ParameterError("minBandwidthFraction must be positive");
    }
}

Session::Session(const Dataset& data, const Projection& projection, std::shared_ptr<const SnnModel> model,
                 SessionConfig config)
    : config_(std::move(config)), model_(std::move(model)) {
    config_.validate();
    if (!model_) {
        throw ParameterError("session needs a similarity model");
    }
    if (projection.size() != data.size()) {
        throw AlignmentError("projection has " + std::to_string(projection.size()) + " rows, dataset has " +
                             std::to_string(data.size()));
    }
    if (model_->size() != data.size()) {
        throw AlignmentError("similarity model was built for a different dataset size");
    }
    for (const Point2& p : projection.positions) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("projection contains non-finite coordinates");
        }
    }

    Point2 lo = projection.positions.front();
    Point2 hi = lo;
    for (const Point2& p : projection.positions) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    extent_ = std::max(hi.x - lo.x, hi.y - lo.y);
    if (!(extent_ > 0.0)) {
        extent_ = 1.0;
    }

    state_.original = projection.positions;
    state_.live = projection.positions;
    state_.params = config_.params;
    state_.pauseThresholdMs = config_.pauseThresholdMs;
    state_.painterMin = config_.painterMinFraction * extent_;
    state_.painterMax = config_.painterMaxFraction * extent_;
    state_.painter.radius = config_.painterRadiusFraction * extent_;
    state_.painter.center = (lo + hi) * 0.5;
    state_.owner.assign(data.size(), -1);
    strokeOrigin_.assign(data.size(), std::nullopt);
}

LensConfig Session::resolved_lens_config() const {
    LensConfig lc = config_.lens;
    lc.minBandwidth = config_.minBandwidthFraction * extent_;
    lc.minMargin = state_.painterMin;
    return lc;
}

const Brush* Session::find_brush(int id) const {
    for (const Brush& b : state_.brushes) {
        if (b.id == id) {
            return &b;
        }
    }
    return nullptr;
}

Brush* Session::active_brush() {
    if (!state_.activeBrush) {
        return nullptr;
    }
    for (Brush& b : state_.brushes) {
        if (b.id == *state_.activeBrush) {
            return &b;
        }
    }
    return nullptr;
}

PointId Session::densest(std::span<const PointId> points) const {
    const auto& dens = model_->density();
    PointId best = points.front();
    for (PointId p : points) {
        if (dens[p] > dens[best] || (dens[p] == dens[best] && p < best)) {
            best = p;
        }
    }
    return best;
}

EventResult Session::handle(const Event& event) {
    return std::visit(
        Overloaded{
            [&](const MoveTo& e) { return on_move(e.pos); },
            [&](const Wheel& e) { return on_wheel(e.delta); },
            [&](const PauseElapsed& e) {
                return on_pause(e.elapsedMs < 0 ? state_.pauseThresholdMs : e.elapsedMs);
            },
            [&](const Press&) { return on_press(); },
            [&](const Release&) { return on_release(); },
            [&](const SetThetaIn& e) { return on_theta(e.value, std::nullopt); },
            [&](const SetThetaOut& e) { return on_theta(std::nullopt, e.value); },
            [&](const ToggleContext&) { return on_toggle_context(); },
            [&](const SwitchBrush& e) { return on_switch(e.id); },
            [&](const NewBrush&) { return on_new_brush(); },
            [&](const SetOverwrite& e) {
                state_.modes.overwrite = e.on;
                return EventResult{};
            },
            [&](const SetDrag& e) {
                state_.modes.drag = e.on;
                return EventResult{};
            },
        },
        event);
}

// Step 2: seeds from the covered points, closeness coloring against them.
void Session::refresh_inspect() {
    const auto covered = covered_points(state_.live, state_.painter);
    if (covered.empty()) {
        state_.seeds.reset();
        state_.closeness.reset();
        return;
    }
    state_.seeds = select_seeds(*model_, state_.params, covered);
    state_.closeness = classify(*model_, state_.params, state_.seeds->members);
}

// After a stroke: the brush plus covered points seed the coloring.
void Session::inspect_union_seeds() {
    std::vector<PointId> seeds = covered_points(state_.live, state_.painter);
    if (const Brush* b = active_brush()) {
        seeds.insert(seeds.end(), b->points.begin(), b->points.end());
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    if (seeds.empty()) {
        state_.seeds.reset();
        state_.closeness.reset();
        return;
    }
    SeedSet s;
    s.center = densest(seeds);
    s.members = std::move(seeds);
    state_.closeness = classify(*model_, state_.params, s.members);
    state_.seeds = std::move(s);
}

void Session::age_traces() {
    for (Trace& t : state_.traces) {
        ++t.age;
    }
    const int life = config_.traceLifetime;
    std::erase_if(state_.traces, [life](const Trace& t) { return t.age >= life; });
}

void Session::remember_origin(PointId i, Point2 pos) {
    if (!strokeOrigin_[i]) {
        strokeOrigin_[i] = pos;
    }
}

void Session::apply_and_track(const RelocationPlan& plan) {
    apply_plan(plan, state_.live);
    for (const Relocation& t : plan.traces) {
        state_.traces.push_back({t.index, t.from, t.to, 0});
    }
}

// Step 3: transient lens on the seeds; the pre-lens layout is kept for revert.
bool Session::enter_transient() {
    if (!state_.seeds || state_.seeds->members.empty()) {
        return false;
    }
    transient_ = TransientSnapshot{state_.live, state_.traces};
    const auto& members = state_.seeds->members;
    std::vector<Point2> pts;
    pts.reserve(members.size());
    for (PointId p : members) {
        pts.push_back(state_.live[p]);
    }
    const LensConfig lc = resolved_lens_config();
    InnerBoundary inner = build_inner(pts, state_.live[state_.seeds->center], lc);
    const double margin = lens_margin(inner.polygon, lc);
    state_.lens = make_lens(std::move(inner.polygon), margin);
    state_.closeness = classify(*model_, state_.params, members);
    apply_and_track(build_plan(*state_.lens, *state_.closeness, state_.params, state_.live));
    state_.phase = Phase::TransientLens;
    return true;
}

void Session::revert_transient() {
    if (transient_) {
        state_.live = std::move(transient_->live);
        state_.traces = std::move(transient_->traces);
        transient_.reset();
    }
    state_.lens.reset();
    state_.phase = Phase::Inspect;
}

// Step 4: lens on the active brush, closeness against it, relocation applied.
void Session::relens() {
    Brush* brush = active_brush();
    if (!brush || brush->points.empty()) {
        state_.lens.reset();
        return;
    }
    std::vector<Point2> pts;
    pts.reserve(brush->points.size());
    for (PointId p : brush->points) {
        pts.push_back(state_.live[p]);
    }
    const PointId anchor = densest(brush->points);
    const LensConfig lc = resolved_lens_config();
    InnerBoundary inner = build_inner(pts, state_.live[anchor], lc);
    const double margin = lens_margin(inner.polygon, lc);
    state_.lens = make_lens(std::move(inner.polygon), margin);
    state_.closeness = classify(*model_, state_.params, brush->points);
    const RelocationPlan plan = build_plan(*state_.lens, *state_.closeness, state_.params, state_.live);
    for (const Relocation& m : plan.moves) {
        remember_origin(m.index, m.from);
    }
    apply_and_track(plan);
}

void Session::capture(const std::vector<PointId>& points) {
    Brush* brush = active_brush();
    if (!brush) {
        return;
    }
    for (PointId p : points) {
        const int owner = state_.owner[p];
        if (owner == brush->id) {
            continue;
        }
        if (owner >= 0) {
            if (!state_.modes.overwrite) {
                continue;
            }
            for (Brush& other : state_.brushes) {
                if (other.id == owner) {
                    std::erase(other.points, p);
                }
            }
        }
        brush->points.push_back(p);
        state_.owner[p] = brush->id;
    }
}

// Points still owned by an inactive brush go back to where the stroke found them.
void Session::end_stroke() {
    const int active = state_.activeBrush.value_or(-1);
    for (std::size_t i = 0; i < strokeOrigin_.size(); ++i) {
        if (strokeOrigin_[i]) {
            const int owner = state_.owner[i];
            if (owner >= 0 && owner != active) {
                state_.live[i] = *strokeOrigin_[i];
            }
            strokeOrigin_[i].reset();
        }
    }
    state_.lens.reset();
    dragStroke_ = false;
    state_.phase = Phase::Inspect;
}

EventResult Session::on_move(Point2 pos) {
    if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) {
        return rejected("non-finite pointer position");
    }
    const Point2 delta = pos - state_.painter.center;
    state_.painter.center = pos;
    EventResult res;
    age_traces();
    switch (state_.phase) {
    case Phase::Idle:
        state_.phase = Phase::Inspect;
        refresh_inspect();
        break;
    case Phase::Inspect:
        refresh_inspect();
        break;
    case Phase::TransientLens:
        revert_transient();
        refresh_inspect();
        res.positionsChanged = true;
        res.lensChanged = true;
        break;
    case Phase::Brushing:
        if (state_.modes.drag || dragStroke_) {
            if (Brush* b = active_brush()) {
                for (PointId p : b->points) {
                    state_.live[p] += delta;
                }
            }
            state_.lens.reset();
            res.positionsChanged = true;
            res.lensChanged = true;
        } else {
            capture(covered_points(state_.live, state_.painter));
            relens();
            res.positionsChanged = true;
            res.lensChanged = true;
        }
        break;
    case Phase::Contextualized:
        break;
    }
    return res;
}

EventResult Session::on_wheel(double delta) {
    if (!std::isfinite(delta)) {
        return rejected("non-finite wheel delta");
    }
    state_.painter.radius = std::clamp(state_.painter.radius + delta, state_.painterMin, state_.painterMax);
    EventResult res;
    if (state_.phase == Phase::Inspect) {
        refresh_inspect();
    } else if (state_.phase == Phase::Brushing && !state_.modes.drag && !dragStroke_) {
        capture(covered_points(state_.live, state_.painter));
        relens();
        res.positionsChanged = true;
        res.lensChanged = true;
    }
    return res;
}

EventResult Session::on_pause(std::int64_t elapsedMs) {
    if (state_.phase != Phase::Inspect) {
        return ignored("pause only triggers relocation while inspecting");
    }
    if (elapsedMs < state_.pauseThresholdMs) {
        return ignored("pause shorter than the threshold");
    }
    if (!enter_transient()) {
        return ignored("no seed points under the painter");
    }
    return {EventStatus::Applied, {}, true, true};
}

EventResult Session::on_press() {
    if (state_.phase != Phase::Inspect && state_.phase != Phase::TransientLens) {
        return state_.phase == Phase::Contextualized ? rejected("cannot brush while contextualized")
                                                     : ignored("press outside inspection");
    }
    if (state_.modes.drag) {
        const Brush* b = active_brush();
        if (!b || b->points.empty()) {
            return ignored("drag mode needs a nonempty active brush");
        }
        if (state_.phase == Phase::TransientLens) {
            revert_transient();
        }
        dragStroke_ = true;
        state_.phase = Phase::Brushing;
        return {};
    }
    if (state_.phase == Phase::Inspect && !enter_transient()) {
        return ignored("no seed points under the painter");
    }
    // The transient relocation becomes permanent.
    for (std::size_t i = 0; i < state_.live.size(); ++i) {
        if (!(state_.live[i] == transient_->live[i])) {
            remember_origin(static_cast<PointId>(i), transient_->live[i]);
        }
    }
    transient_.reset();
    if (!active_brush()) {
        create_brush();
    }
    std::vector<PointId> grab = state_.seeds->members;
    for (PointId p : covered_points(state_.live, state_.painter)) {
        if (!std::binary_search(state_.seeds->members.begin(), state_.seeds->members.end(), p)) {
            grab.push_back(p);
        }
    }
    capture(grab);
    state_.phase = Phase::Brushing;
    dragStroke_ = false;
    relens();
    return {EventStatus::Applied, {}, true, true};
}

EventResult Session::on_release() {
    if (state_.phase != Phase::Brushing) {
        return ignored("release without an active stroke");
    }
    end_stroke();
    inspect_union_seeds();
    return {EventStatus::Applied, {}, true, true};
}

EventResult Session::on_theta(std::optional<double> thetaIn, std::optional<double> thetaOut) {
    ClosenessParams next = state_.params;
    if (thetaIn) {
        next.thetaIn = *thetaIn;
    }
    if (thetaOut) {
        next.thetaOut = *thetaOut;
    }
    try {
        next.validate();
    } catch (const ParameterError& e) {
        return rejected(e.what());
    }
    state_.params = next;
    EventResult res;
    switch (state_.phase) {
    case Phase::Inspect:
        refresh_inspect();
        break;
    case Phase::TransientLens:
        revert_transient();
        refresh_inspect();
        enter_transient();
        res.positionsChanged = true;
        res.lensChanged = true;
        break;
    case Phase::Brushing:
        if (!dragStroke_ && !state_.modes.drag) {
            relens();
            res.positionsChanged = true;
            res.lensChanged = true;
        }
        break;
    case Phase::Idle:
    case Phase::Contextualized:
        break;
    }
    return res;
}

std::vector<Endpoint> Session::contextualize() {
    if (state_.phase == Phase::Brushing) {
        throw PhaseError("cannot contextualize while brushing");
    }
    std::vector<Endpoint> endpoints(state_.live.size());
    if (state_.phase == Phase::Contextualized) {
        for (std::size_t i = 0; i < endpoints.size(); ++i) {
            endpoints[i] = {state_.live[i], contextSaved_[i]};
        }
        state_.live = std::move(contextSaved_);
        contextSaved_.clear();
        state_.phase = contextPrevPhase_;
    } else {
        for (std::size_t i = 0; i < endpoints.size(); ++i) {
            endpoints[i] = {state_.live[i], state_.original[i]};
        }
        contextSaved_ = state_.live;
        state_.live = state_.original;
        contextPrevPhase_ = state_.phase;
        state_.phase = Phase::Contextualized;
    }
    return endpoints;
}

EventResult Session::on_toggle_context() {
    try {
        contextualize();
    } catch (const PhaseError& e) {
        return rejected(e.what());
    }
    return {EventStatus::Applied, {}, true, false};
}

EventResult Session::on_switch(int id) {
    if (!find_brush(id)) {
        return rejected("unknown brush id " + std::to_string(id));
    }
    if (state_.phase == Phase::Contextualized) {
        return rejected("cannot switch brushes while contextualized");
    }
    EventResult res;
    if (state_.phase == Phase::Brushing) {
        end_stroke();
        res.positionsChanged = true;
    } else if (state_.phase == Phase::TransientLens) {
        revert_transient();
        res.positionsChanged = true;
    }
    state_.activeBrush = id;
    for (Brush& b : state_.brushes) {
        b.active = b.id == id;
    }
    if (state_.phase == Phase::Inspect) {
        refresh_inspect();
    }
    return res;
}

EventResult Session::on_new_brush() {
    if (state_.phase == Phase::Contextualized) {
        return rejected("cannot create a brush while contextualized");
    }
    EventResult res;
    if (state_.phase == Phase::Brushing) {
        end_stroke();
        res.positionsChanged = true;
    } else if (state_.phase == Phase::TransientLens) {
        revert_transient();
        res.positionsChanged = true;
    }
    create_brush();
    if (state_.phase == Phase::Inspect) {
        refresh_inspect();
    }
    return res;
}

void Session::create_brush() {
    Brush b;
    b.id = nextBrushId_++;
    b.colorTag = kPalette[static_cast<std::size_t>(b.id - 1) % kPalette.size()];
    b.active = true;
    for (Brush& other : state_.brushes) {
        other.active = false;
    }
    state_.brushes.push_back(std::move(b));
    state_.activeBrush = state_.brushes.back().id;
}

std::vector<PointId> Session::heatmap_order() const {
    const std::size_t n = state_.live.size();
    std::vector<PointId> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (const Brush& b : state_.brushes) {
        for (PointId p : b.points) {
            order.push_back(p);
            seen[p] = 1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            order.push_back(static_cast<PointId>(i));
        }
    }
    return order;
}

std::vector<int> Session::export_labels() const { return state_.owner; }

} // namespace distbrush
