#pragma once

/**
 * @file timeline.hpp
 * @brief Ordered piecewise source/gating events driving a simulation.
 */

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "csf/analytic.hpp"
#include "csf/params.hpp"

namespace csf {

struct FiniteBolusEvent {
    double S_b;   // cc/min, signed
    double t_b;   // min
    double dt_b;  // min, > 0
};

struct InstantBolusEvent {
    double dV;   // cc, signed
    double t_0;  // min
};

struct InfusionOnEvent {
    double S_i;  // cc/min
    double R_i;  // mmH2O/(ml/min)
    double t_i;  // min
};

struct ShuntOnEvent {
    double R_s;   // mmH2O/(ml/min)
    double P_op;  // mmH2O
    double t_s;   // min
};

struct AbsorptionGateEvent {
    double t_a;  // min; absorption is off before t_a
};

using Event = std::variant<FiniteBolusEvent, InstantBolusEvent, InfusionOnEvent, ShuntOnEvent,
                           AbsorptionGateEvent>;

inline double event_time(const Event& e) {
    struct Visitor {
        double operator()(const FiniteBolusEvent& ev) const { return ev.t_b; }
        double operator()(const InstantBolusEvent& ev) const { return ev.t_0; }
        double operator()(const InfusionOnEvent& ev) const { return ev.t_i; }
        double operator()(const ShuntOnEvent& ev) const { return ev.t_s; }
        double operator()(const AbsorptionGateEvent& ev) const { return ev.t_a; }
    };
    return std::visit(Visitor{}, e);
}

/// Events sorted by time. At most one shunt, at most one absorption gate,
/// finite boluses must not overlap.
class EventTimeline {
public:
    EventTimeline() = default;
    explicit EventTimeline(std::vector<Event> events) {
        for (auto& e : events) add(std::move(e));
    }

    void add(Event event) {
        check(event);
        const double t = event_time(event);
        auto pos = std::upper_bound(events_.begin(), events_.end(), std::pair(t, event.index()),
                                    [](const auto& key, const Event& e) {
                                        return key < std::pair(event_time(e), e.index());
                                    });
        events_.insert(pos, std::move(event));
    }

    const std::vector<Event>& events() const noexcept { return events_; }
    bool empty() const noexcept { return events_.empty(); }
    std::size_t size() const noexcept { return events_.size(); }

    std::optional<ShuntOnEvent> shunt() const { return find<ShuntOnEvent>(); }
    std::optional<AbsorptionGateEvent> gate() const { return find<AbsorptionGateEvent>(); }

    /// External source S(t): finite-bolus rectangles plus infusion steps.
    /// Instantaneous boluses are state jumps, not part of S.
    double source_at(double t) const {
        double s = 0.0;
        for (const auto& e : events_) {
            if (const auto* fb = std::get_if<FiniteBolusEvent>(&e)) {
                if (t >= fb->t_b && t <= fb->t_b + fb->dt_b) s += fb->S_b;
            } else if (const auto* inf = std::get_if<InfusionOnEvent>(&e)) {
                s += inf->S_i * heaviside(t - inf->t_i);
            }
        }
        return s;
    }

    /// Times at which the right-hand side changes form; sorted, deduplicated.
    std::vector<double> breakpoints() const {
        std::vector<double> ts;
        for (const auto& e : events_) {
            ts.push_back(event_time(e));
            if (const auto* fb = std::get_if<FiniteBolusEvent>(&e)) ts.push_back(fb->t_b + fb->dt_b);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        return ts;
    }

    /// Instantaneous bolus volumes scheduled exactly at time t.
    std::vector<double> jumps_at(double t) const {
        std::vector<double> v;
        for (const auto& e : events_)
            if (const auto* ib = std::get_if<InstantBolusEvent>(&e))
                if (ib->t_0 == t) v.push_back(ib->dV);
        return v;
    }

private:
    template <typename T>
    std::optional<T> find() const {
        for (const auto& e : events_)
            if (const auto* p = std::get_if<T>(&e)) return *p;
        return std::nullopt;
    }

    void check(const Event& event) const {
        if (event_time(event) < 0.0)
            throw std::invalid_argument("EventTimeline: event times must be >= 0");
        if (const auto* fb = std::get_if<FiniteBolusEvent>(&event)) {
            if (!(fb->dt_b > 0.0))
                throw std::invalid_argument("EventTimeline: finite bolus requires dt_b > 0");
            for (const auto& e : events_)
                if (const auto* other = std::get_if<FiniteBolusEvent>(&e)) {
                    const double lo = std::max(fb->t_b, other->t_b);
                    const double hi =
                        std::min(fb->t_b + fb->dt_b, other->t_b + other->dt_b);
                    if (lo < hi)
                        throw std::invalid_argument("EventTimeline: overlapping finite boluses");
                }
        }
        if (std::holds_alternative<ShuntOnEvent>(event) && shunt())
            throw std::invalid_argument("EventTimeline: at most one shunt event");
        if (std::holds_alternative<AbsorptionGateEvent>(event) && gate())
            throw std::invalid_argument("EventTimeline: at most one absorption gate");
        if (const auto* sh = std::get_if<ShuntOnEvent>(&event))
            if (!(sh->R_s > 0.0))
                throw std::invalid_argument("EventTimeline: shunt requires R_s > 0");
    }

    std::vector<Event> events_;
};

}  // namespace csf
