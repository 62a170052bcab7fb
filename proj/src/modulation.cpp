#include "cyclochron/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cyclochron/errors.hpp"

namespace cyclochron {
namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

double distance(const Vec3& a, const Vec3& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void check_clock_set(const std::vector<PositionedClock>& clocks) {
    if (clocks.empty())
        throw UsageError("need at least one clock");
    std::set<std::string> labels;
    for (const auto& pc : clocks) {
        if (pc.clock.label.empty())
            throw UsageError("positioned clocks need non-empty labels");
        if (!labels.insert(pc.clock.label).second)
            throw UsageError("duplicate clock label '" + pc.clock.label + "'");
    }
}

void check_events(const std::vector<PositionedClock>& clocks,
                  const std::vector<InteractionEvent>& events) {
    std::set<std::string> labels;
    for (const auto& pc : clocks)
        labels.insert(pc.clock.label);
    double prev = -INF;
    for (std::size_t j = 0; j < events.size(); ++j) {
        const auto& ev = events[j];
        if (!std::isfinite(ev.time_s) || ev.time_s < prev)
            throw UsageError("events must be finite and sorted by emission time");
        prev = ev.time_s;
        CompensatedSum balance;
        for (const auto& [label, de] : ev.energy_exchange_ev) {
            if (!labels.count(label))
                throw UsageError("event " + std::to_string(j) + " names unknown clock '" + label +
                                 "'");
            if (!std::isfinite(de))
                throw UsageError("event " + std::to_string(j) + " has a non-finite exchange");
            balance.add(de);
        }
        if (balance.value() != 0.0)
            throw PhysicalValidityError("event " + std::to_string(j) +
                                        " does not conserve energy (sum " +
                                        format_double(balance.value()) + " eV)");
    }
}

struct Arrival {
    double t;
    std::size_t event;
    double delta_ev;
};

} // namespace

PositionedClock positioned_clock(const CycleClock& c, const Vec3& position_m, const Constants& k) {
    PositionedClock pc;
    pc.clock = c;
    pc.position_m = position_m;
    pc.energy_ev = k.h / (c.period_s * k.electronvolt);
    return pc;
}

PositionedClock positioned_clock_from_particle(const ParticleSpec& p, const Boost& b,
                                               const Constants& k, const Vec3& position_m,
                                               double initial_phase, int helicity) {
    return positioned_clock(clock_from_particle(p, b, k, initial_phase, helicity), position_m, k);
}

double timeline_phase(const ModulationTimeline& tl, double t) {
    if (tl.segments.empty())
        throw DomainError("timeline has no segments");
    std::size_t i = tl.segments.size();
    while (i > 1 && tl.segments[i - 1].start_s > t)
        --i;
    const TimelineSegment& seg = tl.segments[i - 1];
    CycleSplit s = split_cycles(t - seg.start_s, seg.period_s);
    return wrap_unit(seg.phase_at_start + tl.helicity * s.frac);
}

double timeline_period_at(const ModulationTimeline& tl, double t) {
    if (tl.segments.empty())
        throw DomainError("timeline has no segments");
    std::size_t i = tl.segments.size();
    while (i > 1 && tl.segments[i - 1].start_s > t)
        --i;
    return tl.segments[i - 1].period_s;
}

std::vector<ModulationTimeline> apply_events(const std::vector<PositionedClock>& clocks,
                                             const std::vector<InteractionEvent>& events,
                                             const Constants& k) {
    check_clock_set(clocks);
    check_events(clocks, events);

    std::vector<ModulationTimeline> out;
    out.reserve(clocks.size());
    for (const auto& pc : clocks) {
        // retarded arrivals affecting this clock
        std::vector<Arrival> arrivals;
        for (std::size_t j = 0; j < events.size(); ++j) {
            auto it = events[j].energy_exchange_ev.find(pc.clock.label);
            if (it == events[j].energy_exchange_ev.end() || it->second == 0.0)
                continue;
            double t_arr = events[j].time_s + distance(pc.position_m, events[j].position_m) / k.c;
            if (!(t_arr > 0.0))
                throw PhysicalValidityError("event " + std::to_string(j) + " reaches clock '" +
                                            pc.clock.label + "' before the timeline origin");
            arrivals.push_back({t_arr, j, it->second});
        }
        std::stable_sort(arrivals.begin(), arrivals.end(),
                         [](const Arrival& a, const Arrival& b) { return a.t < b.t; });
        for (std::size_t i = 1; i < arrivals.size(); ++i)
            if (arrivals[i].t == arrivals[i - 1].t)
                throw PhysicalValidityError(
                    "events " + std::to_string(arrivals[i - 1].event) + " and " +
                    std::to_string(arrivals[i].event) + " reach clock '" + pc.clock.label +
                    "' at exactly the same instant");

        ModulationTimeline tl;
        tl.label = pc.clock.label;
        tl.helicity = pc.clock.helicity;
        double energy = pc.energy_ev;
        TimelineSegment seg{0.0, pc.clock.period_s, pc.clock.initial_phase};
        for (const Arrival& a : arrivals) {
            double next_energy = energy + a.delta_ev;
            if (!(next_energy > 0.0))
                throw PhysicalValidityError("event " + std::to_string(a.event) + " drives clock '" +
                                            pc.clock.label + "' to non-positive energy");
            CycleSplit s = split_cycles(a.t - seg.start_s, seg.period_s);
            double phase_here = wrap_unit(seg.phase_at_start + tl.helicity * s.frac);
            tl.segments.push_back(seg);
            seg = TimelineSegment{a.t, k.h / (next_energy * k.electronvolt), phase_here};
            energy = next_energy;
        }
        tl.segments.push_back(seg);
        out.push_back(std::move(tl));
    }
    return out;
}

std::vector<std::vector<ArrivalRecord>> causal_order(const std::vector<PositionedClock>& clocks,
                                                     const std::vector<InteractionEvent>& events,
                                                     const Constants& k) {
    check_clock_set(clocks);
    std::vector<std::vector<ArrivalRecord>> out;
    out.reserve(clocks.size());
    for (const auto& pc : clocks) {
        std::vector<ArrivalRecord> rows;
        rows.reserve(events.size());
        for (std::size_t j = 0; j < events.size(); ++j) {
            double t_arr = events[j].time_s + distance(pc.position_m, events[j].position_m) / k.c;
            rows.push_back({j, t_arr, false});
        }
        std::stable_sort(rows.begin(), rows.end(), [](const ArrivalRecord& a, const ArrivalRecord& b) {
            return a.arrival_s < b.arrival_s;
        });
        for (std::size_t i = 1; i < rows.size(); ++i)
            rows[i].tie_with_previous = rows[i].arrival_s == rows[i - 1].arrival_s;
        out.push_back(std::move(rows));
    }
    return out;
}

std::vector<RegimeChange> detect_regime_changes(std::span<const double> phases, double t0,
                                                double sample_step) {
    if (!(sample_step > 0.0) || !std::isfinite(sample_step))
        throw UsageError("sample step must be positive and finite");
    if (phases.size() < 4)
        throw UsageError("need at least 4 phase samples");

    const std::size_t m = phases.size() - 1;
    std::vector<double> inc(m);
    for (std::size_t kdx = 0; kdx < m; ++kdx) {
        inc[kdx] = wrap_signed(phases[kdx + 1] - phases[kdx]);
        if (std::fabs(inc[kdx]) > 0.125 * (1.0 + 1e-9))
            throw ResolutionError("phase advances more than 1/8 cycle per sample; "
                                  "history is too coarse to detect switches");
    }

    // group increments into runs of equal rate
    struct Run {
        std::size_t first, last; // increment indices, inclusive
        double rate;             // cycles per sample (median of the run)
    };
    std::vector<Run> runs;
    std::size_t start = 0;
    for (std::size_t kdx = 1; kdx <= m; ++kdx) {
        bool split = kdx == m || std::fabs(inc[kdx] - inc[start]) >
                                     std::max(1e-9, 1e-6 * std::fabs(inc[start]));
        if (split) {
            std::vector<double> window(inc.begin() + start, inc.begin() + kdx);
            std::sort(window.begin(), window.end());
            runs.push_back({start, kdx - 1, window[window.size() / 2]});
            start = kdx;
        }
    }

    auto period_of = [&](double rate) {
        return rate == 0.0 ? INF : sample_step / std::fabs(rate);
    };

    // stable runs cover >= 2 increments; singletons between them are the
    // increments that straddle a switch
    std::vector<RegimeChange> changes;
    std::size_t i = 0;
    while (i < runs.size()) {
        if (runs[i].last == runs[i].first) {
            ++i; // a lone increment cannot anchor a segment
            continue;
        }
        // find the next stable run
        std::size_t j = i + 1;
        while (j < runs.size() && runs[j].last == runs[j].first)
            ++j;
        if (j >= runs.size())
            break;
        const Run& a = runs[i];
        const Run& b = runs[j];
        double t_switch;
        if (j == i + 1) {
            // clean boundary: the switch sits on the shared sample
            t_switch = t0 + static_cast<double>(b.first) * sample_step;
        } else if (j == i + 2) {
            // one straddling increment: split it by the mixed phase advance
            const Run& s = runs[i + 1];
            double mixed = inc[s.first];
            double denom = a.rate - b.rate;
            double frac = std::fabs(denom) > 1e-12 ? (mixed - b.rate) / denom : 0.5;
            frac = std::clamp(frac, 0.0, 1.0);
            t_switch = t0 + (static_cast<double>(s.first) + frac) * sample_step;
        } else {
            // several transitional increments: report the center of the gap
            double mid = 0.5 * static_cast<double>(runs[i + 1].first + runs[j - 1].last + 1);
            t_switch = t0 + mid * sample_step;
        }
        changes.push_back({t_switch, period_of(a.rate), period_of(b.rate)});
        i = j;
    }
    return changes;
}

RegimeReport regime_classify(const std::vector<PositionedClock>& clocks,
                             const std::vector<InteractionEvent>& events) {
    check_clock_set(clocks);
    check_events(clocks, events);
    for (const auto& ev : events)
        for (const auto& [label, de] : ev.energy_exchange_ev)
            if (de != 0.0)
                return {Regime::Chaotic, std::nullopt};

    ClockEnsemble e;
    for (const auto& pc : clocks)
        e.clocks.push_back(pc.clock);
    EnsembleClassification cls = classify(e, default_rationalization_tolerance);
    if (cls.kind == EnsembleKind::Periodic)
        return {Regime::Cyclic, cls.system_period_s};
    return {Regime::Ergodic, std::nullopt};
}

} // namespace cyclochron
