#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclochron/kinematics.hpp"
#include "cyclochron/relational_time.hpp"

namespace cyclochron {

// A localized exchange of energy quanta among clocks, emitted at time_s from
// position_m. Its effect reaches each involved clock retarded by distance/c.
// The exchanged amounts must balance to zero exactly.
struct InteractionEvent {
    double time_s = 0.0;
    Vec3 position_m{0.0, 0.0, 0.0};
    std::map<std::string, double> energy_exchange_ev; // clock label -> delta E
};

// A clock pinned to a lab position, with the energy quantum driving its
// period (period = h / (E * eV)) tracked explicitly so exchanges can
// re-derive the period after each event.
struct PositionedClock {
    CycleClock clock;
    Vec3 position_m{0.0, 0.0, 0.0};
    double energy_ev = 0.0;
};

PositionedClock positioned_clock(const CycleClock& c, const Vec3& position_m, const Constants& k);
PositionedClock positioned_clock_from_particle(const ParticleSpec& p, const Boost& b,
                                               const Constants& k, const Vec3& position_m,
                                               double initial_phase = 0.0, int helicity = +1);

// Piecewise-constant period history. Segment starts are strictly increasing,
// the first segment starts at t = 0, and the phase is continuous across every
// boundary by construction.
struct TimelineSegment {
    double start_s = 0.0;
    double period_s = 0.0;
    double phase_at_start = 0.0;
};

struct ModulationTimeline {
    std::string label;
    int helicity = +1;
    std::vector<TimelineSegment> segments;
};

double timeline_phase(const ModulationTimeline& tl, double t);
double timeline_period_at(const ModulationTimeline& tl, double t);

// Applies every event to every involved clock at its retarded arrival time
// t0 + |x_clock - x_event| / c. Rejects exchanges that do not balance, drive
// a clock to non-positive energy, name unknown clocks, or arrive at the same
// clock at exactly the same instant.
std::vector<ModulationTimeline> apply_events(const std::vector<PositionedClock>& clocks,
                                             const std::vector<InteractionEvent>& events,
                                             const Constants& k);

struct ArrivalRecord {
    std::size_t event_index = 0;
    double arrival_s = 0.0;
    bool tie_with_previous = false; // same arrival instant as the previous record
};

// Per clock, every event's retarded arrival in causal order. Simultaneous
// arrivals are kept and flagged rather than silently ordered.
std::vector<std::vector<ArrivalRecord>> causal_order(const std::vector<PositionedClock>& clocks,
                                                     const std::vector<InteractionEvent>& events,
                                                     const Constants& k);

struct RegimeChange {
    double switch_s = 0.0;
    double period_before_s = 0.0;
    double period_after_s = 0.0;
};

// Recovers period-switch instants from a uniformly sampled phase history
// (samples at t0 + k * sample_step). Demands at least ~8 samples per cycle;
// coarser histories alias and are refused.
std::vector<RegimeChange> detect_regime_changes(std::span<const double> phases, double t0,
                                                double sample_step);

enum class Regime { Cyclic, Ergodic, Chaotic };

struct RegimeReport {
    Regime regime = Regime::Cyclic;
    std::optional<double> system_period_s;
};

// Cyclic: commensurate periods and no energy exchanged. Ergodic: free but
// incommensurate. Chaotic: any nonzero exchange (interaction-driven period
// modulation destroys the closed orbits).
RegimeReport regime_classify(const std::vector<PositionedClock>& clocks,
                             const std::vector<InteractionEvent>& events);

} // namespace cyclochron
