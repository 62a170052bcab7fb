#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cyclochron/kinematics.hpp"
#include "cyclochron/numeric.hpp"
#include "cyclochron/rational.hpp"

namespace cyclochron {

// SI second: 9 192 631 770 cycles of the caesium hyperfine clock.
inline constexpr std::int64_t cesium_hyperfine_hz = 9192631770LL;

// A persistent periodic phenomenon: phase(t) = phase0 + helicity * t / T
// (mod 1) against the shared external axis. When the period is known as an
// exact ratio of seconds, counting switches to integer arithmetic.
struct CycleClock {
    double period_s = 1.0;
    double initial_phase = 0.0; // in [0, 1)
    int helicity = +1;          // +1 forward, -1 reversed (conjugate sense)
    std::string label;
    std::optional<Rational> exact_period_s;
};

CycleClock make_clock(double period_s, double initial_phase = 0.0, int helicity = +1,
                      std::string label = {});
CycleClock make_exact_clock(const Rational& period_s, double initial_phase = 0.0,
                            int helicity = +1, std::string label = {});

// The shared laboratory time axis all clocks are read against.
struct ExternalAxis {
    double origin_s = 0.0;
};

struct ClockEnsemble {
    std::vector<CycleClock> clocks;
};

double phase_at(const CycleClock& c, double t, const ExternalAxis& axis = {});

// Completed cycles with completion instants in (t0, t1]. Helicity does not
// change how many cycles complete, only their sense, so the count ignores it.
// Differences of a per-instant cycle index make the count exactly additive
// over adjacent intervals.
TickCount tick_count(const CycleClock& c, double t0, double t1);

// Lab-frame de Broglie clock of a moving particle: period h / (gamma M c^2).
CycleClock clock_from_particle(const ParticleSpec& p, const Boost& b, const Constants& k,
                               double initial_phase = 0.0, int helicity = +1);

CycleClock invert_helicity(CycleClock c);

} // namespace cyclochron
