#include "cyclochron/cycles.hpp"

#include <cmath>

#include "cyclochron/errors.hpp"

namespace cyclochron {
namespace {

void check_clock_fields(double period_s, double initial_phase, int helicity) {
    if (!(period_s > 0.0) || !std::isfinite(period_s))
        throw DomainError("clock period must be positive and finite");
    if (!(initial_phase >= 0.0 && initial_phase < 1.0))
        throw DomainError("initial phase must lie in [0, 1)");
    if (helicity != 1 && helicity != -1)
        throw DomainError("helicity must be +1 or -1");
}

// Cycle index floor(phase0 + t / T) at one instant, as a signed 128-bit
// integer. Counts are differences of this, so the choice of path (exact
// rational vs compensated double) only has to be deterministic per instant.
__int128 cycle_index(const CycleClock& c, double t) {
    if (c.exact_period_s) {
        auto tr = Rational::from_double(t);
        auto pr = Rational::from_double(c.initial_phase);
        if (tr && pr) {
            try {
                Rational phi = *pr + *tr / *c.exact_period_s;
                return phi.floor();
            } catch (const RationalOverflow&) {
                // falls through to the compensated path
            }
        }
    }
    CycleSplit s = split_cycles(t, c.period_s);
    double x = c.initial_phase + s.frac;
    return static_cast<__int128>(s.whole) + static_cast<__int128>(std::floor(x));
}

} // namespace

CycleClock make_clock(double period_s, double initial_phase, int helicity, std::string label) {
    check_clock_fields(period_s, initial_phase, helicity);
    CycleClock c;
    c.period_s = period_s;
    c.initial_phase = initial_phase;
    c.helicity = helicity;
    c.label = std::move(label);
    return c;
}

CycleClock make_exact_clock(const Rational& period_s, double initial_phase, int helicity,
                            std::string label) {
    CycleClock c = make_clock(period_s.value(), initial_phase, helicity, std::move(label));
    if (!(Rational{0, 1} < period_s))
        throw DomainError("clock period must be positive");
    c.exact_period_s = period_s;
    return c;
}

double phase_at(const CycleClock& c, double t, const ExternalAxis& axis) {
    CycleSplit s = split_cycles(t - axis.origin_s, c.period_s);
    // helicity * whole is an exact integer and drops out mod 1
    return wrap_unit(c.initial_phase + c.helicity * s.frac);
}

TickCount tick_count(const CycleClock& c, double t0, double t1) {
    if (!(t1 >= t0))
        throw DomainError("tick interval must have t1 >= t0");
    __int128 d = cycle_index(c, t1) - cycle_index(c, t0);
    return d > 0 ? static_cast<TickCount>(d) : 0;
}

CycleClock clock_from_particle(const ParticleSpec& p, const Boost& b, const Constants& k,
                               double initial_phase, int helicity) {
    FourMomentum m = four_momentum(p, b, k);
    FourPeriodicity per = periodicity_of(m, k);
    return make_clock(per.temporal_period_s, initial_phase, helicity, p.name);
}

CycleClock invert_helicity(CycleClock c) {
    c.helicity = -c.helicity;
    return c;
}

} // namespace cyclochron
