#pragma once

#include <array>

#include "cyclochron/constants.hpp"
#include "cyclochron/particles.hpp"

namespace cyclochron {

using Vec3 = std::array<double, 3>;

struct FourMomentum {
    double energy_ev = 0.0;  // > 0
    Vec3 momentum_ev_c{0.0, 0.0, 0.0};
};

// The reciprocal of a four-momentum: one intrinsic period per component.
// Wavelength components are signed (h / p_i) and +inf where p_i == 0; the
// proper period is +inf for massless states (the frozen rest clock).
struct FourPeriodicity {
    double temporal_period_s = 0.0;
    Vec3 wavelengths_m{0.0, 0.0, 0.0};
    double proper_period_s = 0.0;
};

struct Boost {
    Vec3 beta{0.0, 0.0, 0.0};
};

// Velocities are accepted up to |beta| <= 1 - 1e-12; beyond that the caller
// gets a domain error rather than a silent clamp.
Boost make_boost(double bx, double by, double bz);
Boost make_boost(const Vec3& beta);

double lorentz_gamma(const Boost& b);

// Rest-frame internal clock period h / (M c^2); +inf for massless species.
double compton_period(const ParticleSpec& p, const Constants& k);

// Massive particle seen from a frame in which it moves with -beta (i.e. the
// particle is actively boosted by `b`). Massless species are rejected: they
// have no rest frame, use photon_momentum.
FourMomentum four_momentum(const ParticleSpec& p, const Boost& b, const Constants& k);

FourMomentum photon_momentum(double energy_ev, const Vec3& direction);

FourPeriodicity periodicity_of(const FourMomentum& m, const Constants& k);

// Active Lorentz boost of an existing four-momentum.
FourMomentum boost_momentum(const FourMomentum& m, const Boost& b);

double invariant_mass_ev(const FourMomentum& m);

// de Broglie phase harmony: the lab-frame wave phase (E - beta.pc) t / h minus
// the time-dilated internal clock phase t / (gamma T_compton), in cycles.
// Identically zero at rest; grows only through floating rounding otherwise.
double phase_harmony_residual(const ParticleSpec& p, const Boost& b, double t, const Constants& k);

} // namespace cyclochron
