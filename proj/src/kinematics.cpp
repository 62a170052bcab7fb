#include "cyclochron/kinematics.hpp"

#include <cmath>
#include <limits>

#include "cyclochron/errors.hpp"

namespace cyclochron {
namespace {

constexpr double INF = std::numeric_limits<double>::infinity();
constexpr double BETA_MAX = 1.0 - 1e-12;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Mass-squared below this fraction of E^2 is treated as exactly light-like;
// construction rounding sits orders of magnitude under it, genuine massive
// states (gamma capped near 7e5 by BETA_MAX) orders of magnitude above.
constexpr double LIGHTLIKE_CUT = 64.0 * std::numeric_limits<double>::epsilon();

} // namespace

Boost make_boost(double bx, double by, double bz) { return make_boost(Vec3{bx, by, bz}); }

Boost make_boost(const Vec3& beta) {
    double b2 = dot(beta, beta);
    if (!(b2 >= 0.0) || !std::isfinite(b2))
        throw DomainError("boost velocity must be finite");
    if (b2 > BETA_MAX * BETA_MAX)
        throw DomainError("boost speed exceeds supported cap |beta| <= 1 - 1e-12");
    return Boost{beta};
}

double lorentz_gamma(const Boost& b) {
    double b2 = dot(b.beta, b.beta);
    return 1.0 / std::sqrt(1.0 - b2);
}

double compton_period(const ParticleSpec& p, const Constants& k) {
    if (p.massless())
        return INF;
    return k.h / (p.rest_mass_energy_ev * k.electronvolt);
}

FourMomentum four_momentum(const ParticleSpec& p, const Boost& b, const Constants& k) {
    (void)k;
    if (p.massless())
        throw DomainError("massless particle has no rest frame; use photon_momentum");
    if (!(p.rest_mass_energy_ev > 0.0))
        throw DomainError("rest mass energy must be positive");
    double gamma = lorentz_gamma(b);
    FourMomentum m;
    m.energy_ev = gamma * p.rest_mass_energy_ev;
    for (int i = 0; i < 3; ++i)
        m.momentum_ev_c[i] = m.energy_ev * b.beta[i];
    return m;
}

FourMomentum photon_momentum(double energy_ev, const Vec3& direction) {
    if (!(energy_ev > 0.0) || !std::isfinite(energy_ev))
        throw DomainError("photon energy must be positive and finite");
    double n = std::sqrt(dot(direction, direction));
    if (!(n > 0.0) || !std::isfinite(n))
        throw DomainError("photon direction must be a nonzero finite vector");
    FourMomentum m;
    m.energy_ev = energy_ev;
    for (int i = 0; i < 3; ++i)
        m.momentum_ev_c[i] = energy_ev * (direction[i] / n);
    return m;
}

FourPeriodicity periodicity_of(const FourMomentum& m, const Constants& k) {
    if (!(m.energy_ev > 0.0))
        throw DomainError("four-momentum energy must be positive");
    FourPeriodicity per;
    per.temporal_period_s = k.h / (m.energy_ev * k.electronvolt);
    for (int i = 0; i < 3; ++i) {
        double p = m.momentum_ev_c[i];
        per.wavelengths_m[i] = p == 0.0 ? INF : k.h * k.c / (p * k.electronvolt);
    }
    double e2 = m.energy_ev * m.energy_ev;
    double m2 = e2 - dot(m.momentum_ev_c, m.momentum_ev_c);
    per.proper_period_s =
        m2 <= LIGHTLIKE_CUT * e2 ? INF : k.h / (std::sqrt(m2) * k.electronvolt);
    return per;
}

FourMomentum boost_momentum(const FourMomentum& m, const Boost& b) {
    if (!(m.energy_ev > 0.0))
        throw DomainError("four-momentum energy must be positive");
    double b2 = dot(b.beta, b.beta);
    if (b2 == 0.0)
        return m;
    double gamma = 1.0 / std::sqrt(1.0 - b2);
    double bp = dot(b.beta, m.momentum_ev_c);
    // (gamma - 1) / beta^2 in the cancellation-free form gamma^2 / (gamma + 1)
    double coef = gamma * gamma / (gamma + 1.0);
    FourMomentum out;
    out.energy_ev = gamma * (m.energy_ev + bp);
    double along = coef * bp + gamma * m.energy_ev;
    for (int i = 0; i < 3; ++i)
        out.momentum_ev_c[i] = m.momentum_ev_c[i] + along * b.beta[i];
    return out;
}

double invariant_mass_ev(const FourMomentum& m) {
    double m2 = m.energy_ev * m.energy_ev - dot(m.momentum_ev_c, m.momentum_ev_c);
    return m2 > 0.0 ? std::sqrt(m2) : 0.0;
}

double phase_harmony_residual(const ParticleSpec& p, const Boost& b, double t, const Constants& k) {
    FourMomentum m = four_momentum(p, b, k);
    double gamma = lorentz_gamma(b);
    double doppler_ev = m.energy_ev - dot(b.beta, m.momentum_ev_c);
    double wave_phase = doppler_ev * k.electronvolt * t / k.h;
    double clock_phase = p.rest_mass_energy_ev * k.electronvolt * t / (gamma * k.h);
    return wave_phase - clock_phase;
}

} // namespace cyclochron
