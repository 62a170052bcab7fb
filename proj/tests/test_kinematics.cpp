#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cyclochron/constants.hpp"
#include "cyclochron/errors.hpp"
#include "cyclochron/kinematics.hpp"
#include "cyclochron/particles.hpp"

using namespace cyclochron;

namespace {
const Constants K{};
const ParticleSpec& electron() { return find_particle(builtin_particles(), "electron"); }
const ParticleSpec& muon() { return find_particle(builtin_particles(), "muon"); }
const ParticleSpec& photon() { return find_particle(builtin_particles(), "photon"); }

double rel_diff(double a, double b) {
    double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}
} // namespace

TEST_CASE("electron at rest reproduces the Compton period") {
    CHECK(compton_period(electron(), K) == 8.093299794302628e-21);
    FourMomentum m = four_momentum(electron(), Boost{}, K);
    CHECK(m.energy_ev == 510998.95);
    CHECK(m.momentum_ev_c[0] == 0.0);
    FourPeriodicity per = periodicity_of(m, K);
    CHECK(per.temporal_period_s == 8.093299794302628e-21);
    CHECK(per.proper_period_s == 8.093299794302628e-21);
    CHECK(std::isinf(per.wavelengths_m[0]));
    CHECK(per.wavelengths_m[0] > 0.0);
}

TEST_CASE("time dilation slows the temporal period by gamma") {
    Boost b = make_boost(0.8660254, 0.0, 0.0);
    double g = lorentz_gamma(b);
    CHECK(g == doctest::Approx(2.0).epsilon(1e-6));
    FourMomentum m = four_momentum(electron(), b, K);
    CHECK(m.energy_ev == doctest::Approx(1021997.8866019346).epsilon(1e-12));
    FourPeriodicity per = periodicity_of(m, K);
    // T_t = T_tau / gamma
    CHECK(rel_diff(per.temporal_period_s, compton_period(electron(), K) / g) < 1e-14);
    // the proper period comes back through the invariant mass, whose
    // E^2 - p^2 cancellation costs a few ulps
    CHECK(rel_diff(per.proper_period_s, compton_period(electron(), K)) < 1e-13);
}

TEST_CASE("duality products recover h and hc") {
    Boost b = make_boost(0.3, -0.4, 0.5);
    FourMomentum m = four_momentum(muon(), b, K);
    FourPeriodicity per = periodicity_of(m, K);
    CHECK(rel_diff(per.temporal_period_s * m.energy_ev * K.electronvolt, K.h) < 1e-14);
    for (int i = 0; i < 3; ++i) {
        double lhs = per.wavelengths_m[i] * m.momentum_ev_c[i] * K.electronvolt;
        CHECK(rel_diff(lhs, K.h * K.c) < 1e-14);
    }
}

TEST_CASE("wavelength is signed and infinite along zero-momentum axes") {
    Boost b = make_boost(0.0, -0.5, 0.0);
    FourMomentum m = four_momentum(electron(), b, K);
    FourPeriodicity per = periodicity_of(m, K);
    CHECK(std::isinf(per.wavelengths_m[0]));
    CHECK(per.wavelengths_m[1] < 0.0);
    CHECK(std::isinf(per.wavelengths_m[2]));
}

TEST_CASE("heavier species tick faster") {
    CHECK(compton_period(muon(), K) < compton_period(electron(), K));
    CHECK(compton_period(muon(), K) == 3.9141882291421934e-23);
}

namespace {
// Inverse of the duality map: rebuild energy-momentum from a periodicity.
FourMomentum momentum_from_periodicity(const FourPeriodicity& per, const Constants& k) {
    FourMomentum m;
    m.energy_ev = k.h / (per.temporal_period_s * k.electronvolt);
    for (int i = 0; i < 3; ++i) {
        double lam = per.wavelengths_m[i];
        m.momentum_ev_c[i] = std::isinf(lam) ? 0.0 : k.h * k.c / (lam * k.electronvolt);
    }
    return m;
}
} // namespace

TEST_CASE("boost covariance: the duality map commutes with boosts") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> comp(-0.55, 0.55);
    for (int trial = 0; trial < 1000; ++trial) {
        Boost b1 = make_boost(comp(rng), comp(rng), comp(rng));
        Boost b2 = make_boost(comp(rng), comp(rng), comp(rng));
        FourMomentum m = four_momentum(electron(), b1, K);
        // boost the momentum directly
        FourMomentum direct = boost_momentum(m, b2);
        // round-trip through the periodicity representation, then boost
        FourMomentum rebuilt = momentum_from_periodicity(periodicity_of(m, K), K);
        FourMomentum via = boost_momentum(rebuilt, b2);
        CHECK(rel_diff(periodicity_of(direct, K).temporal_period_s,
                       periodicity_of(via, K).temporal_period_s) < 1e-12);
        // momentum components on the energy scale: a component that cancels
        // to near zero after the second boost carries no precision of its own
        for (int i = 0; i < 3; ++i)
            CHECK(std::fabs(direct.momentum_ev_c[i] - via.momentum_ev_c[i]) / direct.energy_ev <
                  1e-12);
    }
}

TEST_CASE("boost chains preserve the invariant mass") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> comp(-0.46, 0.46); // |beta| <= 0.8
    for (int trial = 0; trial < 200; ++trial) {
        FourMomentum m = four_momentum(muon(), Boost{}, K);
        int hops = 1 + static_cast<int>(rng() % 10);
        for (int i = 0; i < hops; ++i)
            m = boost_momentum(m, make_boost(comp(rng), comp(rng), comp(rng)));
        CHECK(rel_diff(invariant_mass_ev(m), muon().rest_mass_energy_ev) < 1e-10);
        CHECK(m.energy_ev >= muon().rest_mass_energy_ev);
    }
}

TEST_CASE("a boost followed by its inverse is the identity") {
    Boost b = make_boost(0.6, -0.2, 0.1);
    Boost inv = make_boost(-0.6, 0.2, -0.1);
    FourMomentum m = four_momentum(electron(), make_boost(0.1, 0.2, 0.3), K);
    FourMomentum back = boost_momentum(boost_momentum(m, b), inv);
    CHECK(rel_diff(back.energy_ev, m.energy_ev) < 1e-12);
    for (int i = 0; i < 3; ++i)
        CHECK(std::fabs(back.momentum_ev_c[i] - m.momentum_ev_c[i]) <
              1e-12 * m.energy_ev);
}

TEST_CASE("zero boost is the exact identity") {
    FourMomentum m = four_momentum(electron(), make_boost(0.25, 0.0, -0.125), K);
    FourMomentum same = boost_momentum(m, Boost{});
    CHECK(same.energy_ev == m.energy_ev);
    CHECK(same.momentum_ev_c == m.momentum_ev_c);
}

TEST_CASE("speeds at or beyond the cap are refused") {
    CHECK_THROWS_AS(make_boost(1.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_boost(0.0, 0.0, 1.0 - 1e-14), DomainError);
    CHECK_THROWS_AS(make_boost(0.9, 0.9, 0.9), DomainError);
    CHECK_NOTHROW(make_boost(0.99, 0.0, 0.0));
}

TEST_CASE("massless particles have no rest frame but a finite temporal period") {
    CHECK(std::isinf(compton_period(photon(), K)));
    CHECK_THROWS_AS(four_momentum(photon(), Boost{}, K), DomainError);

    FourMomentum m = photon_momentum(1.0, {1.0, 0.0, 0.0});
    CHECK(m.energy_ev == 1.0);
    CHECK(m.momentum_ev_c[0] == 1.0);
    FourPeriodicity per = periodicity_of(m, K);
    CHECK(per.temporal_period_s == 4.135667696923859e-15);
    CHECK(std::isinf(per.proper_period_s));
    CHECK(rel_diff(per.wavelengths_m[0], K.c * per.temporal_period_s) < 1e-14);
}

TEST_CASE("photon directions are normalized") {
    FourMomentum m = photon_momentum(2.0, {0.0, 3.0, 4.0});
    CHECK(m.momentum_ev_c[1] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(m.momentum_ev_c[2] == doctest::Approx(1.6).epsilon(1e-15));
    CHECK_THROWS_AS(photon_momentum(1.0, {0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(photon_momentum(-1.0, {1.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("a fast electron still reads as massive") {
    Boost b = make_boost(0.99999, 0.0, 0.0); // gamma ~ 224
    FourMomentum m = four_momentum(electron(), b, K);
    FourPeriodicity per = periodicity_of(m, K);
    CHECK(std::isfinite(per.proper_period_s));
    CHECK(rel_diff(per.proper_period_s, compton_period(electron(), K)) < 1e-7);
}

TEST_CASE("phase harmony holds exactly at rest") {
    for (double t : {1e-21, 1e-10, 1.0, 1e5})
        CHECK(phase_harmony_residual(electron(), Boost{}, t, K) == 0.0);
}

TEST_CASE("phase harmony residual stays tiny in moving frames") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> comp(-0.57, 0.57);
    for (int trial = 0; trial < 100; ++trial) {
        Boost b = make_boost(comp(rng), comp(rng), comp(rng));
        double t = 1e-15;
        double cycles = t / compton_period(electron(), K);
        CHECK(std::fabs(phase_harmony_residual(electron(), b, t, K)) <= 1e-9 * cycles);
    }
}
