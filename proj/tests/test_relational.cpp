#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cyclochron/cycles.hpp"
#include "cyclochron/errors.hpp"
#include "cyclochron/relational_time.hpp"

using namespace cyclochron;

namespace {

ClockEnsemble triple345(bool exact) {
    ClockEnsemble e;
    if (exact) {
        e.clocks.push_back(make_exact_clock(Rational::of(3, 1), 0.0, +1, "a"));
        e.clocks.push_back(make_exact_clock(Rational::of(4, 1), 0.0, +1, "b"));
        e.clocks.push_back(make_exact_clock(Rational::of(5, 1), 0.0, +1, "c"));
    } else {
        e.clocks.push_back(make_clock(3.0, 0.0, +1, "a"));
        e.clocks.push_back(make_clock(4.0, 0.0, +1, "b"));
        e.clocks.push_back(make_clock(5.0, 0.0, +1, "c"));
    }
    return e;
}

ClockEnsemble one_sqrt2() {
    ClockEnsemble e;
    e.clocks.push_back(make_clock(1.0, 0.0, +1, "unit"));
    e.clocks.push_back(make_clock(std::sqrt(2.0), 0.0, +1, "root2"));
    return e;
}

} // namespace

TEST_CASE("fingerprints read all phases at once") {
    Fingerprint f = fingerprint_at(triple345(false), 7.0);
    REQUIRE(f.phases.size() == 3);
    CHECK(f.phases[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(f.phases[1] == 0.75);
    CHECK(f.phases[2] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(f.labels == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("exact ensembles classify through rational arithmetic") {
    ClockEnsemble e;
    e.clocks.push_back(make_exact_clock(Rational::of(1, 3), 0.0, +1, "x"));
    e.clocks.push_back(make_exact_clock(Rational::of(1, 6), 0.0, +1, "y"));
    EnsembleClassification cls = classify(e, 0.0); // exact path permits zero tolerance
    CHECK(cls.kind == EnsembleKind::Periodic);
    REQUIRE(cls.system_period_exact.has_value());
    CHECK(*cls.system_period_exact == Rational::of(1, 3));
    CHECK(*cls.system_period_s == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(!cls.duplicate_periods);
}

TEST_CASE("commensurate floating periods classify as periodic with the LCM") {
    EnsembleClassification cls = classify(triple345(false), 1e-12);
    CHECK(cls.kind == EnsembleKind::Periodic);
    REQUIRE(cls.system_period_s.has_value());
    CHECK(*cls.system_period_s == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("sqrt(2) against 1 is ergodic at tight tolerance, periodic at loose") {
    EnsembleClassification tight = classify(one_sqrt2(), 1e-12);
    CHECK(tight.kind == EnsembleKind::Ergodic);
    CHECK(!tight.system_period_s.has_value());

    EnsembleClassification loose = classify(one_sqrt2(), 1e-6);
    CHECK(loose.kind == EnsembleKind::Periodic);
    // 1393/985 is the first sqrt(2) convergent within 1e-6
    CHECK(*loose.system_period_s == doctest::Approx(1393.0).epsilon(1e-9));
}

TEST_CASE("duplicate periods are flagged") {
    ClockEnsemble e;
    e.clocks.push_back(make_clock(2.0, 0.0, +1, "p"));
    e.clocks.push_back(make_clock(2.0, 0.5, +1, "q"));
    e.clocks.push_back(make_clock(3.0, 0.0, +1, "r"));
    EnsembleClassification cls = classify(e, 1e-12);
    CHECK(cls.duplicate_periods);
    CHECK(cls.kind == EnsembleKind::Periodic);
    CHECK(*cls.system_period_s == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("classification tolerance is validated") {
    CHECK_THROWS_AS(classify(one_sqrt2(), 1e-3), UsageError);
    CHECK_THROWS_AS(classify(one_sqrt2(), -1e-12), UsageError);
    // zero tolerance demands exact periods
    CHECK_THROWS_AS(classify(one_sqrt2(), 0.0), UsageError);
    ClockEnsemble empty;
    CHECK_THROWS_AS(classify(empty, 1e-12), UsageError);
}

TEST_CASE("a single clock is periodic with its own period") {
    ClockEnsemble e;
    e.clocks.push_back(make_clock(0.125, 0.5, -1, "solo"));
    EnsembleClassification cls = classify(e, 1e-12);
    CHECK(cls.kind == EnsembleKind::Periodic);
    CHECK(*cls.system_period_s == 0.125);
}

TEST_CASE("gigantic exact least common periods are refused, not wrapped") {
    ClockEnsemble e;
    e.clocks.push_back(make_exact_clock(Rational::of(4000000007LL, 1), 0.0, +1, "p"));
    e.clocks.push_back(make_exact_clock(Rational::of(4000000063LL, 1), 0.0, +1, "q"));
    CHECK_THROWS_AS(classify(e, 0.0), DomainError);
}

TEST_CASE("CRT decode finds every solution in the window") {
    ClockEnsemble e = triple345(true);
    Fingerprint f = fingerprint_at(e, 7.0);
    std::vector<double> one = decode_time(e, f, 0.0, 60.0, 1e-9);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 7.0);

    std::vector<double> two = decode_time(e, f, 0.0, 120.0, 1e-9);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == 7.0);
    CHECK(two[1] == 67.0);
}

TEST_CASE("incompatible fingerprints decode to nothing") {
    ClockEnsemble e;
    e.clocks.push_back(make_exact_clock(Rational::of(2, 1), 0.0, +1, "p"));
    e.clocks.push_back(make_exact_clock(Rational::of(2, 1), 0.0, +1, "q"));
    Fingerprint f;
    f.phases = {0.0, 0.5};
    f.labels = {"p", "q"};
    f.exact_phases = std::vector<Rational>{Rational::of(0, 1), Rational::of(1, 2)};
    CHECK(decode_time(e, f, 0.0, 100.0, 1e-9).empty());
}

TEST_CASE("scan decode agrees with the exact path") {
    ClockEnsemble exact = triple345(true);
    ClockEnsemble dbl = triple345(false);
    Fingerprint f = fingerprint_at(dbl, 7.0);
    std::vector<double> scanned = decode_time(dbl, f, 0.0, 120.0, 1e-6);
    std::vector<double> exact_instants = decode_time(exact, fingerprint_at(exact, 7.0), 0.0, 120.0, 1e-9);
    REQUIRE(scanned.size() == exact_instants.size());
    for (std::size_t i = 0; i < scanned.size(); ++i)
        CHECK(std::fabs(scanned[i] - exact_instants[i]) < 1e-9);
}

TEST_CASE("single clock decode lists one instant per cycle") {
    ClockEnsemble e;
    e.clocks.push_back(make_clock(0.5, 0.0, +1, "half"));
    Fingerprint f;
    f.phases = {0.0};
    f.labels = {"half"};
    std::vector<double> hits = decode_time(e, f, 0.0, 2.0, 1e-6);
    REQUIRE(hits.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::fabs(hits[i] - 0.5 * static_cast<double>(i)) < 1e-9);
}

TEST_CASE("decode round-trips random instants") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 60.0);
    std::uniform_real_distribution<double> ph(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        ClockEnsemble e;
        e.clocks.push_back(make_clock(3.0, ph(rng), +1, "a"));
        e.clocks.push_back(make_clock(4.0, ph(rng), +1, "b"));
        e.clocks.push_back(make_clock(5.0, ph(rng), +1, "c"));
        double t_star = u(rng);
        std::vector<double> hits = decode_time(e, fingerprint_at(e, t_star), 0.0, 60.0, 1e-6);
        REQUIRE(hits.size() == 1);
        CHECK(std::fabs(hits[0] - t_star) < 1e-6);
    }
}

TEST_CASE("decode input validation") {
    ClockEnsemble e = triple345(false);
    Fingerprint f = fingerprint_at(e, 7.0);
    CHECK_THROWS_AS(decode_time(e, f, 10.0, 0.0, 1e-6), UsageError);
    CHECK_THROWS_AS(decode_time(e, f, 0.0, 60.0, 0.0), UsageError);
    CHECK_THROWS_AS(decode_time(e, f, 0.0, 60.0, 0.5), UsageError);
    Fingerprint narrow;
    narrow.phases = {0.1};
    narrow.labels = {"a"};
    CHECK_THROWS_AS(decode_time(e, narrow, 0.0, 60.0, 1e-6), UsageError);
    Fingerprint bad = f;
    bad.phases[0] = 1.5;
    CHECK_THROWS_AS(decode_time(e, bad, 0.0, 60.0, 1e-6), UsageError);
}

TEST_CASE("flipping one clock moves the decoded instant to the conjugate solution") {
    ClockEnsemble e = triple345(true);
    Fingerprint f = fingerprint_at(e, 7.0);

    ClockEnsemble flipped0 = e;
    flipped0.clocks[0] = invert_helicity(flipped0.clocks[0]);
    std::vector<double> hits = decode_time(flipped0, f, 0.0, 60.0, 1e-9);
    // t = -7 mod 3, 7 mod 4, 7 mod 5 -> 47
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == 47.0);

    ClockEnsemble all = e;
    for (auto& c : all.clocks)
        c = invert_helicity(c);
    std::vector<double> mirror = decode_time(all, f, 0.0, 60.0, 1e-9);
    REQUIRE(mirror.size() == 1);
    CHECK(mirror[0] == 53.0); // 60 - 7
}

TEST_CASE("global flip plus fingerprint conjugation leaves decoding invariant") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> period(0.5, 5.0);
    std::uniform_real_distribution<double> ph(0.0, 1.0);
    std::uniform_real_distribution<double> when(0.0, 20.0);
    for (int trial = 0; trial < 10; ++trial) {
        ClockEnsemble e;
        std::size_t n = 2 + (rng() % 2);
        for (std::size_t i = 0; i < n; ++i)
            e.clocks.push_back(make_clock(period(rng), ph(rng), +1, "c" + std::to_string(i)));
        double t_star = when(rng);
        Fingerprint f = fingerprint_at(e, t_star);

        ClockEnsemble flipped = e;
        Fingerprint conj = f;
        for (std::size_t i = 0; i < n; ++i) {
            flipped.clocks[i] = invert_helicity(flipped.clocks[i]);
            conj.phases[i] = wrap_unit(2.0 * e.clocks[i].initial_phase - f.phases[i]);
        }
        std::vector<double> base = decode_time(e, f, 0.0, 30.0, 1e-4);
        std::vector<double> alt = decode_time(flipped, conj, 0.0, 30.0, 1e-4);
        REQUIRE(base.size() == alt.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(std::fabs(base[i] - alt[i]) < 1e-3);
    }
}

TEST_CASE("periodic ensembles recur exactly at the least common period") {
    CHECK(recurrence_time(triple345(false), 1e-6) == 60.0);
    CHECK(recurrence_time(triple345(true), 1e-6) == 60.0);
}

TEST_CASE("the sqrt(2) ensemble nearly recurs where the convergents say") {
    double t1 = recurrence_time(one_sqrt2(), 0.01);
    CHECK(std::fabs(t1 - 41.0) <= 5e-3); // 41/29 convergent
    double t2 = recurrence_time(one_sqrt2(), 0.001);
    CHECK(std::fabs(t2 - 239.0) <= 1e-2); // 239/169 convergent
}

TEST_CASE("recurrence epsilon and horizon are validated") {
    CHECK_THROWS_AS(recurrence_time(one_sqrt2(), 0.0), UsageError);
    CHECK_THROWS_AS(recurrence_time(one_sqrt2(), 0.6), UsageError);
    CHECK_THROWS_AS(recurrence_time(one_sqrt2(), 0.01, -5.0), UsageError);
}

TEST_CASE("a hopeless horizon reports the best near miss") {
    try {
        recurrence_time(one_sqrt2(), 1e-9, 100.0);
        FAIL("expected HorizonError");
    } catch (const HorizonError& e) {
        CHECK(e.best_candidate_s() > 1.0);
        CHECK(e.best_candidate_s() < 141.5);
        CHECK(e.best_distance() < 0.01);
        CHECK(e.best_distance() > 1e-9);
    }
}

TEST_CASE("distinguishability gap equals the recurrence when it fits the window") {
    CHECK(distinguishability_gap(triple345(false), 1e-6, 100.0) == 60.0);
    // window shorter than the recurrence: every pair of instants in it is distinct
    CHECK(distinguishability_gap(triple345(false), 1e-6, 59.0) == 59.0);
}

TEST_CASE("duplicate clocks collapse the gap to the shared period") {
    ClockEnsemble e;
    e.clocks.push_back(make_clock(1.0, 0.0, +1, "p"));
    e.clocks.push_back(make_clock(1.0, 0.0, +1, "q"));
    CHECK(distinguishability_gap(e, 1e-3, 10.0) == 1.0);

    ClockEnsemble solo;
    solo.clocks.push_back(make_clock(1.0, 0.25, +1, "only"));
    CHECK(distinguishability_gap(solo, 1e-3, 10.0) == 1.0);
}

TEST_CASE("ergodic ensembles fill the torus at the product-measure rate") {
    ClockEnsemble e = one_sqrt2();
    const double eps = 0.05;
    const double step = eps * 1.0 / 4.0;
    const double horizon = 4000.0;
    std::int64_t inside = 0, total = 0;
    for (double t = step; t < horizon; t += step) {
        ++total;
        double d0 = torus_distance(phase_at(e.clocks[0], t), 0.0);
        double d1 = torus_distance(phase_at(e.clocks[1], t), 0.0);
        if (d0 <= eps && d1 <= eps)
            ++inside;
    }
    double fraction = static_cast<double>(inside) / static_cast<double>(total);
    double expected = (2.0 * eps) * (2.0 * eps);
    CHECK(fraction > expected / 2.0);
    CHECK(fraction < expected * 2.0);
}
