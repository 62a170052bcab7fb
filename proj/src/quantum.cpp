#include "cyclochron/quantum.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cyclochron/errors.hpp"
#include "cyclochron/kinematics.hpp"

namespace cyclochron {
namespace {

constexpr int MAX_TERMS = 1000000;

void check_config(const CompactPropagatorConfig& cfg) {
    if (!(cfg.circumference > 0.0) || !std::isfinite(cfg.circumference))
        throw DomainError("circumference must be positive and finite");
    if (!(cfg.mass > 0.0) || !std::isfinite(cfg.mass))
        throw DomainError("mass must be positive and finite");
    if (!(cfg.imaginary_time > 0.0) || !std::isfinite(cfg.imaginary_time))
        throw DomainError("imaginary time must be positive and finite");
    if (!(cfg.truncation_tolerance >= 100.0 * std::numeric_limits<double>::epsilon()))
        throw DomainError("truncation tolerance must be at least 100 * machine epsilon");
}

// separation reduced to the fundamental domain [-L/2, L/2]
double reduced_separation(double x, double x0, double L) {
    double d = x - x0;
    return d - L * std::nearbyint(d / L);
}

} // namespace

std::vector<SpectrumLine> harmonic_spectrum(const ParticleSpec& p, const Boost& b,
                                            const Constants& k, int n_max) {
    if (n_max < 1)
        throw UsageError("spectrum needs n_max >= 1");
    FourMomentum m = four_momentum(p, b, k);
    FourPeriodicity per = periodicity_of(m, k);
    double base_ev = k.h / (per.temporal_period_s * k.electronvolt);
    std::vector<SpectrumLine> lines;
    lines.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        lines.push_back({n, static_cast<double>(n) * base_ev});
    return lines;
}

KernelEval winding_sum_eval(const CompactPropagatorConfig& cfg, double x, double x0) {
    check_config(cfg);
    const double L = cfg.circumference;
    const double d = reduced_separation(x, x0, L);
    const double pref = std::sqrt(cfg.mass / (2.0 * std::numbers::pi * cfg.imaginary_time));
    const double a = cfg.mass / (2.0 * cfg.imaginary_time);

    auto line_kernel = [&](double y) { return pref * std::exp(-a * y * y); };

    std::vector<double> terms;
    terms.push_back(line_kernel(d));
    double running = terms.back();
    int evals = 1;
    for (int w = 1; w <= MAX_TERMS; ++w) {
        double pair = line_kernel(d + w * L) + line_kernel(d - w * L);
        terms.push_back(pair);
        running += pair;
        evals += 2;
        if (pair < cfg.truncation_tolerance * running)
            break;
    }
    return {pairwise_sum(terms), evals};
}

KernelEval mode_sum_eval(const CompactPropagatorConfig& cfg, double x, double x0) {
    check_config(cfg);
    const double L = cfg.circumference;
    const double d = x - x0;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<double> terms;
    terms.push_back(1.0 / L);
    double running = terms.back();
    int evals = 1;
    for (int k = 1; k <= MAX_TERMS; ++k) {
        double p = two_pi * k / L; // quantized momentum of mode k
        double envelope = (2.0 / L) * std::exp(-cfg.imaginary_time * p * p / (2.0 * cfg.mass));
        terms.push_back(envelope * std::cos(p * d));
        running += terms.back();
        evals += 1;
        if (envelope < cfg.truncation_tolerance * std::fabs(running))
            break;
    }
    return {pairwise_sum(terms), evals};
}

double winding_sum_propagator(const CompactPropagatorConfig& cfg, double x, double x0) {
    return winding_sum_eval(cfg, x, x0).value;
}

double mode_sum_propagator(const CompactPropagatorConfig& cfg, double x, double x0) {
    return mode_sum_eval(cfg, x, x0).value;
}

double PhaseHistogram::total_mass() const {
    std::uint64_t n = 0;
    for (std::uint64_t c : counts)
        n += c;
    return static_cast<double>(n) / static_cast<double>(total);
}

PhaseHistogram phase_density_sample(const CycleClock& c, double sampler_step,
                                    std::uint64_t n_samples, std::uint64_t seed,
                                    std::size_t bins) {
    if (n_samples < 10000)
        throw UsageError("need at least 1e4 samples for a stable histogram");
    if (bins < 2)
        throw UsageError("need at least 2 bins");
    double ratio = sampler_step / c.period_s;
    if (!(ratio >= 1e3))
        throw DomainError("aliasing risk: sampler step must cover at least 1e3 clock periods");
    for (int q = 1; q <= 16; ++q) {
        double y = static_cast<double>(q) * ratio;
        if (std::fabs(y - std::nearbyint(y)) <= 1e-9 * y)
            throw DomainError("aliasing risk: step/period sits within 1e-9 of the rational " +
                              std::to_string(static_cast<long long>(std::nearbyint(y))) + "/" +
                              std::to_string(q));
    }

    PhaseHistogram h;
    h.counts.assign(bins, 0);
    h.total = n_samples;
    for (std::uint64_t j = 1; j <= n_samples; ++j) {
        std::uint64_t state = seed + j;
        double u = unit_interval(splitmix64(state));
        double t = static_cast<double>(j) * sampler_step * (1.0 + (u - 0.5) * 2e-3);
        double phi = phase_at(c, t);
        auto bin = static_cast<std::size_t>(phi * static_cast<double>(bins));
        if (bin >= bins)
            bin = bins - 1;
        ++h.counts[bin];
    }
    return h;
}

} // namespace cyclochron
