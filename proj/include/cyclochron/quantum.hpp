#pragma once

#include <cstdint>
#include <vector>

#include "cyclochron/cycles.hpp"

namespace cyclochron {

// Energy eigenvalue ladder of a compact clock: E_n = n * h / T_t.
struct SpectrumLine {
    int n = 0;
    double energy_ev = 0.0;
};

std::vector<SpectrumLine> harmonic_spectrum(const ParticleSpec& p, const Boost& b,
                                            const Constants& k, int n_max);

// Euclidean free propagator on a circle of circumference L (natural units).
// The same kernel has two convergent representations: a sum over winding
// numbers of the line kernel, and a sum over quantized momentum modes.
// Truncation: terms are added until the next one drops below
// truncation_tolerance times the running sum.
struct CompactPropagatorConfig {
    double circumference = 1.0;  // L
    double mass = 1.0;           // m
    double imaginary_time = 0.1; // beta
    double truncation_tolerance = 1e-13;
};

struct KernelEval {
    double value = 0.0;
    int terms = 0; // exponential terms actually evaluated
};

KernelEval winding_sum_eval(const CompactPropagatorConfig& cfg, double x, double x0);
KernelEval mode_sum_eval(const CompactPropagatorConfig& cfg, double x, double x0);

double winding_sum_propagator(const CompactPropagatorConfig& cfg, double x, double x0);
double mode_sum_propagator(const CompactPropagatorConfig& cfg, double x, double x0);

// Histogram of clock phases under incommensurate stroboscopic sampling.
// Counts are integers, so the total probability mass is exactly 1.
struct PhaseHistogram {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double mass(std::size_t bin) const {
        return static_cast<double>(counts.at(bin)) / static_cast<double>(total);
    }
    double total_mass() const;
};

// Samples the clock at t_j = j * step * (1 + jitter_j), jitter deterministic
// from `seed` and bounded by 1e-3. The step must cover at least 1e3 clock
// periods and must not sit near a small rational multiple of the period
// (both would alias instead of equidistributing).
PhaseHistogram phase_density_sample(const CycleClock& c, double sampler_step,
                                    std::uint64_t n_samples, std::uint64_t seed,
                                    std::size_t bins = 50);

} // namespace cyclochron
