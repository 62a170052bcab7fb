#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cyclochron/cycles.hpp"
#include "cyclochron/rational.hpp"

namespace cyclochron {

// Simultaneous phase readout of every clock in an ensemble: the only
// timestamp a purely relational observer ever has. Exact phases ride along
// when the ensemble supports integer arithmetic end to end.
struct Fingerprint {
    std::vector<double> phases; // cycles in [0, 1), one per clock, ensemble order
    std::vector<std::string> labels;
    std::optional<std::vector<Rational>> exact_phases;
};

enum class EnsembleKind { Periodic, Ergodic };

// Default tolerance for telling a rational period ratio from an irrational
// one. Tight enough that double(sqrt(2)) still classifies as irrational.
inline constexpr double default_rationalization_tolerance = 1e-12;

struct EnsembleClassification {
    EnsembleKind kind = EnsembleKind::Periodic;
    // Least common period, present iff Periodic.
    std::optional<double> system_period_s;
    std::optional<Rational> system_period_exact;
    bool duplicate_periods = false;
};

Fingerprint fingerprint_at(const ClockEnsemble& e, double t, const ExternalAxis& axis = {});

// Periodic iff all pairwise period ratios are rational (continued-fraction
// convergents, denominators up to 1e6, matched within `tolerance` absolute).
// tolerance == 0 demands exact rational periods on every clock.
EnsembleClassification classify(const ClockEnsemble& e, double tolerance);

// All instants in [window_lo, window_hi) whose complete fingerprint matches
// `f` within phase_tolerance (cycles, per clock, torus metric). Ensembles
// with exact periods and exact target phases resolve by CRT over a common
// denominator grid; everything else falls back to a tolerance scan whose
// skip-ahead is grid-exact (same hits as a dense scan).
std::vector<double> decode_time(const ClockEnsemble& e, const Fingerprint& f, double window_lo,
                                double window_hi, double phase_tolerance);

// First t > 0 at which every clock has returned to within `epsilon` cycles
// of its initial phase after having genuinely departed. Periodic ensembles
// snap to the exact least common period when the scan lands next to it.
// Gives up past horizon_periods * max_period with a HorizonError carrying
// the best near-recurrence seen.
double recurrence_time(const ClockEnsemble& e, double epsilon, double horizon_periods = 1e7);

// How long fingerprints within `window` seconds stay epsilon-distinguishable:
// the first recurrence if one occurs inside the window, otherwise `window`.
double distinguishability_gap(const ClockEnsemble& e, double epsilon, double window);

} // namespace cyclochron
