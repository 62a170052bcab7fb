#include "cyclochron/relational_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cyclochron/errors.hpp"

namespace cyclochron {
namespace {

constexpr double INF = std::numeric_limits<double>::infinity();
constexpr std::int64_t RATIO_MAX_DEN = 1000000;

void check_ensemble(const ClockEnsemble& e) {
    if (e.clocks.empty())
        throw UsageError("ensemble must contain at least one clock");
}

double min_period(const std::vector<CycleClock>& cs) {
    double m = INF;
    for (const auto& c : cs)
        m = std::min(m, c.period_s);
    return m;
}

double max_period(const std::vector<CycleClock>& cs) {
    double m = 0.0;
    for (const auto& c : cs)
        m = std::max(m, c.period_s);
    return m;
}

// ---- grid scan with provably safe skip-ahead -------------------------------
//
// Both the recurrence search and the fallback decoder walk the grid
// t = k * step. Phase distance of clock i moves at most |dt| / T_i cycles
// over dt seconds, so while clock i sits d_i > eps away from its target no
// match can occur for (d_i - eps) * T_i seconds, and while all clocks sit
// inside no departure can occur for min_i (eps - d_i) * T_i. Jumping two
// steps short of those bounds keeps the visited hits identical to a dense
// scan while skipping almost all of it.

std::int64_t safe_jump(double seconds, double step) {
    double raw = std::floor(seconds / step) - 2.0;
    if (!(raw >= 1.0))
        return 1;
    return raw > 9.0e18 ? std::int64_t(9.0e18) : static_cast<std::int64_t>(raw);
}

struct ScanOutcome {
    std::optional<double> hit;
    bool departed = false;
    double best_t = 0.0;
    double best_dist = INF;
};

ScanOutcome recurrence_scan(const std::vector<CycleClock>& cs, const std::vector<double>& target,
                            double eps, double step, double t_end) {
    ScanOutcome out;
    const std::size_t n = cs.size();
    std::vector<double> d(n);
    std::int64_t k = 1;
    bool inside_initial = true;
    // Near-miss candidates only count once the distance trajectory has passed
    // its first peak; the ascending shoulder of the initial departure would
    // otherwise always win the minimum while meaning nothing.
    bool armed = false;
    double prev_worst = -1.0;
    while (true) {
        double t = k * step;
        if (!(t < t_end))
            break;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = torus_distance(phase_at(cs[i], t), target[i]);
            worst = std::max(worst, d[i]);
        }
        if (inside_initial) {
            if (worst > eps) {
                inside_initial = false;
                out.departed = true;
                k += 1;
                continue;
            }
            double bound = INF;
            for (std::size_t i = 0; i < n; ++i)
                bound = std::min(bound, (eps - d[i]) * cs[i].period_s);
            k += safe_jump(bound, step);
        } else {
            if (worst < prev_worst)
                armed = true;
            prev_worst = worst;
            if (worst <= eps) {
                out.hit = t;
                out.best_t = t;
                out.best_dist = worst;
                break;
            }
            if (armed && worst < out.best_dist) {
                out.best_dist = worst;
                out.best_t = t;
            }
            double bound = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                bound = std::max(bound, (d[i] - eps) * cs[i].period_s);
            k += safe_jump(bound, step);
        }
    }
    return out;
}

// Least common period when one is resolvable at tight tolerance; used to
// snap scan hits that land next to the exact value.
std::optional<double> resolvable_period(const ClockEnsemble& e) {
    try {
        EnsembleClassification cls = classify(e, default_rationalization_tolerance);
        if (cls.kind == EnsembleKind::Periodic)
            return cls.system_period_s;
    } catch (const DomainError&) {
    }
    return std::nullopt;
}

// ---- exact decoding --------------------------------------------------------

std::int64_t lcm_i64(std::int64_t a, std::int64_t b) {
    __int128 g = std::gcd(a, b);
    __int128 l = __int128(a) / g * b;
    if (l > std::numeric_limits<std::int64_t>::max())
        throw RationalOverflow("common denominator overflow");
    return static_cast<std::int64_t>(l);
}

std::optional<std::vector<double>> decode_exact(const std::vector<CycleClock>& cs,
                                                const Fingerprint& f, double lo, double hi) {
    if (!f.exact_phases || f.exact_phases->size() != cs.size())
        return std::nullopt;
    try {
        std::vector<Rational> residues, periods;
        residues.reserve(cs.size());
        periods.reserve(cs.size());
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (!cs[i].exact_period_s)
                return std::nullopt;
            auto phi0 = Rational::from_double(cs[i].initial_phase);
            if (!phi0)
                return std::nullopt;
            // phase0 + h t / T = f (mod 1)  =>  t = h (f - phase0) T (mod T)
            Rational y = ((*f.exact_phases)[i] - *phi0) * Rational{cs[i].helicity, 1};
            residues.push_back(y.frac() * *cs[i].exact_period_s);
            periods.push_back(*cs[i].exact_period_s);
        }

        std::int64_t den = 1;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            den = lcm_i64(den, residues[i].den);
            den = lcm_i64(den, periods[i].den);
        }

        auto on_grid = [den](const Rational& r) {
            return __int128(r.num) * (den / r.den);
        };
        Congruence acc{on_grid(residues[0]), on_grid(periods[0])};
        for (std::size_t i = 1; i < cs.size(); ++i) {
            auto merged = crt_merge(acc, Congruence{on_grid(residues[i]), on_grid(periods[i])});
            if (!merged)
                return std::nullopt; // exactly incompatible; leave it to the scan
            acc = *merged;
        }

        // t = (residue + k modulus) / den over [lo, hi)
        double dv = static_cast<double>(den);
        double rv = static_cast<double>(acc.residue);
        double mv = static_cast<double>(acc.modulus);
        double k_lo = std::floor((lo * dv - rv) / mv) - 1.0;
        double k_hi = std::ceil((hi * dv - rv) / mv) + 1.0;
        if (!(k_hi - k_lo < 1e7))
            throw UsageError("decode window spans too many repetitions");
        std::vector<double> out;
        for (__int128 k = static_cast<__int128>(k_lo); k <= static_cast<__int128>(k_hi); ++k) {
            double t = static_cast<double>(acc.residue + k * acc.modulus) / dv;
            if (t >= lo && t < hi)
                out.push_back(t);
        }
        return out;
    } catch (const RationalOverflow&) {
        return std::nullopt;
    }
}

// ---- scan decoding ---------------------------------------------------------

// Refine one cluster of matching grid points: reconstruct each clock's
// nearest exact-match instant around the best grid point and average them.
double refine_match(const std::vector<CycleClock>& cs, const Fingerprint& f, double t_grid,
                    double tol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        double delta = wrap_signed(f.phases[i] - phase_at(cs[i], t_grid));
        sum += t_grid + cs[i].helicity * delta * cs[i].period_s;
    }
    double t_hat = sum / static_cast<double>(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (torus_distance(phase_at(cs[i], t_hat), f.phases[i]) > tol)
            return t_grid;
    return t_hat;
}

std::vector<double> decode_scan(const std::vector<CycleClock>& cs, const Fingerprint& f, double lo,
                                double hi, double tol) {
    double step = tol * min_period(cs) / 4.0;
    if (!((hi - lo) / step < 1e12))
        throw UsageError("decode window is too wide for the requested tolerance");

    std::vector<double> d(cs.size());
    std::vector<double> out;
    bool in_cluster = false;
    double cluster_best_t = 0.0, cluster_best_d = INF;
    std::int64_t k = static_cast<std::int64_t>(std::ceil(lo / step));

    auto flush_cluster = [&] {
        if (!in_cluster)
            return;
        double t_hat = refine_match(cs, f, cluster_best_t, tol);
        if (t_hat >= lo && t_hat < hi)
            out.push_back(t_hat);
        in_cluster = false;
        cluster_best_d = INF;
    };

    while (true) {
        double t = k * step;
        if (!(t < hi))
            break;
        if (t < lo) {
            ++k;
            continue;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            d[i] = torus_distance(phase_at(cs[i], t), f.phases[i]);
            worst = std::max(worst, d[i]);
        }
        if (worst <= tol) {
            if (!in_cluster)
                in_cluster = true;
            if (worst < cluster_best_d) {
                cluster_best_d = worst;
                cluster_best_t = t;
            }
            k += 1;
            continue;
        }
        flush_cluster();
        double bound = 0.0;
        for (std::size_t i = 0; i < cs.size(); ++i)
            bound = std::max(bound, (d[i] - tol) * cs[i].period_s);
        k += safe_jump(bound, step);
    }
    flush_cluster();
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Fingerprint fingerprint_at(const ClockEnsemble& e, double t, const ExternalAxis& axis) {
    check_ensemble(e);
    Fingerprint f;
    bool exact_ok = true;
    std::vector<Rational> exact;
    for (const auto& c : e.clocks) {
        f.phases.push_back(phase_at(c, t, axis));
        f.labels.push_back(c.label);
        if (exact_ok && c.exact_period_s) {
            auto tr = Rational::from_double(t - axis.origin_s);
            auto p0 = Rational::from_double(c.initial_phase);
            if (tr && p0) {
                try {
                    exact.push_back((*p0 + Rational{c.helicity, 1} * (*tr / *c.exact_period_s)).frac());
                    continue;
                } catch (const RationalOverflow&) {
                }
            }
        }
        exact_ok = false;
    }
    if (exact_ok)
        f.exact_phases = std::move(exact);
    return f;
}

EnsembleClassification classify(const ClockEnsemble& e, double tolerance) {
    check_ensemble(e);
    if (!(tolerance >= 0.0 && tolerance <= 1e-6))
        throw UsageError("rationalization tolerance must lie in [0, 1e-6]");
    const auto& cs = e.clocks;

    EnsembleClassification out;
    for (std::size_t i = 0; i < cs.size() && !out.duplicate_periods; ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
            if (cs[i].period_s == cs[j].period_s) {
                out.duplicate_periods = true;
                break;
            }

    bool all_exact = std::all_of(cs.begin(), cs.end(),
                                 [](const CycleClock& c) { return c.exact_period_s.has_value(); });
    if (all_exact) {
        try {
            Rational lcm = *cs[0].exact_period_s;
            for (std::size_t i = 1; i < cs.size(); ++i)
                lcm = rational_lcm(lcm, *cs[i].exact_period_s);
            out.kind = EnsembleKind::Periodic;
            out.system_period_exact = lcm;
            out.system_period_s = lcm.value();
            return out;
        } catch (const RationalOverflow&) {
            throw DomainError("system period exceeds the representable exact range");
        }
    }
    if (tolerance == 0.0)
        throw UsageError("tolerance 0 requires exact rational periods on every clock");

    if (cs.size() == 1) {
        out.kind = EnsembleKind::Periodic;
        out.system_period_s = cs[0].period_s;
        return out;
    }

    // All pairwise ratios are rational iff every ratio against clock 0 is.
    Rational acc{1, 1};
    for (std::size_t i = 1; i < cs.size(); ++i) {
        double ratio = cs[i].period_s / cs[0].period_s;
        auto r = best_rational_within(ratio, RATIO_MAX_DEN, tolerance);
        if (!r || r->num == 0) {
            out.kind = EnsembleKind::Ergodic;
            return out;
        }
        try {
            acc = rational_lcm(acc, *r);
        } catch (const RationalOverflow&) {
            throw DomainError("system period exceeds the representable exact range");
        }
    }
    out.kind = EnsembleKind::Periodic;
    out.system_period_s = acc.value() * cs[0].period_s;
    return out;
}

std::vector<double> decode_time(const ClockEnsemble& e, const Fingerprint& f, double window_lo,
                                double window_hi, double phase_tolerance) {
    check_ensemble(e);
    const auto& cs = e.clocks;
    if (f.phases.size() != cs.size())
        throw UsageError("fingerprint size does not match ensemble");
    if (!(phase_tolerance > 0.0 && phase_tolerance < 0.5))
        throw UsageError("phase tolerance must lie in (0, 0.5)");
    if (!(window_lo < window_hi) || !std::isfinite(window_lo) || !std::isfinite(window_hi))
        throw UsageError("decode window must satisfy lo < hi and be finite");
    for (double p : f.phases)
        if (!(p >= 0.0 && p < 1.0))
            throw UsageError("fingerprint phases must lie in [0, 1)");

    std::vector<double> instants;
    if (auto exact = decode_exact(cs, f, window_lo, window_hi))
        instants = std::move(*exact);
    else
        instants = decode_scan(cs, f, window_lo, window_hi, phase_tolerance);

    // Instants closer than the tolerance resolves are one solution seen twice.
    double merge_gap = phase_tolerance * min_period(cs);
    std::vector<double> merged;
    for (double t : instants) {
        if (!merged.empty() && t - merged.back() < merge_gap)
            continue;
        merged.push_back(t);
    }
    return merged;
}

double recurrence_time(const ClockEnsemble& e, double epsilon, double horizon_periods) {
    check_ensemble(e);
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw UsageError("epsilon must lie in (0, 0.5)");
    if (!(horizon_periods > 0.0))
        throw UsageError("horizon must be positive");
    const auto& cs = e.clocks;
    double step = epsilon * min_period(cs) / 4.0;
    double horizon = horizon_periods * max_period(cs);

    std::vector<double> target;
    target.reserve(cs.size());
    for (const auto& c : cs)
        target.push_back(c.initial_phase);

    ScanOutcome out = recurrence_scan(cs, target, epsilon, step, horizon);
    if (!out.hit) {
        throw HorizonError("no recurrence within " + format_double(horizon) + " s", out.best_t,
                           out.best_dist);
    }
    double t = *out.hit;
    if (auto period = resolvable_period(e)) {
        if (*period < horizon && std::fabs(t - *period) <= epsilon * max_period(cs) + 2.0 * step)
            return *period;
    }
    return t;
}

double distinguishability_gap(const ClockEnsemble& e, double epsilon, double window) {
    check_ensemble(e);
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw UsageError("epsilon must lie in (0, 0.5)");
    if (!(window > 0.0) || !std::isfinite(window))
        throw UsageError("window must be positive and finite");
    const auto& cs = e.clocks;
    double step = epsilon * min_period(cs) / 4.0;

    std::vector<double> target;
    target.reserve(cs.size());
    for (const auto& c : cs)
        target.push_back(c.initial_phase);

    ScanOutcome out = recurrence_scan(cs, target, epsilon, step, window);
    if (!out.hit)
        return window;
    double t = *out.hit;
    if (auto period = resolvable_period(e)) {
        if (*period < window && std::fabs(t - *period) <= epsilon * max_period(cs) + 2.0 * step)
            t = *period;
    }
    return std::min(t, window);
}

} // namespace cyclochron
