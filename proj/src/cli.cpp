#include "cyclochron/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyclochron/constants.hpp"
#include "cyclochron/cycles.hpp"
#include "cyclochron/errors.hpp"
#include "cyclochron/kinematics.hpp"
#include "cyclochron/modulation.hpp"
#include "cyclochron/numeric.hpp"
#include "cyclochron/particles.hpp"
#include "cyclochron/quantum.hpp"
#include "cyclochron/relational_time.hpp"

namespace cyclochron::cli {
namespace {

using nlohmann::json;

// Non-finite values are not valid JSON numbers; serialize them as strings.
json jnum(double v) {
    if (std::isfinite(v))
        return v;
    return format_double(v);
}

json jvec(const Vec3& v) { return json::array({jnum(v[0]), jnum(v[1]), jnum(v[2])}); }

json envelope(const std::string& command, const Constants& k, json payload) {
    return json{{"command", command},
                {"schema_version", 1},
                {"constants_used",
                 {{"h_J_s", k.h}, {"c_m_s", k.c}, {"electronvolt_J", k.electronvolt}}},
                {"payload", std::move(payload)}};
}

int emit_error(std::ostream& err, const std::string& type, const std::string& message, int code,
               json extra = json::object()) {
    json e{{"type", type}, {"message", message}};
    for (auto& [key, val] : extra.items())
        e[key] = val;
    err << json{{"error", e}}.dump() << '\n';
    return code;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size())
                throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw UsageError("malformed " + what + " entry '" + token + "'");
        }
    }
    if (out.empty())
        throw UsageError(what + " must contain at least one value");
    return out;
}

Vec3 parse_vec3(const std::string& text, const std::string& what) {
    std::vector<double> v = parse_doubles(text, what);
    if (v.size() != 3)
        throw UsageError(what + " must have exactly 3 components");
    return {v[0], v[1], v[2]};
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ','))
        out.push_back(token);
    return out;
}

Rational parse_exact(const std::string& token, const std::string& what) {
    auto r = Rational::parse(token);
    if (!r)
        throw UsageError("malformed exact " + what + " '" + token + "'");
    return *r;
}

// Options shared by every subcommand.
struct Context {
    Constants constants;
    std::vector<ParticleSpec> particles;
    std::string format = "json";
    std::uint64_t seed = 12345;
};

Context make_context(const std::string& constants_path, const std::string& particles_path,
                     const std::string& format, std::uint64_t seed) {
    Context ctx;
    if (!constants_path.empty()) {
        std::ifstream in(constants_path);
        if (!in)
            throw UsageError("cannot open constants file '" + constants_path + "'");
        ctx.constants = constants_from_config(in);
    }
    if (!particles_path.empty()) {
        std::ifstream in(particles_path);
        if (!in)
            throw UsageError("cannot open particle table '" + particles_path + "'");
        ctx.particles = load_particle_table(in);
    } else {
        ctx.particles = builtin_particles();
    }
    if (format != "json" && format != "csv")
        throw UsageError("--format must be json or csv");
    ctx.format = format;
    ctx.seed = seed;
    return ctx;
}

// Clocks described on the command line: periods plus optional phases,
// helicities, and exactness.
struct EnsembleOptions {
    std::string periods;
    std::string phase0s;
    std::string helicities;
    bool exact = false;
    std::vector<int> flipped; // indices whose helicity to invert
    bool flip_all = false;
};

ClockEnsemble build_ensemble(const EnsembleOptions& opt) {
    std::vector<std::string> period_tokens = split_tokens(opt.periods);
    if (period_tokens.empty())
        throw UsageError("--periods must contain at least one value");

    std::vector<double> phases(period_tokens.size(), 0.0);
    if (!opt.phase0s.empty()) {
        phases = parse_doubles(opt.phase0s, "--phase0s");
        if (phases.size() != period_tokens.size())
            throw UsageError("--phase0s must match --periods in length");
    }
    std::vector<double> helicities(period_tokens.size(), 1.0);
    if (!opt.helicities.empty()) {
        helicities = parse_doubles(opt.helicities, "--helicities");
        if (helicities.size() != period_tokens.size())
            throw UsageError("--helicities must match --periods in length");
    }

    ClockEnsemble e;
    for (std::size_t i = 0; i < period_tokens.size(); ++i) {
        int h = helicities[i] < 0 ? -1 : 1;
        std::string label = "clock-" + std::to_string(i);
        try {
            if (opt.exact || period_tokens[i].find('/') != std::string::npos) {
                e.clocks.push_back(
                    make_exact_clock(parse_exact(period_tokens[i], "period"), phases[i], h, label));
            } else {
                std::size_t used = 0;
                double p = std::stod(period_tokens[i], &used);
                if (used != period_tokens[i].size())
                    throw UsageError("malformed period '" + period_tokens[i] + "'");
                e.clocks.push_back(make_clock(p, phases[i], h, label));
            }
        } catch (const std::invalid_argument&) {
            throw UsageError("malformed period '" + period_tokens[i] + "'");
        } catch (const std::out_of_range&) {
            throw UsageError("malformed period '" + period_tokens[i] + "'");
        }
    }

    if (opt.flip_all) {
        for (auto& c : e.clocks)
            c = invert_helicity(c);
    }
    for (int idx : opt.flipped) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= e.clocks.size())
            throw UsageError("--flip index out of range");
        e.clocks[static_cast<std::size_t>(idx)] =
            invert_helicity(e.clocks[static_cast<std::size_t>(idx)]);
    }
    return e;
}

Fingerprint build_fingerprint(const ClockEnsemble& e, const std::string& phases_text, bool exact) {
    Fingerprint f;
    std::vector<std::string> tokens = split_tokens(phases_text);
    if (tokens.size() != e.clocks.size())
        throw UsageError("--phases must match --periods in length");
    std::vector<Rational> exact_phases;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        f.labels.push_back(e.clocks[i].label);
        if (exact) {
            Rational r = parse_exact(tokens[i], "phase");
            exact_phases.push_back(r.frac());
            f.phases.push_back(exact_phases.back().value());
        } else {
            try {
                std::size_t used = 0;
                double p = std::stod(tokens[i], &used);
                if (used != tokens[i].size())
                    throw std::invalid_argument(tokens[i]);
                f.phases.push_back(wrap_unit(p));
            } catch (const std::exception&) {
                throw UsageError("malformed phase '" + tokens[i] + "'");
            }
        }
    }
    if (exact)
        f.exact_phases = std::move(exact_phases);
    return f;
}

// ---- scenario files --------------------------------------------------------

struct Scenario {
    std::vector<PositionedClock> clocks;
    std::vector<InteractionEvent> events;
};

double json_number(const json& j, const std::string& what) {
    if (!j.is_number())
        throw UsageError("scenario field " + what + " must be a number");
    return j.get<double>();
}

Scenario parse_scenario(const json& j, const Context& ctx) {
    if (!j.is_object() || !j.contains("clocks") || !j["clocks"].is_array())
        throw UsageError("scenario must be an object with a 'clocks' array");
    Scenario sc;
    for (const auto& jc : j["clocks"]) {
        if (!jc.contains("label") || !jc["label"].is_string())
            throw UsageError("every scenario clock needs a string 'label'");
        std::string label = jc["label"].get<std::string>();
        double phase0 = jc.contains("phase0") ? json_number(jc["phase0"], "phase0") : 0.0;
        int helicity = 1;
        if (jc.contains("helicity")) {
            double h = json_number(jc["helicity"], "helicity");
            helicity = h < 0 ? -1 : 1;
        }
        Vec3 pos{0.0, 0.0, 0.0};
        if (jc.contains("position_m")) {
            const auto& jp = jc["position_m"];
            if (!jp.is_array() || jp.size() != 3)
                throw UsageError("position_m must be a 3-element array");
            for (int i = 0; i < 3; ++i)
                pos[static_cast<std::size_t>(i)] = json_number(jp[i], "position_m");
        }

        if (jc.contains("period_s")) {
            const auto& jp = jc["period_s"];
            CycleClock c;
            if (jp.is_string()) // strings carry exact rational periods
                c = make_exact_clock(parse_exact(jp.get<std::string>(), "period_s"), phase0,
                                     helicity, label);
            else
                c = make_clock(json_number(jp, "period_s"), phase0, helicity, label);
            sc.clocks.push_back(positioned_clock(c, pos, ctx.constants));
        } else if (jc.contains("particle")) {
            const ParticleSpec& p =
                find_particle(ctx.particles, jc["particle"].get<std::string>());
            Boost b;
            if (jc.contains("beta")) {
                const auto& jb = jc["beta"];
                if (!jb.is_array() || jb.size() != 3)
                    throw UsageError("beta must be a 3-element array");
                b = make_boost(json_number(jb[0], "beta"), json_number(jb[1], "beta"),
                               json_number(jb[2], "beta"));
            }
            sc.clocks.push_back(
                positioned_clock_from_particle(p, b, ctx.constants, pos, phase0, helicity));
        } else {
            throw UsageError("scenario clock '" + label + "' needs period_s or particle");
        }
    }
    if (j.contains("events")) {
        if (!j["events"].is_array())
            throw UsageError("scenario 'events' must be an array");
        for (const auto& je : j["events"]) {
            InteractionEvent ev;
            if (!je.contains("t0_s"))
                throw UsageError("every scenario event needs t0_s");
            ev.time_s = json_number(je["t0_s"], "t0_s");
            if (je.contains("position_m")) {
                const auto& jp = je["position_m"];
                if (!jp.is_array() || jp.size() != 3)
                    throw UsageError("position_m must be a 3-element array");
                for (int i = 0; i < 3; ++i)
                    ev.position_m[static_cast<std::size_t>(i)] = json_number(jp[i], "position_m");
            }
            if (je.contains("exchange")) {
                if (!je["exchange"].is_object())
                    throw UsageError("event 'exchange' must be an object");
                for (auto& [label, jde] : je["exchange"].items())
                    ev.energy_exchange_ev[label] = json_number(jde, "exchange");
            }
            sc.events.push_back(std::move(ev));
        }
    }
    return sc;
}

json scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open scenario file '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw UsageError("scenario file '" + path + "' is not valid JSON");
    return j;
}

// ---- subcommand handlers ---------------------------------------------------

struct ClockArgs {
    std::string particle;
    std::string beta;
    std::string extra_boost;
    double photon_energy_ev = 0.0;
    std::string photon_direction = "1,0,0";
    bool harmony_set = false;
    double harmony_t = 0.0;
};

void cmd_clock(const Context& ctx, const ClockArgs& a, std::ostream& out) {
    const ParticleSpec& p = find_particle(ctx.particles, a.particle);
    Boost b;
    if (!a.beta.empty())
        b = make_boost(parse_vec3(a.beta, "--beta"));

    FourMomentum m;
    if (p.massless()) {
        if (!(a.photon_energy_ev > 0.0))
            throw UsageError("massless particles need --energy <eV> (no rest frame)");
        m = photon_momentum(a.photon_energy_ev, parse_vec3(a.photon_direction, "--direction"));
        if (!a.beta.empty())
            m = boost_momentum(m, b);
    } else {
        m = four_momentum(p, b, ctx.constants);
    }
    if (!a.extra_boost.empty())
        m = boost_momentum(m, make_boost(parse_vec3(a.extra_boost, "--boost")));

    FourPeriodicity per = periodicity_of(m, ctx.constants);
    json payload{{"particle", p.name},
                 {"T_tau_s", jnum(compton_period(p, ctx.constants))},
                 {"T_t_s", jnum(per.temporal_period_s)},
                 {"lambda_m", json::array({jnum(per.wavelengths_m[0]), jnum(per.wavelengths_m[1]),
                                           jnum(per.wavelengths_m[2])})},
                 {"E_eV", jnum(m.energy_ev)},
                 {"p_eVc", jvec(m.momentum_ev_c)}};
    if (a.harmony_set) {
        payload["phase_harmony_residual"] =
            jnum(phase_harmony_residual(p, b, a.harmony_t, ctx.constants));
    }
    out << envelope("clock", ctx.constants, payload).dump() << '\n';
}

struct TicksArgs {
    std::string particle;
    std::string period;
    std::string beta;
    std::string interval;
    double phase0 = 0.0;
    int helicity = 1;
    bool phase_probe_set = false;
    double phase_probe_t = 0.0;
};

void cmd_ticks(const Context& ctx, const TicksArgs& a, std::ostream& out) {
    if (a.particle.empty() == a.period.empty())
        throw UsageError("pass exactly one of <particle> or --period");
    CycleClock c;
    if (!a.particle.empty()) {
        const ParticleSpec& p = find_particle(ctx.particles, a.particle);
        Boost b;
        if (!a.beta.empty())
            b = make_boost(parse_vec3(a.beta, "--beta"));
        c = clock_from_particle(p, b, ctx.constants, a.phase0, a.helicity);
    } else if (a.period.find('/') != std::string::npos) {
        c = make_exact_clock(parse_exact(a.period, "--period"), a.phase0, a.helicity, "clock");
    } else {
        try {
            c = make_clock(std::stod(a.period), a.phase0, a.helicity, "clock");
        } catch (const std::invalid_argument&) {
            throw UsageError("malformed --period '" + a.period + "'");
        } catch (const std::out_of_range&) {
            throw UsageError("malformed --period '" + a.period + "'");
        }
    }
    std::vector<double> iv = parse_doubles(a.interval, "--interval");
    if (iv.size() != 2)
        throw UsageError("--interval needs exactly t0,t1");
    TickCount n = tick_count(c, iv[0], iv[1]);
    json payload{{"ticks", to_string(n)}, {"period_s", jnum(c.period_s)}};
    if (c.exact_period_s)
        payload["period_exact"] = c.exact_period_s->str();
    if (a.phase_probe_set)
        payload["phase_at"] = jnum(phase_at(c, a.phase_probe_t));
    out << envelope("ticks", ctx.constants, payload).dump() << '\n';
}

struct DecodeArgs {
    EnsembleOptions ens;
    std::string phases;
    std::string window;
    double tol = 1e-3;
    bool fingerprint_of_set = false;
    double fingerprint_of = 0.0;
};

void cmd_decode(const Context& ctx, const DecodeArgs& a, std::ostream& out) {
    ClockEnsemble e = build_ensemble(a.ens);
    Fingerprint f;
    if (a.fingerprint_of_set) {
        if (!a.phases.empty())
            throw UsageError("pass either --phases or --fingerprint-of, not both");
        // The fingerprint records an observation of the ensemble as given;
        // --flip alters only the ensemble the decoder assumes, so flipping
        // shows how the same observation reads on a different system.
        EnsembleOptions base = a.ens;
        base.flipped.clear();
        base.flip_all = false;
        f = fingerprint_at(build_ensemble(base), a.fingerprint_of);
    } else {
        if (a.phases.empty())
            throw UsageError("decode needs --phases or --fingerprint-of");
        f = build_fingerprint(e, a.phases, a.ens.exact);
    }
    std::vector<double> w = parse_doubles(a.window, "--window");
    if (w.size() != 2)
        throw UsageError("--window needs exactly lo,hi");
    std::vector<double> instants = decode_time(e, f, w[0], w[1], a.tol);
    json payload{{"instants", json::array()},
                 {"count", instants.size()},
                 {"fingerprint", json::array()}};
    for (double t : instants)
        payload["instants"].push_back(jnum(t));
    for (double p : f.phases)
        payload["fingerprint"].push_back(jnum(p));
    out << envelope("decode", ctx.constants, payload).dump() << '\n';
}

struct RecurrenceArgs {
    EnsembleOptions ens;
    double epsilon = 0.0;
    double horizon_periods = 1e7;
    bool gap_set = false;
    double gap_window = 0.0;
};

void cmd_recurrence(const Context& ctx, const RecurrenceArgs& a, std::ostream& out) {
    ClockEnsemble e = build_ensemble(a.ens);
    json payload{{"epsilon", jnum(a.epsilon)}};
    if (a.gap_set) {
        double g = distinguishability_gap(e, a.epsilon, a.gap_window);
        payload["gap_s"] = jnum(g);
        payload["window_s"] = jnum(a.gap_window);
    } else {
        payload["recurrence_s"] = jnum(recurrence_time(e, a.epsilon, a.horizon_periods));
    }
    out << envelope("recurrence", ctx.constants, payload).dump() << '\n';
}

struct SimulateArgs {
    std::string scenario_path;
    double until = 0.0;
    double sample = 0.0;
};

void cmd_simulate(const Context& ctx, const SimulateArgs& a, std::ostream& out) {
    if (!(a.sample > 0.0) || !std::isfinite(a.sample))
        throw UsageError("--sample must be positive and finite");
    if (!(a.until >= 0.0) || !std::isfinite(a.until))
        throw UsageError("--until must be non-negative and finite");
    Scenario sc = parse_scenario(scenario_from_file(a.scenario_path), ctx);
    std::vector<ModulationTimeline> timelines = apply_events(sc.clocks, sc.events, ctx.constants);

    auto n_samples = static_cast<std::size_t>(std::floor(a.until / a.sample)) + 1;
    if (ctx.format == "csv") {
        out << "t";
        for (const auto& tl : timelines)
            out << ',' << tl.label;
        out << '\n';
        for (std::size_t i = 0; i < n_samples; ++i) {
            double t = static_cast<double>(i) * a.sample;
            out << format_double(t);
            for (const auto& tl : timelines)
                out << ',' << format_double(timeline_phase(tl, t));
            out << '\n';
        }
        return;
    }

    json payload{{"sample_step_s", jnum(a.sample)},
                 {"until_s", jnum(a.until)},
                 {"labels", json::array()},
                 {"t_s", json::array()},
                 {"phases", json::object()},
                 {"timelines", json::object()}};
    for (const auto& tl : timelines) {
        payload["labels"].push_back(tl.label);
        payload["phases"][tl.label] = json::array();
        json segs = json::array();
        for (const auto& seg : tl.segments)
            segs.push_back({{"start_s", jnum(seg.start_s)},
                            {"period_s", jnum(seg.period_s)},
                            {"phase_at_start", jnum(seg.phase_at_start)}});
        payload["timelines"][tl.label] = std::move(segs);
    }
    for (std::size_t i = 0; i < n_samples; ++i) {
        double t = static_cast<double>(i) * a.sample;
        payload["t_s"].push_back(jnum(t));
        for (const auto& tl : timelines)
            payload["phases"][tl.label].push_back(jnum(timeline_phase(tl, t)));
    }
    out << envelope("simulate", ctx.constants, payload).dump() << '\n';
}

struct DetectArgs {
    std::string history_path;
};

void cmd_detect(const Context& ctx, const DetectArgs& a, std::ostream& out) {
    std::ifstream in(a.history_path);
    if (!in)
        throw UsageError("cannot open history file '" + a.history_path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw UsageError("history file is empty");
    std::vector<std::string> header = split_tokens(line);
    if (header.size() < 2 || header[0] != "t")
        throw UsageError("history header must be t,<label>[,...]");

    std::vector<double> times;
    std::vector<std::vector<double>> series(header.size() - 1);
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<double> row;
        try {
            row = parse_doubles(line, "history row");
        } catch (const UsageError&) {
            throw ParseError("malformed history row", line_no);
        }
        if (row.size() != header.size())
            throw ParseError("history row width does not match header", line_no);
        times.push_back(row[0]);
        for (std::size_t i = 1; i < row.size(); ++i)
            series[i - 1].push_back(row[i]);
    }
    if (times.size() < 4)
        throw UsageError("history needs at least 4 samples");
    double step = times[1] - times[0];
    if (!(step > 0.0))
        throw UsageError("history times must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        double dt = times[i] - times[i - 1];
        if (std::fabs(dt - step) > 1e-9 * std::max(step, std::fabs(times[i])))
            throw UsageError("history must be uniformly sampled");
    }

    json payload{{"sample_step_s", jnum(step)}, {"changes", json::object()}};
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::vector<RegimeChange> changes = detect_regime_changes(series[i], times[0], step);
        json rows = json::array();
        for (const auto& ch : changes)
            rows.push_back({{"switch_s", jnum(ch.switch_s)},
                            {"period_before_s", jnum(ch.period_before_s)},
                            {"period_after_s", jnum(ch.period_after_s)}});
        payload["changes"][header[i + 1]] = std::move(rows);
    }
    out << envelope("detect", ctx.constants, payload).dump() << '\n';
}

struct ClassifyArgs {
    EnsembleOptions ens;
    double tolerance = default_rationalization_tolerance;
    std::string scenario_path;
};

void cmd_classify(const Context& ctx, const ClassifyArgs& a, std::ostream& out) {
    if (!a.scenario_path.empty()) {
        Scenario sc = parse_scenario(scenario_from_file(a.scenario_path), ctx);
        RegimeReport report = regime_classify(sc.clocks, sc.events);
        const char* name = report.regime == Regime::Cyclic    ? "Cyclic"
                           : report.regime == Regime::Ergodic ? "Ergodic"
                                                              : "Chaotic";
        json payload{{"regime", name}};
        if (report.system_period_s)
            payload["system_period_s"] = jnum(*report.system_period_s);
        auto orders = causal_order(sc.clocks, sc.events, ctx.constants);
        json jorders = json::array();
        for (std::size_t i = 0; i < orders.size(); ++i) {
            json rows = json::array();
            for (const auto& rec : orders[i])
                rows.push_back({{"event", rec.event_index},
                                {"arrival_s", jnum(rec.arrival_s)},
                                {"tie_with_previous", rec.tie_with_previous}});
            jorders.push_back(
                {{"observer", sc.clocks[i].clock.label}, {"arrivals", std::move(rows)}});
        }
        payload["causal_order"] = std::move(jorders);
        out << envelope("classify", ctx.constants, payload).dump() << '\n';
        return;
    }

    ClockEnsemble e = build_ensemble(a.ens);
    EnsembleClassification cls = classify(e, a.tolerance);
    json payload{{"kind", cls.kind == EnsembleKind::Periodic ? "Periodic" : "Ergodic"},
                 {"duplicate_periods", cls.duplicate_periods}};
    if (cls.system_period_s)
        payload["system_period_s"] = jnum(*cls.system_period_s);
    if (cls.system_period_exact)
        payload["system_period_exact"] = cls.system_period_exact->str();
    out << envelope("classify", ctx.constants, payload).dump() << '\n';
}

struct SpectrumArgs {
    std::string particle;
    std::string beta;
    int n_max = 5;
    bool density = false;
    double density_period_s = 0.0;
    double density_step_s = 0.0;
    std::uint64_t density_samples = 100000;
    std::size_t density_bins = 50;
};

void cmd_spectrum(const Context& ctx, const SpectrumArgs& a, std::ostream& out) {
    if (a.density) {
        if (!(a.density_period_s > 0.0) || !(a.density_step_s > 0.0))
            throw UsageError("--density needs --period and --step");
        CycleClock c = make_clock(a.density_period_s);
        PhaseHistogram h =
            phase_density_sample(c, a.density_step_s, a.density_samples, ctx.seed, a.density_bins);
        json payload{{"counts", h.counts},
                     {"total_samples", h.total},
                     {"bins", a.density_bins},
                     {"total_mass", jnum(h.total_mass())},
                     {"seed", ctx.seed}};
        out << envelope("spectrum", ctx.constants, payload).dump() << '\n';
        return;
    }
    const ParticleSpec& p = find_particle(ctx.particles, a.particle);
    Boost b;
    if (!a.beta.empty())
        b = make_boost(parse_vec3(a.beta, "--beta"));
    std::vector<SpectrumLine> lines = harmonic_spectrum(p, b, ctx.constants, a.n_max);
    json jlines = json::array();
    for (const auto& line : lines)
        jlines.push_back({{"n", line.n}, {"energy_ev", jnum(line.energy_ev)}});
    out << envelope("spectrum", ctx.constants, json{{"particle", p.name}, {"lines", jlines}}).dump()
        << '\n';
}

struct PropagatorArgs {
    double L = 1.0;
    double m = 1.0;
    std::string betas = "0.05,0.1,1";
    double tol = 1e-10;
    double trunc = 1e-13;
    int grid = 32;
};

void cmd_verify_propagator(const Context& ctx, const PropagatorArgs& a, std::ostream& out) {
    if (a.grid < 2 || a.grid > 1024)
        throw UsageError("--grid must be in [2, 1024]");
    std::vector<double> betas = parse_doubles(a.betas, "--beta");

    json jbetas = json::array();
    double overall = 0.0;
    for (double beta : betas) {
        CompactPropagatorConfig cfg{a.L, a.m, beta, a.trunc};
        double max_rel = 0.0;
        int terms_w = 0, terms_m = 0;
        for (int i = 0; i < a.grid; ++i) {
            for (int j = 0; j < a.grid; ++j) {
                double x = a.L * static_cast<double>(i) / a.grid;
                double x0 = a.L * static_cast<double>(j) / a.grid;
                KernelEval w = winding_sum_eval(cfg, x, x0);
                KernelEval mo = mode_sum_eval(cfg, x, x0);
                max_rel = std::max(max_rel, std::fabs(w.value - mo.value) / mo.value);
                terms_w = std::max(terms_w, w.terms);
                terms_m = std::max(terms_m, mo.terms);
            }
        }
        overall = std::max(overall, max_rel);
        jbetas.push_back({{"beta", jnum(beta)},
                          {"max_abs_rel_diff", jnum(max_rel)},
                          {"terms_used", {{"winding", terms_w}, {"mode", terms_m}}}});
    }
    json payload{{"grid", a.grid},
                 {"L", jnum(a.L)},
                 {"m", jnum(a.m)},
                 {"truncation_tolerance", jnum(a.trunc)},
                 {"betas", std::move(jbetas)},
                 {"max_abs_rel_diff", jnum(overall)},
                 {"tolerance", jnum(a.tol)},
                 {"pass", overall <= a.tol}};
    out << envelope("verify-propagator", ctx.constants, payload).dump() << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"internal-clock kinematics, relational time, and compact propagators"};
    app.name("cyclochron");
    app.require_subcommand(0, 1);

    std::string constants_path, particles_path, format = "json";
    std::uint64_t seed = 12345;
    app.add_option("--constants", constants_path, "constants config file (key = value)");
    app.add_option("--particles", particles_path, "particle table CSV");
    auto* format_opt =
        app.add_option("--format", format, "output format: json or csv (simulate defaults to csv)");
    app.add_option("--seed", seed, "seed for sampling subcommands");

    ClockArgs clock_args;
    auto* sc_clock = app.add_subcommand("clock", "four-periodicity of a particle state");
    sc_clock->add_option("particle", clock_args.particle, "particle name")->required();
    sc_clock->add_option("--beta", clock_args.beta, "frame velocity bx,by,bz");
    sc_clock->add_option("--boost", clock_args.extra_boost, "extra active boost bx,by,bz");
    sc_clock->add_option("--energy", clock_args.photon_energy_ev, "photon energy, eV");
    sc_clock->add_option("--direction", clock_args.photon_direction, "photon direction dx,dy,dz");
    auto* harmony = sc_clock->add_option("--harmony-t", clock_args.harmony_t,
                                         "report phase-harmony residual at this time, s");

    TicksArgs ticks_args;
    auto* sc_ticks = app.add_subcommand("ticks", "count clock ticks over an interval");
    sc_ticks->add_option("particle", ticks_args.particle, "particle name");
    sc_ticks->add_option("--period", ticks_args.period, "clock period, s (p/q form is exact)");
    sc_ticks->add_option("--beta", ticks_args.beta, "frame velocity bx,by,bz");
    sc_ticks->add_option("--interval", ticks_args.interval, "interval t0,t1 in s")->required();
    sc_ticks->add_option("--phase0", ticks_args.phase0, "initial phase in [0,1)");
    sc_ticks->add_option("--helicity", ticks_args.helicity, "+1 or -1");
    auto* phase_probe =
        sc_ticks->add_option("--phase-at", ticks_args.phase_probe_t, "also report phase at t, s");

    DecodeArgs decode_args;
    auto* sc_decode = app.add_subcommand("decode", "instants matching a phase fingerprint");
    sc_decode->add_option("--periods", decode_args.ens.periods, "clock periods, comma list")
        ->required();
    sc_decode->add_option("--phases", decode_args.phases, "target phases, comma list");
    sc_decode->add_option("--phase0s", decode_args.ens.phase0s, "initial phases, comma list");
    sc_decode->add_option("--helicities", decode_args.ens.helicities, "helicities, comma list");
    sc_decode->add_option("--window", decode_args.window, "window lo,hi in s")->required();
    sc_decode->add_option("--tol", decode_args.tol, "phase tolerance, cycles");
    sc_decode->add_flag("--exact", decode_args.ens.exact, "treat periods and phases as exact");
    sc_decode->add_option("--flip", decode_args.ens.flipped, "invert helicity of clock index");
    sc_decode->add_flag("--flip-all", decode_args.ens.flip_all, "invert every clock's helicity");
    auto* fp_of = sc_decode->add_option("--fingerprint-of", decode_args.fingerprint_of,
                                        "decode the fingerprint taken at this instant, s");

    RecurrenceArgs rec_args;
    auto* sc_rec = app.add_subcommand("recurrence", "first near-return of the joint phases");
    sc_rec->add_option("--periods", rec_args.ens.periods, "clock periods, comma list")->required();
    sc_rec->add_option("--phase0s", rec_args.ens.phase0s, "initial phases, comma list");
    sc_rec->add_option("--helicities", rec_args.ens.helicities, "helicities, comma list");
    sc_rec->add_option("--epsilon", rec_args.epsilon, "phase tolerance, cycles")->required();
    sc_rec->add_option("--horizon", rec_args.horizon_periods, "horizon in units of max period");
    sc_rec->add_flag("--exact", rec_args.ens.exact, "treat periods as exact rationals");
    auto* gap_opt = sc_rec->add_option("--gap-window", rec_args.gap_window,
                                       "report the distinguishability gap within this window, s");

    SimulateArgs sim_args;
    auto* sc_sim = app.add_subcommand("simulate", "sample clock phases under retarded events");
    sc_sim->add_option("scenario", sim_args.scenario_path, "scenario JSON file")->required();
    sc_sim->add_option("--until", sim_args.until, "end time, s")->required();
    sc_sim->add_option("--sample", sim_args.sample, "sample step, s")->required();

    DetectArgs detect_args;
    auto* sc_detect = app.add_subcommand("detect", "recover period switches from a history");
    sc_detect->add_option("history", detect_args.history_path, "history CSV from simulate")
        ->required();

    ClassifyArgs classify_args;
    auto* sc_classify = app.add_subcommand("classify", "periodic/ergodic/chaotic classification");
    sc_classify->add_option("--periods", classify_args.ens.periods, "clock periods, comma list");
    sc_classify->add_option("--tol", classify_args.tolerance, "rationalization tolerance");
    sc_classify->add_flag("--exact", classify_args.ens.exact, "treat periods as exact rationals");
    sc_classify->add_option("--scenario", classify_args.scenario_path,
                            "classify a scenario JSON file instead");

    SpectrumArgs spec_args;
    auto* sc_spectrum = app.add_subcommand("spectrum", "harmonic energy ladder of a clock");
    sc_spectrum->add_option("particle", spec_args.particle, "particle name");
    sc_spectrum->add_option("--beta", spec_args.beta, "frame velocity bx,by,bz");
    sc_spectrum->add_option("--n", spec_args.n_max, "number of harmonics");
    sc_spectrum->add_flag("--density", spec_args.density, "sample a phase histogram instead");
    sc_spectrum->add_option("--period", spec_args.density_period_s, "clock period for --density, s");
    sc_spectrum->add_option("--step", spec_args.density_step_s, "sampler step for --density, s");
    sc_spectrum->add_option("--samples", spec_args.density_samples, "sample count for --density");
    sc_spectrum->add_option("--bins", spec_args.density_bins, "histogram bins for --density");

    PropagatorArgs prop_args;
    auto* sc_prop = app.add_subcommand("verify-propagator",
                                       "winding-sum vs mode-sum kernel identity");
    sc_prop->add_option("--L", prop_args.L, "circumference, natural units");
    sc_prop->add_option("--m", prop_args.m, "mass, natural units");
    sc_prop->add_option("--beta", prop_args.betas, "imaginary times, comma list");
    sc_prop->add_option("--tol", prop_args.tol, "identity tolerance, relative");
    sc_prop->add_option("--trunc", prop_args.trunc, "series truncation tolerance");
    sc_prop->add_option("--grid", prop_args.grid, "grid points per axis");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("cyclochron");
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        return emit_error(err, "usage", e.what(), 2);
    }

    try {
        if (app.get_subcommands().empty()) {
            out << app.help();
            return emit_error(err, "usage", "a subcommand is required", 2);
        }
        // Time-series histories are CSV by nature; everything else is an envelope.
        if (format_opt->count() == 0 && sc_sim->parsed())
            format = "csv";
        Context ctx = make_context(constants_path, particles_path, format, seed);
        if (ctx.format == "csv" && !sc_sim->parsed())
            throw UsageError("csv output is only available for simulate");

        clock_args.harmony_set = harmony->count() > 0;
        ticks_args.phase_probe_set = phase_probe->count() > 0;
        decode_args.fingerprint_of_set = fp_of->count() > 0;
        rec_args.gap_set = gap_opt->count() > 0;

        if (sc_clock->parsed())
            cmd_clock(ctx, clock_args, out);
        else if (sc_ticks->parsed())
            cmd_ticks(ctx, ticks_args, out);
        else if (sc_decode->parsed())
            cmd_decode(ctx, decode_args, out);
        else if (sc_rec->parsed())
            cmd_recurrence(ctx, rec_args, out);
        else if (sc_sim->parsed())
            cmd_simulate(ctx, sim_args, out);
        else if (sc_detect->parsed())
            cmd_detect(ctx, detect_args, out);
        else if (sc_classify->parsed())
            cmd_classify(ctx, classify_args, out);
        else if (sc_spectrum->parsed())
            cmd_spectrum(ctx, spec_args, out);
        else if (sc_prop->parsed())
            cmd_verify_propagator(ctx, prop_args, out);
        return 0;
    } catch (const ParseError& e) {
        return emit_error(err, "parse", e.what(), 2);
    } catch (const UsageError& e) {
        return emit_error(err, "usage", e.what(), 2);
    } catch (const HorizonError& e) {
        return emit_error(err, "horizon", e.what(), 1,
                          json{{"best_candidate_s", jnum(e.best_candidate_s())},
                               {"best_distance_cycles", jnum(e.best_distance())}});
    } catch (const ResolutionError& e) {
        return emit_error(err, "resolution", e.what(), 1);
    } catch (const PhysicalValidityError& e) {
        return emit_error(err, "physical-validity", e.what(), 1);
    } catch (const DomainError& e) {
        return emit_error(err, "domain", e.what(), 1);
    } catch (const std::exception& e) {
        return emit_error(err, "internal", e.what(), 1);
    }
}

const std::vector<std::pair<std::string, std::string>>& operation_coverage() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"load_particle_table", "clock"},
        {"constants_from_config", "clock"},
        {"compton_period", "clock"},
        {"four_momentum", "clock"},
        {"photon_momentum", "clock"},
        {"periodicity_of", "clock"},
        {"boost_momentum", "clock"},
        {"phase_harmony_residual", "clock"},
        {"phase_at", "ticks"},
        {"tick_count", "ticks"},
        {"clock_from_particle", "ticks"},
        {"invert_helicity", "decode"},
        {"fingerprint_at", "decode"},
        {"decode_time", "decode"},
        {"classify", "classify"},
        {"recurrence_time", "recurrence"},
        {"distinguishability_gap", "recurrence"},
        {"apply_events", "simulate"},
        {"detect_regime_changes", "detect"},
        {"causal_order", "classify"},
        {"regime_classify", "classify"},
        {"harmonic_spectrum", "spectrum"},
        {"winding_sum_propagator", "verify-propagator"},
        {"mode_sum_propagator", "verify-propagator"},
        {"phase_density_sample", "spectrum"},
    };
    return table;
}

} // namespace cyclochron::cli
