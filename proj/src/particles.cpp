#include "cyclochron/particles.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "cyclochron/errors.hpp"
#include "cyclochron/numeric.hpp"

namespace cyclochron {
namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, long line_no, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size())
            throw ParseError(std::string("trailing characters in ") + what, line_no);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(std::string("malformed ") + what + " '" + text + "'", line_no);
    }
}

} // namespace

std::vector<ParticleSpec> load_particle_table(std::istream& in) {
    std::vector<ParticleSpec> table;
    std::set<std::string> seen;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        if (trimmed(line).empty())
            continue;
        if (!header_seen) {
            std::string compact;
            for (char ch : line)
                if (ch != ' ' && ch != '\t' && ch != '\r')
                    compact.push_back(ch);
            if (compact != "name,mass_ev,charge,spin")
                throw ParseError("expected header 'name,mass_ev,charge,spin'", line_no);
            header_seen = true;
            continue;
        }

        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ','))
            fields.push_back(trimmed(field));
        if (fields.size() != 4)
            throw ParseError("expected 4 fields: name,mass_ev,charge,spin", line_no);

        ParticleSpec p;
        p.name = fields[0];
        if (p.name.empty())
            throw ParseError("empty particle name", line_no);
        if (!seen.insert(p.name).second)
            throw ParseError("duplicate particle '" + p.name + "'", line_no);
        p.rest_mass_energy_ev = parse_number(fields[1], line_no, "mass");
        if (!(p.rest_mass_energy_ev >= 0.0) || !std::isfinite(p.rest_mass_energy_ev))
            throw ParseError("mass must be finite and non-negative", line_no);
        p.charge = parse_number(fields[2], line_no, "charge");
        if (!std::isfinite(p.charge))
            throw ParseError("charge must be finite", line_no);
        auto spin = Rational::parse(fields[3]);
        if (!spin || spin->num < 0)
            throw ParseError("malformed spin '" + fields[3] + "'", line_no);
        p.spin = *spin;
        table.push_back(std::move(p));
    }
    return table;
}

void save_particle_table(std::ostream& out, const std::vector<ParticleSpec>& table) {
    out << "name,mass_ev,charge,spin\n";
    for (const auto& p : table) {
        out << p.name << ',' << format_double(p.rest_mass_energy_ev) << ','
            << format_double(p.charge) << ',' << p.spin.str() << '\n';
    }
}

const std::vector<ParticleSpec>& builtin_particles() {
    static const std::vector<ParticleSpec> table = {
        {"electron", 510998.95, -1.0, Rational{1, 2}},
        {"muon", 105658375.5, -1.0, Rational{1, 2}},
        {"tau", 1776860000.0, -1.0, Rational{1, 2}},
        {"photon", 0.0, 0.0, Rational{1, 1}},
    };
    return table;
}

const ParticleSpec& find_particle(const std::vector<ParticleSpec>& table, const std::string& name) {
    for (const auto& p : table)
        if (p.name == name)
            return p;
    throw UsageError("unknown particle '" + name + "'");
}

} // namespace cyclochron
