#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cyclochron/rational.hpp"

namespace cyclochron {

// A particle species. Mass is stored as rest energy in eV so the table stays
// exact under constant overrides; charge (units of e) and spin are metadata.
struct ParticleSpec {
    std::string name;
    double rest_mass_energy_ev = 0.0; // >= 0, zero means massless
    double charge = 0.0;
    Rational spin{0, 1};

    bool massless() const { return rest_mass_energy_ev == 0.0; }
};

// CSV rows "name,mass_ev,charge,spin" with '#' comments and blank lines.
// Spin accepts "1/2" style fractions. Duplicate names conflict.
std::vector<ParticleSpec> load_particle_table(std::istream& in);

void save_particle_table(std::ostream& out, const std::vector<ParticleSpec>& table);

const std::vector<ParticleSpec>& builtin_particles();

const ParticleSpec& find_particle(const std::vector<ParticleSpec>& table, const std::string& name);

} // namespace cyclochron
