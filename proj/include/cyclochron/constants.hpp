#pragma once

#include <istream>

namespace cyclochron {

// SI-2019 exact defaults. Overridable (e.g. h = c = electronvolt = 1 for
// natural units); every derived quantity takes the active set explicitly.
struct Constants {
    double h = 6.62607015e-34;            // J s
    double c = 299792458.0;               // m / s
    double electronvolt = 1.602176634e-19; // J
};

// Parses "key = value" lines (h, c, electronvolt; '#' comments, blank lines
// ignored). Unknown keys, malformed lines, or non-positive/non-finite values
// are rejected.
Constants constants_from_config(std::istream& in);

void validate(const Constants& k);

} // namespace cyclochron
