#include "cyclochron/constants.hpp"

#include <cmath>
#include <string>

#include "cyclochron/errors.hpp"

namespace cyclochron {
namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void validate(const Constants& k) {
    if (!(k.h > 0.0) || !std::isfinite(k.h))
        throw UsageError("constant h must be positive and finite");
    if (!(k.c > 0.0) || !std::isfinite(k.c))
        throw UsageError("constant c must be positive and finite");
    if (!(k.electronvolt > 0.0) || !std::isfinite(k.electronvolt))
        throw UsageError("constant electronvolt must be positive and finite");
}

Constants constants_from_config(std::istream& in) {
    Constants k;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::string body = trimmed(line);
        if (body.empty())
            continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", line_no);
        std::string key = trimmed(body.substr(0, eq));
        std::string val = trimmed(body.substr(eq + 1));
        double parsed = 0.0;
        try {
            std::size_t used = 0;
            parsed = std::stod(val, &used);
            if (used != val.size())
                throw ParseError("trailing characters after value", line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("malformed numeric value '" + val + "'", line_no);
        }
        if (key == "h")
            k.h = parsed;
        else if (key == "c")
            k.c = parsed;
        else if (key == "electronvolt")
            k.electronvolt = parsed;
        else
            throw ParseError("unknown constant '" + key + "'", line_no);
    }
    validate(k);
    return k;
}

} // namespace cyclochron
