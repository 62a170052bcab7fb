#pragma once

#include <stdexcept>
#include <string>

namespace cyclochron {

// Error taxonomy mirrored by the CLI exit codes: UsageError (and subclasses)
// exit 2, DomainError (and subclasses) exit 1.

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public UsageError {
public:
    ParseError(const std::string& what, long line)
        : UsageError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PhysicalValidityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Sampled data too coarse for the requested analysis.
class ResolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

// Scan exceeded its horizon cap; carries the best candidate seen so far.
class HorizonError : public DomainError {
public:
    HorizonError(const std::string& what, double best_candidate_s, double best_distance)
        : DomainError(what), best_candidate_s_(best_candidate_s), best_distance_(best_distance) {}
    double best_candidate_s() const { return best_candidate_s_; }
    double best_distance() const { return best_distance_; }

private:
    double best_candidate_s_;
    double best_distance_;
};

// Exact rational arithmetic left the representable range. Callers either
// propagate or fall back to the floating path.
class RationalOverflow : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace cyclochron
