#pragma once

#include <stdexcept>
#include <string>

namespace duet {

// Parameters whose quadratic form or pole structure is not bounded/decaying.
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain where a closed form is defined (log singularity, Bose pole, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature or series did not reach tolerance; carries what was achieved.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

}  // namespace duet
