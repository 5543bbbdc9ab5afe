#pragma once

#include <stdexcept>
#include <string>

namespace csf {

/// Integration or closed-form evaluation drove the pressure out of the
/// model's domain. Carries the time at which the failure occurred.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, double time_min)
        : std::runtime_error(what), time_min_(time_min) {}
    double time() const noexcept { return time_min_; }

private:
    double time_min_;
};

/// A scenario asked for a solver/regime combination that does not exist.
class UnsupportedScenarioError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation was invoked on a model variant that does not define it.
class UnsupportedOperationError : public std::logic_error {
    using std::logic_error::logic_error;
};

/// A required configuration block is absent (e.g. infusion parameters).
class ConfigurationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The shunted steady state sits below the valve opening pressure, so the
/// open-shunt model premise fails.
class ShuntClosedError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A closed form was evaluated outside the regime it is valid in.
class OutOfRegimeError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// The data cannot determine the requested quantity (degenerate design
/// matrix, flat trace, repeated abscissae).
class RankDeficiencyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too few samples to run the requested check.
class InsufficientDataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Config-file parse/validation failure with source location.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(const std::string& what, int line, std::string key = {})
        : std::runtime_error(what), line_(line), key_(std::move(key)) {}
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

}  // namespace csf
