#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace natanzon {

/// Pipeline stage an error originated from. Carried by every exception so
/// that orchestration code can report where a run failed.
enum class Stage { specfun, mapping, potential, spectrum, wavefunc, algebra, oracle, config };

std::string_view to_string(Stage stage) noexcept;

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& what)
        : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}

    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

/// Argument outside the domain of a function (vanishing Pochhammer
/// denominator, invalid radicand, non-positive mass, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A coefficient that must stay away from zero (xi', R) got too close.
class SingularPointError : public Error {
public:
    using Error::Error;
};

/// Grid too small, not increasing, or incompatible with another grid.
class GridError : public Error {
public:
    using Error::Error;
};

/// Iterative method exhausted its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Weighted norm of a wavefunction could not be established on the grid.
class DivergentNormError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Stage::config, what) {}
};

}  // namespace natanzon
