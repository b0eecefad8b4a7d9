#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcsde {

/// Base of every error raised by the library. `module()` names the
/// subsystem that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// A series or expansion did not converge within its term cap.
class EvaluationError : public Error {
public:
    EvaluationError(std::string module, const std::string& what, double partial_sum,
                    std::size_t terms)
        : Error(std::move(module), what), partial_sum_(partial_sum), terms_(terms) {}

    double partial_sum() const noexcept { return partial_sum_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    std::size_t terms_;
};

/// Exponential-moment series evaluated exactly on the r = 1/(1-alpha) boundary.
class BoundaryUndeterminedError : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Newton and the bracketing fallback both failed to reach the tolerance.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double residual, double lo, double hi,
                  std::ptrdiff_t step = -1)
        : Error("theta_scheme", what), residual_(residual), lo_(lo), hi_(hi), step_(step) {}

    double residual() const noexcept { return residual_; }
    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }
    /// Step index inside `integrate`, or -1 for a standalone solve.
    std::ptrdiff_t step() const noexcept { return step_; }

private:
    double residual_;
    double lo_;
    double hi_;
    std::ptrdiff_t step_;
};

class FitError : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    using Error::Error;
};

/// Config parse/validation failure; `key()` is the dotted key path.
class ParseError : public Error {
public:
    ParseError(std::string key, const std::string& what)
        : Error("cli_io", key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace tcsde
