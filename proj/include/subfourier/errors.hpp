#pragma once

#include <stdexcept>
#include <string>

namespace subfourier {

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical guard tripped during a computation (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Population reached the edge of the momentum ladder.
class AliasingError : public NumericalError {
public:
    AliasingError(double time, double edge_population);

    double time() const { return time_; }
    double edge_population() const { return edge_population_; }

private:
    double time_;
    double edge_population_;
};

// Analysis could not produce a result from the data it was given
// (no peak, no plateau, too few bins...).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace subfourier
