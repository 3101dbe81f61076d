// errors.hpp — exception taxonomy: scenario (input) errors vs numerical failures.

#pragma once

#include <stdexcept>
#include <string>

namespace mist {

// Invalid or inconsistent user input (scenario files, CLI arguments).
struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver or stepper failed at runtime (instability, divergence, singularity).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Steady-state problem with a null space of dimension > 1 (no unique state).
struct DegenerateSteadyState : NumericalError {
    explicit DegenerateSteadyState(const std::string& msg) : NumericalError(msg) {}
};

} // namespace mist
