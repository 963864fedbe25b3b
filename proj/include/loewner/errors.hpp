#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

// Bad arguments or malformed input. Maps to CLI exit code 2.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical check could not be satisfied. Maps to CLI exit code 3.
struct NumericalDiagnostic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MonotonicityViolation : NumericalDiagnostic {
    using NumericalDiagnostic::NumericalDiagnostic;
};

struct ScheduleInfeasible : NumericalDiagnostic {
    using NumericalDiagnostic::NumericalDiagnostic;
};

} // namespace loewner
