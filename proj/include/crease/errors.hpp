#pragma once

#include <stdexcept>
#include <string>

namespace crease {

/// Surface fitting could not be completed (underdetermined regions,
/// factorization failure).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coincident contour points or a triangle-inequality breach.
struct DegenerateTripletError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A wrinkle whose triplet set is empty cannot be quantified.
struct UnquantifiedWrinkleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDirectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline-stage invariant failed on data that passed its preconditions.
struct InternalError : std::runtime_error {
    std::string stage;
    InternalError(std::string stage_, const std::string& what_)
        : std::runtime_error(stage_ + ": " + what_), stage(std::move(stage_)) {}
};

}  // namespace crease
