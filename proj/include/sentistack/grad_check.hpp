#pragma once

#include <cstddef>
#include <functional>

#include "sentistack/matrix.hpp"

namespace sentistack {

/// Outcome of one finite-difference comparison.
struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_row = 0;
    std::size_t worst_col = 0;
    double analytic = 0.0;  // analytic gradient at the worst coordinate
    double numeric = 0.0;   // central-difference estimate there
};

/// Central-difference check of an analytic gradient. For every coordinate,
/// numeric = (f(x + eps*e) - f(x - eps*e)) / (2*eps) and the relative error is
/// |analytic - numeric| / max(1, |analytic|, |numeric|); the max(1, ...)
/// denominator keeps near-zero gradients from blowing the ratio up.
///
/// f must be pure. epsilon must lie in [1e-7, 1e-4].
GradCheckReport grad_check(const std::function<double(const Matrix&)>& f,
                           const Matrix& point, const Matrix& analytic_grad,
                           double epsilon);

}  // namespace sentistack
