#include "sentistack/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "sentistack/errors.hpp"

namespace sentistack {

GradCheckReport grad_check(const std::function<double(const Matrix&)>& f,
                           const Matrix& point, const Matrix& analytic_grad,
                           double epsilon) {
    if (!point.same_shape(analytic_grad)) {
        throw ShapeError("grad_check: gradient " + analytic_grad.shape_str() +
                         " does not match point " + point.shape_str());
    }
    if (epsilon < 1e-7 || epsilon > 1e-4) {
        throw ContractError("grad_check: epsilon " + std::to_string(epsilon) +
                            " outside [1e-7, 1e-4]");
    }

    GradCheckReport report;
    Matrix x = point;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double saved = x(r, c);
            x(r, c) = saved + epsilon;
            const double f_plus = f(x);
            x(r, c) = saved - epsilon;
            const double f_minus = f(x);
            x(r, c) = saved;
            if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                throw NumericError("grad_check: non-finite f at coordinate (" +
                                   std::to_string(r) + "," + std::to_string(c) + ")");
            }
            const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
            const double analytic = analytic_grad(r, c);
            const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
            const double rel = std::abs(analytic - numeric) / denom;
            if (rel > report.max_relative_error) {
                report.max_relative_error = rel;
                report.worst_row = r;
                report.worst_col = c;
                report.analytic = analytic;
                report.numeric = numeric;
            }
        }
    }
    return report;
}

}  // namespace sentistack
