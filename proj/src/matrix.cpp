#include "sentistack/matrix.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "sentistack/errors.hpp"

namespace sentistack {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("from_rows: ragged initializer");
        }
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

std::string Matrix::shape_str() const {
    std::ostringstream os;
    os << rows_ << "x" << cols_;
    return os.str();
}

void ensure_finite(const Matrix& m, const char* context) {
    const double* p = m.data();
    for (std::size_t i = 0, n = m.size(); i < n; ++i) {
        if (!std::isfinite(p[i])) {
            std::ostringstream os;
            os << context << ": non-finite entry at flat index " << i << " ("
               << m.shape_str() << ")";
            throw NumericError(os.str());
        }
    }
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + a.shape_str() +
                         " x " + b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    // i-k-j order keeps both b rows and out rows contiguous. Each output row
    // is produced entirely by one thread, so results are bit-identical for
    // any thread count.
#pragma omp parallel for schedule(static) if (m * k * n > 32768)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* out_row = out.row_ptr(i);
        const double* a_row = a.row_ptr(i);
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = a_row[kk];
            const double* b_row = b.row_ptr(kk);
            for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b_row[j];
        }
    }
    ensure_finite(out, "matmul");
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: inner dimensions differ, " + a.shape_str() +
                         " x " + b.shape_str() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
#pragma omp parallel for schedule(static) if (m * k * n > 32768)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* a_row = a.row_ptr(i);
        double* out_row = out.row_ptr(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* b_row = b.row_ptr(j);
            double acc = 0.0;
            for (std::size_t kk = 0; kk < k; ++kk) acc += a_row[kk] * b_row[kk];
            out_row[j] = acc;
        }
    }
    ensure_finite(out, "matmul_nt");
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: inner dimensions differ, " + a.shape_str() +
                         "^T x " + b.shape_str());
    }
    return matmul(transpose(a), b);
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out = a;
    add_inplace(out, b);
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix out = a;
    double* p = out.data();
    const double* q = b.data();
    for (std::size_t i = 0, n = out.size(); i < n; ++i) p[i] -= q[i];
    return out;
}

Matrix scale(const Matrix& a, double s) {
    Matrix out = a;
    scale_inplace(out, s);
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    hadamard_inplace(out, b);
    ensure_finite(out, "hadamard");
    return out;
}

void add_inplace(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    double* p = a.data();
    const double* q = b.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) p[i] += q[i];
}

void axpy_inplace(Matrix& a, double s, const Matrix& b) {
    require_same_shape(a, b, "axpy");
    double* p = a.data();
    const double* q = b.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) p[i] += s * q[i];
}

void hadamard_inplace(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    double* p = a.data();
    const double* q = b.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) p[i] *= q[i];
}

void scale_inplace(Matrix& a, double s) {
    double* p = a.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) p[i] *= s;
}

void add_col_broadcast_inplace(Matrix& m, const Matrix& col) {
    if (col.rows() != m.rows() || col.cols() != 1) {
        throw ShapeError("add_col_broadcast: column " + col.shape_str() +
                         " does not match " + m.shape_str());
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row_ptr(i);
        const double v = col(i, 0);
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] += v;
    }
}

Matrix row_sum(const Matrix& m) {
    Matrix out(m.rows(), 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* row = m.row_ptr(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j];
        out(i, 0) = acc;
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    }
    return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("vstack: column counts differ, " + a.shape_str() +
                         " vs " + b.shape_str());
    }
    Matrix out(a.rows() + b.rows(), a.cols());
    if (a.size() > 0) std::memcpy(out.data(), a.data(), a.size() * sizeof(double));
    if (b.size() > 0) std::memcpy(out.data() + a.size(), b.data(), b.size() * sizeof(double));
    return out;
}

namespace {

inline double sigmoid_scalar(double x) {
    // Evaluate via exp(-|x|) so neither branch overflows.
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Matrix sigmoid(const Matrix& x) {
    ensure_finite(x, "sigmoid input");
    Matrix out = x;
    double* p = out.data();
    for (std::size_t i = 0, n = out.size(); i < n; ++i) p[i] = sigmoid_scalar(p[i]);
    return out;
}

Matrix tanh_elem(const Matrix& x) {
    ensure_finite(x, "tanh input");
    Matrix out = x;
    double* p = out.data();
    for (std::size_t i = 0, n = out.size(); i < n; ++i) p[i] = std::tanh(p[i]);
    return out;
}

Matrix relu(const Matrix& x) {
    Matrix out = x;
    double* p = out.data();
    for (std::size_t i = 0, n = out.size(); i < n; ++i) p[i] = p[i] > 0.0 ? p[i] : 0.0;
    return out;
}

Matrix softmax_rows(const Matrix& x) {
    ensure_finite(x, "softmax input");
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* row = out.row_ptr(i);
        double mx = row[0];
        for (std::size_t j = 1; j < out.cols(); ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < out.cols(); ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < out.cols(); ++j) row[j] /= sum;
    }
    return out;
}

Matrix softmax_rows_backward(const Matrix& probs, const Matrix& grad_probs) {
    require_same_shape(probs, grad_probs, "softmax_rows_backward");
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const double* p = probs.row_ptr(i);
        const double* g = grad_probs.row_ptr(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < probs.cols(); ++j) dot += g[j] * p[j];
        double* o = out.row_ptr(i);
        for (std::size_t j = 0; j < probs.cols(); ++j) o[j] = p[j] * (g[j] - dot);
    }
    return out;
}

namespace {

void check_ce_inputs(const Matrix& probs, const std::vector<int>& labels) {
    if (probs.cols() != 2) {
        throw ShapeError("cross_entropy: expected 2 columns, got " + probs.shape_str());
    }
    if (labels.size() != probs.rows()) {
        throw DataError("cross_entropy: " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(probs.rows()) + " rows");
    }
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const double s = probs(i, 0) + probs(i, 1);
        if (std::abs(s - 1.0) > 1e-9) {
            throw DataError("cross_entropy: row " + std::to_string(i) +
                            " sums to " + std::to_string(s));
        }
        if (labels[i] != 0 && labels[i] != 1) {
            throw DataError("cross_entropy: label " + std::to_string(labels[i]) +
                            " out of range at row " + std::to_string(i));
        }
    }
}

}  // namespace

double cross_entropy(const Matrix& probs, const std::vector<int>& labels) {
    check_ce_inputs(probs, labels);
    double total = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const double p = std::max(probs(i, static_cast<std::size_t>(labels[i])), kProbFloor);
        total -= std::log(p);
    }
    return total / static_cast<double>(probs.rows());
}

Matrix cross_entropy_grad(const Matrix& probs, const std::vector<int>& labels) {
    check_ce_inputs(probs, labels);
    Matrix out(probs.rows(), probs.cols());
    const double inv_n = 1.0 / static_cast<double>(probs.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const auto y = static_cast<std::size_t>(labels[i]);
        const double p = probs(i, y);
        // Below the clamp floor the loss is constant in p, so the gradient is 0.
        out(i, y) = p < kProbFloor ? 0.0 : -inv_n / p;
    }
    return out;
}

}  // namespace sentistack
