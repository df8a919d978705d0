#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace sentistack {

/// Dense row-major matrix of 64-bit reals. The universal value carrier for
/// embeddings, activations, parameters and gradients.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    void fill(double v) { data_.assign(data_.size(), v); }

    std::string shape_str() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Throws NumericError if any entry of m is NaN or infinite.
void ensure_finite(const Matrix& m, const char* context);

// ---- core arithmetic -------------------------------------------------------

/// Standard matrix product. Throws ShapeError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * transpose(b) without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// transpose(a) * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

/// Elementwise product. Shapes must match.
Matrix hadamard(const Matrix& a, const Matrix& b);

void add_inplace(Matrix& a, const Matrix& b);
void axpy_inplace(Matrix& a, double s, const Matrix& b);  // a += s * b
void hadamard_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double s);

/// m(:,j) += col for every column j; col must be (m.rows x 1).
void add_col_broadcast_inplace(Matrix& m, const Matrix& col);

/// Row-wise sum, returns (m.rows x 1).
Matrix row_sum(const Matrix& m);

Matrix transpose(const Matrix& m);

/// Vertical stack: rows of a followed by rows of b (same cols).
Matrix vstack(const Matrix& a, const Matrix& b);

// ---- nonlinearities --------------------------------------------------------

/// Elementwise logistic 1/(1+e^-x); outputs strictly in (0,1).
Matrix sigmoid(const Matrix& x);

/// Elementwise hyperbolic tangent; outputs in (-1,1).
Matrix tanh_elem(const Matrix& x);

Matrix relu(const Matrix& x);

/// Numerically stable row-wise softmax (max subtraction); each row sums to 1.
Matrix softmax_rows(const Matrix& x);

/// Backward of softmax_rows: given probs = softmax_rows(z) and dL/dprobs,
/// returns dL/dz.
Matrix softmax_rows_backward(const Matrix& probs, const Matrix& grad_probs);

// ---- loss ------------------------------------------------------------------

/// Mean over rows of -log(prob of the true class), probabilities clamped to
/// >= 1e-12 before the log. Rows must sum to 1 within 1e-9; labels in {0,1}.
double cross_entropy(const Matrix& probs, const std::vector<int>& labels);

/// Exact gradient of cross_entropy w.r.t. probs (including the clamp, whose
/// derivative is zero below the floor).
Matrix cross_entropy_grad(const Matrix& probs, const std::vector<int>& labels);

/// Clamp floor used by cross_entropy.
inline constexpr double kProbFloor = 1e-12;

}  // namespace sentistack
