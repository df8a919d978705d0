#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sentistack/errors.hpp"
#include "sentistack/grad_check.hpp"
#include "sentistack/matrix.hpp"
#include "sentistack/rng.hpp"

using namespace sentistack;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -2.0,
                     double hi = 2.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

// Independent triple-loop reference for matmul; deliberately the naive j-k
// order so it shares nothing with the implementation.
Matrix matmul_reference(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.same_shape(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

}  // namespace

TEST_CASE("matmul identity") {
    const Matrix id = Matrix::from_rows({{1, 0}, {0, 1}});
    const Matrix v = Matrix::from_rows({{3}, {4}});
    const Matrix out = matmul(id, v);
    CHECK(out(0, 0) == 3.0);
    CHECK(out(1, 0) == 4.0);
}

TEST_CASE("matmul hand-computed 2x2 * 2x1") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix b = Matrix::from_rows({{5}, {6}});
    const Matrix out = matmul(a, b);
    CHECK(out(0, 0) == 17.0);
    CHECK(out(1, 0) == 39.0);
}

TEST_CASE("matmul matches the naive triple-loop reference") {
    Rng rng(7);
    const Matrix a = random_matrix(7, 5, rng);
    const Matrix b = random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul(a, b), matmul_reference(a, b)) < 1e-12);
}

TEST_CASE("matmul rejects mismatched shapes naming both") {
    const Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), ShapeError);
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("4x2"), ShapeError);
}

TEST_CASE("matmul associativity on random conformable triples") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const Matrix a = random_matrix(4, 6, rng);
        const Matrix b = random_matrix(6, 3, rng);
        const Matrix c = random_matrix(3, 5, rng);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < left.size(); ++i) {
            const double denom = std::max(1.0, std::abs(left.data()[i]));
            CHECK(std::abs(left.data()[i] - right.data()[i]) / denom < 1e-9);
        }
    }
}

TEST_CASE("matmul_nt and matmul_tn agree with explicit transposes") {
    Rng rng(11);
    const Matrix a = random_matrix(4, 3, rng);
    const Matrix b = random_matrix(5, 3, rng);
    CHECK(max_abs_diff(matmul_nt(a, b), matmul(a, transpose(b))) == 0.0);
    const Matrix c = random_matrix(4, 6, rng);
    CHECK(max_abs_diff(matmul_tn(a, c), matmul(transpose(a), c)) == 0.0);
}

TEST_CASE("matmul overflow is reported, never silent") {
    Matrix a(1, 2, 1e308);
    Matrix b(2, 1, 1e308);
    CHECK_THROWS_AS(matmul(a, b), NumericError);
}

TEST_CASE("sigmoid fixed points and saturation") {
    const Matrix zero(1, 1, 0.0);
    CHECK(sigmoid(zero)(0, 0) == 0.5);

    const Matrix neg(1, 1, -100.0);
    const double v = sigmoid(neg)(0, 0);
    CHECK(v > 0.0);
    CHECK(v <= 1e-40);

    // 1/(1+e^-1), frozen from a 30-digit evaluation.
    const Matrix one(1, 1, 1.0);
    CHECK(sigmoid(one)(0, 0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("sigmoid(x) + sigmoid(-x) = 1 elementwise") {
    Rng rng(3);
    const Matrix x = random_matrix(4, 5, rng, -8.0, 8.0);
    const Matrix s1 = sigmoid(x);
    const Matrix s2 = sigmoid(scale(x, -1.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(s1.data()[i] + s2.data()[i] - 1.0) < 1e-12);
    }
}

TEST_CASE("sigmoid rejects non-finite input") {
    Matrix x(1, 1, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(sigmoid(x), NumericError);
}

TEST_CASE("tanh_elem odd function") {
    const Matrix zero(1, 1, 0.0);
    CHECK(tanh_elem(zero)(0, 0) == 0.0);

    Rng rng(5);
    const Matrix x = random_matrix(3, 4, rng, -4.0, 4.0);
    const Matrix t1 = tanh_elem(x);
    const Matrix t2 = tanh_elem(scale(x, -1.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(t1.data()[i] == -t2.data()[i]);  // exact odd symmetry
        CHECK(std::abs(t1.data()[i]) < 1.0);
    }

    const Matrix half(1, 1, 0.5);
    CHECK(tanh_elem(half)(0, 0) == doctest::Approx(0.4621171572600098).epsilon(1e-12));
}

TEST_CASE("hadamard identity, annihilator, hand case") {
    Rng rng(9);
    const Matrix a = random_matrix(3, 3, rng);
    CHECK(max_abs_diff(hadamard(a, Matrix(3, 3, 1.0)), a) == 0.0);
    CHECK(max_abs_diff(hadamard(a, Matrix(3, 3, 0.0)), Matrix(3, 3, 0.0)) == 0.0);

    const Matrix x = Matrix::from_rows({{1, 2}});
    const Matrix y = Matrix::from_rows({{3, 4}});
    const Matrix out = hadamard(x, y);
    CHECK(out(0, 0) == 3.0);
    CHECK(out(0, 1) == 8.0);

    CHECK_THROWS_AS(hadamard(Matrix(2, 2), Matrix(2, 3)), ShapeError);
}

TEST_CASE("softmax_rows symmetry and frozen oracle value") {
    const Matrix z = softmax_rows(Matrix(1, 2, 0.0));
    CHECK(z(0, 0) == 0.5);
    CHECK(z(0, 1) == 0.5);

    const Matrix s = softmax_rows(Matrix::from_rows({{1, 2}}));
    CHECK(s(0, 0) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    CHECK(s(0, 1) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("softmax_rows row sums and shift invariance") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = random_matrix(4, 5, rng, -10.0, 10.0);
        const Matrix s = softmax_rows(x);
        for (std::size_t i = 0; i < s.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < s.cols(); ++j) {
                CHECK(s(i, j) >= 0.0);
                sum += s(i, j);
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
        const double c = rng.uniform(-5.0, 5.0);
        Matrix shifted = x;
        for (std::size_t i = 0; i < shifted.size(); ++i) shifted.data()[i] += c;
        CHECK(max_abs_diff(softmax_rows(shifted), s) < 1e-12);
    }
}

TEST_CASE("cross_entropy analytic cases") {
    // Perfect prediction: probability 1 on the true class.
    const Matrix perfect = Matrix::from_rows({{1, 0}, {0, 1}});
    CHECK(cross_entropy(perfect, {0, 1}) == 0.0);

    const Matrix uniform = Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
    CHECK(cross_entropy(uniform, {0, 1}) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-12));

    const Matrix skewed = Matrix::from_rows({{0.9, 0.1}});
    CHECK(cross_entropy(skewed, {1}) ==
          doctest::Approx(2.302585092994046).epsilon(1e-12));
}

TEST_CASE("cross_entropy clamps vanishing probabilities") {
    const Matrix p = Matrix::from_rows({{1, 0}});
    const double loss = cross_entropy(p, {1});
    CHECK(std::isfinite(loss));
    CHECK(loss == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
}

TEST_CASE("cross_entropy rejects bad labels and unnormalized rows") {
    const Matrix p = Matrix::from_rows({{0.5, 0.5}});
    CHECK_THROWS_AS(cross_entropy(p, {2}), DataError);
    CHECK_THROWS_AS(cross_entropy(Matrix::from_rows({{0.7, 0.1}}), {0}), DataError);
}

TEST_CASE("grad_check accepts the gradient of sum(x)") {
    Rng rng(17);
    const Matrix x = random_matrix(3, 4, rng);
    const auto f = [](const Matrix& m) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i];
        return s;
    };
    const GradCheckReport report = grad_check(f, x, Matrix(3, 4, 1.0), 1e-5);
    CHECK(report.max_relative_error < 1e-9);
}

TEST_CASE("grad_check accepts the gradient of sum(x*x)") {
    Rng rng(19);
    const Matrix x = random_matrix(3, 4, rng);
    const auto f = [](const Matrix& m) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
        return s;
    };
    const GradCheckReport report = grad_check(f, x, scale(x, 2.0), 1e-5);
    CHECK(report.max_relative_error < 1e-7);
}

TEST_CASE("grad_check flags a wrong gradient") {
    const Matrix x(2, 2, 1.0);
    const auto f = [](const Matrix& m) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i];
        return s;
    };
    const GradCheckReport report = grad_check(f, x, Matrix(2, 2, 3.0), 1e-5);
    CHECK(report.max_relative_error > 0.5);
    CHECK(report.analytic == 3.0);
}

TEST_CASE("grad_check rejects epsilon outside its window") {
    const Matrix x(1, 1, 0.0);
    const auto f = [](const Matrix& m) { return m(0, 0); };
    CHECK_THROWS_AS(grad_check(f, x, Matrix(1, 1, 1.0), 1e-2), ContractError);
    CHECK_THROWS_AS(grad_check(f, x, Matrix(1, 1, 1.0), 1e-9), ContractError);
}

TEST_CASE("rng streams are pinned: reproducibility survives rebuilds") {
    // mt19937_64 output is fixed by the standard; the derived draws use
    // fixed algorithms. These frozen values guard every seeded contract in
    // the project (shuffles, initialization, OOV embeddings).
    Rng a(0);
    CHECK(a.next_u64() == 2947667278772165694ULL);
    CHECK(a.next_u64() == 18301848765998365067ULL);

    Rng u(42);
    CHECK(u.uniform01() == 0.75515553295453897);
    CHECK(u.uniform01() == 0.63903139385469743);

    Rng b(7);
    CHECK(b.below(10) == 5);
    CHECK(b.below(10) == 0);
    CHECK(b.below(10) == 8);

    CHECK(mix_seed(1, 2) == 7134611160154358618ULL);

    std::vector<int> order = {0, 1, 2, 3, 4};
    Rng s(3);
    s.shuffle(order);
    Rng s2(3);
    std::vector<int> order2 = {0, 1, 2, 3, 4};
    s2.shuffle(order2);
    CHECK(order == order2);
}

TEST_CASE("softmax + cross-entropy backward matches finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Matrix logits = random_matrix(4, 2, rng, -3.0, 3.0);
        std::vector<int> labels(4);
        for (auto& y : labels) y = rng.below(2) == 1 ? 1 : 0;

        const auto f = [&labels](const Matrix& z) {
            return cross_entropy(softmax_rows(z), labels);
        };
        const Matrix probs = softmax_rows(logits);
        const Matrix analytic =
            softmax_rows_backward(probs, cross_entropy_grad(probs, labels));
        const GradCheckReport report = grad_check(f, logits, analytic, 1e-5);
        CHECK(report.max_relative_error < 1e-4);
    }
}
