#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "ganlab/matrix.hpp"
#include "ganlab/rng.hpp"

using ganlab::Matrix;

TEST_CASE("construction and element access") {
    Matrix m(2, 3, 1.5);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    REQUIRE(m.size() == 6);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == 1.5);

    Matrix v(2, 2, std::vector<double>{1, 2, 3, 4});
    CHECK(v(0, 0) == 1);
    CHECK(v(0, 1) == 2);
    CHECK(v(1, 0) == 3);
    CHECK(v(1, 1) == 4);

    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("from_rows and identity") {
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 2);
    CHECK(m(2, 1) == 6);
    CHECK_THROWS_AS(Matrix::from_rows({{1, 2}, {3}}), std::invalid_argument);

    const Matrix id = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(id(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("matmul against a hand-computed product") {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Matrix b = Matrix::from_rows({{7, 8}, {9, 10}, {11, 12}});
    const Matrix c = ganlab::matmul(a, b);
    REQUIRE(c.rows() == 2);
    REQUIRE(c.cols() == 2);
    CHECK(c(0, 0) == 58);
    CHECK(c(0, 1) == 64);
    CHECK(c(1, 0) == 139);
    CHECK(c(1, 1) == 154);
}

TEST_CASE("matmul agrees exactly with the reference triple loop") {
    // Both implementations accumulate over k in ascending order, so the
    // floating-point result is bit-identical for finite inputs.
    ganlab::RngState rng(41);
    Matrix a(7, 5);
    Matrix b(5, 3);
    for (auto& v : a.values()) v = rng.next_gaussian();
    for (auto& v : b.values()) v = rng.next_gaussian();

    Matrix expect(7, 3, 0.0);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 5; ++k) s += a(i, k) * b(k, j);
            expect(i, j) = s;
        }
    CHECK(ganlab::matmul(a, b) == expect);
}

TEST_CASE("matmul validates inner dimensions") {
    const Matrix a(2, 3, 0.0);
    const Matrix b(4, 2, 0.0);
    CHECK_THROWS_AS(ganlab::matmul(a, b), std::invalid_argument);
}

TEST_CASE("matmul with identity is the identity map") {
    ganlab::RngState rng(7);
    Matrix a(4, 4);
    for (auto& v : a.values()) v = rng.next_uniform(-2.0, 2.0);
    CHECK(ganlab::matmul(a, Matrix::identity(4)) == a);
    CHECK(ganlab::matmul(Matrix::identity(4), a) == a);
}

TEST_CASE("transpose") {
    const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Matrix t = ganlab::transpose(m);
    REQUIRE(t.rows() == 3);
    REQUIRE(t.cols() == 2);
    CHECK(t(0, 1) == 4);
    CHECK(t(2, 0) == 3);
    CHECK(ganlab::transpose(t) == m);
}

TEST_CASE("hadamard and elementwise arithmetic") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
    CHECK(ganlab::hadamard(a, b) == Matrix::from_rows({{5, 12}, {21, 32}}));
    CHECK(a + b == Matrix::from_rows({{6, 8}, {10, 12}}));
    CHECK(b - a == Matrix::from_rows({{4, 4}, {4, 4}}));
    CHECK(a * 2.0 == Matrix::from_rows({{2, 4}, {6, 8}}));

    Matrix c = a;
    c += b;
    CHECK(c == a + b);
    c -= b;
    CHECK(c == a);
    c *= 3.0;
    CHECK(c == a * 3.0);

    Matrix wrong(2, 3, 0.0);
    CHECK_THROWS_AS(c += wrong, std::invalid_argument);
    CHECK_THROWS_AS(ganlab::hadamard(a, wrong), std::invalid_argument);
}

TEST_CASE("row view and all_finite") {
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix r = m.row(1);
    REQUIRE(r.rows() == 1);
    REQUIRE(r.cols() == 2);
    CHECK(r(0, 0) == 3);
    CHECK(r(0, 1) == 4);

    CHECK(ganlab::all_finite(m));
    Matrix bad = m;
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(ganlab::all_finite(bad));
    bad(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_FALSE(ganlab::all_finite(bad));
}

TEST_CASE("equality is exact") {
    Matrix a(1, 1, 0.1);
    Matrix b(1, 1, 0.1);
    CHECK(a == b);
    b(0, 0) = std::nextafter(0.1, 1.0);
    CHECK_FALSE(a == b);
}
