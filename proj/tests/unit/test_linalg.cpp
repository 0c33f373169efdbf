#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

#include "orthorand/linalg.hpp"

using namespace orthorand;

TEST_CASE("tridiagonal QL matches Eigen's symmetric solver") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int n : {1, 2, 7, 40, 200}) {
        Eigen::VectorXd d(n), e(std::max(n - 1, 0));
        for (auto& v : d) v = g(rng);
        for (auto& v : e) v = std::abs(g(rng)) + 0.1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
        T.diagonal() = d;
        for (int i = 0; i + 1 < n; ++i) T(i, i + 1) = T(i + 1, i) = e[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(T);
        const auto got = linalg::symmetric_tridiagonal_ql<double>(d, e);
        for (int i = 0; i < n; ++i) {
            CHECK(got.values[i] == doctest::Approx(ref.eigenvalues()[i]).epsilon(1e-12).scale(1.0));
            CHECK(std::abs(got.first_comps[i]) ==
                  doctest::Approx(std::abs(ref.eigenvectors()(0, i))).epsilon(1e-9).scale(1.0));
        }
        CHECK(got.first_comps.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("tridiagonal QL runs in long double") {
    linalg::Vector<long double> d = linalg::Vector<long double>::Zero(2), e(1);
    e[0] = 1.0L / std::sqrt(2.0L);
    const auto got = linalg::symmetric_tridiagonal_ql<long double>(d, e);
    CHECK(static_cast<double>(got.values[1]) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("Francis QR matches Eigen on random Hessenberg matrices") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int n : {1, 2, 3, 10, 60, 150}) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = std::max(i - 1, 0); j < n; ++j) H(i, j) = g(rng);
        auto got = linalg::hessenberg_eigenvalues<double>(H);
        Eigen::EigenSolver<Eigen::MatrixXd> ref(H, false);
        std::vector<std::complex<double>> want(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
        auto less = [](std::complex<double> a, std::complex<double> b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        };
        std::sort(got.begin(), got.end(), less);
        std::sort(want.begin(), want.end(), less);
        // match greedily, ordering ties can differ at round-off level
        for (const auto& w : want) {
            double best = 1e300;
            for (const auto& v : got) best = std::min(best, std::abs(v - w));
            CHECK(best < 1e-8 * (1.0 + std::abs(w)));
        }
    }
}

TEST_CASE("Francis QR on a companion matrix with known roots") {
    // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3), transposed companion is Hessenberg
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 3);
    C(0, 0) = 6;
    C(0, 1) = -11;
    C(0, 2) = 6;
    C(1, 0) = 1;
    C(2, 1) = 1;
    auto ev = linalg::hessenberg_eigenvalues<double>(C);
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });
    for (int i = 0; i < 3; ++i) {
        CHECK(ev[i].real() == doctest::Approx(i + 1.0).epsilon(1e-12));
        CHECK(std::abs(ev[i].imag()) < 1e-12);
    }
}
