#include "shgs/error.hpp"
#include "shgs/fft.hpp"
#include "shgs/transforms.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shgs;

namespace {

Eigen::MatrixXcd random_complex(int nx, int ny, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd x(nx, ny);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = {nd(rng), nd(rng)};
    return x;
}

Eigen::MatrixXd random_real(int nx, int ny, std::uint64_t seed) { return random_complex(nx, ny, seed).real(); }

// Direct O(n^4) unitary DFT.
Eigen::MatrixXcd naive_dft(const Eigen::MatrixXcd& x, int sign) {
    const int nx = static_cast<int>(x.rows()), ny = static_cast<int>(x.cols());
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(nx, ny);
    for (int p = 0; p < nx; ++p)
        for (int q = 0; q < ny; ++q)
            for (int a = 0; a < nx; ++a)
                for (int b = 0; b < ny; ++b)
                    X(p, q) += x(a, b) * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                                            (double(p) * a / nx + double(q) * b / ny));
    return X / std::sqrt(double(nx) * ny);
}

} // namespace

TEST_CASE("fft2 matches a direct DFT") {
    const auto x = random_complex(8, 16, 1);
    CHECK((fft2(x) - naive_dft(x, -1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ifft2(x) - naive_dft(x, +1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ifft2(fft2(x)) - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("signed frequencies") {
    CHECK(signed_frequency(0, 8) == 0);
    CHECK(signed_frequency(3, 8) == 3);
    CHECK(signed_frequency(4, 8) == -4);
    CHECK(signed_frequency(7, 8) == -1);
    for (int i = 0; i < 8; ++i) CHECK(frequency_index(signed_frequency(i, 8), 8) == i);
}

TEST_CASE("haar level one against block sums") {
    const auto x = random_real(8, 8, 2);
    const auto c = dwt2(x, 1, WaveletFilter::Haar);
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
            const double a = x(2 * p, 2 * q), b = x(2 * p + 1, 2 * q), d = x(2 * p, 2 * q + 1), e = x(2 * p + 1, 2 * q + 1);
            CHECK(c(p, q) == doctest::Approx((a + b + d + e) / 2.0).epsilon(1e-14));
            CHECK(c(p + 4, q) == doctest::Approx((a - b + d - e) / 2.0).epsilon(1e-14));
            CHECK(c(p, q + 4) == doctest::Approx((a + b - d - e) / 2.0).epsilon(1e-14));
            CHECK(c(p + 4, q + 4) == doctest::Approx((a - b - d + e) / 2.0).epsilon(1e-14));
        }
}

TEST_CASE("d4 filter is orthonormal with two vanishing moments") {
    // Detail coefficients of a linear ramp vanish away from the periodic wrap.
    Eigen::MatrixXd ramp(32, 32);
    for (int p = 0; p < 32; ++p)
        for (int q = 0; q < 32; ++q) ramp(p, q) = 0.5 * q;
    const auto c = dwt2(ramp, 1, WaveletFilter::D4);
    for (int p = 0; p < 16; ++p)
        for (int q = 0; q < 15; ++q) CHECK(std::abs(c(p, 16 + q)) < 1e-12);
}

TEST_CASE("wavelet round trip and Parseval") {
    for (auto f : {WaveletFilter::Haar, WaveletFilter::D4})
        for (int levels : {1, 3, 6}) {
            const auto x = random_real(64, 64, 3 + levels);
            const auto c = dwt2(x, levels, f);
            CHECK((idwt2(c, levels, f) - x).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(c.squaredNorm() - x.squaredNorm()) < 1e-10 * x.squaredNorm());
        }
    const auto r = random_real(32, 64, 9);
    CHECK((idwt2(dwt2(r, 5, WaveletFilter::D4), 5, WaveletFilter::D4) - r).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("haar details of a constant image vanish") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(16, 16, 0.7);
    const auto c = dwt2(x, 3, WaveletFilter::Haar);
    for (int p = 0; p < 16; ++p)
        for (int q = 0; q < 16; ++q)
            if (p >= 2 || q >= 2) CHECK(std::abs(c(p, q)) < 1e-14);
}

TEST_CASE("wavelet argument checks") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(16, 16);
    auto code = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code([&] { dwt2(x, 5, WaveletFilter::D4); }) == ErrorCode::InvalidLevels);
    CHECK(code([&] { dwt2(x, -1, WaveletFilter::D4); }) == ErrorCode::InvalidLevels);
    CHECK(code([&] { dwt2(Eigen::MatrixXd::Zero(12, 16), 1, WaveletFilter::D4); }) == ErrorCode::InvalidSize);
    CHECK(code([] { parse_wavelet_filter("db8"); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("wavelet transform object is orthonormal") {
    const WaveletTransform T(32, 32, 3, WaveletFilter::D4);
    const auto x = random_complex(32, 32, 4);
    const auto c = T.forward(x);
    CHECK((T.adjoint(c) - x).cwiseAbs().maxCoeff() < 1e-10);
    std::size_t coarse = 0;
    for (auto v : T.coarse()) coarse += v;
    CHECK(coarse == 16);
}

TEST_CASE("digital shearlet band layout") {
    const DigitalShearlet T(128, 128, 4);
    CHECK(T.bands().size() == 41);
    CHECK(T.size() == 41u * 128 * 128);
    CHECK(T.bands()[0].lowpass);
    CHECK(max_shearlet_scales(128) == 4);
    CHECK(max_shearlet_scales(64) == 3);
    try {
        DigitalShearlet bad(128, 128, 5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidScales);
    }
    CHECK_THROWS_AS(DigitalShearlet(100, 128, 2), Error);
}

TEST_CASE("digital shearlet windows form a partition of unity") {
    const DigitalShearlet T(64, 32, 2);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(64, 32);
    for (std::size_t b = 0; b < T.bands().size(); ++b) {
        total += T.window(b).cwiseAbs2();
        CHECK(T.window(b).minCoeff() >= 0.0);
    }
    CHECK((total.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("digital shearlet band matches a direct convolution") {
    const DigitalShearlet T(16, 16, 1);
    const auto x = random_complex(16, 16, 5);
    const auto c = T.forward(x);
    const Eigen::MatrixXcd X = naive_dft(x, -1);
    for (std::size_t b = 0; b < T.bands().size(); ++b) {
        const Eigen::MatrixXcd ref = naive_dft(X.cwiseProduct(T.window(b).cast<cplx>()), +1);
        const Eigen::Map<const Eigen::MatrixXcd> got(c.data() + b * 256, 16, 16);
        CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("digital shearlet adjoint and frame bounds") {
    const DigitalShearlet T(128, 128, 4);
    const auto x = random_complex(128, 128, 6);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd y(static_cast<Eigen::Index>(T.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = {nd(rng), nd(rng)};
    const cplx lhs = T.forward(x).dot(y);
    const cplx rhs = x.reshaped().dot(T.adjoint(y).reshaped());
    CHECK(std::abs(lhs - rhs) < 1e-8 * x.norm() * y.norm());

    const auto fb = measure_frame_bounds(T, 20, 8);
    CHECK(fb.lower > 0.0);
    CHECK(fb.upper / fb.lower <= 1.2);
    CHECK(fb.upper / fb.lower == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(T.forward(Eigen::MatrixXcd::Zero(128, 128)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((T.adjoint(T.forward(x)) - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("digital shearlet keeps real images real") {
    const DigitalShearlet T(32, 32, 2);
    const Eigen::MatrixXcd x = random_real(32, 32, 10).cast<cplx>();
    CHECK(T.forward(x).imag().cwiseAbs().maxCoeff() < 1e-12);
}
