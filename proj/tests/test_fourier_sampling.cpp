#include "shgs/error.hpp"
#include "shgs/fourier_sampling.hpp"
#include "shgs/inner_product.hpp"

#include "quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shgs;

namespace {

// <f, s_l> by tensor quadrature over the support of f, f given by a point evaluator.
template <class F>
cplx quadrature_measure(F&& f, const Box& region, double eps, Lattice l, int panels) {
    const auto rx = testq::composite(region.lo[0], region.hi[0], panels, 6);
    const auto ry = testq::composite(region.lo[1], region.hi[1], panels, 6);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < rx.x.size(); ++i) {
        cplx row{0.0, 0.0};
        for (std::size_t j = 0; j < ry.x.size(); ++j) {
            const double v = f(Vec2{rx.x[i], ry.x[j]});
            if (v != 0.0) row += ry.w[j] * v * std::polar(1.0, -2.0 * std::numbers::pi * eps * l[1] * ry.x[j]);
        }
        acc += rx.w[i] * row * std::polar(1.0, -2.0 * std::numbers::pi * eps * l[0] * rx.x[i]);
    }
    return eps * acc;
}

Eigen::VectorXcd random_coefficients(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(static_cast<Eigen::Index>(n));
    for (auto& v : x) v = {g(rng), g(rng)};
    return x;
}

} // namespace

TEST_CASE("grid indexing") {
    SamplingGrid g = grid_for_epsilon(0.125, {2, 3});
    CHECK(g.rows() == 35);
    CHECK(g.T == Vec2{4.0, 4.0});
    CHECK(g.row({-2, -3}) == 0);
    CHECK(g.row({-2, -2}) == 1);
    CHECK(g.row({-1, -3}) == 7);
    for (std::size_t r = 0; r < g.rows(); ++r) CHECK(g.row(g.lattice(r)) == r);

    SamplingGrid bad = g;
    bad.epsilon = 0.2;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("measure_atom basics") {
    const auto l = build_layout(2, GeneratorSpec{});
    const auto g = grid_for_epsilon(0.125, {4, 4});
    CHECK(std::abs(measure_atom(l, {Cone::Scaling, 0, 0, {0, 0}}, g, {0, 0}) - 0.125) < 1e-15);
    const double a = std::abs(measure_atom(l, {Cone::Horizontal, 1, 0, {0, 0}}, g, {2, 3}));
    const double b = std::abs(measure_atom(l, {Cone::Horizontal, 1, 0, {1, 0}}, g, {2, 3}));
    CHECK(a == doctest::Approx(b).epsilon(1e-14));

    SamplingGrid tight{0.25, {2, 2}, {1.0, 1.0}};
    try {
        measure_atom(l, {Cone::Scaling, 0, 0, {1, 1}}, tight, {0, 0});
        FAIL("expected SupportViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SupportViolation);
    }
}

TEST_CASE("measure_atom agrees with spatial quadrature") {
    const auto l = build_layout(2, GeneratorSpec{});
    const auto g = grid_for_epsilon(0.125, {16, 16});
    const auto spec = l.spec();
    std::mt19937_64 rng(23);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto& idx = l.indices()[rng() % l.size()];
        const Lattice lat{static_cast<int>(rng() % 33) - 16, static_cast<int>(rng() % 33) - 16};
        const cplx exact = measure_atom(l, idx, g, lat);
        const cplx quad = quadrature_measure([&](Vec2 x) { return atom_space(l, idx, x); },
                                             support_box(spec, idx), g.epsilon, lat, 96);
        // Exact zeros (eps l on a zero line of the symbol) are compared at roundoff level.
        worst = std::max(worst, std::abs(exact - quad) / std::max(std::abs(quad), 1e-9));
    }
    MESSAGE("worst relative error " << worst);
    CHECK(worst < 1e-6);
}

TEST_CASE("cross-Gramian shape and entries") {
    const auto l = build_layout(1, GeneratorSpec{});
    const auto g0 = grid_for_epsilon(0.125, {0, 0});
    const auto U0 = cross_gramian(l, g0, 1);
    CHECK(U0.rows() == 1);
    CHECK(U0.cols() == 1);
    CHECK(std::abs(U0(0, 0) - 0.125) < 1e-15);

    const auto g = grid_for_epsilon(0.125, {3, 2});
    const SamplingOperator op(l, l.size(), g);
    const auto U = op.materialize();
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < l.size(); c += 7)
            CHECK(std::abs(U(r, c) - measure_atom(l, l.indices()[c], g, g.lattice(r))) < 1e-14);
}

TEST_CASE("matrix-free products match the dense operator") {
    const auto l = build_layout(2, GeneratorSpec{});
    const auto g = grid_for_epsilon(0.125, {5, 4});
    const SamplingOperator op(l, 120, g);
    const auto U = op.materialize();
    std::mt19937_64 rng(1);
    const auto x = random_coefficients(120, rng);
    const auto y = random_coefficients(g.rows(), rng);
    CHECK((op.apply(x) - U * x).norm() < 1e-12 * (U * x).norm());
    CHECK((op.adjoint_apply(y) - U.adjoint() * y).norm() < 1e-12 * (U.adjoint() * y).norm());
    const Eigen::MatrixXcd dense = U.adjoint() * U;
    const Eigen::MatrixXd fast = op.gram();
    CHECK((dense.real() - fast).norm() < 1e-12 * fast.norm());
    CHECK(dense.imag().norm() < 1e-12 * fast.norm());
}

TEST_CASE("incremental Gram accumulation") {
    const auto l = build_layout(2, GeneratorSpec{});
    GramAccumulator acc(l, l.size(), 0.125);
    CHECK(acc.M() == -1);
    for (int M : {0, 3, 7}) {
        acc.extend_to(M);
        const auto ref = SamplingOperator(l, l.size(), grid_for_epsilon(0.125, {M, M})).gram();
        CHECK((acc.gram() - ref).norm() <= 1e-12 * ref.norm());
    }
}

TEST_CASE("Bessel inequality and column norms") {
    const auto l = build_layout(1, GeneratorSpec{});
    const AtomInnerProduct ip(l.spec());
    const auto g = grid_for_epsilon(0.125, {32, 32});
    const SamplingOperator op(l, l.size(), g);
    const auto UtU = op.gram();
    for (std::size_t c = 0; c < l.size(); ++c) {
        const auto& idx = l.indices()[c];
        double direct = 0.0;
        for (std::size_t r = 0; r < g.rows(); ++r) direct += std::norm(measure_atom(l, idx, g, g.lattice(r)));
        CHECK(UtU(c, c) == doctest::Approx(direct).epsilon(1e-12));
        CHECK(UtU(c, c) <= ip.norm2(idx.cone) * (1.0 + 1e-12));
    }

    Eigen::MatrixXd G(l.size(), l.size());
    for (std::size_t p = 0; p < l.size(); ++p)
        for (std::size_t q = 0; q <= p; ++q) G(p, q) = G(q, p) = ip(l.indices()[p], l.indices()[q]);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    double prev = 0.0;
    Eigen::VectorXd x(l.size());
    for (auto& v : x) v = n01(rng);
    x /= std::sqrt(x.dot(G * x));
    for (int M : {2, 4, 8, 16, 32}) {
        const auto UtU_M = SamplingOperator(l, l.size(), grid_for_epsilon(0.125, {M, M})).gram();
        const double energy = x.dot(UtU_M * x);
        CHECK(energy <= 1.0 + 1e-9);
        CHECK(energy >= prev);
        prev = energy;
    }
}

TEST_CASE("measure_function") {
    const auto l = build_layout(1, GeneratorSpec{});
    const auto g = grid_for_epsilon(0.125, {6, 6});
    CHECK(measure_function(l, Eigen::VectorXcd::Zero(l.size()), g).norm() == 0.0);

    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(l.size());
    e[12] = 1.0;
    const auto U = cross_gramian(l, g, l.size());
    CHECK((measure_function(l, e, g) - U.col(12)).norm() < 1e-15);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    Eigen::VectorXd x(l.size());
    for (auto& v : x) v = n01(rng);
    const auto m = measure_function(l, x.cast<cplx>(), g);
    const Box h = l.hull();
    auto f = [&](Vec2 p) {
        double s = 0.0;
        for (std::size_t c = 0; c < l.size(); ++c) s += x[c] * atom_space(l, l.indices()[c], p);
        return s;
    };
    for (Lattice lat : {Lattice{0, 0}, Lattice{3, -2}, Lattice{-6, 5}}) {
        const cplx q = quadrature_measure(f, h, g.epsilon, lat, 160);
        CHECK(std::abs(m[g.row(lat)] - q) < 1e-6 * std::abs(q));
    }
    CHECK_THROWS_AS(measure_function(l, Eigen::VectorXcd::Zero(l.size() + 1), g), Error);
}

TEST_CASE("orthonormality of the sampling family") {
    const SamplingGrid exact = grid_for_epsilon(0.125, {4, 4});
    std::vector<std::pair<Lattice, Lattice>> pairs;
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) pairs.push_back({{a, b}, {0, 1}});
    CHECK(orthonormality_check(exact, pairs) < 1e-14);
    const std::vector<std::pair<Lattice, Lattice>> same{{{2, 3}, {2, 3}}};
    CHECK(orthonormality_check(exact, same) < 1e-15);

    SamplingGrid loose = exact;
    loose.epsilon = 0.9 / 8.0;
    const double dev = orthonormality_check(loose, pairs);
    MESSAGE("deviation at eps = 0.9/(T1+T2): " << dev);
    CHECK(dev > 0.05);
}
