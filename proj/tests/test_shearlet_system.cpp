#include "shgs/error.hpp"
#include "shgs/shearlet_system.hpp"

#include "quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

using namespace shgs;

namespace {

// Support box from explicit corner formulas, without Eigen.
Box oracle_box(const ShearletIndex& idx, double a) {
    double b11 = 1, b12 = 0, b21 = 0, b22 = 1;
    if (idx.cone != Cone::Scaling) {
        const double full = std::pow(2.0, idx.j), half = std::pow(2.0, idx.j / 2.0);
        if (idx.cone == Cone::Horizontal) {
            b11 = full;
            b12 = idx.k * half;
            b22 = half;
        } else {
            b11 = half;
            b21 = idx.k * half;
            b22 = full;
        }
    }
    const double det = b11 * b22 - b12 * b21;
    Box box{{1e300, 1e300}, {-1e300, -1e300}};
    for (double u : {0.0, a})
        for (double v : {0.0, a}) {
            const double p = u + idx.m[0], q = v + idx.m[1];
            const double x = (b22 * p - b12 * q) / det, y = (-b21 * p + b11 * q) / det;
            box.lo = {std::min(box.lo[0], x), std::min(box.lo[1], y)};
            box.hi = {std::max(box.hi[0], x), std::max(box.hi[1], y)};
        }
    return box;
}

// Brute-force enumeration over a generous window of translations.
std::size_t oracle_count(int J, double a) {
    const double tol = 1e-12;
    std::size_t n = static_cast<std::size_t>((2 * a + 1) * (2 * a + 1));
    for (int j = 0; j < J; ++j) {
        const int kmax = static_cast<int>(std::ceil(std::pow(2.0, j / 2.0) - 1e-12));
        const int w = (1 << j) * static_cast<int>(a) * 4 + 8;
        for (int k = -kmax; k <= kmax; ++k)
            for (Cone c : {Cone::Horizontal, Cone::Vertical})
                for (int m1 = -w; m1 <= w; ++m1)
                    for (int m2 = -w; m2 <= w; ++m2) {
                        const Box b = oracle_box({c, j, k, {m1, m2}}, a);
                        if (b.lo[0] <= a + tol && b.hi[0] >= -tol && b.lo[1] <= a + tol && b.hi[1] >= -tol) ++n;
                    }
    }
    return n;
}

double box_quadrature(const SystemLayout& layout, const ShearletIndex& p, const ShearletIndex& q,
                      const Box& region, int panels) {
    const auto rx = testq::composite(region.lo[0], region.hi[0], panels, 4);
    const auto ry = testq::composite(region.lo[1], region.hi[1], panels, 4);
    double acc = 0.0;
    for (std::size_t i = 0; i < rx.x.size(); ++i)
        for (std::size_t j = 0; j < ry.x.size(); ++j) {
            const Vec2 x{rx.x[i], ry.x[j]};
            acc += rx.w[i] * ry.w[j] * atom_space(layout, p, x) * atom_space(layout, q, x);
        }
    return acc;
}

} // namespace

TEST_CASE("scaling matrices and shear bounds") {
    const auto a = scaling_matrix(2, Cone::Horizontal);
    CHECK(a(0, 0) == 4.0);
    CHECK(a(1, 1) == 2.0);
    CHECK(a(0, 1) == 0.0);
    CHECK(scaling_matrix(0, Cone::Vertical).isIdentity());
    CHECK(scaling_matrix(0, Cone::Horizontal).isIdentity());
    const auto v = scaling_matrix(3, Cone::Vertical);
    CHECK(v(0, 0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
    CHECK(v(1, 1) == 8.0);

    for (int j = 0; j < 12; ++j)
        CHECK(shear_bound(j) == static_cast<int>(std::ceil(std::pow(2.0, j / 2.0) - 1e-12)));
    CHECK(shear_bound(0) == 1);
    CHECK(shear_bound(1) == 2);
    CHECK(shear_bound(3) == 3);
}

TEST_CASE("support boxes") {
    GeneratorSpec spec;
    const Box s = support_box(spec, {Cone::Scaling, 0, 0, {0, 0}});
    CHECK(s.lo == Vec2{0.0, 0.0});
    CHECK(s.hi == Vec2{1.0, 1.0});
    const Box h = support_box(spec, {Cone::Horizontal, 2, 0, {0, 0}});
    CHECK(h.lo[0] == doctest::Approx(0.0));
    CHECK(h.hi[0] == doctest::Approx(0.25));
    CHECK(h.hi[1] == doctest::Approx(0.5));

    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const int j = static_cast<int>(rng() % 5);
        const int kb = shear_bound(j);
        const int k = static_cast<int>(rng() % (2 * kb + 1)) - kb;
        const Cone c = (rng() % 2) ? Cone::Horizontal : Cone::Vertical;
        const ShearletIndex idx{c, j, k, {static_cast<int>(rng() % 21) - 10, static_cast<int>(rng() % 21) - 10}};
        const Box got = support_box(spec, idx), want = oracle_box(idx, 1.0);
        for (int d = 0; d < 2; ++d) {
            CHECK(got.lo[d] == doctest::Approx(want.lo[d]).epsilon(1e-13));
            CHECK(got.hi[d] == doctest::Approx(want.hi[d]).epsilon(1e-13));
        }
    }
}

TEST_CASE("layout enumeration") {
    GeneratorSpec spec;
    const auto l1 = build_layout(1, spec);
    std::set<int> shears;
    std::size_t scaling = 0;
    for (const auto& idx : l1.indices()) {
        if (idx.cone == Cone::Scaling) ++scaling;
        if (idx.cone == Cone::Horizontal) {
            CHECK(idx.j == 0);
            shears.insert(idx.k);
        }
    }
    CHECK(scaling == 9);
    CHECK(shears == std::set<int>{-1, 0, 1});

    for (int J = 1; J <= 3; ++J) CHECK(build_layout(J, spec).size() == oracle_count(J, 1.0));

    const auto again = build_layout(3, spec);
    CHECK(again.indices() == build_layout(3, spec).indices());
    CHECK_THROWS_AS(build_layout(0, spec), Error);
}

TEST_CASE("layout ordering") {
    const auto l = build_layout(3, GeneratorSpec{});
    const auto& ix = l.indices();
    auto key = [](const ShearletIndex& i) {
        const int cone = i.cone == Cone::Scaling ? 0 : 1;
        const int vert = i.cone == Cone::Vertical ? 1 : 0;
        return std::make_tuple(cone, i.j, i.k, vert, i.m[0], i.m[1]);
    };
    for (std::size_t n = 1; n < ix.size(); ++n) CHECK(key(ix[n - 1]) < key(ix[n]));
    for (std::size_t n = 0; n < ix.size(); ++n) CHECK(l.ordinal(ix[n]) == n);
    CHECK_FALSE(l.ordinal({Cone::Horizontal, 0, 0, {50, 50}}).has_value());
    try {
        l.require({Cone::Horizontal, 0, 0, {50, 50}});
        FAIL("expected IndexOutOfLayout");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfLayout);
    }
}

// Boundary atoms dominate the counts at J = 2, 3, where the ratio is about 2.25.
TEST_CASE("total count ratio" * doctest::may_fail()) {
    GeneratorSpec spec;
    std::vector<std::size_t> N;
    for (int J = 1; J <= 6; ++J) N.push_back(build_layout(J, spec).size());
    for (int J = 2; J < 6; ++J) {
        const double ratio = static_cast<double>(N[J]) / static_cast<double>(N[J - 1]);
        MESSAGE("N_" << J + 1 << "/N_" << J << " = " << ratio);
        CHECK(ratio >= 2.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("per-scale count ratio") {
    const auto l = build_layout(7, GeneratorSpec{});
    for (int j = 2; j < 6; ++j) {
        const double ratio = static_cast<double>(l.count_at_scale(j + 1)) / l.count_at_scale(j);
        CHECK(ratio >= 2.0);
        CHECK(ratio <= 3.6);
    }
}

TEST_CASE("atom evaluation") {
    GeneratorSpec spec;
    const auto l = build_layout(3, spec);
    const ShearletIndex s0{Cone::Scaling, 0, 0, {0, 0}};
    CHECK(std::abs(atom_ft(l, s0, {0.0, 0.0}) - 1.0) < 1e-15);

    const ShearletIndex h0{Cone::Horizontal, 0, 0, {0, 0}};
    for (Vec2 x : {Vec2{0.3, 0.4}, Vec2{0.77, 0.12}})
        CHECK(atom_space(l, h0, x) == doctest::Approx(generator_space(spec, GeneratorKind::Cone1, x)).epsilon(1e-14));

    // Translation only changes the phase.
    for (const auto& idx : l.indices()) {
        ShearletIndex base = idx;
        base.m = {0, 0};
        const Vec2 xi{1.7, -0.6};
        CHECK(std::abs(atom_ft(spec, idx, xi)) == doctest::Approx(std::abs(atom_ft(spec, base, xi))).epsilon(1e-13));
    }

    // Zero outside the support box.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 3.0);
    for (const auto& idx : l.indices()) {
        const Box b = support_box(spec, idx);
        for (int t = 0; t < 20; ++t) {
            const Vec2 x{u(rng), u(rng)};
            if (x[0] < b.lo[0] || x[0] > b.hi[0] || x[1] < b.lo[1] || x[1] > b.hi[1])
                CHECK(atom_space(l, idx, x) == 0.0);
        }
        CHECK(atom_space(spec, idx, {0.37, 0.61}) == doctest::Approx(atom_space(l, idx, {0.37, 0.61})));
    }
    CHECK_THROWS_AS(atom_ft(l, {Cone::Vertical, 0, 0, {99, 0}}, {0.0, 0.0}), Error);
}

TEST_CASE("atom_ft matches spatial quadrature of the dilated atom") {
    GeneratorSpec spec;
    const auto l = build_layout(2, spec);
    for (const ShearletIndex idx : {ShearletIndex{Cone::Horizontal, 1, 1, {0, 0}},
                                    ShearletIndex{Cone::Vertical, 1, -1, {1, 0}},
                                    ShearletIndex{Cone::Scaling, 0, 0, {1, -1}}}) {
        if (!l.ordinal(idx)) continue;
        const Box b = support_box(spec, idx);
        const auto rx = testq::composite(b.lo[0], b.hi[0], 256, 4);
        const auto ry = testq::composite(b.lo[1], b.hi[1], 256, 4);
        for (const Vec2 xi : {Vec2{1.0, 1.0}, Vec2{-3.5, 2.25}, Vec2{7.0, 0.5}}) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t i = 0; i < rx.x.size(); ++i)
                for (std::size_t j = 0; j < ry.x.size(); ++j) {
                    const double v = atom_space(l, idx, {rx.x[i], ry.x[j]});
                    if (v != 0.0)
                        acc += rx.w[i] * ry.w[j] * v *
                               std::polar(1.0, -2.0 * std::numbers::pi * (rx.x[i] * xi[0] + ry.x[j] * xi[1]));
                }
            const auto exact = atom_ft(l, idx, xi);
            CHECK(std::abs(exact - acc) <= 1e-8 * std::abs(acc) + 1e-12);
        }
    }
}

TEST_CASE("L2 isometry of the normalization") {
    GeneratorSpec spec;
    const auto l = build_layout(3, spec);
    const ShearletIndex ref{Cone::Horizontal, 0, 0, {0, 0}};
    const double psi_norm2 = box_quadrature(l, ref, ref, support_box(spec, ref), 200);
    for (const ShearletIndex idx : {ShearletIndex{Cone::Horizontal, 2, 1, {3, 1}},
                                    ShearletIndex{Cone::Vertical, 1, 2, {0, 0}},
                                    ShearletIndex{Cone::Vertical, 2, -2, {1, 2}}}) {
        REQUIRE(l.ordinal(idx).has_value());
        const double n2 = box_quadrature(l, idx, idx, support_box(spec, idx), 200);
        CHECK(n2 == doctest::Approx(psi_norm2).epsilon(1e-6));
    }
}

TEST_CASE("spatial and frequency inner products agree") {
    GeneratorSpec spec;
    const auto l = build_layout(2, spec);
    const Box hull = l.hull();
    // Fourier series on a box of side 1/eps containing every support.
    const double eps = 0.125;
    REQUIRE(hull.hi[0] - hull.lo[0] <= 1.0 / eps);
    REQUIRE(hull.hi[1] - hull.lo[1] <= 1.0 / eps);
    const int L = 640;

    std::mt19937_64 rng(17);
    int done = 0;
    while (done < 20) {
        const auto& p = l.indices()[rng() % l.size()];
        const auto& q = l.indices()[rng() % l.size()];
        const Box bp = support_box(spec, p), bq = support_box(spec, q);
        if (!bp.intersects(bq)) continue;
        const Box region{{std::max(bp.lo[0], bq.lo[0]), std::max(bp.lo[1], bq.lo[1])},
                         {std::min(bp.hi[0], bq.hi[0]), std::min(bp.hi[1], bq.hi[1])}};
        if (region.hi[0] - region.lo[0] < 1e-9 || region.hi[1] - region.lo[1] < 1e-9) continue;
        ++done;
        const double spatial = box_quadrature(l, p, q, region, 300);
        std::complex<double> freq{0.0, 0.0};
        for (int a = -L; a <= L; ++a)
            for (int b = -L; b <= L; ++b) {
                const Vec2 xi{eps * a, eps * b};
                freq += atom_ft(spec, p, xi) * std::conj(atom_ft(spec, q, xi));
            }
        freq *= eps * eps;
        const double np = std::sqrt(box_quadrature(l, p, p, bp, 200));
        const double nq = std::sqrt(box_quadrature(l, q, q, bq, 200));
        CHECK(std::abs(freq.imag()) < 1e-6 * np * nq);
        CHECK(std::abs(freq.real() - spatial) < 1e-6 * np * nq);
    }
}

TEST_CASE("layout csv") {
    const auto l = build_layout(1, GeneratorSpec{});
    std::ostringstream os;
    write_layout_csv(l, os);
    const std::string s = os.str();
    CHECK(s.rfind("ordinal,cone,j,k,m1,m2\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(l.size() + 1));
    CHECK(s.find("0,scaling,0,0,-1,-1\n") != std::string::npos);
}
