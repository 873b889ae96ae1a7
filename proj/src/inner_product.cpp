#include "shgs/inner_product.hpp"

#include <cmath>
#include <numbers>

namespace shgs {

namespace {

std::vector<std::array<double, 2>> gauss_legendre01(int n) {
    std::vector<std::array<double, 2>> out(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 50; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-17) break;
        }
        out[i] = {0.5 * (1.0 + z), 1.0 / ((1.0 - z * z) * dp * dp)};
    }
    return out;
}

using Poly = std::vector<Eigen::Vector2d>;

// Sutherland-Hodgman against one half plane coord[axis] * sign <= bound * sign.
Poly clip_axis(const Poly& in, int axis, double bound, bool keep_below) {
    Poly out;
    const std::size_t n = in.size();
    if (n == 0) return out;
    auto inside = [&](const Eigen::Vector2d& p) { return keep_below ? p[axis] <= bound : p[axis] >= bound; };
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& a = in[i];
        const Eigen::Vector2d& b = in[(i + 1) % n];
        const bool ia = inside(a), ib = inside(b);
        if (ia) out.push_back(a);
        if (ia != ib) {
            const double t = (bound - a[axis]) / (b[axis] - a[axis]);
            Eigen::Vector2d c = a + t * (b - a);
            c[axis] = bound;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

AtomInnerProduct::AtomInnerProduct(GeneratorSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    for (auto kind : {GeneratorKind::Scaling, GeneratorKind::Cone1, GeneratorKind::Cone2})
        generators_[static_cast<std::size_t>(kind)] = separable_generator(spec_, kind);

    // Collapsed Gauss rule: exact for total degree 2n-2 on the triangle; the
    // product of two atoms has degree 4(m-1).
    const int degree = 4 * (spec_.spline_order - 1);
    const int n = degree / 2 + 1;
    const auto g = gauss_legendre01(n);
    for (const auto& [s, ws] : g)
        for (const auto& [t, wt] : g) rule_.push_back({s, (1.0 - s) * t, ws * wt * (1.0 - s)});
}

AtomInnerProduct::Atom AtomInnerProduct::atom(const ShearletIndex& idx) const {
    return {atom_matrix(idx), Eigen::Vector2d(idx.m[0], idx.m[1]), atom_normalization(idx),
            &generators_[static_cast<std::size_t>(generator_of(idx.cone))]};
}

double AtomInnerProduct::operator()(const ShearletIndex& p, const ShearletIndex& q) const {
    const Atom a = atom(p), b = atom(q);
    return std::abs(a.B.determinant()) >= std::abs(b.B.determinant()) ? integrate(a, b) : integrate(b, a);
}

double AtomInnerProduct::norm2(Cone cone) const {
    const ShearletIndex idx{cone, 0, 0, {0, 0}};
    return (*this)(idx, idx);
}

double AtomInnerProduct::integrate(const Atom& p, const Atom& q) const {
    // Work in the u-coordinates of p; v = C u + d are the coordinates of q.
    const Eigen::Matrix2d Bp_inv = p.B.inverse();
    const Eigen::Matrix2d C = q.B * Bp_inv;
    const Eigen::Matrix2d C_inv = C.inverse();
    const Eigen::Vector2d d = C * p.m - q.m;
    const double jac = 1.0 / std::abs(p.B.determinant());

    const PiecewisePoly& p1 = p.gen->first;
    const PiecewisePoly& p2 = p.gen->second;
    const PiecewisePoly& q1 = q.gen->first;
    const PiecewisePoly& q2 = q.gen->second;

    double total = 0.0;
    Poly quad(4);
    for (int i1 = 0; i1 < p1.cells(); ++i1)
        for (int i2 = 0; i2 < p2.cells(); ++i2) {
            const double a1 = p1.origin() + p1.width() * i1, b1 = a1 + p1.width();
            const double a2 = p2.origin() + p2.width() * i2, b2 = a2 + p2.width();
            quad[0] = C * Eigen::Vector2d(a1, a2) + d;
            quad[1] = C * Eigen::Vector2d(b1, a2) + d;
            quad[2] = C * Eigen::Vector2d(b1, b2) + d;
            quad[3] = C * Eigen::Vector2d(a1, b2) + d;
            Eigen::Vector2d lo = quad[0], hi = quad[0];
            for (const auto& v : quad) {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
            const int k1lo = std::max(0, static_cast<int>(std::floor((lo[0] - q1.origin()) / q1.width())));
            const int k1hi = std::min(q1.cells() - 1, static_cast<int>(std::floor((hi[0] - q1.origin()) / q1.width())));
            const int k2lo = std::max(0, static_cast<int>(std::floor((lo[1] - q2.origin()) / q2.width())));
            const int k2hi = std::min(q2.cells() - 1, static_cast<int>(std::floor((hi[1] - q2.origin()) / q2.width())));

            for (int k1 = k1lo; k1 <= k1hi; ++k1)
                for (int k2 = k2lo; k2 <= k2hi; ++k2) {
                    const double c1 = q1.origin() + q1.width() * k1, e1 = c1 + q1.width();
                    const double c2 = q2.origin() + q2.width() * k2, e2 = c2 + q2.width();
                    Poly poly = clip_axis(quad, 0, c1, false);
                    poly = clip_axis(poly, 0, e1, true);
                    poly = clip_axis(poly, 1, c2, false);
                    poly = clip_axis(poly, 1, e2, true);
                    if (poly.size() < 3) continue;

                    // Back to u-coordinates and fan triangulation.
                    for (auto& v : poly) v = C_inv * (v - d);
                    for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
                        const Eigen::Vector2d& o = poly[0];
                        const Eigen::Vector2d e = poly[t] - o, f = poly[t + 1] - o;
                        const double area2 = std::abs(e[0] * f[1] - e[1] * f[0]);
                        if (area2 == 0.0) continue;
                        double acc = 0.0;
                        for (const auto& [x, y, w] : rule_) {
                            const Eigen::Vector2d u = o + x * e + y * f;
                            const Eigen::Vector2d v = C * u + d;
                            acc += w * p1.eval_piece(i1, u[0]) * p2.eval_piece(i2, u[1]) *
                                   q1.eval_piece(k1, v[0]) * q2.eval_piece(k2, v[1]);
                        }
                        total += acc * area2;
                    }
                }
        }
    return total * jac * p.norm * q.norm;
}

} // namespace shgs
