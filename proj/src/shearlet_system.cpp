#include "shgs/shearlet_system.hpp"

#include "shgs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace shgs {

const char* to_string(Cone cone) {
    switch (cone) {
    case Cone::Scaling: return "scaling";
    case Cone::Horizontal: return "horizontal";
    case Cone::Vertical: return "vertical";
    }
    return "?";
}

std::size_t ShearletIndexHash::operator()(const ShearletIndex& idx) const noexcept {
    std::size_t h = static_cast<std::size_t>(idx.cone);
    for (int v : {idx.j, idx.k, idx.m[0], idx.m[1]})
        h = h * 1000003u ^ static_cast<std::size_t>(static_cast<unsigned>(v));
    return h;
}

bool Box::intersects(const Box& o, double tol) const {
    return lo[0] <= o.hi[0] + tol && o.lo[0] <= hi[0] + tol && lo[1] <= o.hi[1] + tol &&
           o.lo[1] <= hi[1] + tol;
}

bool Box::contains(const Box& o, double tol) const {
    return lo[0] <= o.lo[0] + tol && lo[1] <= o.lo[1] + tol && o.hi[0] <= hi[0] + tol &&
           o.hi[1] <= hi[1] + tol;
}

int shear_bound(int j) {
    if (j % 2 == 0) return 1 << (j / 2);
    return static_cast<int>(std::ceil(std::ldexp(std::numbers::sqrt2, (j - 1) / 2)));
}

Eigen::Matrix2d scaling_matrix(int j, Cone cone) {
    const double full = std::ldexp(1.0, j);
    const double half = (j % 2 == 0) ? std::ldexp(1.0, j / 2)
                                     : std::ldexp(std::numbers::sqrt2, (j - 1) / 2);
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    if (cone == Cone::Vertical) {
        a(0, 0) = half;
        a(1, 1) = full;
    } else {
        a(0, 0) = full;
        a(1, 1) = half;
    }
    return a;
}

Eigen::Matrix2d atom_matrix(const ShearletIndex& idx) {
    Eigen::Matrix2d s = Eigen::Matrix2d::Identity();
    switch (idx.cone) {
    case Cone::Scaling: return s;
    case Cone::Horizontal: s(0, 1) = idx.k; break;
    case Cone::Vertical: s(1, 0) = idx.k; break;
    }
    return s * scaling_matrix(idx.j, idx.cone);
}

double atom_normalization(const ShearletIndex& idx) {
    return idx.cone == Cone::Scaling ? 1.0 : std::pow(2.0, 0.75 * idx.j);
}

GeneratorKind generator_of(Cone cone) {
    switch (cone) {
    case Cone::Scaling: return GeneratorKind::Scaling;
    case Cone::Horizontal: return GeneratorKind::Cone1;
    case Cone::Vertical: return GeneratorKind::Cone2;
    }
    return GeneratorKind::Scaling;
}

namespace {

Box image_box(const Eigen::Matrix2d& map, const Box& b) {
    Box out{{1e300, 1e300}, {-1e300, -1e300}};
    for (double x : {b.lo[0], b.hi[0]})
        for (double y : {b.lo[1], b.hi[1]}) {
            const Eigen::Vector2d p = map * Eigen::Vector2d(x, y);
            for (int d = 0; d < 2; ++d) {
                out.lo[d] = std::min(out.lo[d], p[d]);
                out.hi[d] = std::max(out.hi[d], p[d]);
            }
        }
    return out;
}

} // namespace

Box support_box(const GeneratorSpec& spec, const ShearletIndex& idx) {
    const double a = spec.support_len();
    const Box cube{{idx.m[0] * 1.0, idx.m[1] * 1.0}, {idx.m[0] + a, idx.m[1] + a}};
    return image_box(atom_matrix(idx).inverse(), cube);
}

SystemLayout::SystemLayout(int J, GeneratorSpec spec) : J_(J), spec_(std::move(spec)) {
    if (J < 1) throw Error(ErrorCode::InvalidSpec, "J must be at least 1");
    spec_.validate();
    for (auto kind : {GeneratorKind::Scaling, GeneratorKind::Cone1, GeneratorKind::Cone2})
        generators_[static_cast<std::size_t>(kind)] = separable_generator(spec_, kind);

    const int a = spec_.support_len();
    const Box cube{{0.0, 0.0}, {a * 1.0, a * 1.0}};

    auto add_group = [&](Cone cone, int j, int k) {
        AtomGroup g;
        g.cone = cone;
        g.j = j;
        g.k = k;
        ShearletIndex probe{cone, j, k, {0, 0}};
        g.B = atom_matrix(probe);
        g.B_inv = g.B.inverse();
        g.norm = atom_normalization(probe);
        groups_.push_back(g);
        return groups_.size() - 1;
    };
    auto push = [&](const ShearletIndex& idx, std::size_t group) {
        lookup_.emplace(idx, indices_.size());
        indices_.push_back(idx);
        group_of_.push_back(group);
        translation_.push_back(groups_[group].B_inv * Eigen::Vector2d(idx.m[0], idx.m[1]));
    };

    const std::size_t scaling_group = add_group(Cone::Scaling, 0, 0);
    for (int m1 = -a; m1 <= a; ++m1)
        for (int m2 = -a; m2 <= a; ++m2) push({Cone::Scaling, 0, 0, {m1, m2}}, scaling_group);

    for (int j = 0; j < J; ++j) {
        const int kmax = shear_bound(j);
        for (int k = -kmax; k <= kmax; ++k)
            for (Cone cone : {Cone::Horizontal, Cone::Vertical}) {
                const std::size_t group = add_group(cone, j, k);
                const Eigen::Matrix2d& B = groups_[group].B;
                // Support box of (j,k,m) is box0 + B^{-1}m; it meets the cube iff
                // B^{-1}m lies in [cube.lo - box0.hi, cube.hi - box0.lo].
                const Box box0 = image_box(groups_[group].B_inv, cube);
                const Box shifts{{cube.lo[0] - box0.hi[0], cube.lo[1] - box0.hi[1]},
                                 {cube.hi[0] - box0.lo[0], cube.hi[1] - box0.lo[1]}};
                const Box cand = image_box(B, shifts);
                const int lo1 = static_cast<int>(std::floor(cand.lo[0])) - 1;
                const int hi1 = static_cast<int>(std::ceil(cand.hi[0])) + 1;
                const int lo2 = static_cast<int>(std::floor(cand.lo[1])) - 1;
                const int hi2 = static_cast<int>(std::ceil(cand.hi[1])) + 1;
                for (int m1 = lo1; m1 <= hi1; ++m1)
                    for (int m2 = lo2; m2 <= hi2; ++m2) {
                        ShearletIndex idx{cone, j, k, {m1, m2}};
                        if (support_box(spec_, idx).intersects(cube)) push(idx, group);
                    }
            }
    }
}

std::optional<std::size_t> SystemLayout::ordinal(const ShearletIndex& idx) const {
    ShearletIndex key = idx;
    if (key.cone == Cone::Scaling) key.j = key.k = 0;
    auto it = lookup_.find(key);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t SystemLayout::require(const ShearletIndex& idx) const {
    auto o = ordinal(idx);
    if (!o) throw Error(ErrorCode::IndexOutOfLayout, "atom is not part of the layout");
    return *o;
}

std::size_t SystemLayout::count_at_scale(int j) const {
    return static_cast<std::size_t>(std::count_if(indices_.begin(), indices_.end(), [j](const auto& i) {
        return i.cone != Cone::Scaling && i.j == j;
    }));
}

Box SystemLayout::hull() const {
    Box h{{1e300, 1e300}, {-1e300, -1e300}};
    for (const auto& idx : indices_) {
        const Box b = support_box(spec_, idx);
        for (int d = 0; d < 2; ++d) {
            h.lo[d] = std::min(h.lo[d], b.lo[d]);
            h.hi[d] = std::max(h.hi[d], b.hi[d]);
        }
    }
    return h;
}

SystemLayout build_layout(int J, const GeneratorSpec& spec) { return SystemLayout(J, spec); }

cplx group_ft(const GeneratorSpec& spec, const AtomGroup& g, Vec2 xi) {
    if (g.cone == Cone::Scaling) return generator_ft(spec, GeneratorKind::Scaling, xi);
    // B^{-T} xi
    const Eigen::Vector2d eta = g.B_inv.transpose() * Eigen::Vector2d(xi[0], xi[1]);
    return generator_ft(spec, generator_of(g.cone), {eta[0], eta[1]}) / g.norm;
}

cplx atom_ft(const GeneratorSpec& spec, const ShearletIndex& idx, Vec2 xi) {
    const Eigen::Matrix2d B_inv = atom_matrix(idx).inverse();
    const Eigen::Vector2d eta = B_inv.transpose() * Eigen::Vector2d(xi[0], xi[1]);
    const double phase = -2.0 * std::numbers::pi * (idx.m[0] * eta[0] + idx.m[1] * eta[1]);
    return std::polar(1.0, phase) * generator_ft(spec, generator_of(idx.cone), {eta[0], eta[1]}) /
           atom_normalization(idx);
}

cplx atom_ft(const SystemLayout& layout, const ShearletIndex& idx, Vec2 xi) {
    layout.require(idx);
    return atom_ft(layout.spec(), idx, xi);
}

double atom_space(const GeneratorSpec& spec, const ShearletIndex& idx, Vec2 x) {
    const Eigen::Vector2d u = atom_matrix(idx) * Eigen::Vector2d(x[0], x[1]) -
                              Eigen::Vector2d(idx.m[0], idx.m[1]);
    return atom_normalization(idx) * generator_space(spec, generator_of(idx.cone), {u[0], u[1]});
}

double atom_space(const SystemLayout& layout, const ShearletIndex& idx, Vec2 x) {
    const std::size_t ord = layout.require(idx);
    const AtomGroup& g = layout.groups()[layout.group_of(ord)];
    const Eigen::Vector2d u = g.B * Eigen::Vector2d(x[0], x[1]) - Eigen::Vector2d(idx.m[0], idx.m[1]);
    const SeparableGenerator& gen = layout.generator(generator_of(idx.cone));
    return g.norm * gen.first(u[0]) * gen.second(u[1]);
}

void write_layout_csv(const SystemLayout& layout, std::ostream& out) {
    out << "ordinal,cone,j,k,m1,m2\n";
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const auto& idx = layout.indices()[i];
        out << i << ',' << to_string(idx.cone) << ',' << idx.j << ',' << idx.k << ',' << idx.m[0]
            << ',' << idx.m[1] << '\n';
    }
}

} // namespace shgs
