#include "shgs/fourier_sampling.hpp"

#include "shgs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shgs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Adds sum over the given points of conj(u_l) u_l^T to the lower triangle, where
// every non-origin point stands for the pair {l, -l}.
void accumulate(const SystemLayout& layout, std::size_t N, double eps, const std::vector<Lattice>& points,
                Eigen::MatrixXd& lower) {
    constexpr std::size_t kBlock = 1024;
    const auto& groups = layout.groups();
    std::vector<cplx> resp(groups.size());
    std::size_t max_group = 0;
    for (std::size_t c = 0; c < N; ++c) max_group = std::max(max_group, layout.group_of(c));

    Eigen::MatrixXd Z(N, 2 * kBlock);
    for (std::size_t start = 0; start < points.size(); start += kBlock) {
        const std::size_t count = std::min(kBlock, points.size() - start);
        Z.setZero();
        for (std::size_t b = 0; b < count; ++b) {
            const Lattice l = points[start + b];
            const Vec2 xi{eps * l[0], eps * l[1]};
            for (std::size_t g = 0; g <= max_group; ++g) resp[g] = eps * group_ft(layout.spec(), groups[g], xi);
            const double w = (l[0] == 0 && l[1] == 0) ? 1.0 : std::numbers::sqrt2;
            for (std::size_t c = 0; c < N; ++c) {
                const Eigen::Vector2d& t = layout.translation(c);
                const cplx v = resp[layout.group_of(c)] * std::polar(w, -kTwoPi * (t[0] * xi[0] + t[1] * xi[1]));
                Z(c, 2 * b) = v.real();
                Z(c, 2 * b + 1) = v.imag();
            }
        }
        lower.selfadjointView<Eigen::Lower>().rankUpdate(Z.leftCols(2 * count));
    }
}

bool in_half_lattice(Lattice l) { return l[0] > 0 || (l[0] == 0 && l[1] > 0); }

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& lower) {
    Eigen::MatrixXd full = lower.selfadjointView<Eigen::Lower>();
    return full;
}

} // namespace

std::size_t SamplingGrid::rows() const {
    return static_cast<std::size_t>(2 * M[0] + 1) * static_cast<std::size_t>(2 * M[1] + 1);
}

std::size_t SamplingGrid::row(Lattice l) const {
    return static_cast<std::size_t>(l[0] + M[0]) * static_cast<std::size_t>(2 * M[1] + 1) +
           static_cast<std::size_t>(l[1] + M[1]);
}

Lattice SamplingGrid::lattice(std::size_t r) const {
    const auto w = static_cast<std::size_t>(2 * M[1] + 1);
    return {static_cast<int>(r / w) - M[0], static_cast<int>(r % w) - M[1]};
}

bool SamplingGrid::contains(Lattice l) const {
    return std::abs(l[0]) <= M[0] && std::abs(l[1]) <= M[1];
}

void SamplingGrid::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidSpec, "epsilon must lie in (0, 1]");
    if (M[0] < 0 || M[1] < 0) throw Error(ErrorCode::InvalidSpec, "grid sizes must be non-negative");
    if (!(T[0] > 0.0 && T[1] > 0.0)) throw Error(ErrorCode::InvalidSpec, "box extents must be positive");
    if (epsilon * (T[0] + T[1]) > 1.0 + 1e-12)
        throw Error(ErrorCode::InvalidSpec, "epsilon exceeds 1/(T1+T2)");
}

SamplingGrid default_grid(const SystemLayout& layout, std::array<int, 2> M) {
    const Box h = layout.hull();
    const double reach = std::max({-h.lo[0], -h.lo[1], h.hi[0], h.hi[1], 0.5});
    const double T = std::ceil(2.0 * reach - 1e-12) / 2.0;
    SamplingGrid g{1.0 / (2.0 * T), M, {T, T}};
    g.validate();
    return g;
}

SamplingGrid grid_for_epsilon(double epsilon, std::array<int, 2> M) {
    SamplingGrid g{epsilon, M, {0.5 / epsilon, 0.5 / epsilon}};
    g.validate();
    return g;
}

void check_support(const GeneratorSpec& spec, const ShearletIndex& idx, const SamplingGrid& grid) {
    const Box box{{-grid.T[0], -grid.T[0]}, {grid.T[1], grid.T[1]}};
    if (!box.contains(support_box(spec, idx), 1e-12))
        throw Error(ErrorCode::SupportViolation, "atom support leaves the sampling box");
}

cplx measure_atom(const SystemLayout& layout, const ShearletIndex& idx, const SamplingGrid& grid, Lattice l) {
    layout.require(idx);
    check_support(layout.spec(), idx, grid);
    return grid.epsilon * atom_ft(layout.spec(), idx, {grid.epsilon * l[0], grid.epsilon * l[1]});
}

double orthonormality_check(const SamplingGrid& grid, std::span<const std::pair<Lattice, Lattice>> probes) {
    // int_{-T1}^{T2} exp(2 pi i a x) dx
    auto line = [&](double a) -> cplx {
        const double len = grid.T[0] + grid.T[1];
        if (a == 0.0) return len;
        const cplx num = std::polar(1.0, kTwoPi * a * grid.T[1]) - std::polar(1.0, -kTwoPi * a * grid.T[0]);
        return num / cplx(0.0, kTwoPi * a);
    };
    double worst = 0.0;
    const double e = grid.epsilon;
    for (const auto& [l, lp] : probes) {
        const cplx ip = e * e * line(e * (l[0] - lp[0])) * line(e * (l[1] - lp[1]));
        const double target = (l == lp) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(ip - target));
    }
    return worst;
}

SamplingOperator::SamplingOperator(const SystemLayout& layout, std::size_t N, SamplingGrid grid)
    : layout_(&layout), N_(N), grid_(grid) {
    grid_.validate();
    if (N > layout.size()) throw Error(ErrorCode::DimensionMismatch, "prefix longer than the layout");
    for (std::size_t c = 0; c < N; ++c) check_support(layout.spec(), layout.indices()[c], grid_);

    const double e = grid_.epsilon;
    const int M1 = grid_.M[0], M2 = grid_.M[1];
    phase1_.resize(static_cast<Eigen::Index>(N), 2 * M1 + 1);
    phase2_.resize(static_cast<Eigen::Index>(N), 2 * M2 + 1);
    for (std::size_t c = 0; c < N; ++c) {
        const Eigen::Vector2d& t = layout.translation(c);
        for (int l = -M1; l <= M1; ++l) phase1_(c, l + M1) = std::polar(1.0, -kTwoPi * e * t[0] * l);
        for (int l = -M2; l <= M2; ++l) phase2_(c, l + M2) = std::polar(1.0, -kTwoPi * e * t[1] * l);
    }

    group_slot_.assign(layout.groups().size(), -1);
    for (std::size_t c = 0; c < N; ++c) {
        const std::size_t g = layout.group_of(c);
        if (group_slot_[g] < 0) {
            group_slot_[g] = static_cast<int>(used_groups_.size());
            used_groups_.push_back(g);
        }
    }
    resp_.resize(static_cast<Eigen::Index>(used_groups_.size()), static_cast<Eigen::Index>(grid_.rows()));
    for (std::size_t r = 0; r < grid_.rows(); ++r) {
        const Lattice l = grid_.lattice(r);
        for (std::size_t s = 0; s < used_groups_.size(); ++s)
            resp_(s, r) = e * group_ft(layout.spec(), layout.groups()[used_groups_[s]], {e * l[0], e * l[1]});
    }
}

cplx SamplingOperator::entry(std::size_t r, std::size_t c) const {
    const Lattice l = grid_.lattice(r);
    return resp_(group_slot_[layout_->group_of(c)], r) * phase1_(c, l[0] + grid_.M[0]) *
           phase2_(c, l[1] + grid_.M[1]);
}

Eigen::VectorXcd SamplingOperator::apply(const Eigen::VectorXcd& x) const {
    if (static_cast<std::size_t>(x.size()) != N_) throw Error(ErrorCode::DimensionMismatch, "apply: wrong length");
    const int M1 = grid_.M[0], M2 = grid_.M[1];
    Eigen::VectorXcd out(static_cast<Eigen::Index>(rows()));
    Eigen::MatrixXcd per_group(static_cast<Eigen::Index>(used_groups_.size()), 2 * M2 + 1);
    for (int l1 = -M1; l1 <= M1; ++l1) {
        // per_group(s, l2) = sum over atoms of group s of x * phase1 * phase2
        per_group.setZero();
        for (std::size_t c = 0; c < N_; ++c) {
            const cplx a = x[c] * phase1_(c, l1 + M1);
            per_group.row(group_slot_[layout_->group_of(c)]) += a * phase2_.row(c);
        }
        for (int l2 = -M2; l2 <= M2; ++l2) {
            const std::size_t r = grid_.row({l1, l2});
            out[r] = resp_.col(r).cwiseProduct(per_group.col(l2 + M2)).sum();
        }
    }
    return out;
}

Eigen::VectorXcd SamplingOperator::adjoint_apply(const Eigen::VectorXcd& m) const {
    if (static_cast<std::size_t>(m.size()) != rows())
        throw Error(ErrorCode::DimensionMismatch, "adjoint_apply: wrong length");
    const int M1 = grid_.M[0], M2 = grid_.M[1];
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N_));
    // weighted(s, l2) = conj(resp) * m for the current l1 row
    Eigen::MatrixXcd weighted(static_cast<Eigen::Index>(used_groups_.size()), 2 * M2 + 1);
    for (int l1 = -M1; l1 <= M1; ++l1) {
        for (int l2 = -M2; l2 <= M2; ++l2) {
            const std::size_t r = grid_.row({l1, l2});
            weighted.col(l2 + M2) = resp_.col(r).conjugate() * m[r];
        }
        for (std::size_t c = 0; c < N_; ++c) {
            const cplx s = (weighted.row(group_slot_[layout_->group_of(c)]).transpose().array() *
                            phase2_.row(c).transpose().conjugate().array())
                               .sum();
            out[c] += std::conj(phase1_(c, l1 + M1)) * s;
        }
    }
    return out;
}

Eigen::MatrixXd SamplingOperator::gram() const {
    std::vector<Lattice> points;
    for (std::size_t r = 0; r < rows(); ++r) {
        const Lattice l = grid_.lattice(r);
        if (in_half_lattice(l) || (l[0] == 0 && l[1] == 0)) points.push_back(l);
    }
    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N_), static_cast<Eigen::Index>(N_));
    accumulate(*layout_, N_, grid_.epsilon, points, lower);
    return symmetrize(lower);
}

Eigen::MatrixXcd SamplingOperator::materialize() const {
    Eigen::MatrixXcd U(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(N_));
    for (std::size_t c = 0; c < N_; ++c)
        for (std::size_t r = 0; r < rows(); ++r) U(r, c) = entry(r, c);
    return U;
}

Eigen::MatrixXcd cross_gramian(const SystemLayout& layout, const SamplingGrid& grid, std::size_t N) {
    return SamplingOperator(layout, N, grid).materialize();
}

Eigen::VectorXcd measure_function(const SystemLayout& layout, const Eigen::VectorXcd& coefficients,
                                  const SamplingGrid& grid) {
    if (static_cast<std::size_t>(coefficients.size()) > layout.size())
        throw Error(ErrorCode::DimensionMismatch, "more coefficients than atoms");
    if (!coefficients.allFinite()) throw Error(ErrorCode::InvalidSpec, "coefficients must be finite");
    return SamplingOperator(layout, static_cast<std::size_t>(coefficients.size()), grid).apply(coefficients);
}

GramAccumulator::GramAccumulator(const SystemLayout& layout, std::size_t N, double epsilon)
    : layout_(&layout), N_(N), epsilon_(epsilon),
      lower_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N))) {
    if (N > layout.size()) throw Error(ErrorCode::DimensionMismatch, "prefix longer than the layout");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::InvalidSpec, "epsilon must lie in (0, 1]");
}

void GramAccumulator::extend_to(int M_new) {
    if (M_new <= M_) return;
    std::vector<Lattice> points;
    for (int l1 = 0; l1 <= M_new; ++l1)
        for (int l2 = -M_new; l2 <= M_new; ++l2) {
            const Lattice l{l1, l2};
            if (!(in_half_lattice(l) || (l1 == 0 && l2 == 0))) continue;
            if (std::max(std::abs(l1), std::abs(l2)) <= M_) continue;
            points.push_back(l);
        }
    accumulate(*layout_, N_, epsilon_, points, lower_);
    M_ = M_new;
}

Eigen::MatrixXd GramAccumulator::gram() const { return symmetrize(lower_); }

} // namespace shgs
