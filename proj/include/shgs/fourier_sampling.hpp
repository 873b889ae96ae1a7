#pragma once

// Uniform Fourier sampling s_l = eps * exp(2 pi i eps <l, x>) on a box and the
// cross-Gramian U[l, lambda] = <r_lambda, s_l> = eps * r_lambda^(eps l).

#include "shgs/shearlet_system.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace shgs {

using Lattice = std::array<int, 2>;

struct SamplingGrid {
    double epsilon = 0.125;
    std::array<int, 2> M{0, 0};
    Vec2 T{4.0, 4.0}; // support box [-T1, T2]^2

    /// (2 M1 + 1)(2 M2 + 1)
    std::size_t rows() const;
    /// Lexicographic position of l in I_M, l1 outer.
    std::size_t row(Lattice l) const;
    Lattice lattice(std::size_t row) const;
    bool contains(Lattice l) const;

    /// Throws InvalidSpec unless 0 < eps <= 1/(T1+T2) and M >= 0.
    void validate() const;
};

/// Box [-T, T]^2 with T the smallest half-integer covering the layout hull,
/// eps = 1/(2T).
SamplingGrid default_grid(const SystemLayout& layout, std::array<int, 2> M);

/// Grid with the given density and the symmetric box of side 1/eps.
SamplingGrid grid_for_epsilon(double epsilon, std::array<int, 2> M);

/// Throws SupportViolation when the support box of idx leaves [-T1, T2]^2.
void check_support(const GeneratorSpec& spec, const ShearletIndex& idx, const SamplingGrid& grid);

/// <r_idx, s_l> = eps * atom_ft(idx, eps l).
cplx measure_atom(const SystemLayout& layout, const ShearletIndex& idx, const SamplingGrid& grid, Lattice l);

/// Closed-form max |<s_l, s_l'> - delta_{l l'}| over the probe pairs, integrating over [-T1, T2]^2.
double orthonormality_check(const SamplingGrid& grid, std::span<const std::pair<Lattice, Lattice>> probes);

/// Matrix-free U for the first N atoms of a layout.
class SamplingOperator {
public:
    SamplingOperator(const SystemLayout& layout, std::size_t N, SamplingGrid grid);

    std::size_t rows() const { return grid_.rows(); }
    std::size_t cols() const { return N_; }
    const SamplingGrid& grid() const { return grid_; }

    cplx entry(std::size_t row, std::size_t col) const;
    /// U x
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    /// U* m
    Eigen::VectorXcd adjoint_apply(const Eigen::VectorXcd& m) const;
    /// U*U, which is real because every atom is real.
    Eigen::MatrixXd gram() const;
    Eigen::MatrixXcd materialize() const;

private:
    const SystemLayout* layout_;
    std::size_t N_;
    SamplingGrid grid_;
    // phase1_(lambda, l1 + M1) = exp(-2 pi i eps t1 l1), likewise phase2_.
    Eigen::MatrixXcd phase1_, phase2_;
    // resp_(g, row) = eps * group_ft(g, eps l)
    Eigen::MatrixXcd resp_;
    std::vector<std::size_t> used_groups_;
    std::vector<int> group_slot_;
};

/// Dense U, rows ordered lexicographically over I_M.
Eigen::MatrixXcd cross_gramian(const SystemLayout& layout, const SamplingGrid& grid, std::size_t N);

/// U * coefficients for a function in the span of the first coefficients.size() atoms.
Eigen::VectorXcd measure_function(const SystemLayout& layout, const Eigen::VectorXcd& coefficients,
                                  const SamplingGrid& grid);

/// Running U*U over growing square grids I_M, for a fixed density.
class GramAccumulator {
public:
    GramAccumulator(const SystemLayout& layout, std::size_t N, double epsilon);

    /// Current M; -1 before the first extension.
    int M() const { return M_; }
    /// Adds the lattice points of I_{M_new} \ I_M.
    void extend_to(int M_new);
    Eigen::MatrixXd gram() const;

private:
    const SystemLayout* layout_;
    std::size_t N_;
    double epsilon_;
    int M_ = -1;
    Eigen::MatrixXd lower_;
};

} // namespace shgs
