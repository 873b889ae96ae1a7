#pragma once

// Generalized sampling: Gramian of a prefix of the shearlet system, the
// infimum cosine angle between reconstruction and sampling spaces, the stable
// sampling rate and the consistent reconstruction.

#include "shgs/fourier_sampling.hpp"
#include "shgs/inner_product.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>

namespace shgs {

struct Gramian {
    Eigen::MatrixXd G;
    Eigen::VectorXd eigenvalues;  // descending
    Eigen::MatrixXd eigenvectors; // columns match eigenvalues
    double rank_tol = 1e-10;

    std::size_t size() const { return static_cast<std::size_t>(G.rows()); }
    /// Number of eigenvalues above rank_tol * lambda_max.
    std::size_t rank() const;
    /// Smallest retained eigenvalue.
    double lower_bound() const;
    double upper_bound() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
    /// V_r Lambda_r^{-1/2}: maps R^rank onto range(G), orthonormal in the G inner product.
    Eigen::MatrixXd whitening() const;
};

/// Symmetrizes G and diagonalizes it. Throws DegenerateGramian when G is zero.
Gramian make_gramian(Eigen::MatrixXd G, double rank_tol = 1e-10);

/// Exact Gramian of the first N atoms.
Gramian gramian(const SystemLayout& layout, std::size_t N, double rank_tol = 1e-10);

/// <a_i, r_lambda> for arbitrary atoms a_i against the first N layout atoms.
Eigen::MatrixXd atom_inner_products(const SystemLayout& layout, std::size_t N,
                                    std::span<const ShearletIndex> atoms);

struct AngleResult {
    double c = 0.0;
    std::size_t N = 0;
    std::array<int, 2> M{0, 0};
    Eigen::VectorXd witness; // coefficients of a unit-norm minimiser
};

/// c = sqrt of the smallest generalized eigenvalue of (U*U, G) on range(G).
AngleResult cosine_angle(const Eigen::MatrixXd& UtU, const Gramian& G);
AngleResult cosine_angle(const SamplingOperator& U, const Gramian& G);
AngleResult cosine_angle(const Eigen::MatrixXcd& U, const Gramian& G);

struct SearchOptions {
    int start = 1;
    double growth = 2.0;
    int max_M = 1 << 12;
    /// c below this counts as zero when the threshold is zero.
    double zero_tol = 1e-6;
};

struct RateResult {
    std::array<int, 2> M{0, 0};
    double c = 0.0;
    int evaluations = 0;
};

/// Least square M with c_{N,M} > 1/theta at density epsilon. theta may be infinite.
/// Throws SearchBudgetExceeded naming the largest M tried and its c.
RateResult stable_sampling_rate(const SystemLayout& layout, const Gramian& G, double theta, double epsilon,
                                const SearchOptions& options = {});
RateResult stable_sampling_rate(const SystemLayout& layout, std::size_t N, double theta, double epsilon,
                                const SearchOptions& options = {});

struct GsSolution {
    Eigen::VectorXcd coefficients;
    double residual = 0.0;
    /// sqrt(kappa) of U restricted to range(G)
    double condition = 0.0;
    bool ill_conditioned = false;
};

/// Minimum-norm least squares min ||U x - m||.
GsSolution gs_solve(const SamplingOperator& U, const Gramian& G, const Eigen::VectorXcd& measurements);
GsSolution gs_solve(const Eigen::MatrixXcd& U, const Gramian& G, const Eigen::VectorXcd& measurements);

struct Projection {
    Eigen::VectorXd coefficients;
    /// ||P f||^2 = b^T x
    double norm2 = 0.0;
};

/// Coefficients of P_{R_N} f from b = (<f, r_lambda>), minimum norm on range(G).
Projection project_onto_RN(const Eigen::VectorXd& inner_products, const Gramian& G);

} // namespace shgs
