#pragma once

// Matrix-free estimate of inf x'Ax / x'Bx for the cosine-angle oracle.
//
// Each sample minimises the quotient exactly over a small subspace spanned by
// the current iterate, its Rayleigh gradient, the previous step and a fresh
// random direction. Only products with A and B are used on the full space.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <random>

namespace testq {

struct OracleTrace {
    double best = 0.0; // smallest sqrt(quotient) seen
    int samples = 0;
    int skipped = 0;
};

using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline OracleTrace random_direction_angle(const MatVec& A, const MatVec& B, Eigen::Index n, int samples,
                                          std::uint64_t seed, double degenerate_tol = 1e-10) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    auto gaussian = [&] {
        Eigen::VectorXd v(n);
        for (auto& e : v) e = g(rng);
        return v;
    };

    // Power iteration for lambda_max(B), used only for the degeneracy test.
    Eigen::VectorXd pv = gaussian().normalized();
    double bmax = 0.0;
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd w = B(pv);
        bmax = w.norm();
        pv = w / bmax;
    }

    OracleTrace tr;
    tr.best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x = gaussian();
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd Ax = A(x), Bx = B(x);
        const double rho = x.dot(Ax) / x.dot(Bx);
        Eigen::MatrixXd S(n, 4);
        S.col(0) = x;
        S.col(1) = Ax - rho * Bx;
        S.col(2) = prev;
        S.col(3) = gaussian();
        // Orthonormalise the basis in the Euclidean sense; drop dependent columns.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(S);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 4);
        Eigen::MatrixXd AQ(n, 4), BQ(n, 4);
        for (int c = 0; c < 4; ++c) {
            AQ.col(c) = A(Q.col(c));
            BQ.col(c) = B(Q.col(c));
        }
        Eigen::MatrixXd a = Q.transpose() * AQ, b = Q.transpose() * BQ;
        a = 0.5 * (a + a.transpose()).eval();
        b = 0.5 * (b + b.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
        Eigen::VectorXd cand = Q * es.eigenvectors().col(0);
        ++tr.samples;
        const double bb = cand.dot(B(cand));
        if (!(bb > degenerate_tol * bmax * cand.squaredNorm())) {
            ++tr.skipped;
            x = gaussian();
            prev.setZero();
            continue;
        }
        // Quotient of the actual candidate vector, not the small problem's eigenvalue.
        const double q = cand.dot(A(cand)) / bb;
        tr.best = std::min(tr.best, std::sqrt(std::max(q, 0.0)));
        prev = cand - x * (x.dot(cand) / x.squaredNorm());
        x = cand / std::sqrt(bb);
    }
    return tr;
}

} // namespace testq
