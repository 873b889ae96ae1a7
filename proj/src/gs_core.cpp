#include "shgs/gs_core.hpp"

#include "shgs/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace shgs {

std::size_t Gramian::rank() const {
    if (eigenvalues.size() == 0) return 0;
    const double cut = rank_tol * eigenvalues[0];
    std::size_t r = 0;
    while (r < static_cast<std::size_t>(eigenvalues.size()) && eigenvalues[static_cast<Eigen::Index>(r)] > cut) ++r;
    return r;
}

double Gramian::lower_bound() const {
    const std::size_t r = rank();
    if (r == 0) throw Error(ErrorCode::DegenerateGramian, "no eigenvalue above tolerance");
    return eigenvalues[static_cast<Eigen::Index>(r - 1)];
}

Eigen::MatrixXd Gramian::whitening() const {
    const auto r = static_cast<Eigen::Index>(rank());
    if (r == 0) throw Error(ErrorCode::DegenerateGramian, "no eigenvalue above tolerance");
    return eigenvectors.leftCols(r) * eigenvalues.head(r).cwiseSqrt().cwiseInverse().asDiagonal();
}

Gramian make_gramian(Eigen::MatrixXd G, double rank_tol) {
    Gramian out;
    out.rank_tol = rank_tol;
    out.G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.G);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::DegenerateGramian, "eigensolver failed");
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    if (out.eigenvalues.size() == 0 || !(out.eigenvalues[0] > 0.0))
        throw Error(ErrorCode::DegenerateGramian, "Gramian has no positive eigenvalue");
    return out;
}

Gramian gramian(const SystemLayout& layout, std::size_t N, double rank_tol) {
    if (N > layout.size()) throw Error(ErrorCode::DimensionMismatch, "prefix longer than the layout");
    const AtomInnerProduct ip(layout.spec());
    const auto& ix = layout.indices();
    std::vector<Box> boxes(N);
    for (std::size_t i = 0; i < N; ++i) boxes[i] = support_box(layout.spec(), ix[i]);

    // Atoms of one group differ by translation, so their products depend on m - m' only.
    std::map<std::tuple<std::size_t, int, int>, double> same_group;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t p = 0; p < N; ++p)
        for (std::size_t q = 0; q <= p; ++q) {
            if (!boxes[p].intersects(boxes[q], -1e-12)) continue;
            double v;
            if (layout.group_of(p) == layout.group_of(q)) {
                const auto key = std::make_tuple(layout.group_of(p), ix[p].m[0] - ix[q].m[0], ix[p].m[1] - ix[q].m[1]);
                auto it = same_group.find(key);
                if (it == same_group.end()) it = same_group.emplace(key, ip(ix[p], ix[q])).first;
                v = it->second;
            } else {
                v = ip(ix[p], ix[q]);
            }
            G(p, q) = G(q, p) = v;
        }
    return make_gramian(std::move(G), rank_tol);
}

Eigen::MatrixXd atom_inner_products(const SystemLayout& layout, std::size_t N, std::span<const ShearletIndex> atoms) {
    if (N > layout.size()) throw Error(ErrorCode::DimensionMismatch, "prefix longer than the layout");
    const AtomInnerProduct ip(layout.spec());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(atoms.size()), static_cast<Eigen::Index>(N));
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const Box ba = support_box(layout.spec(), atoms[a]);
        for (std::size_t c = 0; c < N; ++c)
            if (ba.intersects(support_box(layout.spec(), layout.indices()[c]), -1e-12))
                out(a, c) = ip(atoms[a], layout.indices()[c]);
    }
    return out;
}

AngleResult cosine_angle(const Eigen::MatrixXd& UtU, const Gramian& G) {
    if (UtU.rows() != UtU.cols() || static_cast<std::size_t>(UtU.rows()) != G.size())
        throw Error(ErrorCode::DimensionMismatch, "U*U and G differ in size");
    const Eigen::MatrixXd W = G.whitening();
    Eigen::MatrixXd K = W.transpose() * UtU.selfadjointView<Eigen::Lower>() * W;
    K = 0.5 * (K + K.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    AngleResult out;
    out.N = G.size();
    out.c = std::sqrt(std::max(es.eigenvalues()[0], 0.0));
    out.witness = W * es.eigenvectors().col(0);
    return out;
}

AngleResult cosine_angle(const SamplingOperator& U, const Gramian& G) {
    auto out = cosine_angle(U.gram(), G);
    out.M = U.grid().M;
    return out;
}

AngleResult cosine_angle(const Eigen::MatrixXcd& U, const Gramian& G) {
    if (static_cast<std::size_t>(U.cols()) != G.size()) throw Error(ErrorCode::DimensionMismatch, "U and G differ");
    const Eigen::MatrixXd UtU = (U.adjoint() * U).real();
    return cosine_angle(UtU, G);
}

namespace {

double angle_from(const GramAccumulator& acc, const Eigen::MatrixXd& W) {
    Eigen::MatrixXd K = W.transpose() * acc.gram() * W;
    K = 0.5 * (K + K.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(es.eigenvalues()[0], 0.0));
}

} // namespace

RateResult stable_sampling_rate(const SystemLayout& layout, const Gramian& G, double theta, double epsilon,
                                const SearchOptions& options) {
    if (!(theta > 1.0)) throw Error(ErrorCode::InvalidSpec, "theta must exceed 1");
    if (options.start < 0 || !(options.growth > 1.0)) throw Error(ErrorCode::InvalidSpec, "bad search options");
    const double threshold = std::isinf(theta) ? 0.0 : 1.0 / theta;
    auto passes = [&](double c) { return threshold > 0.0 ? c > threshold : c > options.zero_tol; };

    const Eigen::MatrixXd W = G.whitening();
    RateResult res;
    GramAccumulator lo_acc(layout, G.size(), epsilon);
    int lo = -1; // largest M known to fail
    int M = options.start;
    GramAccumulator acc = lo_acc;
    double c = 0.0;
    while (true) {
        acc.extend_to(M);
        c = angle_from(acc, W);
        ++res.evaluations;
        if (passes(c)) break;
        lo = M;
        lo_acc = acc;
        if (M >= options.max_M) {
            std::ostringstream os;
            os << "no M <= " << options.max_M << " reaches c > " << threshold << "; largest M tried " << M
               << " has c = " << c;
            throw Error(ErrorCode::SearchBudgetExceeded, os.str());
        }
        M = std::min(options.max_M, std::max(M + 1, static_cast<int>(std::ceil(M * options.growth))));
    }
    int hi = M;
    double c_hi = c;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        GramAccumulator trial = lo_acc;
        trial.extend_to(mid);
        const double cm = angle_from(trial, W);
        ++res.evaluations;
        if (passes(cm)) {
            hi = mid;
            c_hi = cm;
        } else {
            lo = mid;
            lo_acc = std::move(trial);
        }
    }
    res.M = {hi, hi};
    res.c = c_hi;
    return res;
}

RateResult stable_sampling_rate(const SystemLayout& layout, std::size_t N, double theta, double epsilon,
                                const SearchOptions& options) {
    return stable_sampling_rate(layout, gramian(layout, N), theta, epsilon, options);
}

namespace {

GsSolution solve_normal(const Eigen::MatrixXd& UtU, const Eigen::VectorXcd& Ustar_m, const Gramian& G) {
    const Eigen::MatrixXd W = G.whitening();
    Eigen::MatrixXd K = W.transpose() * UtU * W;
    K = 0.5 * (K + K.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    const Eigen::VectorXd ev = es.eigenvalues();
    GsSolution sol;
    const double lmin = std::max(ev[0], 0.0), lmax = ev[ev.size() - 1];
    sol.condition = lmin > 0.0 ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();
    sol.ill_conditioned = !(sol.condition <= 1e8);
    // K^{-1} through the eigenbasis; directions with zero response are dropped.
    Eigen::VectorXcd rhs = es.eigenvectors().transpose() * (W.transpose() * Ustar_m);
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = ev[i] > 1e-14 * lmax ? rhs[i] / ev[i] : 0.0;
    sol.coefficients = W * (es.eigenvectors() * rhs);
    return sol;
}

} // namespace

GsSolution gs_solve(const SamplingOperator& U, const Gramian& G, const Eigen::VectorXcd& m) {
    if (U.cols() != G.size() || static_cast<std::size_t>(m.size()) != U.rows())
        throw Error(ErrorCode::DimensionMismatch, "gs_solve: inconsistent sizes");
    auto sol = solve_normal(U.gram(), U.adjoint_apply(m), G);
    sol.residual = (U.apply(sol.coefficients) - m).norm();
    return sol;
}

GsSolution gs_solve(const Eigen::MatrixXcd& U, const Gramian& G, const Eigen::VectorXcd& m) {
    if (static_cast<std::size_t>(U.cols()) != G.size() || U.rows() != m.size())
        throw Error(ErrorCode::DimensionMismatch, "gs_solve: inconsistent sizes");
    auto sol = solve_normal((U.adjoint() * U).real(), U.adjoint() * m, G);
    sol.residual = (U * sol.coefficients - m).norm();
    return sol;
}

Projection project_onto_RN(const Eigen::VectorXd& b, const Gramian& G) {
    if (static_cast<std::size_t>(b.size()) != G.size()) throw Error(ErrorCode::DimensionMismatch, "b and G differ");
    const auto r = static_cast<Eigen::Index>(G.rank());
    if (r == 0) throw Error(ErrorCode::DegenerateGramian, "no eigenvalue above tolerance");
    const auto V = G.eigenvectors.leftCols(r);
    Projection p;
    p.coefficients = V * (V.transpose() * b).cwiseQuotient(G.eigenvalues.head(r));
    p.norm2 = b.dot(p.coefficients);
    return p;
}

} // namespace shgs
