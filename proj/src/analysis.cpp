#include "shgs/analysis.hpp"

#include "shgs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <iomanip>
#include <ostream>

namespace shgs {

namespace {

// Integral of (1+|t|)^{-2r} over |t| > rho.
double envelope_tail(double rho, double r) {
    return 2.0 * std::pow(1.0 + rho, 1.0 - 2.0 * r) / (2.0 * r - 1.0);
}

// Integral of (1+|t1|)^{-2r} (1+|t2|)^{-2r} over |t|_inf > rho.
double envelope_outer(double rho, double r) {
    const double total = 2.0 / (2.0 * r - 1.0);
    const double e = envelope_tail(rho, r);
    return 2.0 * total * e - e * e;
}

} // namespace

int tail_grid_size(int J, double S, double delta, double epsilon) {
    if (!(S > 0.0) || !(epsilon > 0.0)) throw Error(ErrorCode::InvalidSpec, "S and epsilon must be positive");
    return static_cast<int>(std::ceil(S * std::pow(2.0, J * (1.0 + delta)) / epsilon - 1e-9));
}

TailReport tail_energy(const SystemLayout& layout, const SamplingGrid& grid, double truncation_radius) {
    grid.validate();
    const double eps = grid.epsilon;
    const int Mmax = std::max(grid.M[0], grid.M[1]);
    if (!(truncation_radius > eps * Mmax))
        throw Error(ErrorCode::RadiusTooSmall, "truncation radius must exceed eps * max(M)");

    const auto& groups = layout.groups();
    std::vector<double> count(groups.size(), 0.0);
    for (std::size_t i = 0; i < layout.size(); ++i) count[layout.group_of(i)] += 1.0;

    const GeneratorSpec& spec = layout.spec();
    auto energy = [&](int l1, int l2) {
        double acc = 0.0;
        for (std::size_t g = 0; g < groups.size(); ++g)
            acc += count[g] * std::norm(group_ft(spec, groups[g], {eps * l1, eps * l2}));
        return acc;
    };

    // Shells of |l|_inf from the outside in, so a larger M only drops leading terms.
    const int L = static_cast<int>(std::floor(truncation_radius / eps + 1e-12));
    double tail = 0.0;
    for (int n = L; n > std::min(grid.M[0], grid.M[1]); --n) {
        double shell = 0.0;
        auto visit = [&](int l1, int l2) {
            if (!grid.contains({l1, l2})) shell += energy(l1, l2);
        };
        for (int t = -n; t <= n; ++t) {
            visit(t, n);
            visit(t, -n);
        }
        for (int t = -n + 1; t <= n - 1; ++t) {
            visit(n, t);
            visit(-n, t);
        }
        tail += shell;
    }

    const double r = spec.decay_r;
    const DecayReport dec = verify_decay(spec, r, spec.alpha, dyadic_probe_grid(12));
    double remainder = 0.0;
    const double R0 = std::max(truncation_radius - eps, 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (count[g] == 0.0) continue;
        const double C = groups[g].cone == Cone::Scaling ? dec.max_ratio_phi : dec.max_ratio_psi;
        const double stretch = groups[g].B.transpose().cwiseAbs().rowwise().sum().maxCoeff();
        remainder += count[g] * C * C * envelope_outer(R0 / stretch, r) / (eps * eps);
    }

    TailReport rep;
    rep.J = layout.J();
    rep.M = grid.M;
    rep.tail = tail;
    rep.remainder = remainder;
    rep.truncation_radius = truncation_radius;
    return rep;
}

TailReport tail_energy_for(const SystemLayout& layout, double epsilon, double S, double delta,
                           double truncation_radius) {
    const int M = tail_grid_size(layout.J(), S, delta, epsilon);
    TailReport rep = tail_energy(layout, grid_for_epsilon(epsilon, {M, M}), truncation_radius);
    rep.S = S;
    rep.delta = delta;
    return rep;
}

FrameBounds frame_bounds_finite(const Gramian& G) {
    if (G.eigenvalues.size() == 0 || !(G.upper_bound() > 0.0))
        throw Error(ErrorCode::DegenerateGramian, "Gramian has no positive eigenvalue");
    return {G.lower_bound(), G.upper_bound()};
}

FullFrameCheck full_frame_lower_check(const GeneratorSpec& spec, std::span<const Vec2> probes, int Jmax) {
    struct Term {
        GeneratorKind kind;
        Eigen::Matrix2d B_inv_T;
    };
    std::vector<Term> terms;
    for (int j = 0; j <= Jmax; ++j) {
        const int kmax = shear_bound(j);
        for (int k = -kmax; k <= kmax; ++k)
            for (Cone cone : {Cone::Horizontal, Cone::Vertical})
                terms.push_back({generator_of(cone), atom_matrix({cone, j, k, {0, 0}}).inverse().transpose()});
    }

    FullFrameCheck out;
    out.values.reserve(probes.size());
    out.estimate = probes.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (const Vec2& xi : probes) {
        double acc = std::norm(generator_ft(spec, GeneratorKind::Scaling, xi));
        for (const Term& t : terms) {
            const Eigen::Vector2d eta = t.B_inv_T * Eigen::Vector2d(xi[0], xi[1]);
            acc += std::norm(generator_ft(spec, t.kind, {eta[0], eta[1]}));
        }
        out.values.push_back(acc);
        out.estimate = std::min(out.estimate, acc);
    }
    return out;
}

std::uint64_t sigma(std::uint64_t N, double A_N, double delta, double r) {
    if (!(A_N > 0.0)) throw Error(ErrorCode::NonPositiveFrameBound, "A_N must be positive");
    if (N == 0) throw Error(ErrorCode::InvalidSpec, "N must be positive");
    if (!(r > 0.5)) throw Error(ErrorCode::InvalidSpec, "r must exceed 1/2");
    const long double v = std::pow(static_cast<long double>(N), 1.0L + delta) *
                          std::pow(static_cast<long double>(A_N), -2.0L / (2.0L * r - 1.0L));
    return static_cast<std::uint64_t>(std::ceil(v));
}

AsymptoticsTable asymptotics_table(int J_lo, std::span<const std::size_t> N, std::span<const double> A,
                                   std::span<const double> deltas, double r) {
    if (N.size() != A.size()) throw Error(ErrorCode::DimensionMismatch, "one A_N per scale");
    if (N.empty() || deltas.empty()) throw Error(ErrorCode::InvalidSpec, "empty scale or delta list");
    AsymptoticsTable table;
    for (std::size_t s = 0; s < N.size(); ++s) {
        if (!(A[s] > 0.0)) throw Error(ErrorCode::NonPositiveFrameBound, "A_N must be positive");
        for (double delta : deltas) {
            AsymptoticsRow row;
            row.J = J_lo + static_cast<int>(s);
            row.N = N[s];
            row.N_pow = std::uint64_t{1} << (2 * row.J);
            row.delta = delta;
            row.A_N = A[s];
            auto critical = [delta](double n) { return std::pow(n, -(1.0 - delta) / 2.0) * std::pow(std::log(n), 1.5); };
            row.critical = critical(static_cast<double>(row.N));
            row.critical_pow = critical(static_cast<double>(row.N_pow));
            row.bound = std::pow(A[s], 1.0 / (2.0 * r - 1.0));
            table.rows.push_back(row);
        }
    }
    for (const auto& row : table.rows)
        if (row.J == J_lo) table.C = std::max(table.C, row.critical / row.bound);
    for (auto& row : table.rows) row.holds = row.critical / row.bound <= table.C;
    return table;
}

AsymptoticsTable asymptotics_table(const GeneratorSpec& spec, int J_lo, int J_hi, std::span<const double> deltas,
                                   double r) {
    if (J_lo < 1 || J_hi < J_lo) throw Error(ErrorCode::InvalidSpec, "need 1 <= J_lo <= J_hi");
    const SystemLayout layout(J_hi, spec);
    const Gramian full = gramian(layout, layout.size());
    std::vector<std::size_t> N;
    std::vector<double> A;
    for (int J = J_lo; J <= J_hi; ++J) {
        const auto& ix = layout.indices();
        const auto n = static_cast<std::size_t>(std::count_if(ix.begin(), ix.end(), [J](const ShearletIndex& i) {
            return i.cone == Cone::Scaling || i.j < J;
        }));
        N.push_back(n);
        const auto e = static_cast<Eigen::Index>(n);
        A.push_back(frame_bounds_finite(make_gramian(full.G.topLeftCorner(e, e), full.rank_tol)).A);
    }
    return asymptotics_table(J_lo, N, A, deltas, r);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x and y differ in length");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || !(den > 0.0)) throw Error(ErrorCode::InvalidSpec, "slope needs two distinct positive points");
    return (n * sxy - sx * sy) / den;
}

DecayCurve best_nterm_decay(const Eigen::MatrixXd& image, const SparsifyingTransform& T,
                            std::span<const std::size_t> Ns) {
    const Eigen::MatrixXcd f = image.cast<cplx>();
    const Eigen::VectorXcd c = T.forward(f);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(c.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(c[a]) > std::abs(c[b]); });

    DecayCurve out;
    for (std::size_t N : Ns) {
        const std::size_t keep = std::min<std::size_t>(N, order.size());
        Eigen::VectorXcd cN = Eigen::VectorXcd::Zero(c.size());
        for (std::size_t i = 0; i < keep; ++i) cN[order[i]] = c[order[i]];
        out.N.push_back(N);
        out.error.push_back((f - T.adjoint(cN)).norm());
    }
    std::vector<double> x(out.N.begin(), out.N.end());
    try {
        out.slope = loglog_slope(x, out.error);
    } catch (const Error&) {
        out.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

void write_decay_csv(const DecayCurve& curve, std::ostream& out) {
    out << "N,error\n" << std::setprecision(17);
    for (std::size_t i = 0; i < curve.N.size(); ++i) out << curve.N[i] << ',' << curve.error[i] << '\n';
}

void write_tail_csv(std::span<const TailReport> reports, std::ostream& out) {
    out << "J,S,delta,tail,remainder\n" << std::setprecision(17);
    for (const auto& t : reports) out << t.J << ',' << t.S << ',' << t.delta << ',' << t.tail << ',' << t.remainder << '\n';
}

void write_asymptotics_csv(const AsymptoticsTable& table, std::ostream& out) {
    out << "J,delta,N,A_N,critical,bound,holds,N_pow,critical_pow,C\n" << std::setprecision(17);
    for (const auto& r : table.rows)
        out << r.J << ',' << r.delta << ',' << r.N << ',' << r.A_N << ',' << r.critical << ',' << r.bound << ','
            << (r.holds ? "true" : "false") << ',' << r.N_pow << ',' << r.critical_pow << ',' << table.C << '\n';
}

} // namespace shgs
