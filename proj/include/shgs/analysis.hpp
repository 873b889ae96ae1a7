#pragma once

// Numerical checks of the asymptotic statements: frequency tail energy of the
// finite system, finite and full frame bounds, the oversampling function and
// the lower-frame-bound asymptotics.

#include "shgs/fourier_sampling.hpp"
#include "shgs/gs_core.hpp"
#include "shgs/transforms.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace shgs {

struct TailReport {
    int J = 0;
    double S = 0.0;     // grid multiplier when the grid came from S, else 0
    double delta = 0.0; // oversampling exponent used with S
    std::array<int, 2> M{0, 0};
    double tail = 0.0;      // direct sum over the lattice outside I_M up to the radius
    double remainder = 0.0; // envelope bound for the lattice beyond the radius
    double truncation_radius = 0.0;
};

/// Sum over l outside I_M with |eps l|_inf <= radius of sum_lambda |atom_ft(lambda, eps l)|^2,
/// plus an integral estimate of the rest from the decay envelope.
/// Throws RadiusTooSmall unless radius > eps * max(M).
TailReport tail_energy(const SystemLayout& layout, const SamplingGrid& grid, double truncation_radius);

/// M_i = ceil(S 2^{J(1+delta)} / eps).
int tail_grid_size(int J, double S, double delta, double epsilon);

/// tail_energy on the square grid from tail_grid_size, with S and delta recorded.
TailReport tail_energy_for(const SystemLayout& layout, double epsilon, double S, double delta,
                           double truncation_radius);

struct FrameBounds {
    double A = 0.0;
    double B = 0.0;
};

/// Smallest retained and largest eigenvalue of G.
FrameBounds frame_bounds_finite(const Gramian& G);

struct FullFrameCheck {
    double estimate = 0.0; // min over probes
    std::vector<double> values;
};

/// |phi^(xi)|^2 + sum_{j<=Jmax, |k|<=ceil(2^{j/2})} |psi^(B^{-T} xi)|^2 + vertical cone, per probe.
FullFrameCheck full_frame_lower_check(const GeneratorSpec& spec, std::span<const Vec2> probes, int Jmax);

/// ceil(N^{1+delta} A_N^{-2/(2r-1)}). Throws NonPositiveFrameBound when A_N <= 0.
std::uint64_t sigma(std::uint64_t N, double A_N, double delta, double r);

struct AsymptoticsRow {
    int J = 0;
    std::size_t N = 0;       // exact prefix size N_J
    std::uint64_t N_pow = 0; // 2^{2J}
    double delta = 0.0;
    double A_N = 0.0;
    double critical = 0.0;     // N^{-(1-delta)/2} (log N)^{3/2} at N = N_J
    double critical_pow = 0.0; // same at N = 2^{2J}
    double bound = 0.0;        // A_N^{1/(2r-1)}
    bool holds = false;        // critical <= C bound
};

struct AsymptoticsTable {
    std::vector<AsymptoticsRow> rows;
    /// Largest critical/bound ratio at the smallest J; later scales are checked against it.
    double C = 0.0;
};

/// Rows for every J in [J_lo, J_hi] and delta in deltas. The Gramian is built
/// once at J_hi; smaller J use its leading blocks.
AsymptoticsTable asymptotics_table(const GeneratorSpec& spec, int J_lo, int J_hi, std::span<const double> deltas,
                                   double r);
/// Same, with precomputed lower frame bounds A[J - J_lo] and sizes N[J - J_lo].
AsymptoticsTable asymptotics_table(int J_lo, std::span<const std::size_t> N, std::span<const double> A,
                                   std::span<const double> deltas, double r);

/// Least-squares slope of log y against log x over the pairs with x, y > 0.
/// Throws InvalidSpec with fewer than two such pairs.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct DecayCurve {
    std::vector<std::size_t> N;
    std::vector<double> error; // ||f - f_N||
    double slope = 0.0;        // log-log fit of error against N
};

/// Keeps the N largest analysis coefficients (ties by position) and synthesizes
/// with the adjoint, which inverts a Parseval or orthonormal transform.
DecayCurve best_nterm_decay(const Eigen::MatrixXd& image, const SparsifyingTransform& T,
                            std::span<const std::size_t> Ns);

/// Columns N,error.
void write_decay_csv(const DecayCurve& curve, std::ostream& out);

/// Columns J,S,delta,tail,remainder.
void write_tail_csv(std::span<const TailReport> reports, std::ostream& out);
/// Columns J,delta,N,A_N,critical,bound,holds,N_pow,critical_pow,C.
void write_asymptotics_csv(const AsymptoticsTable& table, std::ostream& out);

} // namespace shgs
