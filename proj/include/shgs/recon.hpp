#pragma once

// Multi-channel synthetic phantoms, k-space masks, Fourier-inversion baseline,
// l1 analysis reconstruction and sum-of-squares channel combination.

#include "shgs/transforms.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace shgs {

using Image = Eigen::MatrixXd; // nx rows, ny columns

struct KSpace {
    int nx = 0;
    int ny = 0;
    /// Unitary DFT of each channel image, DC at index (0, 0).
    std::vector<Eigen::MatrixXcd> data;

    int channels() const { return static_cast<int>(data.size()); }
    /// Whether every channel satisfies X(-p, -q) = conj(X(p, q)) to tol * max |X|.
    bool conjugate_symmetric(double tol = 1e-12) const;
};

enum class PhantomKind { Cartoon, SheppLike };
PhantomKind parse_phantom_kind(const std::string& name);

struct Phantom {
    Image reference;
    std::vector<Image> sensitivities; // squared sum is 1 at every pixel
    KSpace kspace;
};

/// Piecewise smooth image in [0, 1] times smooth coil profiles. Throws InvalidSize
/// unless nx and ny are powers of two and channels >= 1.
Phantom phantom(PhantomKind kind, int nx, int ny, int channels, std::uint64_t seed);

enum class MaskKind { Radial, SpiralPhyllotaxis, Full };
MaskKind parse_mask_kind(const std::string& name);
const char* to_string(MaskKind kind);

struct Mask {
    MaskKind kind = MaskKind::Full;
    Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> pattern; // DFT index order
    double fraction = 1.0;
    int parameter = 0; // spokes or spiral points
};

/// Throws UnreachableFraction when no parameter lands within half a
/// percentage point of the target.
Mask make_mask(MaskKind kind, int nx, int ny, double target_fraction);

/// Zero-filled inverse DFT magnitude per channel.
std::vector<Image> fourier_inversion(const KSpace& kspace, const Mask& mask);

/// sqrt(sum_k |I_k|^2) pixelwise.
Image sum_of_squares(const std::vector<Image>& channels);

/// ||recon - reference||_F / ||reference||_F. Throws ZeroReference.
double relative_error(const Image& recon, const Image& reference);

struct L1Options {
    /// <= 0 selects 5e-3 max |b| with b in unnormalized DFT units, which is
    /// 5e-3 max |b| / sqrt(nx ny) for the unitary data used here.
    double lambda = 0.0;
    int iterations = 200;
    /// Dual projected-gradient steps per proximal evaluation.
    int inner = 1;
};

struct L1Result {
    Eigen::MatrixXcd image;
    std::vector<double> objective; // after each iteration
    double lambda = 0.0;
    /// Relative objective change at the last iteration exceeded 1e-3.
    bool non_convergence = false;
};

/// Monotone FISTA for min 0.5 ||P F u - b||^2 + lambda ||T u||_1 over the
/// non-coarse coefficients. The prox is v - T^* w with w from warm-started dual
/// projected gradient; for an orthonormal T one step is exact soft thresholding.
L1Result l1_reconstruct(const Eigen::MatrixXcd& kspace_channel, const Mask& mask, const SparsifyingTransform& T,
                        const L1Options& options = {});

/// 0.5 ||P F u - b||^2 + lambda ||T u||_1 over non-coarse coefficients.
double l1_objective(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& kspace_channel, const Mask& mask,
                    const SparsifyingTransform& T, double lambda);

} // namespace shgs
