#pragma once

// Sparsifying transforms for the l1 reconstruction: periodic orthonormal
// wavelets and a Parseval frequency-domain digital shearlet transform.

#include "shgs/generators.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace shgs {

enum class WaveletFilter { Haar, D4 };

WaveletFilter parse_wavelet_filter(const std::string& name);

/// Periodic separable transform in the Mallat layout: the coarse block is the
/// top-left (nx >> levels) x (ny >> levels) corner.
/// Throws InvalidSize for non-dyadic sizes and InvalidLevels for levels outside [0, log2 min(nx, ny)].
Eigen::MatrixXd dwt2(const Eigen::MatrixXd& image, int levels, WaveletFilter filter);
Eigen::MatrixXd idwt2(const Eigen::MatrixXd& coeffs, int levels, WaveletFilter filter);

/// Linear map from nx-by-ny complex images to coefficient vectors.
class SparsifyingTransform {
public:
    virtual ~SparsifyingTransform() = default;

    virtual Eigen::VectorXcd forward(const Eigen::MatrixXcd& image) const = 0;
    virtual Eigen::MatrixXcd adjoint(const Eigen::VectorXcd& coeffs) const = 0;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return coarse_.size(); }
    /// Nonzero for coefficients of the coarse band, which is never thresholded.
    const std::vector<unsigned char>& coarse() const { return coarse_; }

protected:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<unsigned char> coarse_;
};

class WaveletTransform final : public SparsifyingTransform {
public:
    WaveletTransform(int nx, int ny, int levels, WaveletFilter filter);

    Eigen::VectorXcd forward(const Eigen::MatrixXcd& image) const override;
    Eigen::MatrixXcd adjoint(const Eigen::VectorXcd& coeffs) const override;

private:
    int levels_;
    WaveletFilter filter_;
};

struct ShearletBand {
    bool lowpass = false;
    bool vertical = false;
    int j = 0;
    int k = 0;
};

/// Bands are the lowpass plus (cone, j, k) for j < scales and |k| <= ceil(2^{j/2}).
/// Band windows are |phi^| and |psi^(B^{-T} xi)| sampled on the DFT grid and
/// divided by the root of their squared sum, so the transform is Parseval.
class DigitalShearlet final : public SparsifyingTransform {
public:
    DigitalShearlet(int nx, int ny, int scales, const GeneratorSpec& spec = {});

    Eigen::VectorXcd forward(const Eigen::MatrixXcd& image) const override;
    Eigen::MatrixXcd adjoint(const Eigen::VectorXcd& coeffs) const override;

    int scales() const { return scales_; }
    const std::vector<ShearletBand>& bands() const { return bands_; }
    /// Window of band b on the DFT grid.
    const Eigen::MatrixXd& window(std::size_t b) const { return windows_[b]; }
    /// Range of the squared window sum before normalization.
    double raw_lower() const { return raw_lower_; }
    double raw_upper() const { return raw_upper_; }

private:
    int scales_;
    std::vector<ShearletBand> bands_;
    std::vector<Eigen::MatrixXd> windows_;
    double raw_lower_ = 0.0;
    double raw_upper_ = 0.0;
};

/// Largest admissible shearlet scale count for an n-point axis: log2(n) - 3, at most 4.
int max_shearlet_scales(int n);

struct DigitalFrameBounds {
    double lower = 0.0; // min ||Tx||^2 / ||x||^2 over the probes
    double upper = 0.0;
};

/// Energy ratios over `trials` seeded random images.
DigitalFrameBounds measure_frame_bounds(const SparsifyingTransform& T, int trials, unsigned long long seed);

} // namespace shgs
