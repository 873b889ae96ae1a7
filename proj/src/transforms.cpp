#include "shgs/transforms.hpp"

#include "shgs/error.hpp"
#include "shgs/fft.hpp"
#include "shgs/shearlet_system.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <span>

namespace shgs {

namespace {

std::vector<double> lowpass(WaveletFilter f) {
    if (f == WaveletFilter::Haar) return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const double s3 = std::sqrt(3.0), d = 4.0 * std::sqrt(2.0);
    return {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
}

std::vector<double> highpass(const std::vector<double>& h) {
    const std::size_t L = h.size();
    std::vector<double> g(L);
    for (std::size_t i = 0; i < L; ++i) g[i] = ((i % 2) ? -1.0 : 1.0) * h[L - 1 - i];
    return g;
}

// One periodic analysis step on x[0..n): approximations to out[0..n/2), details to out[n/2..n).
void analyze(std::span<const double> x, std::span<double> out, const std::vector<double>& h,
             const std::vector<double>& g) {
    const std::size_t n = x.size(), half = n / 2;
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double v = x[(2 * k + i) % n];
            a += h[i] * v;
            d += g[i] * v;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

void synthesize(std::span<const double> c, std::span<double> x, const std::vector<double>& h,
                const std::vector<double>& g) {
    const std::size_t n = c.size(), half = n / 2;
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t k = 0; k < half; ++k)
        for (std::size_t i = 0; i < h.size(); ++i) x[(2 * k + i) % n] += h[i] * c[k] + g[i] * c[half + k];
}

void check_levels(Eigen::Index nx, Eigen::Index ny, int levels) {
    if (nx < 1 || ny < 1 || !std::has_single_bit(static_cast<std::size_t>(nx)) ||
        !std::has_single_bit(static_cast<std::size_t>(ny)))
        throw Error(ErrorCode::InvalidSize, "image sides must be powers of two");
    const int max_levels = std::countr_zero(static_cast<std::size_t>(std::min(nx, ny)));
    if (levels < 0 || levels > max_levels)
        throw Error(ErrorCode::InvalidLevels, "levels must lie in [0, " + std::to_string(max_levels) + "]");
}

// Applies `step` to every column of the top-left w x h block, then every row.
template <class Step>
void separable(Eigen::MatrixXd& m, Eigen::Index w, Eigen::Index h, bool columns_first, Step step) {
    std::vector<double> in, out;
    auto cols = [&] {
        in.resize(static_cast<std::size_t>(w));
        out.resize(in.size());
        for (Eigen::Index c = 0; c < h; ++c) {
            for (Eigen::Index r = 0; r < w; ++r) in[r] = m(r, c);
            step(in, out);
            for (Eigen::Index r = 0; r < w; ++r) m(r, c) = out[r];
        }
    };
    auto rows = [&] {
        in.resize(static_cast<std::size_t>(h));
        out.resize(in.size());
        for (Eigen::Index r = 0; r < w; ++r) {
            for (Eigen::Index c = 0; c < h; ++c) in[c] = m(r, c);
            step(in, out);
            for (Eigen::Index c = 0; c < h; ++c) m(r, c) = out[c];
        }
    };
    if (columns_first) {
        cols();
        rows();
    } else {
        rows();
        cols();
    }
}

} // namespace

WaveletFilter parse_wavelet_filter(const std::string& name) {
    if (name == "haar") return WaveletFilter::Haar;
    if (name == "d4") return WaveletFilter::D4;
    throw Error(ErrorCode::InvalidSpec, "unknown wavelet filter '" + name + "'");
}

Eigen::MatrixXd dwt2(const Eigen::MatrixXd& image, int levels, WaveletFilter filter) {
    check_levels(image.rows(), image.cols(), levels);
    const auto h = lowpass(filter);
    const auto g = highpass(h);
    Eigen::MatrixXd m = image;
    Eigen::Index w = m.rows(), hgt = m.cols();
    for (int l = 0; l < levels; ++l) {
        separable(m, w, hgt, true, [&](const std::vector<double>& in, std::vector<double>& out) { analyze(in, out, h, g); });
        w /= 2;
        hgt /= 2;
    }
    return m;
}

Eigen::MatrixXd idwt2(const Eigen::MatrixXd& coeffs, int levels, WaveletFilter filter) {
    check_levels(coeffs.rows(), coeffs.cols(), levels);
    const auto h = lowpass(filter);
    const auto g = highpass(h);
    Eigen::MatrixXd m = coeffs;
    for (int l = levels - 1; l >= 0; --l) {
        const Eigen::Index w = m.rows() >> l, hgt = m.cols() >> l;
        separable(m, w, hgt, false, [&](const std::vector<double>& in, std::vector<double>& out) { synthesize(in, out, h, g); });
    }
    return m;
}

WaveletTransform::WaveletTransform(int nx, int ny, int levels, WaveletFilter filter)
    : levels_(levels), filter_(filter) {
    check_levels(nx, ny, levels);
    nx_ = nx;
    ny_ = ny;
    coarse_.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (int c = 0; c < (ny >> levels); ++c)
        for (int r = 0; r < (nx >> levels); ++r) coarse_[static_cast<std::size_t>(c) * nx + r] = 1;
}

Eigen::VectorXcd WaveletTransform::forward(const Eigen::MatrixXcd& image) const {
    if (image.rows() != nx_ || image.cols() != ny_) throw Error(ErrorCode::DimensionMismatch, "image size");
    const Eigen::MatrixXd re = dwt2(image.real(), levels_, filter_);
    const Eigen::MatrixXd im = dwt2(image.imag(), levels_, filter_);
    Eigen::VectorXcd out(re.size());
    for (Eigen::Index i = 0; i < re.size(); ++i) out[i] = {re.data()[i], im.data()[i]};
    return out;
}

Eigen::MatrixXcd WaveletTransform::adjoint(const Eigen::VectorXcd& coeffs) const {
    if (static_cast<std::size_t>(coeffs.size()) != size()) throw Error(ErrorCode::DimensionMismatch, "coefficient count");
    const Eigen::Map<const Eigen::MatrixXcd> c(coeffs.data(), nx_, ny_);
    const Eigen::MatrixXd re = idwt2(c.real(), levels_, filter_);
    const Eigen::MatrixXd im = idwt2(c.imag(), levels_, filter_);
    Eigen::MatrixXcd out(nx_, ny_);
    out.real() = re;
    out.imag() = im;
    return out;
}

int max_shearlet_scales(int n) {
    const int log2n = std::countr_zero(static_cast<unsigned>(n));
    return std::min(4, log2n - 3);
}

DigitalShearlet::DigitalShearlet(int nx, int ny, int scales, const GeneratorSpec& spec) : scales_(scales) {
    if (nx < 16 || ny < 16 || !std::has_single_bit(static_cast<unsigned>(nx)) ||
        !std::has_single_bit(static_cast<unsigned>(ny)))
        throw Error(ErrorCode::InvalidSize, "image sides must be powers of two, at least 16");
    if (scales < 1 || scales > max_shearlet_scales(std::min(nx, ny)))
        throw Error(ErrorCode::InvalidScales, "scales must lie in [1, " +
                                                  std::to_string(max_shearlet_scales(std::min(nx, ny))) + "]");
    nx_ = nx;
    ny_ = ny;

    // The top scale reaches the Nyquist frequency.
    const double reach = std::ldexp(1.0, scales + 1);
    auto xi_at = [&](int p, int q) -> Vec2 {
        return {signed_frequency(p, nx) * 2.0 * reach / nx, signed_frequency(q, ny) * 2.0 * reach / ny};
    };

    bands_.push_back({true, false, 0, 0});
    Eigen::MatrixXd low(nx, ny);
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) low(p, q) = std::abs(generator_ft(spec, GeneratorKind::Scaling, xi_at(p, q)));
    windows_.push_back(std::move(low));

    for (int j = 0; j < scales; ++j) {
        const int kmax = shear_bound(j);
        for (Cone cone : {Cone::Horizontal, Cone::Vertical})
            for (int k = -kmax; k <= kmax; ++k) {
                bands_.push_back({false, cone == Cone::Vertical, j, k});
                const Eigen::Matrix2d BiT = atom_matrix({cone, j, k, {0, 0}}).inverse().transpose();
                Eigen::MatrixXd w(nx, ny);
                for (int q = 0; q < ny; ++q)
                    for (int p = 0; p < nx; ++p) {
                        const Vec2 xi = xi_at(p, q);
                        const Eigen::Vector2d eta = BiT * Eigen::Vector2d(xi[0], xi[1]);
                        w(p, q) = std::abs(generator_ft(spec, generator_of(cone), {eta[0], eta[1]}));
                    }
                windows_.push_back(std::move(w));
            }
    }

    // |g^| is even, but the Nyquist row and column are their own mirror images in
    // signed frequency; symmetrize so real images keep real coefficients.
    for (auto& w : windows_) {
        Eigen::MatrixXd sym(nx, ny);
        for (int q = 0; q < ny; ++q)
            for (int p = 0; p < nx; ++p) {
                const double a = w(p, q), b = w((nx - p) % nx, (ny - q) % ny);
                sym(p, q) = std::sqrt(0.5 * (a * a + b * b));
            }
        w = std::move(sym);
    }

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(nx, ny);
    for (const auto& w : windows_) total += w.cwiseAbs2();
    raw_lower_ = total.minCoeff();
    raw_upper_ = total.maxCoeff();
    if (!(raw_lower_ > 0.0)) throw Error(ErrorCode::InvalidScales, "band windows leave a frequency uncovered");
    const Eigen::MatrixXd inv = total.cwiseSqrt().cwiseInverse();
    for (auto& w : windows_) w = w.cwiseProduct(inv);

    coarse_.assign(windows_.size() * static_cast<std::size_t>(nx) * ny, 0);
    std::fill(coarse_.begin(), coarse_.begin() + static_cast<std::ptrdiff_t>(nx) * ny, 1);
}

Eigen::VectorXcd DigitalShearlet::forward(const Eigen::MatrixXcd& image) const {
    if (image.rows() != nx_ || image.cols() != ny_) throw Error(ErrorCode::DimensionMismatch, "image size");
    const Eigen::MatrixXcd X = fft2(image);
    const Eigen::Index n = image.size();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(windows_.size()) * n);
    for (std::size_t b = 0; b < windows_.size(); ++b) {
        const Eigen::MatrixXcd band = ifft2(X.cwiseProduct(windows_[b].cast<cplx>()));
        out.segment(static_cast<Eigen::Index>(b) * n, n) = Eigen::Map<const Eigen::VectorXcd>(band.data(), n);
    }
    return out;
}

Eigen::MatrixXcd DigitalShearlet::adjoint(const Eigen::VectorXcd& coeffs) const {
    if (static_cast<std::size_t>(coeffs.size()) != size()) throw Error(ErrorCode::DimensionMismatch, "coefficient count");
    const Eigen::Index n = static_cast<Eigen::Index>(nx_) * ny_;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(nx_, ny_);
    for (std::size_t b = 0; b < windows_.size(); ++b) {
        const Eigen::Map<const Eigen::MatrixXcd> band(coeffs.data() + static_cast<Eigen::Index>(b) * n, nx_, ny_);
        acc += fft2(band).cwiseProduct(windows_[b].cast<cplx>());
    }
    return ifft2(acc);
}

DigitalFrameBounds measure_frame_bounds(const SparsifyingTransform& T, int trials, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    DigitalFrameBounds out{std::numeric_limits<double>::infinity(), 0.0};
    for (int t = 0; t < trials; ++t) {
        Eigen::MatrixXcd x(T.nx(), T.ny());
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = {nd(rng), 0.0};
        const double ratio = T.forward(x).squaredNorm() / x.squaredNorm();
        out.lower = std::min(out.lower, ratio);
        out.upper = std::max(out.upper, ratio);
    }
    return out;
}

} // namespace shgs
