#include "shgs/recon.hpp"

#include "shgs/error.hpp"
#include "shgs/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

namespace shgs {

namespace {

struct Ellipse {
    double cx, cy, a, b, angle, value;
    bool inside(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double c = std::cos(angle), s = std::sin(angle);
        const double u = (dx * c + dy * s) / a, v = (-dx * s + dy * c) / b;
        return u * u + v * v <= 1.0;
    }
};

void check_size(int nx, int ny) {
    if (nx < 2 || ny < 2 || !std::has_single_bit(static_cast<unsigned>(nx)) ||
        !std::has_single_bit(static_cast<unsigned>(ny)))
        throw Error(ErrorCode::InvalidSize, "image sides must be powers of two");
}

Image cartoon(int nx, int ny, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    auto j = [&] { return jitter(rng); };
    const Ellipse body{0.5 + j(), 0.5 + j(), 0.40, 0.32, 0.15 + j(), 0.45};
    const std::vector<Ellipse> parts{
        {0.40 + j(), 0.56 + j(), 0.14, 0.09, -0.5 + j(), 0.35},
        {0.64 + j(), 0.38 + j(), 0.08, 0.12, 0.8 + j(), 0.20},
        {0.60 + j(), 0.66 + j(), 0.05, 0.035, 0.3 + j(), -0.25},
    };
    Image img(nx, ny);
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) {
            const double x = (p + 0.5) / nx, y = (q + 0.5) / ny;
            double v = 0.0;
            if (body.inside(x, y)) {
                const double r2 = (x - body.cx) * (x - body.cx) + (y - body.cy) * (y - body.cy);
                v = body.value * (0.8 + 0.2 * std::exp(-r2 / (2.0 * 0.15 * 0.15)));
                for (const auto& e : parts)
                    if (e.inside(x, y)) v += e.value * (0.9 + 0.1 * std::cos(6.0 * (x - e.cx)) * std::cos(6.0 * (y - e.cy)));
            }
            img(p, q) = std::clamp(v, 0.0, 1.0);
        }
    return img;
}

Image shepp_like(int nx, int ny) {
    constexpr double deg = std::numbers::pi / 180.0;
    // Modified Shepp-Logan ellipses on [-1, 1]^2.
    const std::vector<Ellipse> table{
        {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},        {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
        {0.22, 0.0, 0.11, 0.31, -18 * deg, -0.2}, {-0.22, 0.0, 0.16, 0.41, 18 * deg, -0.2},
        {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},       {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
        {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},     {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
        {0.0, -0.606, 0.023, 0.023, 0.0, 0.1},   {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
    };
    Image img(nx, ny);
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) {
            const double x = 2.0 * (p + 0.5) / nx - 1.0, y = 1.0 - 2.0 * (q + 0.5) / ny;
            double v = 0.0;
            for (const auto& e : table)
                if (e.inside(x, y)) v += e.value;
            img(p, q) = std::clamp(v, 0.0, 1.0);
        }
    return img;
}

std::vector<Image> coil_profiles(int nx, int ny, int channels, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    std::vector<Image> w(static_cast<std::size_t>(channels), Image(nx, ny));
    for (int k = 0; k < channels; ++k) {
        const double t = 2.0 * std::numbers::pi * k / channels + jitter(rng);
        const double cx = 0.5 + 0.7 * std::cos(t), cy = 0.5 + 0.7 * std::sin(t);
        for (int q = 0; q < ny; ++q)
            for (int p = 0; p < nx; ++p) {
                const double x = (p + 0.5) / nx, y = (q + 0.5) / ny;
                const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                w[k](p, q) = std::exp(-r2 / (2.0 * 0.35 * 0.35));
            }
    }
    Image norm = Image::Zero(nx, ny);
    for (const auto& c : w) norm += c.cwiseAbs2();
    norm = norm.cwiseSqrt();
    for (auto& c : w) c = c.cwiseQuotient(norm);
    return w;
}

using Pattern = Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic>;

void mark(Pattern& m, double f1, double f2) {
    const int nx = static_cast<int>(m.rows()), ny = static_cast<int>(m.cols());
    const int a = static_cast<int>(std::lround(f1)), b = static_cast<int>(std::lround(f2));
    if (a < -nx / 2 || a >= nx / 2 || b < -ny / 2 || b >= ny / 2) return;
    m(frequency_index(a, nx), frequency_index(b, ny)) = 1;
}

Pattern radial_pattern(int nx, int ny, int spokes) {
    Pattern m = Pattern::Zero(nx, ny);
    const int steps = 2 * std::max(nx, ny);
    for (int s = 0; s < spokes; ++s) {
        const double th = std::numbers::pi * s / spokes;
        for (int i = -steps; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            mark(m, t * std::cos(th) * nx / 2.0, t * std::sin(th) * ny / 2.0);
        }
    }
    m(0, 0) = 1;
    return m;
}

Pattern spiral_pattern(int nx, int ny, int points) {
    Pattern m = Pattern::Zero(nx, ny);
    constexpr double golden = 137.508 * std::numbers::pi / 180.0;
    // Unit spacing on the frequency grid; the point count sets the covered radius.
    for (int t = 0; t < points; ++t) {
        const double r = std::sqrt(static_cast<double>(t));
        const double th = t * golden;
        mark(m, r * std::cos(th), r * std::sin(th));
    }
    m(0, 0) = 1;
    return m;
}

double fraction_of(const Pattern& m) {
    return static_cast<double>(m.cast<long>().sum()) / static_cast<double>(m.size());
}

} // namespace

bool KSpace::conjugate_symmetric(double tol) const {
    for (const auto& X : data) {
        const double scale = X.cwiseAbs().maxCoeff();
        for (int q = 0; q < ny; ++q)
            for (int p = 0; p < nx; ++p) {
                const cplx mirrored = X((nx - p) % nx, (ny - q) % ny);
                if (std::abs(X(p, q) - std::conj(mirrored)) > tol * scale) return false;
            }
    }
    return true;
}

PhantomKind parse_phantom_kind(const std::string& name) {
    if (name == "cartoon") return PhantomKind::Cartoon;
    if (name == "shepp_like") return PhantomKind::SheppLike;
    throw Error(ErrorCode::InvalidSpec, "unknown phantom kind '" + name + "'");
}

Phantom phantom(PhantomKind kind, int nx, int ny, int channels, std::uint64_t seed) {
    check_size(nx, ny);
    if (channels < 1) throw Error(ErrorCode::InvalidSize, "at least one channel");
    std::mt19937_64 rng(seed);
    Phantom out;
    out.reference = kind == PhantomKind::Cartoon ? cartoon(nx, ny, rng) : shepp_like(nx, ny);
    out.sensitivities = coil_profiles(nx, ny, channels, rng);
    out.kspace.nx = nx;
    out.kspace.ny = ny;
    for (const auto& s : out.sensitivities)
        out.kspace.data.push_back(fft2(out.reference.cwiseProduct(s).cast<cplx>()));
    return out;
}

MaskKind parse_mask_kind(const std::string& name) {
    if (name == "radial") return MaskKind::Radial;
    if (name == "spiral" || name == "spiral_phyllotaxis") return MaskKind::SpiralPhyllotaxis;
    if (name == "full") return MaskKind::Full;
    throw Error(ErrorCode::InvalidSpec, "unknown mask kind '" + name + "'");
}

const char* to_string(MaskKind kind) {
    switch (kind) {
    case MaskKind::Radial: return "radial";
    case MaskKind::SpiralPhyllotaxis: return "spiral";
    case MaskKind::Full: return "full";
    }
    return "?";
}

Mask make_mask(MaskKind kind, int nx, int ny, double target) {
    check_size(nx, ny);
    if (!(target > 0.0 && target <= 1.0))
        throw Error(ErrorCode::UnreachableFraction, "target fraction must lie in (0, 1]");
    Mask out;
    out.kind = kind;
    if (kind == MaskKind::Full) {
        out.pattern = Pattern::Ones(nx, ny);
        out.fraction = 1.0;
        return out;
    }

    const double tol = 0.005;
    double best_gap = std::numeric_limits<double>::infinity();
    auto consider = [&](int param, Pattern&& p) {
        const double f = fraction_of(p);
        const double gap = std::abs(f - target);
        if (gap < best_gap) {
            best_gap = gap;
            out.pattern = std::move(p);
            out.fraction = f;
            out.parameter = param;
        }
        return f;
    };

    if (kind == MaskKind::Radial) {
        const int max_spokes = 4 * std::max(nx, ny);
        for (int s = 1; s <= max_spokes; ++s)
            if (consider(s, radial_pattern(nx, ny, s)) > target + 2 * tol) break;
    } else {
        // Fraction grows with the point count up to rasterization collisions:
        // bisect for the crossing, then scan around it.
        int lo = 1, hi = 2 * nx * ny;
        while (hi - lo > 1) {
            const int mid = lo + (hi - lo) / 2;
            (fraction_of(spiral_pattern(nx, ny, mid)) < target ? lo : hi) = mid;
        }
        const int span = std::max(nx, ny);
        for (int p = std::max(1, lo - span); p <= hi + span; ++p) consider(p, spiral_pattern(nx, ny, p));
    }
    if (best_gap > tol)
        throw Error(ErrorCode::UnreachableFraction, std::string(to_string(kind)) + " mask cannot reach fraction " +
                                                        std::to_string(target) + "; closest is " +
                                                        std::to_string(out.fraction));
    return out;
}

std::vector<Image> fourier_inversion(const KSpace& kspace, const Mask& mask) {
    if (mask.pattern.rows() != kspace.nx || mask.pattern.cols() != kspace.ny)
        throw Error(ErrorCode::DimensionMismatch, "mask and k-space sizes differ");
    const Eigen::MatrixXcd P = mask.pattern.cast<double>().cast<cplx>();
    std::vector<Image> out;
    for (const auto& X : kspace.data) out.push_back(ifft2(X.cwiseProduct(P)).cwiseAbs());
    return out;
}

Image sum_of_squares(const std::vector<Image>& channels) {
    if (channels.empty()) throw Error(ErrorCode::DimensionMismatch, "no channels");
    Image acc = Image::Zero(channels[0].rows(), channels[0].cols());
    for (const auto& c : channels) {
        if (c.rows() != acc.rows() || c.cols() != acc.cols())
            throw Error(ErrorCode::DimensionMismatch, "channel sizes differ");
        acc += c.cwiseAbs2();
    }
    return acc.cwiseSqrt();
}

double relative_error(const Image& recon, const Image& reference) {
    if (recon.rows() != reference.rows() || recon.cols() != reference.cols())
        throw Error(ErrorCode::DimensionMismatch, "image sizes differ");
    const double ref = reference.norm();
    if (!(ref > 0.0)) throw Error(ErrorCode::ZeroReference, "reference image is zero");
    return (recon - reference).norm() / ref;
}

namespace {

// Projection onto |w_i| <= lambda, with w_i = 0 on the coarse band.
void clip(Eigen::VectorXcd& w, const std::vector<unsigned char>& coarse, double lambda) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (coarse[static_cast<std::size_t>(i)]) {
            w[i] = 0.0;
            continue;
        }
        const double a = std::abs(w[i]);
        if (a > lambda) w[i] *= lambda / a;
    }
}

double l1_norm(const Eigen::VectorXcd& c, const std::vector<unsigned char>& coarse) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (!coarse[static_cast<std::size_t>(i)]) acc += std::abs(c[i]);
    return acc;
}

} // namespace

double l1_objective(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& b, const Mask& mask,
                    const SparsifyingTransform& T, double lambda) {
    const Eigen::MatrixXcd P = mask.pattern.cast<double>().cast<cplx>();
    const Eigen::MatrixXcd r = fft2(u).cwiseProduct(P) - b.cwiseProduct(P);
    return 0.5 * r.squaredNorm() + lambda * l1_norm(T.forward(u), T.coarse());
}

L1Result l1_reconstruct(const Eigen::MatrixXcd& kspace_channel, const Mask& mask, const SparsifyingTransform& T,
                        const L1Options& options) {
    if (mask.pattern.rows() != kspace_channel.rows() || mask.pattern.cols() != kspace_channel.cols() ||
        T.nx() != kspace_channel.rows() || T.ny() != kspace_channel.cols())
        throw Error(ErrorCode::DimensionMismatch, "mask, k-space and transform sizes differ");
    if (options.iterations < 1 || options.inner < 1)
        throw Error(ErrorCode::InvalidSpec, "iterations must be positive");

    const Eigen::MatrixXcd P = mask.pattern.cast<double>().cast<cplx>();
    const Eigen::MatrixXcd b = kspace_channel.cwiseProduct(P);
    L1Result out;
    // Default uses max |b| of the unnormalized DFT, i.e. the unitary value times sqrt(nx ny),
    // rescaled to the unitary objective.
    const double pixels = static_cast<double>(b.size());
    out.lambda = options.lambda > 0.0 ? options.lambda : 5e-3 * b.cwiseAbs().maxCoeff() / std::sqrt(pixels);
    const double lambda = out.lambda;

    auto objective = [&](const Eigen::MatrixXcd& u) {
        const Eigen::MatrixXcd r = fft2(u).cwiseProduct(P) - b;
        return 0.5 * r.squaredNorm() + lambda * l1_norm(T.forward(u), T.coarse());
    };

    // The masked unitary DFT has norm 1, so the unit step is admissible.
    Eigen::MatrixXcd x = ifft2(b);
    double Fx = objective(x);
    Eigen::MatrixXcd y = x;
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(T.size()));
    double t = 1.0;
    for (int it = 0; it < options.iterations; ++it) {
        const Eigen::MatrixXcd v = y - ifft2(fft2(y).cwiseProduct(P) - b);
        // prox of lambda ||T.||_1 at v is v - T^* w for the dual w below. From w = 0 the
        // first step gives T^* shrink(T v); w is warm-started across iterations.
        for (int k = 0; k < options.inner; ++k) {
            w += T.forward(v - T.adjoint(w));
            clip(w, T.coarse(), lambda);
        }
        const Eigen::MatrixXcd z = v - T.adjoint(w);
        const double Fz = objective(z);

        const Eigen::MatrixXcd x_prev = x;
        if (Fz <= Fx) {
            x = z;
            Fx = Fz;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
        t = t_next;
        out.objective.push_back(Fx);
    }
    if (out.objective.size() >= 2) {
        const double last = out.objective.back(), prev = out.objective[out.objective.size() - 2];
        out.non_convergence = std::abs(prev - last) > 1e-3 * std::max(std::abs(last), 1e-300);
    }
    out.image = std::move(x);
    return out;
}

} // namespace shgs
