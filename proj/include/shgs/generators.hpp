#pragma once

// Compactly supported spline generators for the cone-adapted shearlet system.
//
// The scaling function is a tensor product of cardinal B-splines and the
// shearlet generator applies a finite difference filter along the first axis,
// which produces the vanishing moments. Every generator has a closed-form
// Fourier transform under the convention f^(xi) = int f(x) exp(-2 pi i <x,xi>) dx.

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace shgs {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;

/// Fourier transform of the cardinal B-spline of the given order on [0, order].
cplx bspline_ft(int order, double xi);

/// Cardinal B-spline of the given order evaluated at x; zero outside [0, order].
double bspline(int order, double x);

/// sin(pi x) / (pi x), with a series expansion near the removable singularity.
double sinc(double x);

/// Piecewise polynomial on a uniform partition of [origin, origin + cells * width].
/// Piece i is stored in the local variable s = (x - origin) / width - i in [0, 1].
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(double origin, double width, std::vector<std::vector<double>> pieces);

    double operator()(double x) const;
    /// Evaluates piece `cell` at x without locating the cell.
    double eval_piece(int cell, double x) const;

    int cells() const { return static_cast<int>(pieces_.size()); }
    double origin() const { return origin_; }
    double width() const { return width_; }
    double upper() const { return origin_ + width_ * cells(); }
    int degree() const { return pieces_.empty() ? 0 : static_cast<int>(pieces_.front().size()) - 1; }

    /// Returns x -> scale * p(dilation * x).
    PiecewisePoly dilated(double dilation, double scale) const;

private:
    double origin_ = 0.0;
    double width_ = 1.0;
    std::vector<std::vector<double>> pieces_;
};

/// Parameters of the spline generator family.
struct GeneratorSpec {
    int spline_order = 4;
    std::vector<double> moment_filter{1.0, -4.0, 6.0, -4.0, 1.0};
    int alpha = 4;
    double decay_r = 3.5;
    /// When set, each generator factor is dilated so that all generators are
    /// supported in the unit square and the support cube side is 1.
    bool unit_support = true;

    /// spline_order + filter length - 1: the undilated support side.
    int natural_support() const;
    /// Side a of the support cube [0,a]^2 used by the layout.
    int support_len() const;
    /// Dilation applied to the (x1, x2) factors of the cone generator.
    Vec2 cone_dilation() const;
    /// Dilation applied to both factors of the scaling generator.
    double scaling_dilation() const;

    /// Throws Error(InvalidSpec) unless alpha > r > 3, the filter has exactly
    /// alpha vanishing moments and the spline order is positive.
    void validate() const;
};

enum class GeneratorKind { Scaling, Cone1, Cone2 };

/// Fourier transform of phi, psi or psi~ at a 2D frequency.
cplx generator_ft(const GeneratorSpec& spec, GeneratorKind which, Vec2 xi);

/// Pointwise evaluation of phi, psi or psi~.
double generator_space(const GeneratorSpec& spec, GeneratorKind which, Vec2 x);

/// Separable factors of a generator: value(x) = first(x1) * second(x2).
struct SeparableGenerator {
    PiecewisePoly first;
    PiecewisePoly second;
};

SeparableGenerator separable_generator(const GeneratorSpec& spec, GeneratorKind which);

/// Order of the zero of the filter symbol at frequency 0.
int vanishing_moments(std::span<const double> filter);
inline int vanishing_moments(const GeneratorSpec& spec) { return vanishing_moments(spec.moment_filter); }

struct DecayReport {
    double max_ratio_phi = 0.0;
    double max_ratio_psi = 0.0;
    bool pass = false;
};

/// Empirical decay constants C1, C2 over a probe grid. `pass` requires finite
/// suprema and that the outermost dyadic shell does not exceed the maximum over
/// all inner shells.
DecayReport verify_decay(const GeneratorSpec& spec, double r, double alpha,
                         std::span<const Vec2> probe_grid);

/// Probes at +-2^p and +-1.5 * 2^p on and off the axes, p = -2..max_exponent, plus the origin.
std::vector<Vec2> dyadic_probe_grid(int max_exponent);

} // namespace shgs
