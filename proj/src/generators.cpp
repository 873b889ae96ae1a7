#include "shgs/generators.hpp"

#include "shgs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace shgs {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Pieces of B_m on [i, i+1] in the local variable s, from the truncated power form
// B_m(x) = 1/(m-1)! sum_k (-1)^k C(m,k) (x-k)_+^{m-1}.
std::vector<std::vector<double>> bspline_pieces(int order) {
    const int deg = order - 1;
    std::vector<std::vector<double>> pieces(order, std::vector<double>(deg + 1, 0.0));
    const double inv_fact = 1.0 / factorial(deg);
    for (int i = 0; i < order; ++i) {
        for (int k = 0; k <= i; ++k) {
            const double c = ((k % 2) ? -1.0 : 1.0) * binomial(order, k) * inv_fact;
            const double shift = i - k; // (shift + s)^deg
            for (int p = 0; p <= deg; ++p)
                pieces[i][p] += c * binomial(deg, p) * std::pow(shift, deg - p);
        }
    }
    return pieces;
}

PiecewisePoly bspline_poly(int order) { return {0.0, 1.0, bspline_pieces(order)}; }

// g(y) = sum_n h_n B_m(y - n) on [0, m + L - 1].
PiecewisePoly filtered_bspline_poly(int order, std::span<const double> filter) {
    const auto b = bspline_pieces(order);
    const int cells = order + static_cast<int>(filter.size()) - 1;
    std::vector<std::vector<double>> pieces(cells, std::vector<double>(order, 0.0));
    for (int i = 0; i < cells; ++i)
        for (std::size_t n = 0; n < filter.size(); ++n) {
            const int local = i - static_cast<int>(n);
            if (local < 0 || local >= order) continue;
            for (int p = 0; p < order; ++p) pieces[i][p] += filter[n] * b[local][p];
        }
    return {0.0, 1.0, std::move(pieces)};
}

cplx filter_symbol(std::span<const double> filter, double xi) {
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < filter.size(); ++n)
        acc += filter[n] * std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * xi);
    return acc;
}

} // namespace

double sinc(double x) {
    const double t = kPi * x;
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

cplx bspline_ft(int order, double xi) {
    return std::pow(sinc(xi), order) * std::polar(1.0, -kPi * order * xi);
}

double bspline(int order, double x) {
    if (x <= 0.0 || x >= order) return 0.0;
    double acc = 0.0;
    for (int k = 0; k <= order && k < x; ++k)
        acc += ((k % 2) ? -1.0 : 1.0) * binomial(order, k) * std::pow(x - k, order - 1);
    return acc / factorial(order - 1);
}

PiecewisePoly::PiecewisePoly(double origin, double width, std::vector<std::vector<double>> pieces)
    : origin_(origin), width_(width), pieces_(std::move(pieces)) {}

double PiecewisePoly::eval_piece(int cell, double x) const {
    const auto& c = pieces_[static_cast<std::size_t>(cell)];
    const double s = (x - origin_) / width_ - cell;
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double PiecewisePoly::operator()(double x) const {
    if (pieces_.empty()) return 0.0;
    const double t = (x - origin_) / width_;
    if (t < 0.0 || t > cells()) return 0.0;
    const int cell = std::min(static_cast<int>(t), cells() - 1);
    return eval_piece(cell, x);
}

PiecewisePoly PiecewisePoly::dilated(double dilation, double scale) const {
    auto pieces = pieces_;
    for (auto& p : pieces)
        for (auto& c : p) c *= scale;
    return {origin_ / dilation, width_ / dilation, std::move(pieces)};
}

int GeneratorSpec::natural_support() const {
    return spline_order + static_cast<int>(moment_filter.size()) - 1;
}

int GeneratorSpec::support_len() const { return unit_support ? 1 : natural_support(); }

Vec2 GeneratorSpec::cone_dilation() const {
    if (!unit_support) return {1.0, 1.0};
    return {static_cast<double>(natural_support()), static_cast<double>(spline_order)};
}

double GeneratorSpec::scaling_dilation() const {
    return unit_support ? static_cast<double>(spline_order) : 1.0;
}

void GeneratorSpec::validate() const {
    if (spline_order < 1) throw Error(ErrorCode::InvalidSpec, "spline_order must be positive");
    if (moment_filter.empty()) throw Error(ErrorCode::InvalidSpec, "moment_filter is empty");
    if (alpha < 1) throw Error(ErrorCode::InvalidSpec, "alpha must be a positive integer");
    if (!(static_cast<double>(alpha) > decay_r && decay_r > 3.0))
        throw Error(ErrorCode::InvalidSpec, "frame guarantee needs alpha > r > 3");
    const int moments = vanishing_moments(moment_filter);
    if (moments != alpha)
        throw Error(ErrorCode::InvalidSpec, "moment_filter has " + std::to_string(moments) +
                                                " vanishing moments, alpha is " +
                                                std::to_string(alpha));
}

cplx generator_ft(const GeneratorSpec& spec, GeneratorKind which, Vec2 xi) {
    switch (which) {
    case GeneratorKind::Scaling: {
        const double d = spec.scaling_dilation();
        return bspline_ft(spec.spline_order, xi[0] / d) * bspline_ft(spec.spline_order, xi[1] / d);
    }
    case GeneratorKind::Cone1: {
        const Vec2 d = spec.cone_dilation();
        const double u = xi[0] / d[0];
        return filter_symbol(spec.moment_filter, u) * bspline_ft(spec.spline_order, u) *
               bspline_ft(spec.spline_order, xi[1] / d[1]);
    }
    case GeneratorKind::Cone2:
        return generator_ft(spec, GeneratorKind::Cone1, {xi[1], xi[0]});
    }
    return {};
}

SeparableGenerator separable_generator(const GeneratorSpec& spec, GeneratorKind which) {
    switch (which) {
    case GeneratorKind::Scaling: {
        const double d = spec.scaling_dilation();
        auto b = bspline_poly(spec.spline_order).dilated(d, d);
        return {b, b};
    }
    case GeneratorKind::Cone1: {
        const Vec2 d = spec.cone_dilation();
        return {filtered_bspline_poly(spec.spline_order, spec.moment_filter).dilated(d[0], d[0]),
                bspline_poly(spec.spline_order).dilated(d[1], d[1])};
    }
    case GeneratorKind::Cone2: {
        auto g = separable_generator(spec, GeneratorKind::Cone1);
        return {g.second, g.first};
    }
    }
    return {};
}

double generator_space(const GeneratorSpec& spec, GeneratorKind which, Vec2 x) {
    const auto g = separable_generator(spec, which);
    return g.first(x[0]) * g.second(x[1]);
}

int vanishing_moments(std::span<const double> filter) {
    const int len = static_cast<int>(filter.size());
    for (int p = 0; p < len; ++p) {
        long double moment = 0.0L, scale = 0.0L;
        for (int n = 0; n < len; ++n) {
            const long double w = std::pow(static_cast<long double>(n), p);
            moment += w * filter[static_cast<std::size_t>(n)];
            scale += w * std::abs(filter[static_cast<std::size_t>(n)]);
        }
        if (std::abs(moment) > 1e-12L * std::max(scale, 1.0L)) return p;
    }
    return len;
}

DecayReport verify_decay(const GeneratorSpec& spec, double r, double alpha,
                         std::span<const Vec2> probe_grid) {
    if (probe_grid.empty()) throw Error(ErrorCode::EmptyGrid, "probe grid is empty");

    // Per dyadic shell of max(|xi1|, |xi2|): the largest ratio seen.
    std::map<int, std::pair<double, double>> shells;
    DecayReport rep;
    bool finite = true;
    for (const Vec2& xi : probe_grid) {
        const double a1 = std::abs(xi[0]), a2 = std::abs(xi[1]);
        const double env = std::pow(1.0 + a1, -r) * std::pow(1.0 + a2, -r);
        const double phi = std::abs(generator_ft(spec, GeneratorKind::Scaling, xi));
        const double psi = std::abs(generator_ft(spec, GeneratorKind::Cone1, xi));
        const double ratio_phi = phi / env;
        const double psi_env = std::min(1.0, std::pow(a1, alpha)) * env;
        double ratio_psi;
        if (psi_env == 0.0)
            ratio_psi = (psi < 1e-14) ? 0.0 : std::numeric_limits<double>::infinity();
        else
            ratio_psi = psi / psi_env;
        finite = finite && std::isfinite(ratio_phi) && std::isfinite(ratio_psi);
        rep.max_ratio_phi = std::max(rep.max_ratio_phi, ratio_phi);
        rep.max_ratio_psi = std::max(rep.max_ratio_psi, ratio_psi);

        const double radius = std::max(a1, a2);
        const int shell = radius > 0.0 ? static_cast<int>(std::floor(std::log2(radius)))
                                       : std::numeric_limits<int>::min();
        auto& s = shells[shell];
        s.first = std::max(s.first, ratio_phi);
        s.second = std::max(s.second, ratio_psi);
    }

    // A divergent ratio sets a new maximum in the outermost shell.
    bool trend_ok = true;
    if (shells.size() >= 2) {
        auto last = std::prev(shells.end());
        double inner_phi = 0.0, inner_psi = 0.0;
        for (auto it = shells.begin(); it != last; ++it) {
            inner_phi = std::max(inner_phi, it->second.first);
            inner_psi = std::max(inner_psi, it->second.second);
        }
        constexpr double kGrowth = 1.05;
        trend_ok = last->second.first <= kGrowth * inner_phi && last->second.second <= kGrowth * inner_psi;
    }
    rep.pass = finite && trend_ok;
    return rep;
}

std::vector<Vec2> dyadic_probe_grid(int max_exponent) {
    // Irrational-looking multipliers keep probes off the integer zeros of sinc.
    constexpr std::array<double, 4> mult{1.1180, 1.3183, 1.5412, 1.7071};
    std::vector<double> axis{0.0};
    for (int p = -2; p < max_exponent; ++p)
        for (double m : mult) {
            const double v = m * std::ldexp(1.0, p);
            axis.push_back(v);
            axis.push_back(-v);
        }
    std::vector<Vec2> grid;
    grid.reserve(axis.size() * axis.size());
    for (double a : axis)
        for (double b : axis) grid.push_back({a, b});
    return grid;
}

} // namespace shgs
