// Command-line front end. Every flag is global so a JSON config can supply any
// of them; config values are inserted before the user's arguments and the last
// occurrence of a flag wins.

#include "shgs/analysis.hpp"
#include "shgs/error.hpp"
#include "shgs/experiment.hpp"
#include "shgs/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

using namespace shgs;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string out = "out";
    std::uint64_t seed = 7;
    int scale = 2;
    int scale_lo = 1;
    double epsilon = 0.125;
    double theta = 2.0;
    double delta = 1.0 / 3.0;
    double r = 0.0; // 0: per-command default
    std::string grid = "16x16";
    double lambda = 0.0;
    int iters = 200;
    std::string mask_kind;
    double fraction = 0.2;
    int size = 128;
    int channels = 4;
    std::string phantom = "cartoon";
    int shearlet_scales = 4;
    int wavelet_levels = 4;
    std::string wavelet = "d4";
    std::vector<double> S{1, 2, 4, 8};
    std::vector<double> deltas{0.3, 0.4, 0.5};
    double radius = 0.0;
    int max_M = 4096;
    int spline_order = 4;
    std::vector<double> moment_filter{1, -4, 6, -4, 1};
    int alpha = 4;
    double decay_r = 3.5;
    bool natural_support = false;
};

std::array<int, 2> parse_grid(const std::string& s) {
    const auto x = s.find('x');
    try {
        if (x == std::string::npos) {
            const int m = std::stoi(s);
            return {m, m};
        }
        return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidSpec, "grid must look like M1xM2, got '" + s + "'");
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidSpec, "not a number: '" + item + "'");
        }
    }
    return out;
}

GeneratorSpec generator_spec(const Options& o) {
    GeneratorSpec spec;
    spec.spline_order = o.spline_order;
    spec.moment_filter = o.moment_filter;
    spec.alpha = o.alpha;
    spec.decay_r = o.decay_r;
    spec.unit_support = !o.natural_support;
    spec.validate();
    return spec;
}

// --config FILE becomes "--key value" pairs placed ahead of the user's arguments.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> user(argv + 1, argv + argc);
    std::string config;
    for (std::size_t i = 0; i < user.size(); ++i) {
        if (user[i] == "--config" && i + 1 < user.size()) config = user[i + 1];
        else if (user[i].rfind("--config=", 0) == 0) config = user[i].substr(9);
    }
    std::vector<std::string> args;
    if (!config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(config));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Io, "bad config " + config + ": " + e.what());
        }
        if (!j.is_object()) throw Error(ErrorCode::Io, "config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            const std::string flag = "--" + key;
            if (value.is_boolean()) {
                if (value.get<bool>()) args.push_back(flag);
            } else if (value.is_array()) {
                std::string joined;
                for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
                args.insert(args.end(), {flag, joined});
            } else {
                args.insert(args.end(), {flag, value.is_string() ? value.get<std::string>() : value.dump()});
            }
        }
    }
    args.insert(args.end(), user.begin(), user.end());
    return args;
}

fs::path out_dir(const Options& o) {
    fs::create_directories(o.out);
    return o.out;
}

void write_text(const fs::path& path, const std::string& text) {
    write_atomic(path, text);
    std::cout << "wrote " << path.string() << '\n';
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_phantom(const Options& o) {
    const auto ph = phantom(parse_phantom_kind(o.phantom), o.size, o.size, o.channels, o.seed);
    const auto dir = out_dir(o);
    write_pgm(dir / "reference.pgm", ph.reference, true);
    write_kspace(dir / "kspace.json", ph.kspace);
    for (int c = 0; c < o.channels; ++c) write_pgm(dir / ("coil" + std::to_string(c) + ".pgm"), ph.sensitivities[c]);
    std::cout << "wrote phantom and k-space to " << dir.string() << '\n';
    return 0;
}

int cmd_mask(const Options& o) {
    const MaskKind kind = parse_mask_kind(o.mask_kind.empty() ? "radial" : o.mask_kind);
    const Mask m = make_mask(kind, o.size, o.size, o.fraction);
    const auto dir = out_dir(o);
    write_pgm(dir / ("mask_" + std::string(to_string(kind)) + ".pgm"), m.pattern.cast<double>());
    const nlohmann::json info{{"kind", to_string(kind)}, {"fraction", m.fraction}, {"target", o.fraction},
                              {"parameter", m.parameter}, {"nx", o.size}, {"ny", o.size}};
    write_text(dir / ("mask_" + std::string(to_string(kind)) + ".json"), info.dump(2) + "\n");
    std::cout << to_string(kind) << " fraction " << m.fraction << '\n';
    return 0;
}

int cmd_recon(const Options& o) {
    ExperimentConfig cfg;
    cfg.phantom = parse_phantom_kind(o.phantom);
    cfg.nx = cfg.ny = o.size;
    cfg.channels = o.channels;
    cfg.seed = o.seed;
    cfg.l1.lambda = o.lambda;
    cfg.l1.iterations = o.iters;
    cfg.shearlet_scales = o.shearlet_scales;
    cfg.wavelet_levels = o.wavelet_levels;
    cfg.wavelet = parse_wavelet_filter(o.wavelet);
    if (!o.mask_kind.empty()) cfg.masks = {{parse_mask_kind(o.mask_kind), o.fraction}};
    const auto res = run_experiment(cfg, out_dir(o));
    write_error_table(res, std::cout);
    for (const auto& r : res.rows)
        if (r.non_convergence) std::cerr << "warning: NonConvergence on the " << to_string(r.mask) << " mask\n";
    return 0;
}

int cmd_ssr(const Options& o) {
    const SystemLayout layout(o.scale, generator_spec(o));
    const auto t0 = std::chrono::steady_clock::now();
    SearchOptions so;
    so.max_M = o.max_M;
    const auto res = stable_sampling_rate(layout, layout.size(), o.theta, o.epsilon, so);
    std::ostringstream os;
    os << "N,M1,M2,c,theta,wall_time_ms,J,epsilon\n"
       << layout.size() << ',' << res.M[0] << ',' << res.M[1] << ',' << csv_number(res.c) << ',' << csv_number(o.theta)
       << ',' << csv_number(elapsed_ms(t0)) << ',' << o.scale << ',' << csv_number(o.epsilon) << '\n';
    write_text(out_dir(o) / "ssr.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_angle(const Options& o) {
    const SystemLayout layout(o.scale, generator_spec(o));
    const auto t0 = std::chrono::steady_clock::now();
    const auto G = gramian(layout, layout.size());
    const SamplingOperator U(layout, layout.size(), grid_for_epsilon(o.epsilon, parse_grid(o.grid)));
    const auto res = cosine_angle(U, G);
    std::ostringstream os;
    os << "N,M1,M2,c,theta,wall_time_ms,J,epsilon\n"
       << res.N << ',' << res.M[0] << ',' << res.M[1] << ',' << csv_number(res.c) << ','
       << csv_number(res.c > 0 ? 1.0 / res.c : INFINITY) << ',' << csv_number(elapsed_ms(t0)) << ',' << o.scale << ','
       << csv_number(o.epsilon) << '\n';
    write_text(out_dir(o) / "angle.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_gs(const Options& o) {
    const SystemLayout layout(o.scale, generator_spec(o));
    const std::size_t N = layout.size();
    const auto G = gramian(layout, N);
    const SamplingOperator U(layout, N, grid_for_epsilon(o.epsilon, parse_grid(o.grid)));
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(static_cast<Eigen::Index>(N));
    for (auto& v : x) v = nd(rng);
    const auto sol = gs_solve(U, G, measure_function(layout, x.cast<cplx>(), U.grid()));
    const Eigen::VectorXd d = sol.coefficients.real() - x;
    const double rel = std::sqrt(std::max(0.0, d.dot(G.G * d)) / x.dot(G.G * x));
    const auto angle = cosine_angle(U, G);
    std::ostringstream os;
    os << "N,M1,M2,c,residual,condition,relative_error,ill_conditioned\n"
       << N << ',' << U.grid().M[0] << ',' << U.grid().M[1] << ',' << csv_number(angle.c) << ','
       << csv_number(sol.residual) << ',' << csv_number(sol.condition) << ',' << csv_number(rel) << ','
       << (sol.ill_conditioned ? "true" : "false") << '\n';
    write_text(out_dir(o) / "gs.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_tail(const Options& o) {
    GeneratorSpec spec = generator_spec(o);
    if (o.r > 0.0) spec.decay_r = o.r;
    const SystemLayout layout(o.scale, spec);
    double smax = 0.0;
    for (double s : o.S) smax = std::max(smax, s);
    const double radius = o.radius > 0.0 ? o.radius
                                         : 2.0 * o.epsilon * tail_grid_size(o.scale, smax, o.delta, o.epsilon) + 1.0;
    std::vector<TailReport> reps;
    for (double s : o.S) reps.push_back(tail_energy_for(layout, o.epsilon, s, o.delta, radius));
    std::ostringstream os;
    write_tail_csv(reps, os);
    write_text(out_dir(o) / "tail.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_framebounds(const Options& o) {
    const GeneratorSpec spec = generator_spec(o);
    const SystemLayout layout(o.scale, spec);
    const auto full = gramian(layout, layout.size());
    std::ostringstream os;
    os << "J,N,A_N,B_N\n";
    for (int J = 1; J <= o.scale; ++J) {
        const auto n = SystemLayout(J, spec).size();
        const auto e = static_cast<Eigen::Index>(n);
        const auto fb = frame_bounds_finite(make_gramian(full.G.topLeftCorner(e, e)));
        os << J << ',' << n << ',' << csv_number(fb.A) << ',' << csv_number(fb.B) << '\n';
    }
    write_text(out_dir(o) / "framebounds.csv", os.str());
    std::cout << os.str();

    std::vector<Vec2> probes;
    const double lim = std::ldexp(1.0, o.scale - 1);
    for (int a = -40; a <= 40; ++a)
        for (int b = -40; b <= 40; ++b) probes.push_back({lim * a / 40.0 + 1e-3, lim * b / 40.0 - 2e-3});
    const auto ff = full_frame_lower_check(spec, probes, o.scale);
    std::ostringstream fs_;
    fs_ << "Jmax,probes,estimate\n" << o.scale << ',' << probes.size() << ',' << csv_number(ff.estimate) << '\n';
    write_text(out_dir(o) / "full_frame.csv", fs_.str());
    std::cout << fs_.str();
    return 0;
}

int cmd_asymptotics(const Options& o) {
    const double r = o.r > 0.0 ? o.r : 4.0;
    const auto table = asymptotics_table(generator_spec(o), o.scale_lo, o.scale, o.deltas, r);
    std::ostringstream os;
    write_asymptotics_csv(table, os);
    write_text(out_dir(o) / "asymptotics.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_decay(const Options& o) {
    const auto ph = phantom(parse_phantom_kind(o.phantom), o.size, o.size, 1, o.seed);
    const DigitalShearlet sh(o.size, o.size, o.shearlet_scales);
    const WaveletTransform wv(o.size, o.size, o.wavelet_levels, parse_wavelet_filter(o.wavelet));
    std::vector<std::size_t> Ns;
    for (std::size_t n = 16; n <= static_cast<std::size_t>(o.size) * o.size; n *= 2) Ns.push_back(n);
    const auto dir = out_dir(o);
    std::ostringstream summary;
    summary << "transform,slope\n";
    for (const auto& [name, T] : {std::pair<std::string, const SparsifyingTransform*>{"shearlet", &sh}, {"wavelet", &wv}}) {
        const auto curve = best_nterm_decay(ph.reference, *T, Ns);
        std::ostringstream os;
        write_decay_csv(curve, os);
        write_text(dir / ("decay_" + name + ".csv"), os.str());
        summary << name << ',' << csv_number(curve.slope) << '\n';
    }
    write_text(dir / "decay_summary.csv", summary.str());
    std::cout << summary.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized sampling with compactly supported shearlets"};
    app.fallthrough();
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Options o;
    std::string config;
    app.add_option("--config", config, "JSON file mapping flag names to values");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--scale", o.scale, "scale cap J");
    app.add_option("--scale-lo", o.scale_lo, "smallest J for asymptotics");
    app.add_option("--epsilon", o.epsilon, "sampling density");
    app.add_option("--theta", o.theta, "stability threshold");
    app.add_option("--delta", o.delta, "oversampling exponent");
    app.add_option("--r", o.r, "decay exponent");
    app.add_option("--grid", o.grid, "sampling grid M1xM2");
    app.add_option("--lambda", o.lambda, "l1 weight, 0 for the default rule");
    app.add_option("--iters", o.iters, "l1 iterations");
    app.add_option("--mask-kind", o.mask_kind, "radial, spiral or full");
    app.add_option("--fraction", o.fraction, "target sampling fraction");
    app.add_option("--size", o.size, "image side");
    app.add_option("--channels", o.channels, "coil channels");
    app.add_option("--phantom", o.phantom, "cartoon or shepp_like");
    app.add_option("--shearlet-scales", o.shearlet_scales, "digital shearlet scales");
    app.add_option("--wavelet-levels", o.wavelet_levels, "wavelet levels");
    app.add_option("--wavelet", o.wavelet, "haar or d4");
    std::string S_list, deltas_list, filter_list;
    app.add_option("--S", S_list, "tail grid multipliers, comma separated");
    app.add_option("--deltas", deltas_list, "asymptotics deltas, comma separated");
    app.add_option("--radius", o.radius, "tail truncation radius, 0 for automatic");
    app.add_option("--max-M", o.max_M, "search budget for ssr");
    app.add_option("--spline-order", o.spline_order, "B-spline order");
    app.add_option("--moment-filter", filter_list, "finite difference filter, comma separated");
    app.add_option("--alpha", o.alpha, "vanishing moments");
    app.add_option("--decay-r", o.decay_r, "certified decay exponent of the generators");
    app.add_flag("--natural-support", o.natural_support, "keep generators on their natural support");

    std::map<std::string, std::function<int(const Options&)>> commands{
        {"phantom", cmd_phantom},         {"mask", cmd_mask},     {"recon", cmd_recon},
        {"ssr", cmd_ssr},                 {"angle", cmd_angle},   {"gs", cmd_gs},
        {"tail", cmd_tail},               {"framebounds", cmd_framebounds},
        {"asymptotics", cmd_asymptotics}, {"decay", cmd_decay},
    };
    for (const auto& [name, fn] : commands) app.add_subcommand(name);

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (!S_list.empty()) o.S = parse_list(S_list);
        if (!deltas_list.empty()) o.deltas = parse_list(deltas_list);
        if (!filter_list.empty()) o.moment_filter = parse_list(filter_list);
        for (const auto& [name, fn] : commands)
            if (app.got_subcommand(name)) return fn(o);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
