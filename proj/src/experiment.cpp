#include "shgs/experiment.hpp"

#include "shgs/error.hpp"
#include "shgs/io.hpp"

#include <ostream>
#include <sstream>

namespace shgs {

namespace {

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        std::string msg = e.what();
        const std::string prefix = std::string(to_string(e.code())) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        throw Error(e.code(), name + ": " + msg);
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    const bool write = !out_dir.empty();
    const Phantom ph = stage("phantom", [&] { return phantom(cfg.phantom, cfg.nx, cfg.ny, cfg.channels, cfg.seed); });
    const DigitalShearlet sh = stage("shearlet", [&] { return DigitalShearlet(cfg.nx, cfg.ny, cfg.shearlet_scales); });
    const WaveletTransform wv =
        stage("wavelet", [&] { return WaveletTransform(cfg.nx, cfg.ny, cfg.wavelet_levels, cfg.wavelet); });
    if (write)
        stage("write phantom", [&] {
            write_pgm(out_dir / "reference.pgm", ph.reference, true);
            write_kspace(out_dir / "kspace.json", ph.kspace);
            return 0;
        });

    ExperimentResult result;
    result.reference = ph.reference;
    for (const auto& [kind, target] : cfg.masks) {
        const std::string name = to_string(kind);
        const Mask mask = stage("mask " + name, [&] { return make_mask(kind, cfg.nx, cfg.ny, target); });
        ExperimentRow row;
        row.mask = kind;
        row.fraction = mask.fraction;

        const Image fourier = stage("inversion " + name, [&] { return sum_of_squares(fourier_inversion(ph.kspace, mask)); });
        auto l1 = [&](const SparsifyingTransform& T, const std::string& label) {
            return stage(label + " " + name, [&] {
                std::vector<Image> channels;
                for (const auto& X : ph.kspace.data) {
                    const L1Result r = l1_reconstruct(X, mask, T, cfg.l1);
                    row.non_convergence = row.non_convergence || r.non_convergence;
                    channels.push_back(r.image.cwiseAbs());
                }
                return sum_of_squares(channels);
            });
        };
        const Image shearlet = l1(sh, "shearlet");
        const Image wavelet = l1(wv, "wavelet");
        row.shearlet = relative_error(shearlet, ph.reference);
        row.wavelet = relative_error(wavelet, ph.reference);
        row.fourier = relative_error(fourier, ph.reference);
        result.rows.push_back(row);

        if (write)
            stage("write " + name, [&] {
                Image pattern = mask.pattern.cast<double>();
                write_pgm(out_dir / ("mask_" + name + ".pgm"), pattern);
                write_pgm(out_dir / (name + "_shearlet.pgm"), shearlet, true);
                write_pgm(out_dir / (name + "_wavelet.pgm"), wavelet, true);
                write_pgm(out_dir / (name + "_fourier.pgm"), fourier, true);
                return 0;
            });
    }
    if (write)
        stage("write table", [&] {
            std::ostringstream os;
            write_error_table(result, os);
            write_atomic(out_dir / "errors.csv", os.str());
            return 0;
        });
    return result;
}

void write_error_table(const ExperimentResult& result, std::ostream& out) {
    out << "mask,fraction,shearlet,wavelet,fourier\n";
    for (const auto& r : result.rows)
        out << to_string(r.mask) << ',' << csv_number(r.fraction) << ',' << csv_number(r.shearlet) << ','
            << csv_number(r.wavelet) << ',' << csv_number(r.fourier) << '\n';
}

} // namespace shgs
