#pragma once

// Phantom -> masks -> {shearlet l1, wavelet l1, Fourier inversion} per channel
// -> sum of squares -> relative-error table.

#include "shgs/recon.hpp"

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

namespace shgs {

struct ExperimentConfig {
    PhantomKind phantom = PhantomKind::Cartoon;
    int nx = 128;
    int ny = 128;
    int channels = 4;
    std::uint64_t seed = 7;
    std::vector<std::pair<MaskKind, double>> masks{{MaskKind::SpiralPhyllotaxis, 0.2037},
                                                   {MaskKind::Radial, 0.2074}};
    L1Options l1{};
    int shearlet_scales = 4;
    int wavelet_levels = 4;
    WaveletFilter wavelet = WaveletFilter::D4;
};

struct ExperimentRow {
    MaskKind mask = MaskKind::Full;
    double fraction = 0.0;
    double shearlet = 0.0;
    double wavelet = 0.0;
    double fourier = 0.0;
    bool non_convergence = false;
};

struct ExperimentResult {
    Image reference;
    std::vector<ExperimentRow> rows;
};

/// Writes images, masks, k-space and errors.csv into out_dir unless it is empty.
/// Errors are rethrown with the failing stage prepended.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Columns mask,fraction,shearlet,wavelet,fourier.
void write_error_table(const ExperimentResult& result, std::ostream& out);

} // namespace shgs
