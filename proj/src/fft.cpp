#include "shgs/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace shgs {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int rows, int cols, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(rows, cols, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Eigen is column-major, so the FFTW row-major shape is (cols, rows).
        auto* in = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
        auto* out = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
        fftw_plan plan = fftw_plan_dft_2d(cols, rows, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

Eigen::MatrixXcd transform(const Eigen::MatrixXcd& x, int sign) {
    const int rows = static_cast<int>(x.rows()), cols = static_cast<int>(x.cols());
    Eigen::MatrixXcd in = x;
    Eigen::MatrixXcd out(rows, cols);
    if (in.size() == 0) return out;
    fftw_execute_dft(cache().get(rows, cols, sign), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    out /= std::sqrt(static_cast<double>(rows) * cols);
    return out;
}

} // namespace

Eigen::MatrixXcd fft2(const Eigen::MatrixXcd& x) { return transform(x, FFTW_FORWARD); }
Eigen::MatrixXcd ifft2(const Eigen::MatrixXcd& X) { return transform(X, FFTW_BACKWARD); }

} // namespace shgs
