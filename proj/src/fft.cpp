#include "subfourier/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace subfourier {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    std::vector<std::complex<double>> scratch(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                     FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                      FFTW_BACKWARD, flags);
    if (!forward_plan_ || !backward_plan_) throw std::runtime_error("FFTW planning failed");
}

// Plans live in the static cache and are destroyed at exit only.
FftPlan::~FftPlan() {
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

const FftPlan& FftPlan::get(std::size_t n) {
    static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
    std::lock_guard lock(planner_mutex());
    auto& slot = cache[n];
    if (!slot) slot.reset(new FftPlan(n));
    return *slot;
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
    if (data.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()),
                     as_fftw(data.data()));
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
    if (data.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()),
                     as_fftw(data.data()));
}

}  // namespace subfourier
