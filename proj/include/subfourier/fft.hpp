#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace subfourier {

// In-place complex DFT of a fixed length backed by FFTW. Plans are made with
// FFTW_ESTIMATE so results do not depend on timing measurements, and are
// shared between threads (fftw_execute_dft is reentrant).
class FftPlan {
public:
    // Cached plan for length n; creation is serialized internally.
    static const FftPlan& get(std::size_t n);

    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const { return n_; }

    // X_k = sum_j x_j exp(-2 pi i jk/n), unnormalized.
    void forward(std::span<std::complex<double>> data) const;
    // x_j = sum_k X_k exp(+2 pi i jk/n), unnormalized.
    void backward(std::span<std::complex<double>> data) const;

private:
    explicit FftPlan(std::size_t n);

    std::size_t n_;
    void* forward_plan_;
    void* backward_plan_;
};

}  // namespace subfourier
