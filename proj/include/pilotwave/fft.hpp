#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace pilotwave::fft {

// FFTW's planner is not thread-safe; executions on distinct plans are.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// In-place complex FFT. sign = FFTW_FORWARD or FFTW_BACKWARD.
/// The backward transform is unnormalized (FFTW convention); callers that
/// round-trip must divide by N.
inline void transform(std::vector<std::complex<double>>& data, int sign) {
    if (data.empty()) return;
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

inline void forward(std::vector<std::complex<double>>& data) { transform(data, FFTW_FORWARD); }

inline void inverse_normalized(std::vector<std::complex<double>>& data) {
    transform(data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& x : data) x *= scale;
}

/// Frequency of FFT bin k for an N-point transform at rate fs (negative
/// frequencies for k >= N/2).
inline double bin_frequency(std::size_t k, std::size_t n, double fs) {
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    return (kk < nn / 2.0 ? kk : kk - nn) * fs / nn;
}

}  // namespace pilotwave::fft
