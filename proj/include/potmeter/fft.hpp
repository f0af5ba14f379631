#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace potmeter::fft {

// Unnormalized complex-to-complex DFT (FFTW sign convention: forward applies
// exp(-i 2 pi j m / n)).  Plans are created with FFTW_ESTIMATE so results are
// bit-reproducible across runs (no timing-dependent algorithm choice), cached
// per size, and creation is serialized behind a mutex so callers may
// transform from multiple threads.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> backward(const std::vector<std::complex<double>>& in);

// Creates (and caches) the plans for size n up front; useful before fanning
// out work across threads.
void warm_plan(std::size_t n);

}  // namespace potmeter::fft
