#include "potmeter/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "potmeter/errors.hpp"

namespace potmeter::fft {
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

// FFTW_UNALIGNED lets the cached plan execute on any caller buffer via
// fftw_execute_dft regardless of SIMD alignment.
PlanPair& plans_for(std::size_t n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p.fwd == nullptr || p.bwd == nullptr) {
        throw Error("FFTW plan creation failed for size " + std::to_string(n));
    }
    return cache.emplace(n, p).first->second;
}

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& in,
                                      bool forward_dir) {
    if (in.empty()) throw Error("FFT of empty vector");
    PlanPair& p = plans_for(in.size());
    std::vector<std::complex<double>> in_copy(in);
    std::vector<std::complex<double>> out(in.size());
    fftw_execute_dft(forward_dir ? p.fwd : p.bwd,
                     reinterpret_cast<fftw_complex*>(in_copy.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) {
    return run(in, true);
}

std::vector<std::complex<double>> backward(const std::vector<std::complex<double>>& in) {
    return run(in, false);
}

void warm_plan(std::size_t n) { plans_for(n); }

}  // namespace potmeter::fft
