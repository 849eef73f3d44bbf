#pragma once

// FFT-backed operations on periodic grids: spectral derivatives, the unified
// differentiate() dispatch, and band-limited resampling at arbitrary uniform
// point sets (Bluestein chirp-z), which the soliton decomposition uses to
// evaluate a periodic solution on a rescaled window.

#include <algorithm>
#include <complex>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "fd.hpp"

namespace gkdvlab {

namespace detail {

// Plan cache keyed by (size, sign). FFTW plan creation is not thread-safe;
// execution happens on the plan's own buffers, so everything stays under the
// lock. Transforms here are unnormalized, matching FFTW.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine e;
        return e;
    }

    void transform(std::vector<std::complex<double>>& a, int sign) {
        const int n = (int)a.size();
        std::lock_guard<std::mutex> lock(mutex_);
        Plan& p = plan(n, sign);
        std::copy(a.begin(), a.end(), reinterpret_cast<std::complex<double>*>(p.in));
        fftw_execute(p.plan);
        std::copy(reinterpret_cast<std::complex<double>*>(p.out),
                  reinterpret_cast<std::complex<double>*>(p.out) + n, a.begin());
    }

  private:
    struct Plan {
        fftw_complex* in = nullptr;
        fftw_complex* out = nullptr;
        fftw_plan plan = nullptr;
    };

    Plan& plan(int n, int sign) {
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        Plan p;
        p.in = fftw_alloc_complex(n);
        p.out = fftw_alloc_complex(n);
        p.plan = fftw_plan_dft_1d(n, p.in, p.out, sign, FFTW_ESTIMATE);
        if (!p.plan) throw NumericsError("fftw plan creation failed");
        return plans_.emplace(key, p).first->second;
    }

    FftEngine() = default;
    std::mutex mutex_;
    std::map<std::pair<int, int>, Plan> plans_;
};

} // namespace detail

// In-place unnormalized DFT; sign -1 forward, +1 backward (FFTW convention).
inline void fft(std::vector<std::complex<double>>& a, int sign) {
    detail::FftEngine::instance().transform(a, sign);
}

// Signed integer frequency of DFT bin i for size n: 0..n/2-1, -n/2..-1.
inline int fft_freq(int i, int n) { return i < n / 2 ? i : i - n; }

// m-th spectral derivative of a periodic field. The Nyquist mode is zeroed
// for odd m (its derivative has no real representative on the grid).
inline Field spectral_derivative(const Field& f, int m) {
    const PeriodicGrid& g = f.periodic();
    const int n = g.n;
    std::vector<std::complex<double>> a(n);
    for (int i = 0; i < n; ++i) a[i] = f[i];
    fft(a, -1);
    const double k0 = 2.0 * M_PI / g.length;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> ik(0.0, k0 * fft_freq(i, n));
        std::complex<double> mult = 1.0;
        for (int j = 0; j < m; ++j) mult *= ik;
        a[i] *= mult;
    }
    if (m % 2 == 1) a[n / 2] = 0.0;
    fft(a, +1);
    Field out(f.grid);
    for (int i = 0; i < n; ++i) out[i] = a[i].real() / n;
    return out;
}

// Unified derivative: finite differences on line grids, spectral on periodic.
inline Field differentiate(const Field& f, int m, int acc = 6) {
    if (f.on_line()) return fd_derivative(f, m, acc);
    return spectral_derivative(f, m);
}

// Values of the trigonometric interpolant of a periodic field at the m
// uniformly spaced points x_j = x0 + j*dx. Bluestein chirp-z transform:
// one (n-1)-term sum at m targets costs three FFTs of the padded size.
// The Nyquist mode is dropped (band-limited data keeps it empty anyway).
inline std::vector<double> resample_periodic(const Field& u, double x0, double dx, int m) {
    const PeriodicGrid& g = u.periodic();
    const int n = g.n;
    if (m < 1) throw ConfigInvalid("resample_periodic: m must be positive");

    std::vector<std::complex<double>> c(n);
    for (int i = 0; i < n; ++i) c[i] = u[i];
    fft(c, -1);

    // a_r = (1/n) c_freq e^{i k_freq (x0 + L/2)}, freq = r - (n/2 - 1),
    // giving X_j = sum_r a_r W^{(freq) j} with W = e^{2 pi i dx / L}.
    const int K = n - 1; // all modes except Nyquist
    const int r0 = n / 2 - 1;
    const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
    const long double q = (long double)dx / (long double)g.length; // W = e^{2 pi i q}
    const long double s0 = ((long double)x0 + 0.5L * (long double)g.length) / (long double)g.length;

    std::vector<std::complex<double>> a(K);
    for (int r = 0; r < K; ++r) {
        const int freq = r - r0;
        const int bin = freq >= 0 ? freq : freq + n;
        const long double ph = two_pi * (long double)freq * s0;
        const std::complex<double> rot((double)std::cos(ph), (double)std::sin(ph));
        a[r] = c[bin] * rot / (double)n;
    }

    // Bluestein: X_j = W^{-r0 j} W^{j^2/2} sum_r [a_r W^{r^2/2}] W^{-(j-r)^2/2}.
    int P = 1;
    while (P < K + m - 1) P <<= 1;
    std::vector<std::complex<double>> b(P, 0.0), ker(P, 0.0);
    auto chirp = [&](long double idx2) { // e^{i pi q idx2}
        const long double ph = 0.5L * two_pi * q * idx2;
        return std::complex<double>((double)std::cos(ph), (double)std::sin(ph));
    };
    for (int r = 0; r < K; ++r) b[r] = a[r] * chirp((long double)r * r);
    for (int l = -(K - 1); l < m; ++l) {
        const int idx = l >= 0 ? l : l + P;
        ker[idx] = chirp(-(long double)l * l);
    }
    fft(b, -1);
    fft(ker, -1);
    for (int i = 0; i < P; ++i) b[i] *= ker[i];
    fft(b, +1);

    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) {
        const long double jj = (long double)j;
        const long double ph = 0.5L * two_pi * q * jj * jj - two_pi * q * (long double)r0 * jj;
        const std::complex<double> rot((double)std::cos(ph), (double)std::sin(ph));
        out[j] = (b[j].real() * rot.real() - b[j].imag() * rot.imag()) / P;
    }
    return out;
}

} // namespace gkdvlab
