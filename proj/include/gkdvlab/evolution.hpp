#pragma once

// Periodic pseudo-spectral solver for u_t + (u_xx + u^5)_x = 0. The cubic
// dispersion is integrated exactly through a unitary integrating factor
// (phases e^{ik^3 dt}), so the time step is limited by the nonlinear
// transport u_t ~ -5u^4 u_x, not by k_max^3: an RK4 stage is stable while
// dt * k_eff * 5 max|u|^4 stays below ~2.8. stable_dt encodes that bound;
// the config still records dt <= cfl_const * h^3 with the factor the chosen
// step implies, keeping the relation between the fields explicit.

#include <complex>
#include <vector>

#include "fft.hpp"
#include "ground_state.hpp"

namespace gkdvlab {

struct SolverConfig {
    PeriodicGrid grid;
    double dt = 0.0;
    double t_end = 1.0;
    double dealias = 2.0 / 3.0;
    double cfl_const = 1.0;
    bool linear_only = false;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigInvalid("SolverConfig: dt > 0 required");
        if (!(dealias > 0.0 && dealias <= 1.0))
            throw ConfigInvalid("SolverConfig: dealias fraction in (0,1]");
        const double h = grid.h();
        if (!(dt <= cfl_const * h * h * h * (1.0 + 1e-12)))
            throw ConfigInvalid("SolverConfig: dt exceeds cfl_const * h^3");
    }
};

// Largest stable step for data of the given amplitude, with a safety factor.
inline double stable_dt(const PeriodicGrid& g, double umax, double dealias = 2.0 / 3.0,
                        double safety = 0.5) {
    const double k_eff = dealias * M_PI / g.h();
    const double speed = 5.0 * umax * umax * umax * umax;
    return safety * 2.8 / (k_eff * speed + 1e-300);
}

// Config helper: transport-limited step, cfl_const recorded to match.
inline SolverConfig make_solver(const PeriodicGrid& g, double umax, double t_end,
                                double dealias = 2.0 / 3.0) {
    SolverConfig cfg;
    cfg.grid = g;
    cfg.t_end = t_end;
    cfg.dealias = dealias;
    cfg.dt = stable_dt(g, umax, dealias);
    const double h3 = g.h() * g.h() * g.h();
    cfg.cfl_const = std::max(1.0, cfg.dt / h3 * (1.0 + 1e-9));
    return cfg;
}

namespace detail {

// Spectral state of one solver instance; reused across steps.
struct SpectralWork {
    int n = 0;
    std::vector<std::complex<double>> uhat, k1, k2, k3, k4, stage;
    std::vector<double> kfreq;      // signed wavenumbers
    std::vector<std::complex<double>> e_half, e_full; // exp(i k^3 dt/2), dt
    std::vector<double> mask;       // dealias mask
    double dt = 0.0;

    void prepare(const PeriodicGrid& g, double step, double dealias) {
        if (n != g.n) {
            n = g.n;
            uhat.resize(n); k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n);
            stage.resize(n);
            kfreq.resize(n);
            e_half.resize(n); e_full.resize(n);
            mask.resize(n);
            const double k0 = 2.0 * M_PI / g.length;
            for (int i = 0; i < n; ++i) kfreq[i] = k0 * fft_freq(i, n);
            dt = 0.0;
        }
        if (dt != step) {
            dt = step;
            for (int i = 0; i < n; ++i) {
                const double ph = kfreq[i] * kfreq[i] * kfreq[i] * 0.5 * dt;
                e_half[i] = {std::cos(ph), std::sin(ph)};
                e_full[i] = e_half[i] * e_half[i];
            }
        }
        const double kcut = dealias * M_PI / g.h();
        for (int i = 0; i < n; ++i) mask[i] = std::abs(kfreq[i]) <= kcut ? 1.0 : 0.0;
        mask[n / 2] = 0.0; // Nyquist carries no odd-derivative representative
    }

    // N(a) = -ik * dealias(fft((ifft a)^5))
    void nonlinear(const std::vector<std::complex<double>>& a, std::vector<std::complex<double>>& out) {
        stage = a;
        fft(stage, +1);
        for (int i = 0; i < n; ++i) {
            const double u = stage[i].real() / n;
            const double u2 = u * u;
            stage[i] = u2 * u2 * u;
        }
        fft(stage, -1);
        for (int i = 0; i < n; ++i)
            out[i] = std::complex<double>(0.0, -kfreq[i]) * mask[i] * stage[i];
    }
};

inline SpectralWork& spectral_work() {
    thread_local SpectralWork w;
    return w;
}

} // namespace detail

// One integrating-factor RK4 step.
inline Field step(const Field& u, const SolverConfig& cfg) {
    cfg.validate();
    const PeriodicGrid& g = u.periodic();
    if (!(g == cfg.grid)) throw ConfigInvalid("step: field grid differs from config grid");
    detail::SpectralWork& w = detail::spectral_work();
    w.prepare(g, cfg.dt, cfg.dealias);
    const int n = g.n;

    for (int i = 0; i < n; ++i) w.uhat[i] = u[i];
    fft(w.uhat, -1);

    if (cfg.linear_only) {
        for (int i = 0; i < n; ++i) w.uhat[i] *= w.e_full[i];
    } else {
        const double dt = cfg.dt;
        w.nonlinear(w.uhat, w.k1);
        for (int i = 0; i < n; ++i) w.stage[i] = w.e_half[i] * (w.uhat[i] + 0.5 * dt * w.k1[i]);
        auto s1 = w.stage;
        w.nonlinear(s1, w.k2);
        for (int i = 0; i < n; ++i) w.stage[i] = w.e_half[i] * w.uhat[i] + 0.5 * dt * w.k2[i];
        auto s2 = w.stage;
        w.nonlinear(s2, w.k3);
        for (int i = 0; i < n; ++i)
            w.stage[i] = w.e_full[i] * w.uhat[i] + dt * w.e_half[i] * w.k3[i];
        auto s3 = w.stage;
        w.nonlinear(s3, w.k4);
        for (int i = 0; i < n; ++i)
            w.uhat[i] = w.e_full[i] * w.uhat[i] +
                        dt / 6.0 *
                            (w.e_full[i] * w.k1[i] +
                             2.0 * w.e_half[i] * (w.k2[i] + w.k3[i]) + w.k4[i]);
    }

    fft(w.uhat, +1);
    Field out(u.grid);
    for (int i = 0; i < n; ++i) out[i] = w.uhat[i].real() / n;
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(out[i]))
            throw NonFinite("step: non-finite value (blowup beyond resolution)");
    return out;
}

// Advance a fixed number of steps.
inline Field run_steps(Field u, const SolverConfig& cfg, long nsteps) {
    for (long k = 0; k < nsteps; ++k) u = step(u, cfg);
    return u;
}

inline double max_abs(const Field& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

} // namespace gkdvlab
