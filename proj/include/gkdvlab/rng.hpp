#pragma once

// Seeded random smooth test fields: sums of Gaussian bumps with random
// centers and widths. Low-frequency by construction, which is where the
// coercivity of the linearized operator is tightest.

#include <random>

#include "core.hpp"

namespace gkdvlab {

struct BumpEnsemble {
    int bumps = 4;
    double center_lo = -10.0, center_hi = 10.0;
    double width_lo = 0.5, width_hi = 5.0;
};

inline Field random_bumps(const LineGrid& g, std::mt19937_64& rng,
                          const BumpEnsemble& ens = {}) {
    std::uniform_real_distribution<double> center(ens.center_lo, ens.center_hi);
    std::uniform_real_distribution<double> width(ens.width_lo, ens.width_hi);
    std::normal_distribution<double> amp(0.0, 1.0);
    Field out{Grid{g}};
    for (int b = 0; b < ens.bumps; ++b) {
        const double c = center(rng), w = width(rng), a = amp(rng);
        for (int i = 0; i < g.n; ++i) {
            const double z = (g.y(i) - c) / w;
            out[i] += a * std::exp(-0.5 * z * z);
        }
    }
    return out;
}

} // namespace gkdvlab
