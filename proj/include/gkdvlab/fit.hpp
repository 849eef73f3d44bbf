#pragma once

// Small dense least-squares fits used by the diagnostics: polynomial fits of
// left tails, straight-line fits in log-log coordinates for scaling
// exponents, and the R^2 goodness measure the class checks gate on.

#include <Eigen/Dense>

#include "core.hpp"

namespace gkdvlab {

struct PolyFit {
    std::vector<double> coeffs; // ascending powers
    double r2 = 0.0;            // 1 - SS_res / SS_tot
    double rms_residual = 0.0;
};

inline double polyval(const std::vector<double>& coeffs, double x) {
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
    return v;
}

inline PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const int m = (int)x.size();
    if (degree < 0 || m < degree + 1) throw ConfigInvalid("polyfit: too few points");
    Eigen::MatrixXd A(m, degree + 1);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        double p = 1.0;
        for (int j = 0; j <= degree; ++j) {
            A(i, j) = p;
            p *= x[i];
        }
        b[i] = y[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    PolyFit out;
    out.coeffs.assign(c.data(), c.data() + degree + 1);
    double ss_res = 0.0, ss_tot = 0.0, mean = b.mean();
    for (int i = 0; i < m; ++i) {
        const double r = b[i] - A.row(i).dot(c);
        ss_res += r * r;
        ss_tot += (b[i] - mean) * (b[i] - mean);
    }
    out.rms_residual = std::sqrt(ss_res / m);
    out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    PolyFit p = polyfit(x, y, 1);
    return {p.coeffs[1], p.coeffs[0], p.r2};
}

// Fit y ~ C x^p through log-log regression; all y must be positive.
struct PowerFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
};

inline PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ConfigInvalid("fit_power_law: positive data required");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    LineFit f = fit_line(lx, ly);
    return {f.slope, std::exp(f.intercept), f.r2};
}

} // namespace gkdvlab
