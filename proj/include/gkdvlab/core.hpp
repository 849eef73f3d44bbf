#pragma once

// Core value types shared by every module: uniform grids on a truncated line,
// periodic grids, sampled scalar fields, and the error taxonomy.
//
// Conventions used throughout the library:
//  * fields are immutable value types; every operation returns a fresh Field
//  * LineGrid spacing is h = (y_max - y_min) / (n - 1), nodes include both ends
//  * PeriodicGrid covers [-L/2, L/2) with n equispaced nodes, h = L / n
//  * all solver tolerances are fixed constants declared next to their use

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gkdvlab {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear-system pathologies in the bordered solver.
struct IncompatibleSource : NumericsError { using NumericsError::NumericsError; };
struct SingularSystem : NumericsError { using NumericsError::NumericsError; };

// Profile construction violations.
struct AsymptoteMismatch : NumericsError { using NumericsError::NumericsError; };
struct ClassViolation : NumericsError { using NumericsError::NumericsError; };
struct OddnessViolation : NumericsError { using NumericsError::NumericsError; };

// Domain / parameter validation.
struct DomainTooSmall : NumericsError { using NumericsError::NumericsError; };
struct GridTooSmall : NumericsError { using NumericsError::NumericsError; };
struct ParameterWindow : NumericsError { using NumericsError::NumericsError; };
struct DenominatorVanishes : NumericsError { using NumericsError::NumericsError; };

// Evolution / decomposition failures.
struct NotInTube : NumericsError { using NumericsError::NumericsError; };
struct NoConvergence : NumericsError { using NumericsError::NumericsError; };
struct NonFinite : NumericsError { using NumericsError::NumericsError; };
struct ConfigInvalid : NumericsError { using NumericsError::NumericsError; };

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Uniform grid on a truncated line [y_min, y_max], endpoints included.
struct LineGrid {
    double y_min = -60.0;
    double y_max = 60.0;
    int n = (1 << 14) + 1; // odd count puts y = 0 on the grid, h = 120/2^14 exactly

    LineGrid() = default;
    LineGrid(double a, double b, int m) : y_min(a), y_max(b), n(m) {
        if (!(y_min < 0.0 && 0.0 < y_max) || n < 16)
            throw ConfigInvalid("LineGrid: need y_min < 0 < y_max and n >= 16");
    }

    double h() const { return (y_max - y_min) / (n - 1); }
    double y(int i) const { return y_min + h() * i; }
    bool symmetric() const { return std::abs(y_min + y_max) < 1e-12 * (y_max - y_min); }

    // Index of the node nearest to y0 (clamped).
    int index_near(double y0) const {
        int i = (int)std::lround((y0 - y_min) / h());
        return i < 0 ? 0 : (i >= n ? n - 1 : i);
    }

    bool operator==(const LineGrid& o) const {
        return y_min == o.y_min && y_max == o.y_max && n == o.n;
    }
};

// Periodic grid on [-L/2, L/2); n must be a power of two for the FFT path.
struct PeriodicGrid {
    double length = 64.0 * M_PI;
    int n = 1 << 12;

    PeriodicGrid() = default;
    PeriodicGrid(double L, int m) : length(L), n(m) {
        if (!(length > 0.0) || !is_pow2(n))
            throw ConfigInvalid("PeriodicGrid: need length > 0 and n a power of two");
    }

    double h() const { return length / n; }
    double x(int i) const { return -0.5 * length + h() * i; }

    bool operator==(const PeriodicGrid& o) const {
        return length == o.length && n == o.n;
    }
};

using Grid = std::variant<LineGrid, PeriodicGrid>;

inline int grid_size(const Grid& g) {
    return std::visit([](const auto& gr) { return gr.n; }, g);
}
inline double grid_h(const Grid& g) {
    return std::visit([](const auto& gr) { return gr.h(); }, g);
}

// Sampled scalar field over one grid. Values are node samples.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    Field(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if ((int)values.size() != grid_size(grid))
            throw ConfigInvalid("Field: value count does not match grid");
    }
    explicit Field(Grid g) : grid(g), values(grid_size(g), 0.0) {}

    int n() const { return (int)values.size(); }
    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }

    const LineGrid& line() const {
        if (auto* p = std::get_if<LineGrid>(&grid)) return *p;
        throw ConfigInvalid("Field: expected a line grid");
    }
    const PeriodicGrid& periodic() const {
        if (auto* p = std::get_if<PeriodicGrid>(&grid)) return *p;
        throw ConfigInvalid("Field: expected a periodic grid");
    }
    bool on_line() const { return std::holds_alternative<LineGrid>(grid); }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
    void require_finite(const char* what) const {
        if (!finite()) throw NonFinite(std::string("non-finite values in ") + what);
    }
};

// Pointwise arithmetic helpers (same grid assumed).
inline Field map2(const Field& a, const Field& b, auto&& f) {
    Field out(a.grid);
    for (int i = 0; i < a.n(); ++i) out[i] = f(a[i], b[i]);
    return out;
}
inline Field operator+(const Field& a, const Field& b) { return map2(a, b, [](double x, double y) { return x + y; }); }
inline Field operator-(const Field& a, const Field& b) { return map2(a, b, [](double x, double y) { return x - y; }); }
inline Field operator*(const Field& a, const Field& b) { return map2(a, b, [](double x, double y) { return x * y; }); }
inline Field operator*(double s, const Field& a) {
    Field out(a.grid);
    for (int i = 0; i < a.n(); ++i) out[i] = s * a[i];
    return out;
}
inline Field& operator+=(Field& a, const Field& b) {
    for (int i = 0; i < a.n(); ++i) a[i] += b[i];
    return a;
}
inline Field& operator-=(Field& a, const Field& b) {
    for (int i = 0; i < a.n(); ++i) a[i] -= b[i];
    return a;
}

// Sample a callable on a grid.
template <class G, class F>
Field sample(const G& g, F&& f) {
    Field out{Grid{g}};
    for (int i = 0; i < g.n; ++i) {
        if constexpr (std::is_same_v<G, LineGrid>)
            out[i] = f(g.y(i));
        else
            out[i] = f(g.x(i));
    }
    return out;
}

} // namespace gkdvlab
