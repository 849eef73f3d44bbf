#pragma once

// Frozen reference values, computed once with 30-digit arithmetic from the
// closed forms and pinned here so every suite checks against the same
// numbers. Q(y) = (3 sech^2(2y))^{1/4}.
//
//   int Q      = sqrt(pi) 3^{1/4} Gamma(1/4) / (2 Gamma(3/4))
//   int Q^2    = sqrt(3) pi / 2
//   int Q^6    = 3 sqrt(3) pi / 4
//   int (Q')^2 = sqrt(3) pi / 4
//   m0         = (1/4) int Q

namespace oracle {

inline constexpr double int_Q = 3.45082180766962799;
inline constexpr double int_Q2 = 2.72069904635132678;
inline constexpr double int_Q6 = 4.08104856952699016;
inline constexpr double int_Qp2 = 1.36034952317566339;
inline constexpr double m0 = 0.862705451917406998;
inline constexpr double m0_sq = 0.744260696768017; // m0^2
inline constexpr double Q0 = 1.31607401295249246;  // 3^{1/4}

} // namespace oracle
