#pragma once

#include <string>

namespace loctriv {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kCommuteTol = 1e-10;  // commutators and idempotency
inline constexpr double kEigenTol = 1e-9;
inline constexpr double kCenterTol = 1e-7;    // eigenvalue clustering of central elements
inline constexpr double kReconstructionTol = 1e-9;
inline constexpr double kNormTol = 1e-10;

inline constexpr int kMaxTermDim = 4096;
inline constexpr int kMaxCarrierDim = 64;
inline constexpr long kMaxExactDim = 1L << 14;
inline constexpr long kDenseSolverDim = 1L << 10;

// key=value lines listing every tolerance and cap, for reports.
std::string tolerance_report();

}  // namespace loctriv
