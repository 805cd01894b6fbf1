#include "loctriv/tolerances.hpp"

#include <sstream>

namespace loctriv {

std::string tolerance_report() {
  std::ostringstream os;
  os << "tol_hermitian=" << kHermitianTol << "\n"
     << "tol_commute=" << kCommuteTol << "\n"
     << "tol_eigen=" << kEigenTol << "\n"
     << "tol_center=" << kCenterTol << "\n"
     << "tol_reconstruction=" << kReconstructionTol << "\n"
     << "tol_norm=" << kNormTol << "\n"
     << "cap_term_dim=" << kMaxTermDim << "\n"
     << "cap_carrier_dim=" << kMaxCarrierDim << "\n"
     << "cap_exact_dim=" << kMaxExactDim << "\n"
     << "dense_solver_dim=" << kDenseSolverDim << "\n";
  return os.str();
}

}  // namespace loctriv
