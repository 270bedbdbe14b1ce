#pragma once

#include <functional>

#include "spcp/model.hpp"

namespace spcp {

/// Snapshot of one NSA iteration, produced before the state advances.
/// Indices follow the recurrences: at step k the method produces
/// X_{k+1}, Z_{k+1}, S_{k+1}, Yhat_{k+1}, Y_{k+1} from (Z_k, Y_k, rho_k).
struct NsaIterate {
  int k = 0;
  const Matrix& X;     // X_{k+1}
  const Matrix& Z;     // Z_{k+1}
  const Matrix& S;     // S_{k+1}
  const Matrix& Yprev; // Y_k
  const Matrix& Y;     // Y_{k+1}
  const Matrix& Yhat;  // Yhat_{k+1}
  double theta = 0.0;  // theta_k
  double rho = 0.0;    // rho_k
};

using NsaObserver = std::function<void(const NsaIterate&)>;

}  // namespace spcp
