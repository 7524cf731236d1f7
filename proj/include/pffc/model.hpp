#pragma once

#include "pffc/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pffc {

/// Physical and regularization constants of the fracture model.
struct ModelParams {
  double gc = 1.0;        ///< fracture toughness
  double eps = 0.1;       ///< phase-field regularization length
  double kappa = 1e-10;   ///< bulk regularization keeping stiffness positive
  double gamma = 1e5;     ///< irreversibility penalty weight
  double eta = 1e3;       ///< viscous/convexification weight
  double eta0 = 1.0;      ///< displacement initial-condition weight
  double mu = 1.0;        ///< first Lame parameter (shear)
  double lambda = 1.0;    ///< second Lame parameter

  /// Throws std::invalid_argument on hard violations; returns soft warnings
  /// (e.g. gamma/eta < 10, which undermines the penalty's dominance).
  std::vector<std::string> validate() const;
};

/// Tracking objective data.
struct CostParams {
  double alpha = 1e-10;  ///< Tikhonov weight
  ScalarField phi_d;     ///< desired phase-field, nodal
  Control q_d;           ///< nominal control on Gamma_N nodes

  void validate() const;
};

/// Plane-strain Lame parameters from Young's modulus and Poisson ratio.
std::pair<double, double> lame_from_engineering(double youngs, double poisson);

/// Degradation g(phi) = (1 - kappa) phi^2 + kappa.
inline double degradation(double phi, double kappa) {
  return (1.0 - kappa) * phi * phi + kappa;
}

/// d/dphi of the degradation function.
inline double degradation_deriv(double phi, double kappa) {
  return 2.0 * (1.0 - kappa) * phi;
}

/// Linear elastic stress sigma(e) = 2 mu e + lambda tr(e) I for a
/// symmetric 2x2 strain.
inline Eigen::Matrix2d stress(const Eigen::Matrix2d& e, double mu, double lambda) {
  Eigen::Matrix2d s = 2.0 * mu * e;
  const double tr = lambda * (e(0, 0) + e(1, 1));
  s(0, 0) += tr;
  s(1, 1) += tr;
  return s;
}

/// Pointwise activity indicator of the irreversibility penalty:
/// 1 iff phi grew strictly relative to the previous time step.
inline double active_indicator(double phi_curr, double phi_prev) {
  return phi_curr > phi_prev ? 1.0 : 0.0;
}

}  // namespace pffc
