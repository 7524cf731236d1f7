#include "pffc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace pffc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

std::vector<std::string> ModelParams::validate() const {
  require(gc > 0.0, "ModelParams: gc must be positive");
  require(eps > 0.0, "ModelParams: eps must be positive");
  require(kappa > 0.0 && kappa < 1.0, "ModelParams: kappa must lie in (0,1)");
  require(gamma > 0.0, "ModelParams: gamma must be positive");
  require(eta > 0.0, "ModelParams: eta must be positive");
  require(eta0 > 0.0, "ModelParams: eta0 must be positive");
  require(mu > 0.0, "ModelParams: mu must be positive");
  require(lambda >= 0.0, "ModelParams: lambda must be nonnegative");

  std::vector<std::string> warnings;
  if (gamma / eta < 10.0)
    warnings.push_back("gamma/eta < 10: penalty does not dominate the viscous term");
  if (eta / eta0 < 10.0)
    warnings.push_back("eta/eta0 < 10: displacement initial-condition weight is not negligible");
  if (kappa > 1e-2)
    warnings.push_back("kappa > 1e-2: residual stiffness in cracked zones is large");
  return warnings;
}

void CostParams::validate() const {
  require(alpha > 0.0, "CostParams: alpha must be positive");
  for (Eigen::Index i = 0; i < phi_d.size(); ++i)
    require(phi_d[i] >= 0.0 && phi_d[i] <= 1.0, "CostParams: phi_d values must lie in [0,1]");
}

std::pair<double, double> lame_from_engineering(double youngs, double poisson) {
  require(youngs > 0.0, "lame_from_engineering: Young's modulus must be positive");
  require(poisson >= 0.0 && poisson < 0.5,
          "lame_from_engineering: Poisson ratio must lie in [0, 0.5)");
  const double mu = youngs / (2.0 * (1.0 + poisson));
  const double lambda = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  return {mu, lambda};
}

std::vector<double> uniform_times(double final_time, int num_steps) {
  require(final_time > 0.0, "uniform_times: final_time must be positive");
  require(num_steps >= 1, "uniform_times: need at least one step");
  std::vector<double> t(num_steps + 1);
  for (int m = 0; m <= num_steps; ++m) t[m] = final_time * m / num_steps;
  return t;
}

}  // namespace pffc
