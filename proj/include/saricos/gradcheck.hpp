#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace saricos {

struct GradCheck {
  std::string name;
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_rel_error < tolerance; }
};

struct GradcheckReport {
  std::vector<GradCheck> checks;
  bool all_passed() const;
};

// Signature of log_grad_rad; replaceable so tests can confirm a broken gradient is caught.
using RadGradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi,
                                                double y, double variance)>;

struct GradcheckOptions {
  std::size_t instances = 1000;
  double h = 1e-5;
  double tolerance = 1e-5;
  int oracle_settings = 5;
  double oracle_h = 1e-6;
  double oracle_tolerance = 1e-6;
  std::uint64_t seed = 7;
  RadGradFn rad_grad;  // log_grad_rad when empty
};

// max |a - b| / max(max |a|, max |b|, floor), the error measure used by every check.
double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-8);

// Analytic log-likelihood gradients of the Gibbs, Gaussian and joint policy
// against central differences on random instances, and the enumeration
// gradient of the tiny fixtures against central differences of their exact objective.
GradcheckReport run_gradcheck(const GradcheckOptions& opts = {});

// One line per check: name, instances, max relative error, tolerance, PASS/FAIL.
void write_gradcheck_report(std::ostream& out, const GradcheckReport& report);

}  // namespace saricos
