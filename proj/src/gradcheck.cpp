#include "saricos/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "saricos/policy.hpp"
#include "saricos/random.hpp"
#include "saricos/tiny_mdp.hpp"

namespace saricos {

namespace {

Eigen::MatrixXd uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi, rng_t& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
  return m;
}

int uniform_int(int lo, int hi, rng_t& rng) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Reference log-densities written out independently of the policy module and
// evaluated in extended precision, so rounding in the differences stays far
// below the tolerance even where the softmax saturates.
long double ref_log_softmax(const MatrixL& alpha, const VectorL& phi, Eigen::Index chosen) {
  const VectorL logits = alpha * phi;
  const long double top = logits.maxCoeff();
  long double sum = 0.0L;
  for (Eigen::Index i = 0; i < logits.size(); ++i) sum += std::exp(logits[i] - top);
  return logits[chosen] - top - std::log(sum);
}

long double ref_log_gaussian(const VectorL& omega, const VectorL& phi, long double y, long double variance) {
  const long double d = y - phi.dot(omega);
  return -0.5L * d * d / variance - 0.5L * std::log(2.0L * 3.14159265358979323846264338327950288L * variance);
}

// Central differences of f with respect to every entry of x.
template <typename F>
Eigen::MatrixXd central_difference(const Eigen::MatrixXd& x, double h, F f) {
  const MatrixL xl = x.cast<long double>();
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    MatrixL plus = xl;
    MatrixL minus = xl;
    plus(i) += h;
    minus(i) -= h;
    g(i) = static_cast<double>((f(plus) - f(minus)) / (2.0L * h));
  }
  return g;
}

GradCheck gibbs_check(const GradcheckOptions& o, rng_t& rng) {
  GradCheck c{"gibbs_log_grad_vs_central_difference", o.instances, 0.0, o.tolerance};
  for (std::size_t n = 0; n < o.instances; ++n) {
    const int k = uniform_int(2, 5, rng);
    const int f = uniform_int(1, 16, rng);
    const Eigen::MatrixXd alpha = uniform(k, f, -3.0, 3.0, rng);
    const Eigen::VectorXd phi = uniform(f, 1, -1.0, 1.0, rng);
    const auto chosen = static_cast<std::size_t>(uniform_int(0, k - 1, rng));
    const Eigen::MatrixXd analytic = log_grad_inter(alpha, phi, chosen);
    const VectorL phil = phi.cast<long double>();
    const Eigen::MatrixXd numeric = central_difference(alpha, o.h, [&](const MatrixL& a) {
      return ref_log_softmax(a, phil, static_cast<Eigen::Index>(chosen));
    });
    c.max_rel_error = std::max(c.max_rel_error, max_relative_error(analytic, numeric));
  }
  return c;
}

GradCheck gaussian_check(const GradcheckOptions& o, const RadGradFn& grad, rng_t& rng) {
  GradCheck c{"gaussian_rad_log_grad_vs_central_difference", o.instances, 0.0, o.tolerance};
  std::uniform_real_distribution<double> var(1.0, 200.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t n = 0; n < o.instances; ++n) {
    const int m = uniform_int(1, 6, rng);
    const Eigen::VectorXd omega = uniform(m, 1, -100.0, 100.0, rng);
    const Eigen::VectorXd phi = uniform(m, 1, -1.0, 1.0, rng);
    const double v = var(rng);
    const double y = phi.dot(omega) + std::sqrt(v) * noise(rng);
    const Eigen::MatrixXd analytic = grad(omega, phi, y, v);
    const VectorL phil = phi.cast<long double>();
    const Eigen::MatrixXd numeric = central_difference(omega, o.h, [&](const MatrixL& w) {
      return ref_log_gaussian(w, phil, y, v);
    });
    c.max_rel_error = std::max(c.max_rel_error, max_relative_error(analytic, numeric));
  }
  return c;
}

GradCheck joint_check(const GradcheckOptions& o, rng_t& rng) {
  GradCheck c{"two_tiered_log_grad_vs_central_difference", o.instances, 0.0, o.tolerance};
  std::uniform_real_distribution<double> var(1.0, 200.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t n = 0; n < o.instances; ++n) {
    const int k = uniform_int(2, 4, rng);
    const int f = uniform_int(1, 12, rng);
    const int m = uniform_int(1, 6, rng);
    PolicyParams p;
    p.alpha = uniform(k, f, -3.0, 3.0, rng);
    p.omega = uniform(k, m, -100.0, 100.0, rng);
    p.variance = var(rng);
    const Eigen::VectorXd inter_phi = uniform(f, 1, -1.0, 1.0, rng);
    const Eigen::VectorXd rad_phi = uniform(m, 1, -1.0, 1.0, rng);
    const auto sigma = static_cast<std::size_t>(uniform_int(0, k - 1, rng));
    const double y = rad_phi.dot(p.omega.row(static_cast<Eigen::Index>(sigma))) + std::sqrt(p.variance) * noise(rng);

    const ParamGradient analytic = two_tiered_log_grad(p, inter_phi, rad_phi, sigma, y);
    const auto row = static_cast<Eigen::Index>(sigma);
    const VectorL iphi = inter_phi.cast<long double>();
    const VectorL rphi = rad_phi.cast<long double>();
    const MatrixL alpha_l = p.alpha.cast<long double>();
    const MatrixL omega_l = p.omega.cast<long double>();
    auto joint = [&](const MatrixL& a, const MatrixL& w) {
      return ref_log_softmax(a, iphi, row) + ref_log_gaussian(w.row(row).transpose(), rphi, y, p.variance);
    };
    const Eigen::MatrixXd num_alpha =
        central_difference(p.alpha, o.h, [&](const MatrixL& a) { return joint(a, omega_l); });
    const Eigen::MatrixXd num_omega =
        central_difference(p.omega, o.h, [&](const MatrixL& w) { return joint(alpha_l, w); });
    Eigen::MatrixXd a(1, analytic.alpha.size() + analytic.omega.size());
    Eigen::MatrixXd b(1, a.cols());
    a << analytic.alpha.reshaped().transpose(), analytic.omega.reshaped().transpose();
    b << num_alpha.reshaped().transpose(), num_omega.reshaped().transpose();
    c.max_rel_error = std::max(c.max_rel_error, max_relative_error(a, b));
  }
  return c;
}

GradCheck oracle_check(const std::string& name, const TinyMdpFixture& fx, double beta, const GradcheckOptions& o,
                       rng_t& rng) {
  GradCheck c{name, static_cast<std::size_t>(o.oracle_settings), 0.0, o.oracle_tolerance};
  auto fm = tiny_feature_map(fx);
  EpisodeConfig ep;
  ep.horizon = fx.horizon;
  ep.beta = beta;
  for (int n = 0; n < o.oracle_settings; ++n) {
    PolicyParams p = tiny_zero_params(*fm, fx.num_skills, 1.0);
    p.alpha = uniform(p.alpha.rows(), p.alpha.cols(), -1.0, 1.0, rng);
    p.omega = uniform(p.omega.rows(), p.omega.cols(), -1.0, 1.0, rng);
    const ExactGradient exact = brute_force_gradient(fx, p, *fm, ep);
    const ParamGradient fd = finite_difference_gradient(fx, p, *fm, ep, o.oracle_h);
    c.max_rel_error = std::max(c.max_rel_error, relative_error(exact.grad, fd));
  }
  return c;
}

}  // namespace

bool GradcheckReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const GradCheck& c) { return c.passed(); });
}

double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  const double diff = (a - b).cwiseAbs().maxCoeff();
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), floor});
  return diff / scale;
}

GradcheckReport run_gradcheck(const GradcheckOptions& opts) {
  const RadGradFn rad_grad = opts.rad_grad ? opts.rad_grad : RadGradFn(log_grad_rad);
  GradcheckReport r;
  auto rng = derive_rng(opts.seed, {0});
  r.checks.push_back(gibbs_check(opts, rng));
  rng = derive_rng(opts.seed, {1});
  r.checks.push_back(gaussian_check(opts, rad_grad, rng));
  rng = derive_rng(opts.seed, {2});
  r.checks.push_back(joint_check(opts, rng));
  rng = derive_rng(opts.seed, {3});
  r.checks.push_back(oracle_check("enumeration_gradient_vs_objective_difference/two_state",
                                  TinyMdpFixture::two_state(), 0.6, opts, rng));
  rng = derive_rng(opts.seed, {4});
  r.checks.push_back(oracle_check("enumeration_gradient_vs_objective_difference/dominant_skill",
                                  TinyMdpFixture::dominant_skill(), 1.0, opts, rng));
  return r;
}

void write_gradcheck_report(std::ostream& out, const GradcheckReport& report) {
  for (const auto& c : report.checks) {
    out << std::left << std::setw(62) << c.name << std::right << " n=" << std::setw(5) << c.instances
        << "  max_rel_error=" << std::scientific << std::setprecision(3) << c.max_rel_error
        << "  tolerance=" << c.tolerance << std::defaultfloat << "  " << (c.passed() ? "PASS" : "FAIL") << '\n';
  }
  out << (report.all_passed() ? "all checks passed" : "gradient check FAILED") << '\n';
}

}  // namespace saricos
