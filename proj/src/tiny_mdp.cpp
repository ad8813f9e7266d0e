#include "saricos/tiny_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "saricos/errors.hpp"

namespace saricos {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

std::size_t index3(int a, int b, int c, int nb, int nc) {
  return static_cast<std::size_t>((a * nb + b) * nc + c);
}

}  // namespace

int TinyMdpFixture::bin_of(double y) const {
  int b = 0;
  for (double thr : rap_thresholds) {
    if (y >= thr) ++b;
  }
  return b;
}

double TinyMdpFixture::p(int s, int k, int b, int s2) const {
  return transition[index3(s, k, b, num_skills, num_bins()) * static_cast<std::size_t>(num_states) +
                    static_cast<std::size_t>(s2)];
}

double TinyMdpFixture::r(int s, int k, int b) const { return reward[index3(s, k, b, num_skills, num_bins())]; }

double TinyMdpFixture::enumeration_size() const {
  return std::pow(static_cast<double>(num_skills * num_bins() * num_states), horizon);
}

void TinyMdpFixture::validate() const {
  if (num_states < 1 || num_states > 4) throw validation_error("tiny MDP needs 1..4 states");
  if (num_skills < 1 || num_skills > 2) throw validation_error("tiny MDP needs 1..2 skills");
  if (rap_thresholds.size() > 2) throw validation_error("tiny MDP supports at most 3 RAP bins");
  if (!std::is_sorted(rap_thresholds.begin(), rap_thresholds.end())) {
    throw validation_error("RAP thresholds must be ascending");
  }
  if (horizon < 1 || horizon > 4) throw validation_error("tiny MDP horizon must be 1..4");
  if (initial_state < 0 || initial_state >= num_states) throw validation_error("bad initial state");
  const auto rows = static_cast<std::size_t>(num_states * num_skills * num_bins());
  if (transition.size() != rows * static_cast<std::size_t>(num_states) || reward.size() != rows) {
    throw validation_error("tiny MDP tables have the wrong size");
  }
  for (std::size_t row = 0; row < rows; ++row) {
    double total = 0.0;
    for (int s2 = 0; s2 < num_states; ++s2) {
      const double q = transition[row * static_cast<std::size_t>(num_states) + static_cast<std::size_t>(s2)];
      if (q < 0.0) throw validation_error("negative transition probability");
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-12) throw validation_error("transition row does not sum to 1");
  }
}

TinyMdpFixture TinyMdpFixture::two_state() {
  TinyMdpFixture f;
  f.num_states = 2;
  f.num_skills = 2;
  f.rap_thresholds = {-0.5, 0.5};
  f.initial_state = 0;
  f.horizon = 3;
  // Skill 0 is safe and stays put; skill 1 jumps between states with a RAP-dependent chance.
  // Higher bins reward more but make the jump less likely.
  f.transition = {
      // s=0, k=0, b=0..2
      0.9, 0.1, 0.8, 0.2, 0.7, 0.3,
      // s=0, k=1
      0.3, 0.7, 0.5, 0.5, 0.8, 0.2,
      // s=1, k=0
      0.2, 0.8, 0.3, 0.7, 0.4, 0.6,
      // s=1, k=1
      0.6, 0.4, 0.5, 0.5, 0.1, 0.9,
  };
  f.reward = {
      0.1, 0.2, 0.15,   // s=0, k=0
      0.0, 0.3, 0.6,    // s=0, k=1
      0.4, 0.1, -0.2,   // s=1, k=0
      0.5, 0.25, 0.8,   // s=1, k=1
  };
  f.validate();
  return f;
}

TinyMdpFixture TinyMdpFixture::dominant_skill() {
  TinyMdpFixture f;
  f.num_states = 2;
  f.num_skills = 2;
  f.rap_thresholds = {0.0};
  f.initial_state = 0;
  f.horizon = 4;
  f.transition = {
      0.5, 0.5, 0.5, 0.5,  // s=0, k=0
      0.5, 0.5, 0.5, 0.5,  // s=0, k=1
      0.5, 0.5, 0.5, 0.5,  // s=1, k=0
      0.5, 0.5, 0.5, 0.5,  // s=1, k=1
  };
  f.reward = {
      0.0, 0.0,   // s=0, k=0
      0.25, 0.25, // s=0, k=1
      0.0, 0.0,   // s=1, k=0
      0.25, 0.25, // s=1, k=1
  };
  f.validate();
  return f;
}

TinyMdpFixture TinyMdpFixture::constant_return(double c) {
  TinyMdpFixture f = two_state();
  std::fill(f.reward.begin(), f.reward.end(), c / static_cast<double>(f.horizon));
  return f;
}

TinyMdpEnv::TinyMdpEnv(TinyMdpFixture fixture) : fx_(std::move(fixture)) { fx_.validate(); }

EnvState TinyMdpEnv::encode(int s) const {
  EnvState e;
  e.features.assign(static_cast<std::size_t>(fx_.num_states), 0.0);
  e.features[static_cast<std::size_t>(s)] = 1.0;
  return e;
}

EnvState TinyMdpEnv::reset(rng_t&) {
  state_ = fx_.initial_state;
  return encode(state_);
}

SkillResult TinyMdpEnv::execute(std::size_t skill, double rap, int max_steps, rng_t& rng) {
  if (skill >= num_skills()) throw validation_error("tiny MDP skill index out of range");
  if (max_steps < 1) throw contract_error("tiny MDP asked to run with no step budget");
  const int k = static_cast<int>(skill);
  const int b = fx_.bin_of(rap);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  int next = fx_.num_states - 1;
  for (int s2 = 0; s2 < fx_.num_states; ++s2) {
    cum += fx_.p(state_, k, b, s2);
    if (u < cum) {
      next = s2;
      break;
    }
  }
  SkillResult res;
  res.steps = 1;
  res.step_rewards = {fx_.r(state_, k, b)};
  state_ = next;
  res.next = encode(next);
  return res;
}

std::shared_ptr<FeatureMap> tiny_feature_map(const TinyMdpFixture& fixture, Bounds w_bounds) {
  const int states = fixture.num_states;
  auto state_coord = [states](const EnvState& e) {
    const auto it = std::max_element(e.features.begin(), e.features.end());
    const double idx = static_cast<double>(std::distance(e.features.begin(), it));
    return states > 1 ? idx / static_cast<double>(states - 1) : 0.0;
  };
  FeatureSpec inter;
  inter.kind = FeatureKind::raw;
  inter.bounds = {{0.0, 1.0}, w_bounds};
  auto observe = [state_coord](const AugmentedState& z) {
    return std::vector<double>{state_coord(z.env), z.w};
  };
  auto rad = [state_coord](const AugmentedState& z, ClampCounter*) {
    Eigen::VectorXd phi(2);
    phi << 1.0, state_coord(z.env);
    return phi;
  };
  return std::make_shared<LinearFeatureMap>(inter, observe, 2, rad, "tiny-raw2");
}

PolicyParams tiny_zero_params(const FeatureMap& fm, int num_skills, double variance) {
  PolicyParams p;
  p.alpha = Eigen::MatrixXd::Zero(num_skills, static_cast<Eigen::Index>(fm.inter_size()));
  p.omega = Eigen::MatrixXd::Zero(num_skills, static_cast<Eigen::Index>(fm.rad_size()));
  p.variance = variance;
  return p;
}

namespace {

struct Enumerator {
  const TinyMdpFixture& fx;
  const PolicyParams& params;
  const FeatureMap& fm;
  const EpisodeConfig& cfg;
  bool want_grad;

  ExactGradient out;
  ParamGradient score;  // grad log P of the current path prefix

  // Visits every continuation of the prefix ending in state s at time t.
  void visit(int s, double w, int t, double prob, double ret) {
    if (t == cfg.horizon) {
      // Reward stream exactly as run_episode builds it.
      double r = ret;
      if (cfg.mode == RewardMode::pg_smdp) {
        r = std::pow(cfg.gamma, cfg.horizon - 1) * augmented_reward(t, cfg.horizon, w, cfg.beta);
      }
      out.objective += prob * r;
      if (want_grad) {
        out.grad.alpha += prob * r * score.alpha;
        out.grad.omega += prob * r * score.omega;
      }
      ++out.paths;
      return;
    }
    EnvState env;
    env.features.assign(static_cast<std::size_t>(fx.num_states), 0.0);
    env.features[static_cast<std::size_t>(s)] = 1.0;
    const AugmentedState z{env, w, t};
    const Eigen::VectorXd phi = fm.inter(z);
    const Eigen::VectorXd psi = fm.rad(z);
    const Eigen::VectorXd probs = inter_skill_probs(params.alpha, phi);
    const double sd = std::sqrt(params.variance);

    for (int k = 0; k < fx.num_skills; ++k) {
      const double pk = probs[k];
      const double mean = psi.dot(params.omega.row(k).transpose());
      Eigen::MatrixXd grad_k;
      if (want_grad) grad_k = log_grad_inter(params.alpha, phi, static_cast<std::size_t>(k));

      for (int b = 0; b < fx.num_bins(); ++b) {
        const double lo = b == 0 ? -INFINITY : fx.rap_thresholds[static_cast<std::size_t>(b - 1)];
        const double hi = b == fx.num_bins() - 1 ? INFINITY : fx.rap_thresholds[static_cast<std::size_t>(b)];
        const double zl = (lo - mean) / sd;
        const double zh = (hi - mean) / sd;
        const double pb = normal_cdf(zh) - normal_cdf(zl);
        if (pb <= 0.0) continue;
        // d pb / d mean = (pdf(zl) - pdf(zh)) / sd
        const double pdf_l = std::isfinite(zl) ? normal_pdf(zl) : 0.0;
        const double pdf_h = std::isfinite(zh) ? normal_pdf(zh) : 0.0;
        const double dlog_mean = (pdf_l - pdf_h) / (sd * pb);
        const double r = fx.r(s, k, b);

        if (want_grad) {
          score.alpha += grad_k;
          score.omega.row(k) += dlog_mean * psi.transpose();
        }
        for (int s2 = 0; s2 < fx.num_states; ++s2) {
          const double ps = fx.p(s, k, b, s2);
          if (ps <= 0.0) continue;
          visit(s2, w + r, t + 1, prob * pk * pb * ps, ret + std::pow(cfg.gamma, t) * r);
        }
        if (want_grad) {
          score.alpha -= grad_k;
          score.omega.row(k) -= dlog_mean * psi.transpose();
        }
      }
    }
  }
};

ExactGradient enumerate(const TinyMdpFixture& fx, const PolicyParams& params, const FeatureMap& fm,
                        const EpisodeConfig& cfg, bool want_grad) {
  fx.validate();
  cfg.validate();
  params.validate();
  if (cfg.horizon != fx.horizon) throw validation_error("episode horizon differs from the fixture horizon");
  if (params.num_skills() != static_cast<std::size_t>(fx.num_skills)) {
    throw validation_error("policy skill count differs from the fixture");
  }
  const double size = fx.enumeration_size();
  if (size > kMaxEnumeration) {
    std::ostringstream msg;
    msg << "fixture needs about " << size << " enumerated paths, limit is " << kMaxEnumeration;
    throw validation_error(msg.str());
  }
  Enumerator e{fx, params, fm, cfg, want_grad, {}, ParamGradient::zeros_like(params)};
  e.out.grad = ParamGradient::zeros_like(params);
  e.visit(fx.initial_state, 0.0, 0, 1.0, 0.0);
  return e.out;
}

}  // namespace

ExactGradient brute_force_gradient(const TinyMdpFixture& fixture, const PolicyParams& params,
                                   const FeatureMap& fm, const EpisodeConfig& cfg) {
  return enumerate(fixture, params, fm, cfg, true);
}

double exact_objective(const TinyMdpFixture& fixture, const PolicyParams& params, const FeatureMap& fm,
                       const EpisodeConfig& cfg) {
  return enumerate(fixture, params, fm, cfg, false).objective;
}

ParamGradient finite_difference_gradient(const TinyMdpFixture& fixture, const PolicyParams& params,
                                         const FeatureMap& fm, const EpisodeConfig& cfg, double h) {
  ParamGradient g = ParamGradient::zeros_like(params);
  auto diff = [&](Eigen::MatrixXd PolicyParams::*block, Eigen::MatrixXd& target) {
    for (Eigen::Index i = 0; i < target.size(); ++i) {
      PolicyParams plus = params;
      PolicyParams minus = params;
      (plus.*block)(i) += h;
      (minus.*block)(i) -= h;
      target(i) = (exact_objective(fixture, plus, fm, cfg) - exact_objective(fixture, minus, fm, cfg)) / (2.0 * h);
    }
  };
  diff(&PolicyParams::alpha, g.alpha);
  diff(&PolicyParams::omega, g.omega);
  return g;
}

double relative_error(const ParamGradient& a, const ParamGradient& b, double floor) {
  const double diff = std::max((a.alpha - b.alpha).cwiseAbs().maxCoeff(), (a.omega - b.omega).cwiseAbs().maxCoeff());
  const double scale = std::max({a.alpha.cwiseAbs().maxCoeff(), a.omega.cwiseAbs().maxCoeff(),
                                 b.alpha.cwiseAbs().maxCoeff(), b.omega.cwiseAbs().maxCoeff(), floor});
  return diff / scale;
}

}  // namespace saricos
