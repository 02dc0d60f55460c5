#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"
#include "dimcurse/number_format.hpp"

namespace dimcurse {

enum class OptimizerKind { kPiyavskiiShubert, kUniformGrid };

inline std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kPiyavskiiShubert ? "ps" : "grid";
}

/// Parameters of one univariate optimizer instance. noise_bound is carried
/// for audits only; neither proposal rule reads it.
struct OptimizerConfig {
  std::size_t horizon = 1;
  double noise_bound = 0.0;
  double lipschitz_constant = 1.0;
  OptimizerKind kind = OptimizerKind::kPiyavskiiShubert;

  void validate() const {
    if (horizon == 0) throw DomainError("OptimizerConfig: horizon must be >= 1");
    if (!(noise_bound >= 0.0)) throw DomainError("OptimizerConfig: noise bound must be >= 0");
    if (kind == OptimizerKind::kPiyavskiiShubert && !(lipschitz_constant > 0.0)) {
      throw DomainError("OptimizerConfig: Piyavskii-Shubert needs L > 0");
    }
  }
};

/// Non-owning view of past queries and their (possibly inflated) evaluations.
struct UnivariateHistory {
  std::span<const double> queries;
  std::span<const double> values;

  std::size_t size() const { return queries.size(); }

  void validate() const {
    if (queries.size() != values.size()) {
      throw ContractError("UnivariateHistory: queries and values differ in length");
    }
    for (double q : queries) {
      if (!(q >= 0.0 && q <= 1.0)) throw ContractError("UnivariateHistory: query outside [0,1]");
    }
  }
};

struct EnvelopeMinimum {
  double x = 0.0;
  double value = 0.0;
};

/// F(x) = max_k ( v_k - L |x - x_k| ).
inline double envelope_value(const UnivariateHistory& history, double L, double x) {
  history.validate();
  if (history.size() == 0) throw ContractError("envelope_value: empty history");
  double best = -INFINITY;
  for (std::size_t k = 0; k < history.size(); ++k) {
    best = std::max(best, history.values[k] - L * std::abs(x - history.queries[k]));
  }
  return best;
}

/// Exact global minimizer of the lower envelope F over [0,1].
///
/// Between consecutive distinct sorted queries x_k < x_{k+1}, every cone
/// anchored at or left of x_k is the line A - L x and every cone at or right of
/// x_{k+1} is B + L x, so F = max(A_k - L x, B_{k+1} + L x) there with
///   A_k = max_{j<=k} (v_j + L x_j),   B_k = max_{j>=k} (v_j - L x_j).
/// This stays exact when the observations are not L-consistent (noise). The
/// smallest x wins ties.
inline EnvelopeMinimum envelope_min(const UnivariateHistory& history, double L) {
  if (!(L > 0.0)) throw DomainError("envelope_min: L must be > 0");
  history.validate();

  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return history.queries[a] < history.queries[b];
  });
  // Repeated queries collapse onto the largest observation (the dominating cone).
  std::vector<double> xs;
  std::vector<double> vs;
  xs.reserve(order.size());
  vs.reserve(order.size());
  for (std::size_t k : order) {
    const double x = history.queries[k];
    const double v = history.values[k];
    if (!xs.empty() && xs.back() == x) {
      vs.back() = std::max(vs.back(), v);
    } else {
      xs.push_back(x);
      vs.push_back(v);
    }
  }
  const std::size_t n = xs.size();
  if (n < 2) throw ContractError("envelope_min: needs at least two distinct queries");

  std::vector<double> left(n);
  std::vector<double> right(n);
  left[0] = vs[0] + L * xs[0];
  for (std::size_t k = 1; k < n; ++k) left[k] = std::max(left[k - 1], vs[k] + L * xs[k]);
  right[n - 1] = vs[n - 1] - L * xs[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) right[k] = std::max(right[k + 1], vs[k] - L * xs[k]);

  EnvelopeMinimum best{0.0, right[0]};
  auto consider = [&](double x, double value) {
    if (value < best.value) best = {x, value};
  };
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = left[k];
    const double b = right[k + 1];
    const double x = std::clamp((a - b) / (2.0 * L), xs[k], xs[k + 1]);
    consider(x, std::max(a - L * x, b + L * x));
  }
  consider(1.0, left[n - 1] - L);
  return best;
}

/// Query x_t of the optimizer given the first t-1 observations.
/// Piyavskii-Shubert: 0, then 1, then the envelope minimizer.
/// Uniform grid: (2t - 1) / (2T), independent of the observations.
inline double propose(const OptimizerConfig& config, const UnivariateHistory& history,
                      std::size_t t) {
  config.validate();
  history.validate();
  if (t != history.size() + 1) {
    throw ContractError("propose: step index " + std::to_string(t) +
                        " inconsistent with history of length " + std::to_string(history.size()));
  }
  if (t > config.horizon) {
    throw ContractError("propose: step " + std::to_string(t) + " beyond horizon " +
                        std::to_string(config.horizon));
  }
  switch (config.kind) {
    case OptimizerKind::kPiyavskiiShubert:
      if (t == 1) return 0.0;
      if (t == 2) return 1.0;
      return envelope_min(history, config.lipschitz_constant).x;
    case OptimizerKind::kUniformGrid:
      return static_cast<double>(2 * t - 1) / static_cast<double>(2 * config.horizon);
  }
  throw ContractError("propose: unknown optimizer kind");
}

/// Writes "x,F(x)" at `points` equally spaced abscissae of [0,1].
inline void write_envelope_csv(std::ostream& out, const UnivariateHistory& history, double L,
                               std::size_t points = 1025) {
  if (points < 2) throw DomainError("write_envelope_csv: need at least two points");
  out << "x,F(x)\n";
  for (std::size_t k = 0; k < points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(points - 1);
    out << format_double(x) << ',' << format_double(envelope_value(history, L, x)) << '\n';
  }
}

/// A univariate test function with its exact minimum value.
struct UnivariateObjective {
  std::function<double(double)> f;
  double f_star = 0.0;
};

/// Noise added to the observation at step t (1-based) of a horizon-T run.
using NoiseSchedule = std::function<double(std::size_t t, std::size_t T)>;

struct UnivariateTrace {
  std::vector<double> queries;
  std::vector<double> values;    // f(x_t)
  std::vector<double> observed;  // f(x_t) + noise_t
};

/// Runs one optimizer for its full horizon, feeding it noise-inflated observations.
inline UnivariateTrace run_univariate(const OptimizerConfig& config,
                                      const std::function<double(double)>& f,
                                      const NoiseSchedule& noise = {}) {
  config.validate();
  UnivariateTrace trace;
  trace.queries.reserve(config.horizon);
  trace.values.reserve(config.horizon);
  trace.observed.reserve(config.horizon);
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const double x = propose(config, {trace.queries, trace.observed}, t);
    const double v = f(x);
    const double e = noise ? noise(t, config.horizon) : 0.0;
    trace.queries.push_back(x);
    trace.values.push_back(v);
    trace.observed.push_back(v + e);
  }
  return trace;
}

enum class NoisePattern { kConstant, kAlternating, kFrontLoaded };

inline std::string_view to_string(NoisePattern p) {
  switch (p) {
    case NoisePattern::kConstant:
      return "constant";
    case NoisePattern::kAlternating:
      return "alternating";
    case NoisePattern::kFrontLoaded:
      return "front_loaded";
  }
  return "?";
}

/// Adversarial noise in [0, eps]: constant eps; 0, eps, 0, eps, ...; or eps for
/// the first ceil(T/2) steps and 0 afterwards.
inline NoiseSchedule make_noise(NoisePattern pattern, double eps) {
  switch (pattern) {
    case NoisePattern::kConstant:
      return [eps](std::size_t, std::size_t) { return eps; };
    case NoisePattern::kAlternating:
      return [eps](std::size_t t, std::size_t) { return t % 2 == 0 ? eps : 0.0; };
    case NoisePattern::kFrontLoaded:
      return [eps](std::size_t t, std::size_t T) { return t <= (T + 1) / 2 ? eps : 0.0; };
  }
  throw ContractError("make_noise: unknown pattern");
}

struct RobustnessProbe {
  double epsilon = 0.05;
  std::vector<NoisePattern> patterns{NoisePattern::kConstant, NoisePattern::kAlternating,
                                     NoisePattern::kFrontLoaded};
};

struct RobustnessTrial {
  NoisePattern pattern;
  double regret = 0.0;         // r_T(eps), on true values
  double pseudo_regret = 0.0;  // r~_T(eps), on observations
};

struct RobustnessEstimate {
  RobustnessProfile profile;
  /// eps = 0: alpha and beta are undefined and reported as 0 and 1.
  bool coefficients_undefined = false;
  std::vector<RobustnessTrial> trials;
};

/// Empirical strong/weak robustness coefficients of one optimizer at its
/// horizon T on one test function:
///   alpha = max_trials (r_T(eps) - r_T(0)) / eps,
///   beta  = max_trials (r~_T(eps) - r_T(0)) / eps,
/// clamped to alpha >= 0 and beta >= 1.
inline RobustnessEstimate measure_robustness(const OptimizerConfig& config,
                                             const UnivariateObjective& objective,
                                             const RobustnessProbe& probe) {
  config.validate();
  if (!(probe.epsilon >= 0.0) || !std::isfinite(probe.epsilon)) {
    throw DomainError("measure_robustness: probe epsilon must be finite and >= 0");
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };

  const UnivariateTrace clean = run_univariate(config, objective.f);
  RobustnessEstimate est;
  est.profile.base_regret = mean(clean.values) - objective.f_star;
  if (probe.epsilon == 0.0) {
    est.coefficients_undefined = true;
    return est;
  }

  double alpha = 0.0;
  double beta = 1.0;
  for (NoisePattern pattern : probe.patterns) {
    const UnivariateTrace noisy = run_univariate(config, objective.f, make_noise(pattern, probe.epsilon));
    RobustnessTrial trial{pattern, mean(noisy.values) - objective.f_star,
                          mean(noisy.observed) - objective.f_star};
    alpha = std::max(alpha, (trial.regret - est.profile.base_regret) / probe.epsilon);
    beta = std::max(beta, (trial.pseudo_regret - est.profile.base_regret) / probe.epsilon);
    est.trials.push_back(trial);
  }
  est.profile.alpha = alpha;
  est.profile.beta = beta;
  return est;
}

}  // namespace dimcurse
