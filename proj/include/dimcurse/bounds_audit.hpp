#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimcurse/bench_oracle.hpp"
#include "dimcurse/budgeting.hpp"
#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"

namespace dimcurse {

/// (1/T) sum_t f(x_t) - f_*.
inline double average_regret(std::span<const double> values, double f_star) {
  if (values.empty()) throw ContractError("average_regret: empty value list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size()) - f_star;
}

/// Same mean, taken over the noise-inflated observations.
inline double pseudo_regret(std::span<const double> noisy_values, double f_star) {
  if (noisy_values.empty()) throw ContractError("pseudo_regret: empty value list");
  return average_regret(noisy_values, f_star);
}

/// d (1 + alpha)^(d-1) r1.
inline double strong_bound(std::size_t d, double alpha, double r1) {
  if (d == 0) throw DomainError("strong_bound: d must be >= 1");
  if (!(alpha >= 0.0) || !(r1 >= 0.0)) throw DomainError("strong_bound: alpha and r1 must be >= 0");
  return static_cast<double>(d) * std::pow(1.0 + alpha, static_cast<double>(d - 1)) * r1;
}

/// 0.5 (d + 1) d beta^(d-1) r1.
inline double weak_bound(std::size_t d, double beta, double r1) {
  if (d == 0) throw DomainError("weak_bound: d must be >= 1");
  if (!(beta >= 1.0) || !(r1 >= 0.0)) throw DomainError("weak_bound: need beta >= 1 and r1 >= 0");
  const double dd = static_cast<double>(d);
  return 0.5 * (dd + 1.0) * dd * std::pow(beta, dd - 1.0) * r1;
}

enum class RobustnessKind { kStrong, kWeak };

/// The dimension factor F(d, T1) multiplying the univariate regret.
struct BoundFactor {
  RobustnessKind kind = RobustnessKind::kStrong;
  std::size_t d = 1;
  std::uint64_t T1 = 1;
  double coefficient = 0.0;  // alpha_{T1} or beta_{T1}

  double value() const {
    return kind == RobustnessKind::kStrong ? strong_bound(d, coefficient, 1.0)
                                           : weak_bound(d, coefficient, 1.0);
  }
};

inline void check_factor_matches(std::uint64_t T, std::size_t d, const BoundFactor& factor,
                                 std::string_view who) {
  if (T == 0) throw DomainError(std::string(who) + ": T must be >= 1");
  if (factor.d != d) throw ContractError(std::string(who) + ": factor built for another dimension");
  if (factor.T1 != integer_root_floor(T, d)) {
    throw ContractError(std::string(who) + ": factor must be evaluated at floor(T^(1/d)) = " +
                        std::to_string(integer_root_floor(T, d)));
  }
}

/// Cumulative regret bound 2 T F(d, floor(T^(1/d))) r1.
inline double cumulative_bound(std::uint64_t T, std::size_t d, const BoundFactor& factor,
                               double r1_at_floor) {
  check_factor_matches(T, d, factor, "cumulative_bound");
  return 2.0 * static_cast<double>(T) * factor.value() * r1_at_floor;
}

/// Average regret bound under the doubling trick: 2 log2(2T) F r1.
inline double unknown_horizon_bound(std::uint64_t T, std::size_t d, const BoundFactor& factor,
                                    double r1_at_floor) {
  check_factor_matches(T, d, factor, "unknown_horizon_bound");
  return 2.0 * std::log2(2.0 * static_cast<double>(T)) * factor.value() * r1_at_floor;
}

namespace detail {

struct PrefixBlock {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Maximal runs of consecutive records sharing counters tau_1..tau_split.
inline std::vector<PrefixBlock> prefix_blocks(const EvaluationLog& log, std::size_t split) {
  std::vector<PrefixBlock> blocks;
  const auto& r = log.records;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const bool same = k > 0 && std::equal(r[k].counters.begin(), r[k].counters.begin() + split,
                                          r[k - 1].counters.begin());
    if (same) {
      blocks.back().end = k + 1;
    } else {
      blocks.push_back({k, k + 1});
    }
  }
  return blocks;
}

inline void check_split(const EvaluationLog& log, std::size_t split, std::string_view who) {
  if (log.dimension() < 2) throw ContractError(std::string(who) + ": needs d >= 2");
  if (split < 1 || split >= log.dimension()) {
    throw ContractError(std::string(who) + ": split must be in [1, d-1]");
  }
  if (log.empty()) throw ContractError(std::string(who) + ": empty log");
}

}  // namespace detail

struct NoiseGap {
  double value = 0.0;         // eps_y
  double oracle_error = 0.0;  // true eps_y lies in [value, value + oracle_error]
};

/// eps_y = max over outer blocks of (best evaluation in the block - min of f
/// over the inner coordinates with the outer prefix fixed). The outer part is
/// coordinates 1..split.
inline NoiseGap noise_gap(const EvaluationLog& log, const ConditionalOracle& oracle,
                          std::size_t split = 1) {
  detail::check_split(log, split, "noise_gap");
  NoiseGap out{-INFINITY, 0.0};
  for (const auto& b : detail::prefix_blocks(log, split)) {
    double best = INFINITY;
    for (std::size_t k = b.begin; k < b.end; ++k) best = std::min(best, log.records[k].value);
    const auto& p = log.records[b.begin].point;
    const OracleValue m = oracle(std::span<const double>(p.data(), split));
    out.value = std::max(out.value, best - m.value);
    out.oracle_error = std::max(out.oracle_error, m.error);
  }
  return out;
}

enum class Verdict { kHolds, kViolated, kInconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

/// One audited inequality lhs <= rhs.
struct AuditReport {
  std::string bound_name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double oracle_error = 0.0;
  Verdict verdict = Verdict::kHolds;
};

inline constexpr double kAuditTolerance = 1e-9;
inline constexpr double kOracleRelativeResolution = 1e-3;

/// Regret decomposition over outer blocks n (outer coordinates 1..split):
///
///   r = (1/N) sum_n [avg_n - m_n] + (1/N) sum_n m_n - f_*
///     <= max_n [avg_n - m_n]      + (1/N) sum_n m_n - f_*   = rhs
///
/// with avg_n the mean evaluation in block n and m_n the oracle's conditional
/// minimum for its prefix. Requires a complete log (equal block sizes).
inline AuditReport audit_decomposition(const EvaluationLog& log, const ConditionalOracle& oracle,
                                OracleValue f_star, std::size_t split = 1) {
  detail::check_split(log, split, "audit_decomposition");
  if (!log.complete()) throw ContractError("audit_decomposition: log does not cover the full schedule");

  const std::vector<double> values = log.values();
  AuditReport rep;
  rep.bound_name = "regret_decomposition";
  rep.lhs = average_regret(values, f_star.value);

  double inner = -INFINITY;
  double outer_sum = 0.0;
  double err = 0.0;
  const auto blocks = detail::prefix_blocks(log, split);
  for (const auto& b : blocks) {
    const double avg = average_regret(std::span(values).subspan(b.begin, b.end - b.begin), 0.0);
    const auto& p = log.records[b.begin].point;
    const OracleValue m = oracle(std::span<const double>(p.data(), split));
    inner = std::max(inner, avg - m.value);
    outer_sum += m.value;
    err = std::max(err, m.error);
  }
  const double outer = outer_sum / static_cast<double>(blocks.size()) - f_star.value;
  rep.rhs = inner + outer;
  rep.margin = rep.rhs - rep.lhs;
  rep.oracle_error = err + f_star.error;
  if (rep.lhs > rep.rhs + kAuditTolerance) {
    rep.verdict = Verdict::kViolated;
  } else if (rep.oracle_error > kOracleRelativeResolution * std::abs(rep.rhs)) {
    rep.verdict = Verdict::kInconclusive;
  } else {
    rep.verdict = Verdict::kHolds;
  }
  return rep;
}

inline BoundCheck make_bound_check(std::string name, double bound, double measured) {
  return {std::move(name), bound, measured, measured <= bound + 1e-12};
}

}  // namespace dimcurse
