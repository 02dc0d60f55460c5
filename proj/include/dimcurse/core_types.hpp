#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dimcurse/errors.hpp"

namespace dimcurse {

using Point = std::vector<double>;
using Evaluator = std::function<double(std::span<const double>)>;

/// Largest brute-force grid any oracle or regularity sweep will enumerate.
inline constexpr std::uint64_t kMaxGridPoints = 10'000'000;

enum class NormKind { kInfinity, kEuclidean, kOne };

inline std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::kInfinity:
      return "infinity";
    case NormKind::kEuclidean:
      return "euclidean";
    case NormKind::kOne:
      return "one";
  }
  return "?";
}

/// Norm of a vector of per-axis magnitudes.
inline double norm_of(std::span<const double> v, NormKind kind) {
  double acc = 0.0;
  for (double c : v) {
    const double a = std::abs(c);
    switch (kind) {
      case NormKind::kInfinity:
        acc = std::max(acc, a);
        break;
      case NormKind::kEuclidean:
        acc += a * a;
        break;
      case NormKind::kOne:
        acc += a;
        break;
    }
  }
  return kind == NormKind::kEuclidean ? std::sqrt(acc) : acc;
}

inline double distance(std::span<const double> x, std::span<const double> y, NormKind kind) {
  if (x.size() != y.size()) throw ContractError("distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i] - y[i]);
    switch (kind) {
      case NormKind::kInfinity:
        acc = std::max(acc, a);
        break;
      case NormKind::kEuclidean:
        acc += a * a;
        break;
      case NormKind::kOne:
        acc += a;
        break;
    }
  }
  return kind == NormKind::kEuclidean ? std::sqrt(acc) : acc;
}

/// A black-box objective on [0,1]^d together with its regularity data:
/// |f(x) - f(y)| <= L * ||x - y|| in the stated norm.
class ObjectiveSpec {
 public:
  ObjectiveSpec(std::string name, std::size_t dimension, Evaluator evaluate,
                double lipschitz_constant, NormKind norm = NormKind::kInfinity,
                std::optional<double> known_minimum = std::nullopt)
      : name_(std::move(name)),
        dimension_(dimension),
        evaluate_(std::move(evaluate)),
        lipschitz_(lipschitz_constant),
        norm_(norm),
        known_minimum_(known_minimum) {
    if (dimension_ == 0) throw DomainError("ObjectiveSpec: dimension must be >= 1");
    if (!evaluate_) throw ContractError("ObjectiveSpec: empty evaluator");
    if (!(lipschitz_ >= 0.0) || !std::isfinite(lipschitz_)) {
      throw DomainError("ObjectiveSpec: Lipschitz constant must be finite and >= 0");
    }
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != dimension_) throw ContractError("ObjectiveSpec: point has wrong dimension");
    return evaluate_(x);
  }

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dimension_; }
  double lipschitz_constant() const { return lipschitz_; }
  NormKind norm() const { return norm_; }
  const std::optional<double>& known_minimum() const { return known_minimum_; }

 private:
  std::string name_;
  std::size_t dimension_;
  Evaluator evaluate_;
  double lipschitz_;
  NormKind norm_;
  std::optional<double> known_minimum_;
};

/// Noise bounds the meta algorithm hands to each dimension when the caller
/// supplies none: the innermost dimension sees exact evaluations, every outer
/// dimension gets an unbounded epsilon.
inline std::vector<double> default_noise_bounds(std::size_t d) {
  std::vector<double> eps(d, std::numeric_limits<double>::infinity());
  if (d > 0) eps.back() = 0.0;
  return eps;
}

/// Per-dimension budgets T_1 <= ... <= T_d and noise bounds eps_1..eps_d.
class BudgetSchedule {
 public:
  explicit BudgetSchedule(std::vector<std::size_t> budgets)
      : BudgetSchedule(budgets, default_noise_bounds(budgets.size())) {}

  BudgetSchedule(std::vector<std::size_t> budgets, std::vector<double> noise_bounds)
      : budgets_(std::move(budgets)), noise_bounds_(std::move(noise_bounds)) {
    if (budgets_.empty()) throw DomainError("BudgetSchedule: at least one dimension required");
    if (noise_bounds_.size() != budgets_.size()) {
      throw ContractError("BudgetSchedule: noise bounds length differs from budgets length");
    }
    for (std::size_t i = 0; i < budgets_.size(); ++i) {
      if (budgets_[i] == 0) throw DomainError("BudgetSchedule: budgets must be positive");
      if (i > 0 && budgets_[i] < budgets_[i - 1]) {
        throw DomainError("BudgetSchedule: budgets must satisfy T_1 <= T_2 <= ... <= T_d");
      }
      if (!(noise_bounds_[i] >= 0.0)) throw DomainError("BudgetSchedule: noise bounds must be >= 0");
    }
    std::uint64_t product = 1;
    for (std::size_t b : budgets_) {
      if (product > std::numeric_limits<std::uint64_t>::max() / b) {
        throw SizeError("BudgetSchedule: total budget overflows");
      }
      product *= b;
    }
    total_ = product;
  }

  std::size_t dimension() const { return budgets_.size(); }
  const std::vector<std::size_t>& budgets() const { return budgets_; }
  const std::vector<double>& noise_bounds() const { return noise_bounds_; }
  std::size_t operator[](std::size_t i) const { return budgets_.at(i); }
  /// prod T_i, the number of evaluations of a full run.
  std::uint64_t total() const { return total_; }

 private:
  std::vector<std::size_t> budgets_;
  std::vector<double> noise_bounds_;
  std::uint64_t total_ = 1;
};

/// Mutable bookkeeping of one meta-algorithm run. Counters are 1-based like
/// tau_i; histories[i] holds x^i_1..x^i_{tau_i} of the current prefix block and
/// cond_min[i][j] is h^i(x^i_{j+1}).
struct MetaState {
  std::vector<std::size_t> counters;
  std::vector<std::vector<double>> histories;
  std::vector<std::vector<double>> cond_min;

  static MetaState initial(std::size_t d) {
    MetaState s;
    s.counters.assign(d, 1);
    s.histories.resize(d);
    s.cond_min.resize(d);
    return s;
  }
};

struct EvaluationRecord {
  std::size_t t = 0;
  std::vector<std::size_t> counters;
  Point point;
  double value = 0.0;

  bool operator==(const EvaluationRecord&) const = default;
};

/// Ordered evaluations of one run, with the budget schedule that produced them.
struct EvaluationLog {
  std::vector<std::size_t> budgets;
  std::vector<EvaluationRecord> records;

  std::size_t dimension() const { return budgets.size(); }
  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  std::uint64_t full_size() const {
    std::uint64_t p = 1;
    for (std::size_t b : budgets) p *= b;
    return p;
  }
  bool complete() const { return records.size() == full_size(); }

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.value);
    return v;
  }

  bool operator==(const EvaluationLog&) const = default;
};

/// Robustness coefficients of a univariate optimizer at one horizon:
///   strong:  r_T(eps)  <= r_T(0) + alpha * eps
///   weak:    r~_T(eps) <= r_T(0) + beta  * eps
struct RobustnessProfile {
  double alpha = 0.0;
  double beta = 1.0;
  double base_regret = 0.0;

  /// A strong guarantee implies a weak one with beta = alpha + 1.
  RobustnessProfile induced_weak() const { return {alpha, alpha + 1.0, base_regret}; }

  bool admissible() const { return alpha >= 0.0 && beta >= 1.0 && base_regret >= 0.0; }
};

struct BoundCheck {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  bool satisfied = false;
};

struct RegretReport {
  double average_regret = 0.0;
  double average_pseudo_regret = 0.0;
  double cumulative_regret = 0.0;
  std::optional<double> noise_gap;
  std::vector<BoundCheck> bound_checks;
};

namespace detail {

inline std::uint64_t checked_grid_size(std::size_t dims, std::size_t resolution) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < dims; ++i) {
    if (n > kMaxGridPoints / resolution) {
      throw SizeError("grid of " + std::to_string(resolution) + "^" + std::to_string(dims) +
                      " points exceeds the limit of " + std::to_string(kMaxGridPoints));
    }
    n *= resolution;
  }
  return n;
}

// Visits every point of a tensor grid whose per-axis coordinates are
// axis_values, in row-major order (last axis fastest).
template <class Visitor>
void for_each_grid_point(std::size_t dims, std::span<const double> axis_values, Visitor&& visit) {
  const std::size_t res = axis_values.size();
  checked_grid_size(dims, res);
  std::vector<std::size_t> idx(dims, 0);
  Point p(dims, axis_values.empty() ? 0.0 : axis_values[0]);
  if (dims == 0) {
    visit(std::span<const double>(p));
    return;
  }
  while (true) {
    visit(std::span<const double>(p));
    std::size_t k = dims;
    while (k > 0) {
      --k;
      if (++idx[k] < res) {
        p[k] = axis_values[idx[k]];
        break;
      }
      idx[k] = 0;
      p[k] = axis_values[0];
      if (k == 0) return;
    }
  }
}

}  // namespace detail

struct RegularityViolation {
  Point x;
  Point y;
  double difference = 0.0;  // |f(x) - f(y)|
  double allowed = 0.0;     // L * ||x - y||
};

/// Brute-force check of the regularity condition on the vertex grid
/// {0, 1/(n-1), ..., 1}^d with n = resolution. Returns every violating pair
/// (each unordered pair once). Advisory only: a black box can still violate
/// the condition off-grid.
inline std::vector<RegularityViolation> validate_regularity(const ObjectiveSpec& objective,
                                                            std::size_t resolution) {
  if (resolution < 2) throw DomainError("validate_regularity: resolution must be >= 2");
  const std::size_t d = objective.dimension();
  detail::checked_grid_size(d, resolution);

  std::vector<double> axis(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    axis[k] = static_cast<double>(k) / static_cast<double>(resolution - 1);
  }
  std::vector<double> coords;
  std::vector<double> values;
  detail::for_each_grid_point(d, axis, [&](std::span<const double> p) {
    coords.insert(coords.end(), p.begin(), p.end());
    values.push_back(objective(p));
  });

  const double L = objective.lipschitz_constant();
  const std::size_t n = values.size();
  std::vector<RegularityViolation> out;
  for (std::size_t a = 0; a < n; ++a) {
    std::span<const double> pa(coords.data() + a * d, d);
    for (std::size_t b = a + 1; b < n; ++b) {
      std::span<const double> pb(coords.data() + b * d, d);
      const double diff = std::abs(values[a] - values[b]);
      const double allowed = L * distance(pa, pb, objective.norm());
      if (diff > allowed + 1e-12) {
        out.push_back({Point(pa.begin(), pa.end()), Point(pb.begin(), pb.end()), diff, allowed});
      }
    }
  }
  return out;
}

}  // namespace dimcurse
