#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"
#include "dimcurse/univariate.hpp"
#include "json.hpp"

namespace dimcurse {

/// A brute-force estimate f_hat together with a bound e such that the true
/// value lies in [f_hat - e, f_hat].
struct OracleValue {
  double value = 0.0;
  double error = 0.0;
};

/// Minimum over the free coordinates with the leading coordinates held at
/// `prefix`.
using ConditionalOracle = std::function<OracleValue(std::span<const double> prefix)>;

/// Cell-center grid minimum over the coordinates after `prefix`: each free axis
/// is sampled at (k + 1/2) / resolution. Every point of the cube lies within
/// half a cell of a center, so the error bound is L * ||half-cell diagonal||.
inline OracleValue conditional_minimum(const ObjectiveSpec& objective,
                                       std::span<const double> prefix, std::size_t resolution) {
  const std::size_t d = objective.dimension();
  if (prefix.size() >= d) throw ContractError("conditional_minimum: prefix must leave a free coordinate");
  if (resolution == 0) throw DomainError("conditional_minimum: resolution must be >= 1");
  const std::size_t free = d - prefix.size();
  detail::checked_grid_size(free, resolution);

  std::vector<double> centers(resolution);
  for (std::size_t k = 0; k < resolution; ++k) {
    centers[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(resolution);
  }
  Point p(d);
  std::copy(prefix.begin(), prefix.end(), p.begin());
  double best = INFINITY;
  detail::for_each_grid_point(free, centers, [&](std::span<const double> q) {
    std::copy(q.begin(), q.end(), p.begin() + static_cast<std::ptrdiff_t>(prefix.size()));
    best = std::min(best, objective(p));
  });
  const std::vector<double> half_cell(free, 0.5 / static_cast<double>(resolution));
  return {best, objective.lipschitz_constant() * norm_of(half_cell, objective.norm())};
}

inline OracleValue grid_minimum(const ObjectiveSpec& objective, std::size_t resolution) {
  return conditional_minimum(objective, {}, resolution);
}

inline ConditionalOracle make_grid_oracle(const ObjectiveSpec& objective, std::size_t resolution) {
  return [objective, resolution](std::span<const double> prefix) {
    return conditional_minimum(objective, prefix, resolution);
  };
}

struct CatalogEntry {
  std::string name;
  ObjectiveSpec objective;
  std::optional<double> analytic_minimum;
  std::optional<Point> argmin;
  std::string notes;
  /// Exact min over the free coordinates given a prefix, when known in closed form.
  std::function<double(std::span<const double>)> exact_conditional_minimum;
  /// x -> min of f over the other coordinates with coordinate i fixed at x,
  /// one entry per axis, each with its exact minimum.
  std::vector<UnivariateObjective> axis_profiles;
};

inline ConditionalOracle make_exact_oracle(const CatalogEntry& entry) {
  if (!entry.exact_conditional_minimum) {
    throw ContractError("make_exact_oracle: '" + entry.name + "' has no closed-form conditional minimum");
  }
  return [fn = entry.exact_conditional_minimum](std::span<const double> prefix) {
    return OracleValue{fn(prefix), 0.0};
  };
}

/// Exact oracle when the entry has one, otherwise the grid oracle.
inline ConditionalOracle make_oracle(const CatalogEntry& entry, std::size_t resolution) {
  return entry.exact_conditional_minimum ? make_exact_oracle(entry)
                                         : make_grid_oracle(entry.objective, resolution);
}

namespace objectives {

inline UnivariateObjective vee_profile(double c) {
  return {[c](double x) { return std::abs(x - c); }, 0.0};
}

inline std::string format_center(std::span<const double> c) {
  std::string s = "c=(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(c[i]);
  }
  return s + ")";
}

/// |x - c| on [0,1]; L = 1.
inline CatalogEntry vee(std::string name, double c) {
  ObjectiveSpec spec(name, 1, [c](std::span<const double> x) { return std::abs(x[0] - c); }, 1.0,
                     NormKind::kInfinity, 0.0);
  return {std::move(name), std::move(spec), 0.0, Point{c}, "V-shaped, " + format_center(std::span(&c, 1)),
          [](std::span<const double>) { return 0.0; }, {vee_profile(c)}};
}

/// max_i |x_i - c_i|; L = 1 in the sup-norm.
inline CatalogEntry pyramid(std::string name, Point c) {
  const std::size_t d = c.size();
  ObjectiveSpec spec(
      name, d,
      [c](std::span<const double> x) {
        double m = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, std::abs(x[i] - c[i]));
        return m;
      },
      1.0, NormKind::kInfinity, 0.0);
  std::vector<UnivariateObjective> profiles;
  for (double ci : c) profiles.push_back(vee_profile(ci));
  auto cond = [c](std::span<const double> prefix) {
    double m = 0.0;
    for (std::size_t i = 0; i < prefix.size(); ++i) m = std::max(m, std::abs(prefix[i] - c[i]));
    return m;
  };
  std::string notes = "sup-norm pyramid, " + format_center(c);
  return {std::move(name), std::move(spec), 0.0, c, std::move(notes), cond, std::move(profiles)};
}

/// sum_i |x_i - c_i|; L = d in the sup-norm.
inline CatalogEntry cone(std::string name, Point c) {
  const std::size_t d = c.size();
  ObjectiveSpec spec(
      name, d,
      [c](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) s += std::abs(x[i] - c[i]);
        return s;
      },
      static_cast<double>(d), NormKind::kInfinity, 0.0);
  std::vector<UnivariateObjective> profiles;
  for (double ci : c) profiles.push_back(vee_profile(ci));
  auto cond = [c](std::span<const double> prefix) {
    double s = 0.0;
    for (std::size_t i = 0; i < prefix.size(); ++i) s += std::abs(prefix[i] - c[i]);
    return s;
  };
  std::string notes = "l1 cone, " + format_center(c);
  return {std::move(name), std::move(spec), 0.0, c, std::move(notes), cond, std::move(profiles)};
}

/// 0.5 |x - 0.5| + 0.125 (1 - cos 4 pi x). |f'| <= 0.5 + pi/2; minimum 0 at 0.5,
/// local minima near 0 and 1.
inline CatalogEntry ripple() {
  constexpr double kPi = std::numbers::pi;
  auto f = [](double x) { return 0.5 * std::abs(x - 0.5) + 0.25 * (1.0 - std::cos(4.0 * kPi * x)) / 2.0; };
  ObjectiveSpec spec("ripple", 1, [f](std::span<const double> x) { return f(x[0]); }, 0.5 + kPi / 2.0,
                     NormKind::kInfinity, 0.0);
  return {"ripple",
          std::move(spec),
          0.0,
          Point{0.5},
          "multimodal, L = 0.5 + pi/2 from the derivative bound",
          [](std::span<const double>) { return 0.0; },
          {UnivariateObjective{f, 0.0}}};
}

}  // namespace objectives

/// The built-in regular test objectives, all with minimum value 0.
inline std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> entries;
  entries.push_back(objectives::vee("vee", 0.5));
  entries.push_back(objectives::vee("vee_skew", 0.3));
  entries.push_back(objectives::ripple());
  entries.push_back(objectives::pyramid("pyramid_2", {0.3, 0.7}));
  entries.push_back(objectives::pyramid("pyramid_3", {0.3, 0.7, 0.45}));
  entries.push_back(objectives::cone("cone_2", {0.25, 0.75}));
  entries.push_back(objectives::cone("cone_3", {0.25, 0.75, 0.4}));
  return entries;
}

inline std::optional<CatalogEntry> find_objective(std::string_view name) {
  for (auto& e : catalog()) {
    if (e.name == name) return std::move(e);
  }
  return std::nullopt;
}

/// JSON sidecar of grid minima keyed by (objective name, resolution).
class OracleCache {
 public:
  OracleCache() = default;
  explicit OracleCache(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
      std::ifstream in(path_);
      const auto doc = nlohmann::json::parse(in);
      for (const auto& [key, v] : doc.items()) {
        entries_[key] = {v.at("value").get<double>(), v.at("error").get<double>()};
      }
    }
  }

  static std::string key(std::string_view name, std::size_t resolution) {
    return std::string(name) + "@" + std::to_string(resolution);
  }

  std::optional<OracleValue> get(std::string_view name, std::size_t resolution) const {
    auto it = entries_.find(key(name, resolution));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(std::string_view name, std::size_t resolution, OracleValue v) {
    entries_[key(name, resolution)] = v;
  }

  void save() const {
    if (path_.empty()) return;
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [k, v] : entries_) doc[k] = {{"value", v.value}, {"error", v.error}};
    std::ofstream(path_) << doc.dump(2) << '\n';
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::filesystem::path path_;
  std::map<std::string, OracleValue> entries_;
};

inline OracleValue grid_minimum_cached(OracleCache& cache, const ObjectiveSpec& objective,
                                       std::size_t resolution) {
  if (auto hit = cache.get(objective.name(), resolution)) return *hit;
  const OracleValue v = grid_minimum(objective, resolution);
  cache.put(objective.name(), resolution, v);
  return v;
}

}  // namespace dimcurse
