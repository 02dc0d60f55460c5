#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimcurse/bench_oracle.hpp"
#include "dimcurse/bounds_audit.hpp"
#include "dimcurse/budgeting.hpp"
#include "dimcurse/core_types.hpp"
#include "dimcurse/log_io.hpp"
#include "dimcurse/meta_engine.hpp"
#include "dimcurse/univariate.hpp"
#include "json.hpp"

namespace dimcurse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonFinite = 3;

/// Bad experiment configuration (unknown objective, invalid budget, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string objective = "cone_2";
  std::optional<std::size_t> dims;
  std::optional<std::uint64_t> budget;
  std::optional<std::vector<std::size_t>> budgets;
  std::string optimizer = "ps";
  std::string horizon = "known";
  std::optional<std::vector<double>> noise_bounds;
  std::size_t oracle_resolution = 0;  // 0: largest power of two the grid limit allows, at most 4096
  std::string oracle = "grid";        // grid | exact
  double probe_epsilon = 0.05;
  std::string out = ".";
  std::vector<std::uint64_t> t_list{4, 16, 64, 256};
  std::optional<std::string> log;

  bool operator==(const ExperimentConfig&) const = default;
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j = {{"objective", c.objective},
                      {"optimizer", c.optimizer},
                      {"horizon", c.horizon},
                      {"oracle_resolution", c.oracle_resolution},
                      {"oracle", c.oracle},
                      {"probe_epsilon", c.probe_epsilon},
                      {"out", c.out},
                      {"t_list", c.t_list}};
  if (c.dims) j["dims"] = *c.dims;
  if (c.budget) j["budget"] = *c.budget;
  if (c.budgets) j["budgets"] = *c.budgets;
  if (c.noise_bounds) j["noise_bounds"] = *c.noise_bounds;
  if (c.log) j["log"] = *c.log;
  return j;
}

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "objective") base.objective = v.get<std::string>();
      else if (key == "dims") base.dims = v.get<std::size_t>();
      else if (key == "budget") base.budget = v.get<std::uint64_t>();
      else if (key == "budgets") base.budgets = v.get<std::vector<std::size_t>>();
      else if (key == "optimizer") base.optimizer = v.get<std::string>();
      else if (key == "horizon") base.horizon = v.get<std::string>();
      else if (key == "noise_bounds") base.noise_bounds = v.get<std::vector<double>>();
      else if (key == "oracle_resolution") base.oracle_resolution = v.get<std::size_t>();
      else if (key == "oracle") base.oracle = v.get<std::string>();
      else if (key == "probe_epsilon") base.probe_epsilon = v.get<double>();
      else if (key == "out") base.out = v.get<std::string>();
      else if (key == "t_list") base.t_list = v.get<std::vector<std::uint64_t>>();
      else if (key == "log") base.log = v.get<std::string>();
      else throw UsageError("config: unknown field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return base;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

/// A configuration checked against the catalog and turned into run inputs.
struct ResolvedExperiment {
  CatalogEntry entry;
  OptimizerKind kind = OptimizerKind::kPiyavskiiShubert;
  bool unknown_horizon = false;
  std::uint64_t total = 0;               // evaluations performed
  std::optional<BudgetSchedule> schedule;  // known horizon only
  std::size_t oracle_resolution = 0;
  bool exact_oracle = false;
  RobustnessProbe probe;
};

inline std::size_t auto_oracle_resolution(std::size_t free_dims) {
  std::size_t r = 4096;
  while (r > 1) {
    std::uint64_t n = 1;
    bool fits = true;
    for (std::size_t i = 0; i < free_dims && fits; ++i) {
      n *= r;
      fits = n <= kMaxGridPoints;
    }
    if (fits) break;
    r /= 2;
  }
  return r;
}

inline ResolvedExperiment resolve(const ExperimentConfig& c) {
  auto entry = find_objective(c.objective);
  if (!entry) throw UsageError("unknown objective '" + c.objective + "' (see list-objectives)");
  const std::size_t d = entry->objective.dimension();
  if (c.dims && *c.dims != d) {
    throw UsageError("objective '" + c.objective + "' is " + std::to_string(d) + "-dimensional, --dims " +
                     std::to_string(*c.dims) + " given");
  }
  ResolvedExperiment r{std::move(*entry), OptimizerKind::kPiyavskiiShubert, false, 0, std::nullopt, 0, false, {}};
  if (c.optimizer == "ps") r.kind = OptimizerKind::kPiyavskiiShubert;
  else if (c.optimizer == "grid") r.kind = OptimizerKind::kUniformGrid;
  else throw UsageError("unknown optimizer '" + c.optimizer + "' (ps|grid)");
  if (c.horizon == "known") r.unknown_horizon = false;
  else if (c.horizon == "unknown") r.unknown_horizon = true;
  else throw UsageError("unknown horizon mode '" + c.horizon + "' (known|unknown)");
  if (c.oracle == "grid") r.exact_oracle = false;
  else if (c.oracle == "exact") r.exact_oracle = true;
  else throw UsageError("unknown oracle '" + c.oracle + "' (grid|exact)");
  if (!(c.probe_epsilon >= 0.0) || !std::isfinite(c.probe_epsilon)) {
    throw UsageError("probe epsilon must be finite and >= 0");
  }
  r.probe.epsilon = c.probe_epsilon;
  r.oracle_resolution = c.oracle_resolution != 0 ? c.oracle_resolution : auto_oracle_resolution(d > 1 ? d - 1 : 1);

  if (c.budget.has_value() == c.budgets.has_value()) {
    throw UsageError("give exactly one of --budget T or --budgets a,b,...");
  }
  try {
    if (c.budgets) {
      if (r.unknown_horizon) throw UsageError("--horizon unknown takes --budget T, not per-dimension budgets");
      if (c.budgets->size() != d) throw UsageError("--budgets needs " + std::to_string(d) + " entries");
      r.schedule = c.noise_bounds ? BudgetSchedule(*c.budgets, *c.noise_bounds) : BudgetSchedule(*c.budgets);
      r.total = r.schedule->total();
    } else {
      if (*c.budget == 0) throw UsageError("--budget must be >= 1");
      r.total = *c.budget;
      if (!r.unknown_horizon) {
        const BudgetSchedule split = split_budget(*c.budget, d);
        r.schedule = c.noise_bounds ? BudgetSchedule(split.budgets(), *c.noise_bounds) : split;
      }
    }
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid budget: ") + e.what());
  } catch (const ContractError& e) {
    throw UsageError(std::string("invalid budget: ") + e.what());
  }
  return r;
}

/// Robustness coefficients of the univariate optimizer at horizon T1, as used
/// inside a run on `entry`: measured on each axis profile of the objective with
/// the objective's Lipschitz constant, worst case over axes.
inline RobustnessProfile measure_entry_robustness(const CatalogEntry& entry, OptimizerKind kind,
                                                  std::size_t T1, const RobustnessProbe& probe) {
  OptimizerConfig config{T1, probe.epsilon, entry.objective.lipschitz_constant(), kind};
  RobustnessProfile worst{0.0, 1.0, 0.0};
  for (const auto& profile : entry.axis_profiles) {
    const RobustnessProfile p = measure_robustness(config, profile, probe).profile;
    worst.alpha = std::max(worst.alpha, p.alpha);
    worst.beta = std::max(worst.beta, p.beta);
    worst.base_regret = std::max(worst.base_regret, p.base_regret);
  }
  return worst;
}

/// Sidecar cache named by DIMCURSE_ORACLE_CACHE; in-memory only when unset.
inline OracleCache open_oracle_cache() {
  const char* path = std::getenv("DIMCURSE_ORACLE_CACHE");
  return (path != nullptr && *path != '\0') ? OracleCache(path) : OracleCache();
}

inline double objective_minimum(const CatalogEntry& entry, std::size_t resolution) {
  if (entry.objective.known_minimum()) return *entry.objective.known_minimum();
  return grid_minimum(entry.objective, resolution).value;
}

struct RunResult {
  std::vector<EvaluationLog> logs;  // one per epoch; a single log for known horizon
  RegretReport report;
  NoiseGap noise_gap_detail;
  OracleValue oracle_minimum;  // grid estimate of f_*, cross-checks the analytic value
};

inline std::vector<double> concat_values(const std::vector<EvaluationLog>& logs) {
  std::vector<double> v;
  for (const auto& l : logs) {
    for (const auto& r : l.records) v.push_back(r.value);
  }
  return v;
}

/// Runs the experiment and assembles its regret report with bound checks.
inline RunResult execute(const ResolvedExperiment& x) {
  RunResult out;
  const ObjectiveSpec& f = x.entry.objective;
  const std::size_t d = f.dimension();
  if (x.unknown_horizon) {
    out.logs = run_unknown_horizon(f, x.total, x.kind);
  } else {
    out.logs.push_back(run(f, *x.schedule, x.kind, x.total));
  }

  const double f_star = objective_minimum(x.entry, x.oracle_resolution);
  {
    OracleCache cache = open_oracle_cache();
    out.oracle_minimum = grid_minimum_cached(cache, f, auto_oracle_resolution(d));
    cache.save();
  }
  const std::vector<double> values = concat_values(out.logs);
  RegretReport& rep = out.report;
  rep.average_regret = average_regret(values, f_star);
  rep.average_pseudo_regret = pseudo_regret(values, f_star);  // evaluations are exact here
  double cumulative = 0.0;
  for (double v : values) cumulative += v - f_star;
  rep.cumulative_regret = cumulative;

  if (d >= 2) {
    const ConditionalOracle oracle =
        x.exact_oracle ? make_exact_oracle(x.entry) : make_grid_oracle(f, x.oracle_resolution);
    NoiseGap gap{-INFINITY, 0.0};
    for (const auto& l : out.logs) {
      const NoiseGap g = noise_gap(l, oracle);
      gap.value = std::max(gap.value, g.value);
      gap.oracle_error = std::max(gap.oracle_error, g.oracle_error);
    }
    rep.noise_gap = gap.value;
    out.noise_gap_detail = gap;
  }

  rep.bound_checks.push_back(make_bound_check("f_star_vs_grid_oracle", out.oracle_minimum.value, f_star));
  rep.bound_checks.push_back(make_bound_check("grid_oracle_vs_f_star", f_star + out.oracle_minimum.error,
                                              out.oracle_minimum.value));

  const std::uint64_t T = values.size();
  const std::size_t floor_root = static_cast<std::size_t>(integer_root_floor(T, d));
  const RobustnessProfile at_floor = measure_entry_robustness(x.entry, x.kind, floor_root, x.probe);
  const BoundFactor strong{RobustnessKind::kStrong, d, floor_root, at_floor.alpha};
  const BoundFactor weak{RobustnessKind::kWeak, d, floor_root, at_floor.beta};

  if (x.unknown_horizon) {
    rep.bound_checks.push_back(make_bound_check(
        "unknown_horizon_strong", unknown_horizon_bound(T, d, strong, at_floor.base_regret), rep.average_regret));
    rep.bound_checks.push_back(make_bound_check(
        "unknown_horizon_weak", unknown_horizon_bound(T, d, weak, at_floor.base_regret), rep.average_regret));
  } else {
    const EvaluationLog& log = out.logs.front();
    if (log.complete()) {
      const RobustnessProfile at_t1 = measure_entry_robustness(x.entry, x.kind, log.budgets.front(), x.probe);
      rep.bound_checks.push_back(make_bound_check(
          "average_strong", strong_bound(d, at_t1.alpha, at_t1.base_regret), rep.average_regret));
      rep.bound_checks.push_back(make_bound_check(
          "average_weak", weak_bound(d, at_t1.beta, at_t1.base_regret), rep.average_regret));
    }
    rep.bound_checks.push_back(make_bound_check(
        "cumulative_strong", cumulative_bound(T, d, strong, at_floor.base_regret), rep.cumulative_regret));
    rep.bound_checks.push_back(make_bound_check(
        "cumulative_weak", cumulative_bound(T, d, weak, at_floor.base_regret), rep.cumulative_regret));
  }
  return out;
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + p.string());
  o << text;
}

inline std::string csv_of(const EvaluationLog& l) {
  std::ostringstream s;
  write_log_csv(s, l);
  return s.str();
}

inline std::string json_of(const EvaluationLog& l) {
  std::ostringstream s;
  write_log_json(s, l);
  return s.str();
}

inline std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline nlohmann::json run_header(const ResolvedExperiment& x, const RunResult& r) {
  nlohmann::json j = {{"objective", x.entry.name},
                      {"dimension", x.entry.objective.dimension()},
                      {"optimizer", std::string(to_string(x.kind))},
                      {"horizon", x.unknown_horizon ? "unknown" : "known"},
                      {"evaluations", concat_values(r.logs).size()}};
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& l : r.logs) epochs.push_back({{"budgets", l.budgets}, {"evaluations", l.size()}});
  j["epochs"] = epochs;
  return j;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonFiniteEvaluation& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonFinite;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace detail

/// `run`: writes log.csv / log.json (log_epoch<k>.* for unknown horizon) and
/// report.json into config.out.
inline int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ResolvedExperiment x = resolve(config);
    const RunResult r = execute(x);
    const std::filesystem::path dir(config.out);
    std::filesystem::create_directories(dir);
    if (x.unknown_horizon) {
      for (std::size_t k = 0; k < r.logs.size(); ++k) {
        detail::write_text(dir / ("log_epoch" + std::to_string(k) + ".csv"), detail::csv_of(r.logs[k]));
        detail::write_text(dir / ("log_epoch" + std::to_string(k) + ".json"), detail::json_of(r.logs[k]));
      }
    } else {
      detail::write_text(dir / "log.csv", detail::csv_of(r.logs.front()));
      detail::write_text(dir / "log.json", detail::json_of(r.logs.front()));
    }
    nlohmann::json rep = detail::run_header(x, r);
    rep["report"] = to_json(r.report);
    rep["oracle_minimum"] = {{"value", r.oracle_minimum.value}, {"error", r.oracle_minimum.error}};
    detail::write_text(dir / "report.json", rep.dump(2) + "\n");

    if (x.unknown_horizon) {
      out << "epochs:";
      for (const auto& l : r.logs) out << ' ' << l.size() << " [" << detail::join(l.budgets) << ']';
      out << '\n';
    } else {
      out << "budgets: " << detail::join(x.schedule->budgets()) << '\n';
    }
    out << "evaluations: " << concat_values(r.logs).size() << '\n'
        << "average_regret: " << format_double(r.report.average_regret) << '\n';
    return kExitOk;
  });
}

struct TrendRow {
  std::uint64_t T = 0;
  double regret = 0.0;
};

/// Average regret of known-horizon runs at each T, for checking the
/// "nonincreasing in T" hypothesis on realized regret.
inline std::vector<TrendRow> regret_trend(const CatalogEntry& entry, OptimizerKind kind,
                                          const std::vector<std::uint64_t>& Ts) {
  std::vector<TrendRow> rows;
  const double f_star = objective_minimum(entry, 1024);
  for (std::uint64_t T : Ts) {
    const auto log = run(entry.objective, split_budget(T, entry.objective.dimension()), kind, T);
    rows.push_back({T, average_regret(log.values(), f_star)});
  }
  return rows;
}

/// `audit`: audit.json with the decomposition audit, noise gap, bound checks
/// and regret trend. Audits --log if given, otherwise a fresh run.
inline int cmd_audit(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ExperimentConfig c = config;
    std::optional<EvaluationLog> existing;
    if (c.log) {
      std::ifstream in(*c.log);
      if (!in) throw UsageError("cannot open log " + *c.log);
      existing = std::filesystem::path(*c.log).extension() == ".json" ? read_log_json(in) : read_log_csv(in);
      if (!c.budget && !c.budgets) c.budgets = existing->budgets;
    }
    const ResolvedExperiment x = resolve(c);
    const std::size_t d = x.entry.objective.dimension();
    RunResult r;
    if (existing) {
      if (existing->dimension() != d) throw UsageError("log dimension differs from the objective");
      r.logs.push_back(*existing);
    } else {
      r = execute(x);
    }

    nlohmann::json doc = detail::run_header(x, r);
    const ConditionalOracle oracle = x.exact_oracle ? make_exact_oracle(x.entry)
                                                    : make_grid_oracle(x.entry.objective, x.oracle_resolution);
    OracleValue f_star{objective_minimum(x.entry, x.oracle_resolution), 0.0};
    nlohmann::json audits = nlohmann::json::array();
    if (d >= 2) {
      nlohmann::json gaps = nlohmann::json::array();
      for (const auto& l : r.logs) {
        const NoiseGap g = noise_gap(l, oracle);
        gaps.push_back({{"value", g.value}, {"oracle_error", g.oracle_error}});
        if (l.complete()) audits.push_back(to_json(audit_decomposition(l, oracle, f_star)));
      }
      doc["noise_gap"] = gaps;
    }
    doc["audits"] = audits;

    if (existing) {
      const auto values = existing->values();
      r.report.average_regret = average_regret(values, f_star.value);
      r.report.average_pseudo_regret = r.report.average_regret;
      r.report.cumulative_regret = 0.0;
      for (double v : values) r.report.cumulative_regret += v - f_star.value;
      if (existing->complete()) {
        const RobustnessProfile p = measure_entry_robustness(x.entry, x.kind, existing->budgets.front(), x.probe);
        r.report.bound_checks.push_back(make_bound_check(
            "average_strong", strong_bound(d, p.alpha, p.base_regret), r.report.average_regret));
        r.report.bound_checks.push_back(make_bound_check(
            "average_weak", weak_bound(d, p.beta, p.base_regret), r.report.average_regret));
      }
    }
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& b : r.report.bound_checks) checks.push_back(to_json(b));
    doc["bound_checks"] = checks;

    const auto trend = regret_trend(x.entry, x.kind, c.t_list);
    nlohmann::json rows = nlohmann::json::array();
    bool nonincreasing = true;
    for (std::size_t k = 0; k < trend.size(); ++k) {
      rows.push_back({{"T", trend[k].T}, {"r", trend[k].regret}});
      if (k > 0 && trend[k].regret > trend[k - 1].regret) nonincreasing = false;
    }
    doc["trend"] = {{"rows", rows}, {"nonincreasing", nonincreasing}};

    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "audit.json", doc.dump(2) + "\n");
    for (const auto& a : audits) {
      out << a["bound_name"].get<std::string>() << ": lhs=" << format_double(a["lhs"].get<double>())
          << " rhs=" << format_double(a["rhs"].get<double>()) << " " << a["verdict"].get<std::string>() << '\n';
    }
    out << "trend nonincreasing: " << (nonincreasing ? "yes" : "no") << '\n';
    return kExitOk;
  });
}

struct SweepRow {
  std::uint64_t T = 0;
  double r = 0.0;
  double r_tilde = 0.0;
  double R = 0.0;
  double bound_strong = 0.0;  // cumulative bound / T
  double bound_weak = 0.0;
};

inline SweepRow sweep_point(const ResolvedExperiment& base, std::uint64_t T) {
  ResolvedExperiment x = base;
  const std::size_t d = x.entry.objective.dimension();
  x.unknown_horizon = false;
  x.total = T;
  x.schedule = split_budget(T, d);
  const RunResult res = execute(x);
  SweepRow row{T, res.report.average_regret, res.report.average_pseudo_regret, res.report.cumulative_regret};
  for (const auto& c : res.report.bound_checks) {
    if (c.name == "cumulative_strong") row.bound_strong = c.bound / static_cast<double>(T);
    if (c.name == "cumulative_weak") row.bound_weak = c.bound / static_cast<double>(T);
  }
  return row;
}

/// `sweep`: sweep.csv with one row per T (rows ordered by T as listed).
inline int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (config.t_list.empty()) throw UsageError("sweep needs a nonempty T list");
    ExperimentConfig c = config;
    c.budgets.reset();
    c.budget = config.t_list.front();
    c.horizon = "known";
    for (std::uint64_t T : c.t_list) {
      if (T == 0) throw UsageError("sweep: T values must be >= 1");
    }
    const ResolvedExperiment base = resolve(c);

    std::vector<std::future<SweepRow>> jobs;
    for (std::uint64_t T : c.t_list) jobs.push_back(std::async(std::launch::async, sweep_point, base, T));
    std::vector<SweepRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());

    std::ostringstream csv;
    csv << "T,r,r_tilde,R,bound_strong,bound_weak\n";
    for (const auto& row : rows) {
      csv << row.T << ',' << format_double(row.r) << ',' << format_double(row.r_tilde) << ','
          << format_double(row.R) << ',' << format_double(row.bound_strong) << ','
          << format_double(row.bound_weak) << '\n';
    }
    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "sweep.csv", csv.str());
    out << csv.str();
    return kExitOk;
  });
}

inline void list_objectives(std::ostream& out) {
  for (const auto& e : catalog()) {
    out << e.name << "\td=" << e.objective.dimension() << "\tL=" << format_double(e.objective.lipschitz_constant())
        << "\tnorm=" << to_string(e.objective.norm()) << "\tf*=" << format_double(e.analytic_minimum.value_or(NAN))
        << "\t" << e.notes << '\n';
  }
}

}  // namespace dimcurse
