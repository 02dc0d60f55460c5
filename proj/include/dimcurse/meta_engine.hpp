#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimcurse/budgeting.hpp"
#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"
#include "dimcurse/number_format.hpp"
#include "dimcurse/univariate.hpp"

namespace dimcurse {

/// Thrown when the objective returns NaN or an infinity. Carries the
/// offending evaluation so callers can log it.
class NonFiniteEvaluation : public std::runtime_error {
 public:
  explicit NonFiniteEvaluation(EvaluationRecord record)
      : std::runtime_error(describe(record)), record_(std::move(record)) {}

  const EvaluationRecord& record() const { return record_; }

 private:
  static std::string describe(const EvaluationRecord& r) {
    std::string s = "non-finite evaluation at t=" + std::to_string(r.t) + ", x=(";
    for (std::size_t i = 0; i < r.point.size(); ++i) {
      if (i > 0) s += ',';
      s += format_double(r.point[i]);
    }
    return s + "): f=" + format_double(r.value);
  }

  EvaluationRecord record_;
};

/// t = 1 + sum_i (tau_i - 1) * prod_{j>i} T_j  (counters are 1-based).
inline std::size_t time_index(std::span<const std::size_t> counters,
                              std::span<const std::size_t> budgets) {
  if (counters.size() != budgets.size() || counters.empty()) {
    throw ContractError("time_index: counters and budgets must be nonempty and of equal length");
  }
  std::size_t t = 1;
  std::size_t stride = 1;
  for (std::size_t i = counters.size(); i-- > 0;) {
    if (counters[i] < 1 || counters[i] > budgets[i]) {
      throw ContractError("time_index: counter " + std::to_string(i + 1) + " = " +
                          std::to_string(counters[i]) + " outside [1, " +
                          std::to_string(budgets[i]) + "]");
    }
    t += (counters[i] - 1) * stride;
    stride *= budgets[i];
  }
  return t;
}

inline bool is_final_configuration(std::span<const std::size_t> counters,
                                   std::span<const std::size_t> budgets) {
  for (std::size_t i = 0; i < counters.size(); ++i) {
    if (counters[i] < budgets[i]) return false;
  }
  return true;
}

/// Increments the innermost counter with carry. Returns the 0-based index of
/// the deepest dimension whose counter is not 1 afterwards: that dimension
/// takes a new optimizer proposal, every deeper one was reset.
inline std::size_t advance_counters(std::vector<std::size_t>& counters, std::span<const std::size_t> budgets) {
  if (counters.size() != budgets.size() || counters.empty()) {
    throw ContractError("advance_counters: counters and budgets must be nonempty and of equal length");
  }
  if (is_final_configuration(counters, budgets)) {
    throw ContractError("advance_counters: already at the final configuration");
  }
  const std::size_t d = counters.size();
  ++counters[d - 1];
  for (std::size_t i = d - 1; i > 0; --i) {
    if (counters[i] > budgets[i]) {
      counters[i] = 1;
      ++counters[i - 1];
    }
  }
  std::size_t active = d - 1;
  while (counters[active] == 1) --active;  // terminates: not every counter can be 1 here
  return active;
}

inline std::size_t advance_counters(MetaState& state, std::span<const std::size_t> budgets) {
  return advance_counters(state.counters, budgets);
}

/// Step-by-step driver of the dimension-recursive meta algorithm: dimension 1
/// is outermost, each dimension runs its own univariate optimizer whose
/// observations are the conditional-minimum table h^i of the current prefix
/// block.
class MetaEngine {
 public:
  MetaEngine(const ObjectiveSpec& objective, BudgetSchedule schedule, OptimizerKind kind)
      : objective_(objective), schedule_(std::move(schedule)), kind_(kind) {
    if (schedule_.dimension() != objective_.dimension()) {
      throw ContractError("MetaEngine: budget schedule has " + std::to_string(schedule_.dimension()) +
                          " dimensions, objective has " + std::to_string(objective_.dimension()));
    }
    configs_.reserve(schedule_.dimension());
    for (std::size_t i = 0; i < schedule_.dimension(); ++i) {
      configs_.push_back(
          {schedule_[i], schedule_.noise_bounds()[i], objective_.lipschitz_constant(), kind_});
      configs_.back().validate();
    }
    state_ = MetaState::initial(schedule_.dimension());
  }

  bool done() const { return evaluations_ == schedule_.total(); }
  std::uint64_t evaluations() const { return evaluations_; }
  const MetaState& state() const { return state_; }
  const BudgetSchedule& schedule() const { return schedule_; }
  const OptimizerConfig& config(std::size_t dim) const { return configs_.at(dim); }

  /// Performs one evaluation and returns its record.
  EvaluationRecord step() {
    if (done()) throw ContractError("MetaEngine::step: run already complete");
    const std::size_t d = schedule_.dimension();
    std::size_t active = 0;
    if (evaluations_ == 0) {
      for (std::size_t i = 0; i < d; ++i) push_query(i);
    } else {
      active = advance_counters(state_, schedule_.budgets());
      for (std::size_t i = active + 1; i < d; ++i) {
        state_.histories[i].clear();
        state_.cond_min[i].clear();
        push_query(i);
      }
      push_query(active);
    }

    EvaluationRecord rec;
    rec.counters = state_.counters;
    rec.t = time_index(rec.counters, schedule_.budgets());
    rec.point.resize(d);
    for (std::size_t i = 0; i < d; ++i) rec.point[i] = state_.histories[i].back();
    rec.value = objective_(rec.point);
    ++evaluations_;
    if (!std::isfinite(rec.value)) throw NonFiniteEvaluation(rec);

    // New entries (dimensions active..d) start at f_t; the enclosing blocks'
    // running minima absorb it.
    for (std::size_t i = d; i-- > active;) state_.cond_min[i].push_back(rec.value);
    for (std::size_t i = active; i-- > 0;) {
      double& h = state_.cond_min[i].back();
      h = std::min(rec.value, h);
    }
    return rec;
  }

 private:
  void push_query(std::size_t dim) {
    auto& queries = state_.histories[dim];
    const auto& values = state_.cond_min[dim];
    // Every earlier query in this block has its h entry; the new one does not yet.
    const double x = propose(configs_[dim], {queries, values}, queries.size() + 1);
    queries.push_back(x);
  }

  ObjectiveSpec objective_;
  BudgetSchedule schedule_;
  OptimizerKind kind_;
  std::vector<OptimizerConfig> configs_;
  MetaState state_;
  std::uint64_t evaluations_ = 0;
};

/// Runs the meta algorithm, stopping after max_evaluations if given (default:
/// the full prod T_i schedule).
inline EvaluationLog run(const ObjectiveSpec& objective, const BudgetSchedule& schedule,
                         OptimizerKind kind, std::optional<std::uint64_t> max_evaluations = {}) {
  MetaEngine engine(objective, schedule, kind);
  const std::uint64_t limit =
      max_evaluations ? std::min(*max_evaluations, schedule.total()) : schedule.total();
  EvaluationLog log;
  log.budgets = schedule.budgets();
  log.records.reserve(static_cast<std::size_t>(limit));
  while (engine.evaluations() < limit) log.records.push_back(engine.step());
  return log;
}

/// Doubling trick: a fresh run per epoch of doubling_epochs(T), each with
/// budgets split_budget(e, d) and stopped after e evaluations.
inline std::vector<EvaluationLog> run_unknown_horizon(const ObjectiveSpec& objective,
                                                      std::uint64_t T, OptimizerKind kind) {
  const EpochSchedule epochs = doubling_epochs(T);
  std::vector<EvaluationLog> logs;
  logs.reserve(epochs.epochs.size());
  for (std::uint64_t e : epochs.epochs) {
    logs.push_back(run(objective, split_budget(e, objective.dimension()), kind, e));
  }
  return logs;
}

}  // namespace dimcurse
