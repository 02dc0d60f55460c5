#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dimcurse/bounds_audit.hpp"
#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"
#include "dimcurse/number_format.hpp"
#include "json.hpp"

namespace dimcurse {

/// "t,tau_1,...,tau_d,x_1,...,x_d,f"
inline std::string log_csv_header(std::size_t d) {
  std::string h = "t";
  for (std::size_t i = 1; i <= d; ++i) h += ",tau_" + std::to_string(i);
  for (std::size_t i = 1; i <= d; ++i) h += ",x_" + std::to_string(i);
  return h + ",f";
}

inline void write_log_csv(std::ostream& out, const EvaluationLog& log) {
  out << log_csv_header(log.dimension()) << '\n';
  for (const auto& r : log.records) {
    out << r.t;
    for (std::size_t c : r.counters) out << ',' << c;
    for (double x : r.point) out << ',' << format_double(x);
    out << ',' << format_double(r.value) << '\n';
  }
}

/// Array of {"t", "tau", "x", "f"} objects, numbers with 17 significant digits.
inline void write_log_json(std::ostream& out, const EvaluationLog& log) {
  out << "[";
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    const auto& r = log.records[k];
    out << (k == 0 ? "\n  " : ",\n  ") << "{\"t\": " << r.t << ", \"tau\": [";
    for (std::size_t i = 0; i < r.counters.size(); ++i) out << (i ? ", " : "") << r.counters[i];
    out << "], \"x\": [";
    for (std::size_t i = 0; i < r.point.size(); ++i) out << (i ? ", " : "") << format_double(r.point[i]);
    out << "], \"f\": " << format_double(r.value) << "}";
  }
  out << (log.records.empty() ? "]\n" : "\n]\n");
}

namespace detail {

// Serialized logs do not store the schedule; recover T_i as the largest
// counter seen in each dimension.
inline void infer_budgets(EvaluationLog& log, std::size_t d) {
  log.budgets.assign(d, 1);
  for (const auto& r : log.records) {
    for (std::size_t i = 0; i < d; ++i) log.budgets[i] = std::max(log.budgets[i], r.counters[i]);
  }
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::size_t parse_index(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ContractError("log: not an index: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline EvaluationLog read_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ContractError("read_log_csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_commas(line);
  if (header.size() < 4 || (header.size() - 2) % 2 != 0) {
    throw ContractError("read_log_csv: malformed header '" + line + "'");
  }
  const std::size_t d = (header.size() - 2) / 2;
  if (line != log_csv_header(d)) throw ContractError("read_log_csv: unexpected header '" + line + "'");

  EvaluationLog log;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) throw ContractError("read_log_csv: wrong field count");
    EvaluationRecord r;
    r.t = detail::parse_index(cells[0]);
    for (std::size_t i = 0; i < d; ++i) r.counters.push_back(detail::parse_index(cells[1 + i]));
    for (std::size_t i = 0; i < d; ++i) r.point.push_back(parse_double(cells[1 + d + i]));
    r.value = parse_double(cells[1 + 2 * d]);
    log.records.push_back(std::move(r));
  }
  detail::infer_budgets(log, d);
  return log;
}

inline EvaluationLog read_log_json(std::istream& in) {
  const auto doc = nlohmann::json::parse(in);
  if (!doc.is_array()) throw ContractError("read_log_json: expected a JSON array");
  EvaluationLog log;
  std::size_t d = 0;
  for (const auto& item : doc) {
    EvaluationRecord r;
    r.t = item.at("t").get<std::size_t>();
    r.counters = item.at("tau").get<std::vector<std::size_t>>();
    r.point = item.at("x").get<std::vector<double>>();
    r.value = item.at("f").get<double>();
    if (r.counters.size() != r.point.size() || r.counters.empty()) {
      throw ContractError("read_log_json: tau and x must be nonempty and of equal length");
    }
    if (d == 0) d = r.counters.size();
    if (r.counters.size() != d) throw ContractError("read_log_json: inconsistent dimension");
    log.records.push_back(std::move(r));
  }
  if (d == 0) throw ContractError("read_log_json: empty log");
  detail::infer_budgets(log, d);
  return log;
}

inline nlohmann::json to_json(const AuditReport& r) {
  return {{"bound_name", r.bound_name},     {"lhs", r.lhs},
          {"rhs", r.rhs},                   {"margin", r.margin},
          {"oracle_error", r.oracle_error}, {"verdict", std::string(to_string(r.verdict))}};
}

inline nlohmann::json to_json(const BoundCheck& c) {
  return {{"name", c.name}, {"bound", c.bound}, {"measured", c.measured}, {"satisfied", c.satisfied}};
}

inline nlohmann::json to_json(const RegretReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.bound_checks) checks.push_back(to_json(c));
  nlohmann::json j = {{"average_regret", r.average_regret},
                      {"average_pseudo_regret", r.average_pseudo_regret},
                      {"cumulative_regret", r.cumulative_regret},
                      {"bound_checks", checks}};
  if (r.noise_gap) j["noise_gap"] = *r.noise_gap;
  return j;
}

}  // namespace dimcurse
