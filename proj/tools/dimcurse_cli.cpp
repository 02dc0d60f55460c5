// Command-line front end: run / audit / sweep / list-objectives.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimcurse/harness.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::string objective;
  std::size_t dims = 0;
  std::uint64_t budget = 0;
  std::vector<std::size_t> budgets;
  std::string optimizer;
  std::string horizon;
  std::vector<double> noise_bounds;
  std::size_t oracle_resolution = 0;
  std::string oracle;
  double probe_epsilon = 0.0;
  std::string out;
  std::vector<std::uint64_t> t_list;
  std::string log;
};

void add_experiment_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file (flags override it)");
  cmd->add_option("--objective", f.objective, "catalog objective name");
  cmd->add_option("--dims", f.dims, "dimension (must match the objective)");
  cmd->add_option("--budget", f.budget, "total evaluation budget T");
  cmd->add_option("--budgets", f.budgets, "per-dimension budgets T_1,...,T_d")->delimiter(',');
  cmd->add_option("--optimizer", f.optimizer, "univariate optimizer")->check(CLI::IsMember({"ps", "grid"}));
  cmd->add_option("--horizon", f.horizon, "horizon mode")->check(CLI::IsMember({"known", "unknown"}));
  cmd->add_option("--noise-bounds", f.noise_bounds, "per-dimension noise bounds (inf allowed)")->delimiter(',');
  cmd->add_option("--oracle-resolution", f.oracle_resolution, "grid oracle points per axis (0 = auto)");
  cmd->add_option("--oracle", f.oracle, "conditional-minimum oracle")->check(CLI::IsMember({"grid", "exact"}));
  cmd->add_option("--probe-epsilon", f.probe_epsilon, "noise level for robustness measurement");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--t-list", f.t_list, "T values for sweeps and trend tables")->delimiter(',');
}

// Precedence: flags over config file over defaults.
dimcurse::ExperimentConfig build_config(CLI::App* cmd, const Flags& f) {
  dimcurse::ExperimentConfig c;
  if (!f.config_file.empty()) c = dimcurse::load_config_file(f.config_file);
  auto set = [&](const char* name) { return cmd->count(name) > 0; };
  if (set("--objective")) c.objective = f.objective;
  if (set("--dims")) c.dims = f.dims;
  if (set("--budget")) {
    c.budget = f.budget;
    c.budgets.reset();
  }
  if (set("--budgets")) {
    c.budgets = f.budgets;
    c.budget.reset();
  }
  if (set("--optimizer")) c.optimizer = f.optimizer;
  if (set("--horizon")) c.horizon = f.horizon;
  if (set("--noise-bounds")) c.noise_bounds = f.noise_bounds;
  if (set("--oracle-resolution")) c.oracle_resolution = f.oracle_resolution;
  if (set("--oracle")) c.oracle = f.oracle;
  if (set("--probe-epsilon")) c.probe_epsilon = f.probe_epsilon;
  if (set("--out")) c.out = f.out;
  if (set("--t-list")) c.t_list = f.t_list;
  if (cmd->get_option_no_throw("--log") != nullptr && set("--log")) c.log = f.log;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension-recursive Lipschitz global optimization and regret audits"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-objectives", list, "print the objective catalog and exit");

  Flags run_flags;
  Flags audit_flags;
  Flags sweep_flags;
  CLI::App* run = app.add_subcommand("run", "run the meta algorithm and write the log and regret report");
  CLI::App* audit = app.add_subcommand("audit", "audit regret inequalities on a fresh run or an existing log");
  CLI::App* sweep = app.add_subcommand("sweep", "regret and bounds over a list of budgets");
  app.add_subcommand("list-objectives", "print the objective catalog");
  add_experiment_flags(run, run_flags);
  add_experiment_flags(audit, audit_flags);
  audit->add_option("--log", audit_flags.log, "existing log (.csv or .json) to audit");
  add_experiment_flags(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dimcurse::kExitUsage;
  }

  if (list || app.got_subcommand("list-objectives")) {
    dimcurse::list_objectives(std::cout);
    return dimcurse::kExitOk;
  }
  try {
    if (run->parsed()) return dimcurse::cmd_run(build_config(run, run_flags), std::cout, std::cerr);
    if (audit->parsed()) return dimcurse::cmd_audit(build_config(audit, audit_flags), std::cout, std::cerr);
    if (sweep->parsed()) return dimcurse::cmd_sweep(build_config(sweep, sweep_flags), std::cout, std::cerr);
  } catch (const dimcurse::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dimcurse::kExitUsage;
  }
  std::cerr << app.help();
  return dimcurse::kExitUsage;
}
