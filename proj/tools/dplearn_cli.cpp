//
// Copyright 2026 The dplearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dplearn/audit_scenarios.hpp"
#include "dplearn/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_path = "results.csv";
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> plot_path;
  int parallel = 1;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags, bool with_plot) {
  cmd->add_option("--config", flags->config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", flags->out_path, "output CSV path");
  cmd->add_option("--seed", flags->seed, "override the config seed");
  cmd->add_option("--mode", flags->mode, "override constants mode (theory|practical)")
      ->check(CLI::IsMember({"theory", "practical"}));
  cmd->add_option("--parallel", flags->parallel, "worker threads for trials")
      ->check(CLI::PositiveNumber);
  if (with_plot) {
    cmd->add_option("--plot", flags->plot_path, "also emit a gnuplot script to this path");
  }
}

dplearn::ExperimentConfig load_config(const CommonFlags& flags,
                                      std::optional<dplearn::RunKind> forced_learner) {
  dplearn::ExperimentConfig cfg = dplearn::ExperimentConfig::load(flags.config_path);
  if (flags.seed.has_value()) cfg.seed = *flags.seed;
  if (flags.mode.has_value()) {
    cfg.mode = *flags.mode == "theory" ? dplearn::ConstantsMode::kTheory
                                       : dplearn::ConstantsMode::kPractical;
  }
  if (forced_learner.has_value()) cfg.learner = *forced_learner;
  cfg.validate();
  return cfg;
}

void run_and_write(const dplearn::ExperimentConfig& cfg, const CommonFlags& flags) {
  const dplearn::ExperimentResult result = dplearn::run_experiment(cfg, flags.parallel);
  dplearn::write_file(flags.out_path, dplearn::to_csv(cfg, result));
  for (const dplearn::AggregateRecord& agg : result.aggregates) {
    std::cout << "sweep " << agg.sweep_index << ": n=" << agg.n << " m=" << agg.m
              << " alpha=" << agg.alpha << " epsilon=" << agg.epsilon
              << " success_rate=" << agg.success_rate << " mean_excess=" << agg.mean_excess
              << '\n';
  }
  std::cout << "wrote " << result.records.size() << " trial rows to " << flags.out_path << '\n';
  if (flags.plot_path.has_value()) {
    dplearn::emit_plot_script(flags.out_path, *flags.plot_path);
    std::cout << "wrote plot script to " << *flags.plot_path << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pure-DP agnostic learning: learners, auditing and experiment sweeps"};
  app.require_subcommand(1);

  CommonFlags learn_item_flags;
  CommonFlags learn_user_flags;
  CommonFlags learn_threshold_flags;
  CommonFlags min_error_flags;
  CommonFlags audit_flags;
  CommonFlags sweep_flags;

  CLI::App* learn_item = app.add_subcommand("learn-item", "run the item-level learner");
  add_common_flags(learn_item, &learn_item_flags, false);
  CLI::App* learn_user = app.add_subcommand("learn-user", "run the user-level learner");
  add_common_flags(learn_user, &learn_user_flags, false);
  CLI::App* learn_threshold =
      app.add_subcommand("learn-threshold", "run the threshold learner");
  add_common_flags(learn_threshold, &learn_threshold_flags, false);
  CLI::App* min_error =
      app.add_subcommand("min-error", "run the private minimum-error estimator");
  add_common_flags(min_error, &min_error_flags, false);
  CLI::App* audit = app.add_subcommand("audit", "run the audit described by the config");
  add_common_flags(audit, &audit_flags, false);
  CLI::App* sweep = app.add_subcommand("sweep", "run the config's sweep axes");
  add_common_flags(sweep, &sweep_flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn_item->parsed()) {
      run_and_write(load_config(learn_item_flags, dplearn::RunKind::kItem), learn_item_flags);
    } else if (learn_user->parsed()) {
      run_and_write(load_config(learn_user_flags, dplearn::RunKind::kUser), learn_user_flags);
    } else if (learn_threshold->parsed()) {
      run_and_write(load_config(learn_threshold_flags, dplearn::RunKind::kThreshold),
                    learn_threshold_flags);
    } else if (min_error->parsed()) {
      run_and_write(load_config(min_error_flags, dplearn::RunKind::kMinError), min_error_flags);
    } else if (audit->parsed()) {
      const dplearn::ExperimentConfig cfg = load_config(audit_flags, std::nullopt);
      const dplearn::AuditReport report = dplearn::run_audit(cfg);
      std::cout << report.to_text();
      dplearn::write_file(audit_flags.out_path,
                          dplearn::AuditReport::csv_header() + "\n" + report.to_csv_row() + "\n");
    } else if (sweep->parsed()) {
      run_and_write(load_config(sweep_flags, std::nullopt), sweep_flags);
    }
  } catch (const dplearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const dplearn::InfeasibilityError& e) {
    std::cerr << "infeasibility: " << e.what() << '\n';
    return 3;
  } catch (const dplearn::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
