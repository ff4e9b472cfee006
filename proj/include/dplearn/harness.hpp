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

#ifndef DPLEARN_HARNESS_HPP_
#define DPLEARN_HARNESS_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dplearn/audit.hpp"
#include "dplearn/errors.hpp"
#include "dplearn/learners.hpp"
#include "dplearn/threshold.hpp"

namespace dplearn {

/// Synthetic data distribution specification.
struct DistributionSpec {
  enum class Kind { kNoisyThreshold, kUniformLabel, kPointMass, kCustom };
  Kind kind = Kind::kNoisyThreshold;
  int64_t u_star = 0;               // noisy-threshold
  double rho = 0.0;                 // noisy-threshold label flip probability
  std::vector<double> marginal;     // optional custom marginal over X
  int64_t x = 1;                    // point-mass
  uint8_t y = 0;                    // point-mass
  std::vector<double> probs;        // custom joint table, 2|X| entries
};

enum class RunKind { kItem, kUser, kThreshold, kMinError };

struct AuditConfig {
  std::string method = "empirical";          // exact | empirical
  std::string target = "threshold-learner";  // exp-mech | laplace | threshold-learner
  int64_t trials = 100000;
  int bins = 64;
};

struct SweepAxes {
  std::vector<int64_t> n;
  std::vector<int64_t> m;
  std::vector<double> epsilon;
  std::vector<double> alpha;
};

/// One experiment description, loaded from a strict JSON document (unknown
/// keys are errors).
struct ExperimentConfig {
  RunKind learner = RunKind::kThreshold;
  int64_t domain_size = 16;
  DistributionSpec distribution;
  int64_t n = 100;
  int64_t m = 1;
  double alpha = 0.1;
  double beta = 0.1;
  double epsilon = 1.0;
  int64_t trials = 1;
  uint64_t seed = 1;
  ConstantsMode mode = ConstantsMode::kPractical;
  double slack_scale = 0.0;  // 0 means the mode default
  bool noiseless = false;
  SweepAxes sweep;
  std::optional<AuditConfig> audit;

  ConstantsPolicy policy() const {
    ConstantsPolicy p;
    p.mode = mode;
    p.slack_scale = slack_scale > 0.0
                        ? slack_scale
                        : (mode == ConstantsMode::kTheory ? ConstantsPolicy::kTheorySlackScale
                                                          : ConstantsPolicy::kPracticalSlackScale);
    p.noiseless = noiseless;
    return p;
  }

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  void validate() const;
};

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const char* where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  detail::check_keys(j,
                     {"learner", "domain_size", "distribution", "n", "m", "alpha", "beta",
                      "epsilon", "trials", "seed", "constants_mode", "slack_scale", "noiseless",
                      "sweep", "audit"},
                     "config");
  ExperimentConfig cfg;
  if (j.contains("learner")) {
    const std::string name = j.at("learner").get<std::string>();
    if (name == "item") {
      cfg.learner = RunKind::kItem;
    } else if (name == "user") {
      cfg.learner = RunKind::kUser;
    } else if (name == "threshold") {
      cfg.learner = RunKind::kThreshold;
    } else if (name == "min-error") {
      cfg.learner = RunKind::kMinError;
    } else {
      throw ConfigError("config: learner must be item|user|threshold|min-error");
    }
  }
  if (j.contains("domain_size")) cfg.domain_size = j.at("domain_size").get<int64_t>();
  if (j.contains("distribution")) {
    const nlohmann::json& d = j.at("distribution");
    detail::check_keys(d, {"kind", "u_star", "rho", "marginal", "x", "y", "probs"},
                       "config.distribution");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "noisy-threshold") {
      cfg.distribution.kind = DistributionSpec::Kind::kNoisyThreshold;
      cfg.distribution.u_star = d.at("u_star").get<int64_t>();
      cfg.distribution.rho = d.at("rho").get<double>();
    } else if (kind == "uniform-label") {
      cfg.distribution.kind = DistributionSpec::Kind::kUniformLabel;
    } else if (kind == "point-mass") {
      cfg.distribution.kind = DistributionSpec::Kind::kPointMass;
      cfg.distribution.x = d.at("x").get<int64_t>();
      cfg.distribution.y = d.at("y").get<uint8_t>();
    } else if (kind == "custom") {
      cfg.distribution.kind = DistributionSpec::Kind::kCustom;
      cfg.distribution.probs = d.at("probs").get<std::vector<double>>();
    } else {
      throw ConfigError("config.distribution: unknown kind '" + kind + "'");
    }
    if (d.contains("marginal")) {
      cfg.distribution.marginal = d.at("marginal").get<std::vector<double>>();
    }
  }
  if (j.contains("n")) cfg.n = j.at("n").get<int64_t>();
  if (j.contains("m")) cfg.m = j.at("m").get<int64_t>();
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int64_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("constants_mode")) {
    const std::string mode = j.at("constants_mode").get<std::string>();
    if (mode == "theory") {
      cfg.mode = ConstantsMode::kTheory;
    } else if (mode == "practical") {
      cfg.mode = ConstantsMode::kPractical;
    } else {
      throw ConfigError("config: constants_mode must be theory|practical");
    }
  }
  if (j.contains("slack_scale")) cfg.slack_scale = j.at("slack_scale").get<double>();
  if (j.contains("noiseless")) cfg.noiseless = j.at("noiseless").get<bool>();
  if (j.contains("sweep")) {
    const nlohmann::json& s = j.at("sweep");
    detail::check_keys(s, {"n", "m", "epsilon", "alpha"}, "config.sweep");
    if (s.contains("n")) cfg.sweep.n = s.at("n").get<std::vector<int64_t>>();
    if (s.contains("m")) cfg.sweep.m = s.at("m").get<std::vector<int64_t>>();
    if (s.contains("epsilon")) cfg.sweep.epsilon = s.at("epsilon").get<std::vector<double>>();
    if (s.contains("alpha")) cfg.sweep.alpha = s.at("alpha").get<std::vector<double>>();
    if ((j.at("sweep").contains("n") && cfg.sweep.n.empty()) ||
        (j.at("sweep").contains("m") && cfg.sweep.m.empty()) ||
        (j.at("sweep").contains("epsilon") && cfg.sweep.epsilon.empty()) ||
        (j.at("sweep").contains("alpha") && cfg.sweep.alpha.empty())) {
      throw ConfigError("config.sweep: axes must be nonempty");
    }
  }
  if (j.contains("audit")) {
    const nlohmann::json& a = j.at("audit");
    detail::check_keys(a, {"method", "target", "trials", "bins"}, "config.audit");
    AuditConfig audit;
    if (a.contains("method")) audit.method = a.at("method").get<std::string>();
    if (a.contains("target")) audit.target = a.at("target").get<std::string>();
    if (a.contains("trials")) audit.trials = a.at("trials").get<int64_t>();
    if (a.contains("bins")) audit.bins = a.at("bins").get<int>();
    if (audit.method != "exact" && audit.method != "empirical") {
      throw ConfigError("config.audit: method must be exact|empirical");
    }
    if (audit.target != "exp-mech" && audit.target != "laplace" &&
        audit.target != "threshold-learner") {
      throw ConfigError("config.audit: target must be exp-mech|laplace|threshold-learner");
    }
    cfg.audit = audit;
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline void ExperimentConfig::validate() const {
  if (domain_size < 1) throw ConfigError("config: domain_size must be at least 1");
  if (n < 1) throw ConfigError("config: n must be at least 1");
  if (m < 1) throw ConfigError("config: m must be at least 1");
  if (trials < 1) throw ConfigError("config: trials must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("config: beta must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
  if (slack_scale < 0.0) throw ConfigError("config: slack_scale must be nonnegative");
  for (int64_t v : sweep.n) {
    if (v < 1) throw ConfigError("config.sweep: n values must be at least 1");
  }
  for (int64_t v : sweep.m) {
    if (v < 1) throw ConfigError("config.sweep: m values must be at least 1");
  }
  for (double v : sweep.epsilon) {
    if (!(v > 0.0)) throw ConfigError("config.sweep: epsilon values must be positive");
  }
  for (double v : sweep.alpha) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("config.sweep: alpha values must lie in (0,1)");
  }
  if (learner == RunKind::kItem) {
    if (m != 1) throw ConfigError("config: the item learner requires m = 1");
    for (int64_t v : sweep.m) {
      if (v != 1) throw ConfigError("config: the item learner requires m = 1 in sweeps");
    }
  }
  if (distribution.kind == DistributionSpec::Kind::kNoisyThreshold) {
    if (distribution.u_star < 0 || distribution.u_star > domain_size) {
      throw ConfigError("config.distribution: u_star must lie in [0, |X|]");
    }
    if (!(distribution.rho >= 0.0 && distribution.rho <= 0.5)) {
      throw ConfigError("config.distribution: rho must lie in [0, 1/2]");
    }
  }
  if (distribution.kind == DistributionSpec::Kind::kPointMass) {
    if (distribution.x < 1 || distribution.x > domain_size || distribution.y > 1) {
      throw ConfigError("config.distribution: invalid point mass");
    }
  }
  if (!distribution.marginal.empty() &&
      static_cast<int64_t>(distribution.marginal.size()) != domain_size) {
    throw ConfigError("config.distribution: marginal must have |X| entries");
  }
}

/// Builds the exact joint table described by a DistributionSpec.
inline DiscreteJointDistribution generate_distribution(const DistributionSpec& spec,
                                                       Domain domain) {
  std::vector<double> marginal = spec.marginal;
  if (marginal.empty()) {
    marginal.assign(static_cast<std::size_t>(domain.size),
                    1.0 / static_cast<double>(domain.size));
  }
  if (static_cast<int64_t>(marginal.size()) != domain.size) {
    throw ConfigError("generate_distribution: marginal must have |X| entries");
  }
  std::vector<double> probs(2 * static_cast<std::size_t>(domain.size), 0.0);
  switch (spec.kind) {
    case DistributionSpec::Kind::kNoisyThreshold: {
      const Hypothesis target = Hypothesis::threshold(spec.u_star);
      for (int64_t x = 1; x <= domain.size; ++x) {
        const double px = marginal[static_cast<std::size_t>(x) - 1];
        const uint8_t label = target(x) ? 1 : 0;
        probs[2 * static_cast<std::size_t>(x - 1) + label] = px * (1.0 - spec.rho);
        probs[2 * static_cast<std::size_t>(x - 1) + (1 - label)] = px * spec.rho;
      }
      break;
    }
    case DistributionSpec::Kind::kUniformLabel: {
      for (int64_t x = 1; x <= domain.size; ++x) {
        const double px = marginal[static_cast<std::size_t>(x) - 1];
        probs[2 * static_cast<std::size_t>(x - 1)] = px / 2.0;
        probs[2 * static_cast<std::size_t>(x - 1) + 1] = px / 2.0;
      }
      break;
    }
    case DistributionSpec::Kind::kPointMass: {
      probs[2 * static_cast<std::size_t>(spec.x - 1) + spec.y] = 1.0;
      break;
    }
    case DistributionSpec::Kind::kCustom: {
      if (static_cast<int64_t>(spec.probs.size()) != 2 * domain.size) {
        throw ConfigError("generate_distribution: custom table must have 2|X| entries");
      }
      probs = spec.probs;
      break;
    }
  }
  return DiscreteJointDistribution(domain, std::move(probs));
}

/// One trial's outcome. Population quantities come from the exact distribution
/// table, never from samples. Wall time is kept in memory for reporting but is
/// not written to the CSV, which must be byte-identical across reruns.
struct TrialRecord {
  int64_t sweep_index = 0;
  int64_t trial = 0;
  int64_t n = 0;
  int64_t m = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::string hypothesis_id;
  double empirical_excess = 0.0;
  double population_excess = 0.0;
  bool success = false;
  double wall_ms = 0.0;
};

struct AggregateRecord {
  int64_t sweep_index = 0;
  int64_t trials = 0;
  int64_t n = 0;
  int64_t m = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double success_rate = 0.0;
  double mean_excess = 0.0;
};

struct SweepPoint {
  int64_t n = 0;
  int64_t m = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
};

struct ExperimentResult {
  std::vector<SweepPoint> points;
  std::vector<TrialRecord> records;
  std::vector<AggregateRecord> aggregates;
};

inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  const std::vector<int64_t> ns = cfg.sweep.n.empty() ? std::vector<int64_t>{cfg.n} : cfg.sweep.n;
  const std::vector<int64_t> ms = cfg.sweep.m.empty() ? std::vector<int64_t>{cfg.m} : cfg.sweep.m;
  const std::vector<double> eps =
      cfg.sweep.epsilon.empty() ? std::vector<double>{cfg.epsilon} : cfg.sweep.epsilon;
  const std::vector<double> alphas =
      cfg.sweep.alpha.empty() ? std::vector<double>{cfg.alpha} : cfg.sweep.alpha;
  std::vector<SweepPoint> points;
  for (int64_t n : ns) {
    for (int64_t m : ms) {
      for (double e : eps) {
        for (double a : alphas) points.push_back(SweepPoint{n, m, e, a});
      }
    }
  }
  return points;
}

namespace detail {

inline TrialRecord run_one_trial(const ExperimentConfig& cfg, const SweepPoint& pt,
                                 int64_t sweep_index, int64_t trial,
                                 const DiscreteJointDistribution& dist,
                                 const std::vector<double>& population_errors,
                                 double eta_star) {
  const auto started = std::chrono::steady_clock::now();
  RandomStream rng(RandomStream::derive_seed(cfg.seed, static_cast<uint64_t>(sweep_index),
                                             static_cast<uint64_t>(trial)));
  const UserDataset z = sample_dataset(dist, pt.n, pt.m, rng);
  LearnParams params;
  params.alpha = pt.alpha;
  params.beta = cfg.beta;
  params.epsilon = pt.epsilon;
  params.policy = cfg.policy();

  TrialRecord record;
  record.sweep_index = sweep_index;
  record.trial = trial;
  record.n = pt.n;
  record.m = pt.m;
  record.alpha = pt.alpha;
  record.epsilon = pt.epsilon;

  const std::vector<int64_t> empirical_counts = threshold_error_counts(z);
  const int64_t empirical_min =
      *std::min_element(empirical_counts.begin(), empirical_counts.end());
  const double empirical_min_rate =
      static_cast<double>(empirical_min) / static_cast<double>(z.total_examples());

  if (cfg.learner == RunKind::kMinError) {
    PrivacyBudget budget(pt.epsilon);
    const HypothesisClass thresholds = HypothesisClass::all_thresholds(z.domain());
    const MinErrorEstimate est = private_min_error(z, thresholds, budget, pt.epsilon, pt.alpha,
                                                   cfg.beta, params.policy, rng);
    record.hypothesis_id = "eta=" + detail::format_double(est.eta_hat);
    record.empirical_excess = std::fabs(est.eta_hat - empirical_min_rate);
    record.population_excess = std::fabs(est.eta_hat - eta_star);
    record.success = record.population_excess <= pt.alpha;
  } else {
    const HypothesisClass thresholds = HypothesisClass::all_thresholds(z.domain());
    Hypothesis output = Hypothesis::threshold(0);
    switch (cfg.learner) {
      case RunKind::kItem:
        output = learn_item(z, thresholds, trivial_representation(thresholds), params, rng);
        break;
      case RunKind::kUser:
        output = learn_user(z, thresholds, trivial_representation(thresholds), params, rng);
        break;
      default:
        output = learn_threshold(z, params, rng);
        break;
    }
    record.hypothesis_id = output.id();
    const double population_err =
        output.is_threshold()
            ? population_errors[static_cast<std::size_t>(output.threshold_value())]
            : population_error(dist, output);
    record.population_excess = population_err - eta_star;
    record.empirical_excess = empirical_error(z, output).rate - empirical_min_rate;
    record.success = record.population_excess <= pt.alpha;
  }
  record.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return record;
}

}  // namespace detail

/// Runs every (sweep point, trial) pair. Trials execute in parallel when
/// `parallel` exceeds 1; every trial owns a generator derived from
/// (seed, sweep index, trial index), so results are identical regardless of
/// scheduling and the record order is fixed before any aggregation.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int parallel = 1) {
  cfg.validate();
  if (parallel < 1) throw ConfigError("run_experiment: parallel must be at least 1");
  ExperimentResult result;
  result.points = sweep_points(cfg);
  const Domain domain(cfg.domain_size);

  const DiscreteJointDistribution dist = generate_distribution(cfg.distribution, domain);
  const std::vector<double> population_errors = threshold_population_errors(dist);
  const double eta_star =
      *std::min_element(population_errors.begin(), population_errors.end());

  const int64_t total = static_cast<int64_t>(result.points.size()) * cfg.trials;
  result.records.resize(static_cast<std::size_t>(total));
  std::atomic<int64_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const int64_t index = next.fetch_add(1);
      if (index >= total) break;
      const int64_t sweep_index = index / cfg.trials;
      const int64_t trial = index % cfg.trials;
      result.records[static_cast<std::size_t>(index)] = detail::run_one_trial(
          cfg, result.points[static_cast<std::size_t>(sweep_index)], sweep_index, trial, dist,
          population_errors, eta_star);
    }
  };
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(parallel));
    for (int i = 0; i < parallel; ++i) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
  }

  for (std::size_t p = 0; p < result.points.size(); ++p) {
    AggregateRecord agg;
    agg.sweep_index = static_cast<int64_t>(p);
    agg.trials = cfg.trials;
    agg.n = result.points[p].n;
    agg.m = result.points[p].m;
    agg.alpha = result.points[p].alpha;
    agg.epsilon = result.points[p].epsilon;
    double successes = 0.0;
    double excess_sum = 0.0;
    for (int64_t t = 0; t < cfg.trials; ++t) {
      const TrialRecord& rec =
          result.records[p * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(t)];
      successes += rec.success ? 1.0 : 0.0;
      excess_sum += rec.population_excess;
    }
    agg.success_rate = successes / static_cast<double>(cfg.trials);
    agg.mean_excess = excess_sum / static_cast<double>(cfg.trials);
    result.aggregates.push_back(agg);
  }
  return result;
}

inline const char* learner_name(RunKind kind) {
  switch (kind) {
    case RunKind::kItem:
      return "item";
    case RunKind::kUser:
      return "user";
    case RunKind::kThreshold:
      return "threshold";
    default:
      return "min-error";
  }
}

inline std::string csv_header() {
  return "kind,sweep_index,trial,learner,n,m,alpha,beta,epsilon,mode,seed,hypothesis_id,"
         "empirical_excess,population_excess,success,success_rate,mean_excess";
}

/// Renders the result set as CSV: one row per trial plus one aggregate row per
/// sweep point, sorted by (sweep index, trial). Byte-identical for identical
/// configs, independent of the parallelism used to produce the records.
inline std::string to_csv(const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::ostringstream out;
  out << csv_header() << '\n';
  const char* mode = cfg.mode == ConstantsMode::kTheory ? "theory" : "practical";
  for (const TrialRecord& rec : result.records) {
    out << "trial," << rec.sweep_index << ',' << rec.trial << ',' << learner_name(cfg.learner)
        << ',' << rec.n << ',' << rec.m << ',' << detail::format_double(rec.alpha) << ','
        << detail::format_double(cfg.beta) << ',' << detail::format_double(rec.epsilon) << ','
        << mode << ',' << cfg.seed << ',' << rec.hypothesis_id << ','
        << detail::format_double(rec.empirical_excess) << ','
        << detail::format_double(rec.population_excess) << ',' << (rec.success ? 1 : 0)
        << ",,\n";
  }
  for (const AggregateRecord& agg : result.aggregates) {
    out << "aggregate," << agg.sweep_index << ',' << agg.trials << ','
        << learner_name(cfg.learner) << ',' << agg.n << ',' << agg.m << ','
        << detail::format_double(agg.alpha) << ',' << detail::format_double(cfg.beta) << ','
        << detail::format_double(agg.epsilon) << ',' << mode << ',' << cfg.seed << ",,,,,"
        << detail::format_double(agg.success_rate) << ','
        << detail::format_double(agg.mean_excess) << '\n';
  }
  return out.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << contents;
}

/// Emits a standalone gnuplot script rendering success rate and mean excess
/// against the sweep axis of an existing result CSV. The axis is the first of
/// n, m, epsilon, alpha that varies across aggregate rows.
inline void emit_plot_script(const std::string& csv_path, const std::string& script_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("emit_plot_script: cannot open '" + csv_path + "'");
  std::string header;
  if (!std::getline(in, header) || header != csv_header()) {
    throw ConfigError("emit_plot_script: malformed CSV header");
  }
  struct AxisValues {
    std::vector<std::string> n, m, eps, alpha;
  } seen;
  std::string line;
  int64_t aggregate_rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("aggregate,", 0) != 0) continue;
    ++aggregate_rows;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 17) throw ConfigError("emit_plot_script: malformed aggregate row");
    seen.n.push_back(fields[4]);
    seen.m.push_back(fields[5]);
    seen.alpha.push_back(fields[6]);
    seen.eps.push_back(fields[8]);
  }
  if (aggregate_rows == 0) throw ConfigError("emit_plot_script: no aggregate rows in CSV");

  const auto distinct = [](const std::vector<std::string>& v) {
    std::vector<std::string> u = v;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u.size();
  };
  // 1-based gnuplot column indices into csv_header().
  std::string axis_name = "n";
  int axis_column = 5;
  if (distinct(seen.n) > 1) {
    axis_name = "n";
    axis_column = 5;
  } else if (distinct(seen.m) > 1) {
    axis_name = "m";
    axis_column = 6;
  } else if (distinct(seen.eps) > 1) {
    axis_name = "epsilon";
    axis_column = 9;
  } else if (distinct(seen.alpha) > 1) {
    axis_name = "alpha";
    axis_column = 7;
  }

  std::ostringstream script;
  script << "# gnuplot script generated from " << csv_path << "\n"
         << "set datafile separator \",\"\n"
         << "set terminal pngcairo size 900,600\n"
         << "set output \"sweep.png\"\n"
         << "set xlabel \"" << axis_name << "\"\n"
         << "set ylabel \"success_rate\"\n"
         << "set y2label \"mean_excess\"\n"
         << "set ytics nomirror\n"
         << "set y2tics\n"
         << "set key bottom right\n"
         << "plot \"" << csv_path << "\" using (strcol(1) eq \"aggregate\" ? column("
         << axis_column << ") : NaN):(column(16)) with linespoints title \"success_rate\", \\\n"
         << "     \"" << csv_path << "\" using (strcol(1) eq \"aggregate\" ? column("
         << axis_column << ") : NaN):(column(17)) axes x1y2 with linespoints title "
         << "\"mean_excess\"\n";
  write_file(script_path, script.str());
}

}  // namespace dplearn

#endif  // DPLEARN_HARNESS_HPP_
