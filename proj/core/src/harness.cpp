#include "iln/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "iln/golden.hpp"
#include "iln/neutralize.hpp"

namespace iln {

using nlohmann::json;

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Effin: return "effin";
    case Algorithm::Optin: return "optin";
    case Algorithm::RepeaterFs: return "repeater-fs";
    case Algorithm::RepeaterOs: return "repeater-os";
    case Algorithm::IcFs: return "ic-fs";
    case Algorithm::IcOs: return "ic-os";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "effin") return Algorithm::Effin;
  if (s == "optin") return Algorithm::Optin;
  if (s == "repeater-fs") return Algorithm::RepeaterFs;
  if (s == "repeater-os") return Algorithm::RepeaterOs;
  if (s == "ic-fs") return Algorithm::IcFs;
  if (s == "ic-os") return Algorithm::IcOs;
  throw std::invalid_argument("unknown algorithm: " + s);
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (algorithms.empty()) {
    throw std::invalid_argument("config: at least one algorithm required");
  }
  if (sweep_db.empty()) {
    throw std::invalid_argument("config: sweep values required");
  }
  if (!std::is_sorted(sweep_db.begin(), sweep_db.end())) {
    throw std::invalid_argument("config: sweep values must be ascending");
  }
  scenario_at(sweep_db.front()).validate();
}

Scenario ExperimentConfig::scenario_at(double sweep_db_value) const {
  const double tx_db =
      axis == SweepAxis::TxPowerDb ? sweep_db_value : tx_power_db;
  const double relay_db =
      axis == SweepAxis::RelayPowerDb ? sweep_db_value : relay_power_db;
  return Scenario::make(num_users, num_subcarriers, relay_antennas,
                        db_to_linear(tx_db), db_to_linear(relay_db));
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  ExperimentConfig cfg;
  cfg.num_users = j.value("K", cfg.num_users);
  cfg.num_subcarriers = j.value("M", cfg.num_subcarriers);
  cfg.relay_antennas = j.value("N", cfg.relay_antennas);
  if (j.contains("sweep")) {
    const std::string axis = j["sweep"].get<std::string>();
    if (axis == "relay") {
      cfg.axis = SweepAxis::RelayPowerDb;
    } else if (axis == "tx") {
      cfg.axis = SweepAxis::TxPowerDb;
    } else {
      throw std::invalid_argument("config: sweep must be 'relay' or 'tx'");
    }
  }
  if (j.contains("sweep_db")) {
    cfg.sweep_db = j["sweep_db"].get<std::vector<double>>();
  } else if (j.contains("db_range")) {
    const auto range = j["db_range"].get<std::vector<double>>();
    if (range.size() != 3 || range[2] <= 0) {
      throw std::invalid_argument("config: db_range must be [start, stop, step]");
    }
    for (double v = range[0]; v <= range[1] + 1e-9; v += range[2]) {
      cfg.sweep_db.push_back(v);
    }
  }
  cfg.tx_power_db = j.value("tx_db", cfg.tx_power_db);
  cfg.relay_power_db = j.value("relay_db", cfg.relay_power_db);
  if (j.contains("algorithms")) {
    for (const json& a : j["algorithms"]) {
      cfg.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
    }
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("distribution")) {
    cfg.distribution =
        distribution_from_string(j["distribution"].get<std::string>());
  }
  cfg.output_path = j.value("out", cfg.output_path);
  if (j.contains("format")) {
    const std::string f = j["format"].get<std::string>();
    if (f == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (f == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw std::invalid_argument("config: format must be 'csv' or 'json'");
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

struct TrialCell {
  double sum_secrecy = 0.0;
  double relay_power = 0.0;
  bool feasible = false;
};

TrialCell run_algorithm(Algorithm alg, const ChannelSet& ch,
                        const Scenario& scenario) {
  TrialCell cell;
  switch (alg) {
    case Algorithm::Effin: {
      const AlgorithmResult r = effin(ch, scenario);
      cell.feasible = r.feasible;
      if (r.feasible) {
        cell.sum_secrecy = r.report.sum_secrecy;
        cell.relay_power = r.report.relay_power_used;
      }
      return cell;
    }
    case Algorithm::Optin: {
      const OptinResult r = optin(ch, scenario);
      cell.feasible = r.design.feasible;
      if (r.design.feasible) {
        cell.sum_secrecy = r.design.report.sum_secrecy;
        cell.relay_power = r.design.report.relay_power_used;
      }
      return cell;
    }
    case Algorithm::RepeaterFs:
    case Algorithm::RepeaterOs:
    case Algorithm::IcFs:
    case Algorithm::IcOs: {
      const BaselineKind kind = (alg == Algorithm::RepeaterFs ||
                                 alg == Algorithm::RepeaterOs)
                                    ? BaselineKind::Repeater
                                    : BaselineKind::InterferenceChannel;
      const SharingMode mode =
          (alg == Algorithm::RepeaterFs || alg == Algorithm::IcFs)
              ? SharingMode::FullSpectrum
              : SharingMode::Orthogonal;
      const RateReport report = baseline_report(ch, scenario, kind, mode);
      cell.feasible = true;
      cell.sum_secrecy = report.sum_secrecy;
      cell.relay_power = report.relay_power_used;
      return cell;
    }
  }
  return cell;
}

void parallel_trials(int trials, const std::function<void(int)>& work) {
  const unsigned workers = std::max(1u, std::min<unsigned>(
      std::thread::hardware_concurrency(), static_cast<unsigned>(trials)));
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) work(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
        work(t);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const int trials = config.trials;
  const int num_algos = static_cast<int>(config.algorithms.size());
  const int num_points = static_cast<int>(config.sweep_db.size());

  SweepResult result;
  result.config = config;
  result.per_trial_sum_secrecy.assign(
      num_algos, std::vector<std::vector<double>>(
                     num_points, std::vector<double>(trials, 0.0)));
  result.per_trial_feasible.assign(
      num_algos, std::vector<std::vector<bool>>(
                     num_points, std::vector<bool>(trials, false)));
  std::vector<std::vector<std::vector<double>>> relay_power(
      num_algos, std::vector<std::vector<double>>(
                     num_points, std::vector<double>(trials, 0.0)));
  std::vector<std::vector<double>> wall_ms(
      num_algos, std::vector<double>(num_points, 0.0));
  std::vector<std::mutex> wall_locks(num_algos);

  // Channels depend only on the dimensions, so one realization per trial is
  // shared by every sweep point and every algorithm (paired comparison).
  const Scenario dims = config.scenario_at(config.sweep_db.front());
  parallel_trials(trials, [&](int t) {
    const ChannelSet ch = generate_channels(
        dims, config.seed + static_cast<std::uint64_t>(t),
        config.distribution);
    for (int pt = 0; pt < num_points; ++pt) {
      const Scenario scenario = config.scenario_at(config.sweep_db[pt]);
      for (int a = 0; a < num_algos; ++a) {
        const auto start = std::chrono::steady_clock::now();
        const TrialCell cell =
            run_algorithm(config.algorithms[a], ch, scenario);
        const double ms =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - start)
                .count();
        result.per_trial_sum_secrecy[a][pt][t] = cell.sum_secrecy;
        result.per_trial_feasible[a][pt][t] = cell.feasible;
        relay_power[a][pt][t] = cell.relay_power;
        {
          std::lock_guard<std::mutex> lock(wall_locks[a]);
          wall_ms[a][pt] += ms;
        }
      }
    }
  });

  for (int a = 0; a < num_algos; ++a) {
    for (int pt = 0; pt < num_points; ++pt) {
      SweepPoint point;
      point.algorithm = config.algorithms[a];
      point.sweep_db = config.sweep_db[pt];
      double sum = 0.0;
      double sum_sq = 0.0;
      int feasible = 0;
      double power = 0.0;
      for (int t = 0; t < trials; ++t) {
        const double v = result.per_trial_sum_secrecy[a][pt][t];
        sum += v;
        sum_sq += v * v;
        power += relay_power[a][pt][t];
        if (result.per_trial_feasible[a][pt][t]) ++feasible;
      }
      point.mean_sum_secrecy = sum / trials;
      const double variance =
          trials > 1
              ? std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1))
              : 0.0;
      point.stderr_sum_secrecy = std::sqrt(variance / trials);
      point.feasible_fraction = static_cast<double>(feasible) / trials;
      point.mean_relay_power = power / trials;
      point.wall_time_ms = wall_ms[a][pt] / trials;
      result.points.push_back(point);
    }
  }
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json config_to_json(const ExperimentConfig& cfg) {
  json algos = json::array();
  for (Algorithm a : cfg.algorithms) algos.push_back(to_string(a));
  return json{
      {"K", cfg.num_users},
      {"M", cfg.num_subcarriers},
      {"N", cfg.relay_antennas},
      {"sweep", cfg.axis == SweepAxis::RelayPowerDb ? "relay" : "tx"},
      {"sweep_db", cfg.sweep_db},
      {"tx_db", cfg.tx_power_db},
      {"relay_db", cfg.relay_power_db},
      {"algorithms", algos},
      {"trials", cfg.trials},
      {"seed", cfg.seed},
      {"distribution", to_string(cfg.distribution)},
  };
}

}  // namespace

void emit(const SweepResult& result, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Csv) {
    out << "algorithm,sweep_db,mean_sum_secrecy,stderr,feasible_frac,"
           "mean_relay_power,trials,seed\n";
    for (const SweepPoint& p : result.points) {
      out << to_string(p.algorithm) << ',' << format_double(p.sweep_db) << ','
          << format_double(p.mean_sum_secrecy) << ','
          << format_double(p.stderr_sum_secrecy) << ','
          << format_double(p.feasible_fraction) << ','
          << format_double(p.mean_relay_power) << ',' << result.config.trials
          << ',' << result.config.seed << '\n';
    }
    return;
  }
  json points = json::array();
  for (const SweepPoint& p : result.points) {
    points.push_back(json{
        {"algorithm", to_string(p.algorithm)},
        {"sweep_db", p.sweep_db},
        {"mean_sum_secrecy", p.mean_sum_secrecy},
        {"stderr", p.stderr_sum_secrecy},
        {"feasible_frac", p.feasible_fraction},
        {"mean_relay_power", p.mean_relay_power},
        {"mean_wall_time_ms", p.wall_time_ms},
    });
  }
  const json j{{"config", config_to_json(result.config)},
               {"points", points}};
  out << j.dump(1) << "\n";
}

void emit_to_file(const SweepResult& result, OutputFormat format,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit: cannot write " + path);
  emit(result, format, out);
}

ReplayReport replay_table1(const std::string& fixture_path) {
  const auto [scenario, channels, precoders] = load_channels(fixture_path);

  ReplayReport rep;
  const NeutralizationSystem sys = build_system(channels, precoders);
  const NeutralizeOutcome solved = solve_min_norm(sys);
  rep.relay_entry_max_delta =
      (solved.relay.matrix - golden::relay_min_norm()).cwiseAbs().maxCoeff();
  rep.min_power = min_neutralization_power(channels, precoders);
  rep.weighted_min_power =
      weighted_min_neutralization_power(channels, precoders);

  const int M = scenario.num_subcarriers;
  const int N = scenario.relay_antennas;
  const RelayMatrix min_norm =
      RelayMatrix::general(golden::relay_min_norm(), N);
  const RelayMatrix block_diag_relay =
      RelayMatrix::general(golden::relay_block_diag(), N);
  const RelayMatrix null_shifted =
      RelayMatrix::general(golden::relay_null_shifted(), N);
  (void)M;

  rep.sum_secrecy_min_norm =
      secrecy_report(channels, min_norm, precoders).sum_secrecy;
  rep.sum_secrecy_block_diag =
      secrecy_report(channels, block_diag_relay, precoders).sum_secrecy;
  rep.sum_secrecy_null_shifted =
      secrecy_report(channels, null_shifted, precoders).sum_secrecy;
  rep.delta_min_norm =
      rep.sum_secrecy_min_norm - golden::kSumSecrecyMinNorm;
  rep.delta_block_diag =
      rep.sum_secrecy_block_diag - golden::kSumSecrecyBlockDiag;
  rep.delta_null_shifted =
      rep.sum_secrecy_null_shifted - golden::kSumSecrecyNullShifted;
  rep.power_min_norm = relay_tx_power(channels, min_norm, precoders);
  rep.power_null_shifted = relay_tx_power(channels, null_shifted, precoders);
  return rep;
}

}  // namespace iln
