// Simulation CLI: Monte Carlo secrecy-rate sweeps, replay of the reference
// instance, and quick self-checks. Exit codes: 0 success, 1 configuration
// error, 2 runtime failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iln/golden.hpp"
#include "iln/harness.hpp"
#include "iln/neutralize.hpp"

namespace {

struct SweepCliArgs {
  std::string config_path;
  int k = 2;
  int m = 8;
  int n = 0;  // 0: use the minimum antenna count for full streams
  std::string sweep = "relay";
  std::string db_range = "0:30:5";
  double tx_db = 10.0;
  double relay_db = 30.0;
  std::vector<std::string> algos = {"effin", "optin", "repeater-fs",
                                    "repeater-os", "ic-fs", "ic-os"};
  int trials = 100;
  std::uint64_t seed = 1;
  std::string dist = "uniform01";
  std::string out;
  std::string format = "csv";
};

iln::ExperimentConfig config_from_cli(const SweepCliArgs& args) {
  iln::ExperimentConfig cfg;
  cfg.num_users = args.k;
  cfg.num_subcarriers = args.m;
  cfg.relay_antennas =
      args.n > 0 ? args.n
                 : iln::min_antennas(args.k, args.m,
                                     std::vector<int>(args.k, args.m));
  if (args.sweep == "relay") {
    cfg.axis = iln::SweepAxis::RelayPowerDb;
  } else if (args.sweep == "tx") {
    cfg.axis = iln::SweepAxis::TxPowerDb;
  } else {
    throw std::invalid_argument("--sweep must be 'relay' or 'tx'");
  }
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  if (std::sscanf(args.db_range.c_str(), "%lf:%lf:%lf", &start, &stop,
                  &step) != 3 ||
      step <= 0) {
    throw std::invalid_argument("--db-range must be start:stop:step");
  }
  for (double v = start; v <= stop + 1e-9; v += step) cfg.sweep_db.push_back(v);
  cfg.tx_power_db = args.tx_db;
  cfg.relay_power_db = args.relay_db;
  for (const std::string& a : args.algos) {
    cfg.algorithms.push_back(iln::algorithm_from_string(a));
  }
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.distribution = iln::distribution_from_string(args.dist);
  cfg.output_path = args.out;
  cfg.format = args.format == "json" ? iln::OutputFormat::Json
                                     : iln::OutputFormat::Csv;
  return cfg;
}

int run_sweep_command(const SweepCliArgs& args) {
  iln::ExperimentConfig cfg;
  try {
    cfg = args.config_path.empty()
              ? config_from_cli(args)
              : iln::config_from_json_file(args.config_path);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  try {
    const iln::SweepResult result = iln::run_sweep(cfg);
    if (cfg.output_path.empty()) {
      iln::emit(result, cfg.format, std::cout);
    } else {
      iln::emit_to_file(result, cfg.format, cfg.output_path);
      std::cerr << "wrote " << cfg.output_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "sweep failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_replay_command(const std::string& fixture) {
  try {
    const iln::ReplayReport r = iln::replay_table1(fixture);
    std::printf("recomputed min-norm relay vs printed: max|delta| = %.3e\n",
                r.relay_entry_max_delta);
    std::printf("sum secrecy, min-norm relay:      %.4f (printed %.4f, delta %+.2e)\n",
                r.sum_secrecy_min_norm, iln::golden::kSumSecrecyMinNorm,
                r.delta_min_norm);
    std::printf("sum secrecy, block-diag relay:    %.4f (printed %.4f, delta %+.2e)\n",
                r.sum_secrecy_block_diag, iln::golden::kSumSecrecyBlockDiag,
                r.delta_block_diag);
    std::printf("sum secrecy, null-shifted relay:  %.4f (printed %.4f, delta %+.2e)\n",
                r.sum_secrecy_null_shifted, iln::golden::kSumSecrecyNullShifted,
                r.delta_null_shifted);
    std::printf("relay power: min-norm %.4f, null-shifted %.4f\n",
                r.power_min_norm, r.power_null_shifted);
    std::printf("minimum neutralization power: %.4f (family optimum %.4f)\n",
                r.min_power, r.weighted_min_power);
  } catch (const std::exception& e) {
    std::cerr << "replay failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

bool check(const char* name, bool ok) {
  std::printf("%-52s %s\n", name, ok ? "ok" : "FAILED");
  return ok;
}

int run_check_command() {
  using namespace iln;
  bool all = true;
  try {
    std::mt19937_64 gen(7);
    auto rand_matrix = [&](int r, int c) {
      CMatrix m(r, c);
      std::normal_distribution<double> dist;
      for (Index j = 0; j < c; ++j) {
        for (Index i = 0; i < r; ++i) m(i, j) = Complex(dist(gen), dist(gen));
      }
      return m;
    };

    {
      const CMatrix a = rand_matrix(4, 3);
      const CMatrix x = rand_matrix(3, 5);
      const CMatrix b = rand_matrix(5, 2);
      const CVector lhs = vec(CMatrix(a * x * b));
      const CVector rhs = kron(b.transpose(), a) * vec(x);
      all &= check("kron/vec identity", (lhs - rhs).norm() < 1e-12);
    }
    {
      const CMatrix a = rand_matrix(5, 3);
      const CMatrix ap = pinv(a);
      all &= check("pseudo-inverse consistency",
                   (a * ap * a - a).norm() < 1e-9 * a.norm());
    }
    {
      const Scenario sc = Scenario::make(2, 4, 2, 10.0, 1000.0);
      const ChannelSet ch =
          generate_channels(sc, 11, ChannelDistribution::Uniform01);
      const AlgorithmResult r = effin(ch, sc);
      double leak = 0.0;
      for (int i = 0; i < 2 && r.feasible; ++i) {
        leak = std::max(leak, leakage_rate(ch, r.relay, r.precoders, i));
      }
      all &= check("per-subcarrier neutralization leakage",
                   r.feasible && leak <= 1e-8);
      if (r.feasible) {
        const Q2Instance q2 = build_q2(ch, r.precoders);
        CMatrix t = CMatrix::Zero(8, 8);
        for (int i = 0; i < 2; ++i) {
          t.block(i * 4, i * 4, 4, 4) =
              equivalent_channel(ch, r.relay, i, i) * r.precoders.matrices[i];
        }
        const double lambda = 0.3;
        const CMatrix grad = q2_gradient(q2, t, lambda);
        const double h = 1e-5;
        CMatrix fd = CMatrix::Zero(8, 8);
        auto lagr = [&](const CMatrix& tt) {
          return q2_objective(q2, tt) -
                 lambda * (q2_power(q2, tt) - sc.relay_power_budget);
        };
        for (int i = 0; i < 2; ++i) {
          for (int rr = 0; rr < 4; ++rr) {
            for (int cc = 0; cc < 4; ++cc) {
              CMatrix tp = t;
              tp(i * 4 + rr, i * 4 + cc) += h;
              CMatrix tm = t;
              tm(i * 4 + rr, i * 4 + cc) -= h;
              const double dre = (lagr(tp) - lagr(tm)) / (2 * h);
              tp = t;
              tp(i * 4 + rr, i * 4 + cc) += Complex(0, h);
              tm = t;
              tm(i * 4 + rr, i * 4 + cc) -= Complex(0, h);
              const double dim = (lagr(tp) - lagr(tm)) / (2 * h);
              fd(i * 4 + rr, i * 4 + cc) = 0.5 * Complex(dre, dim);
            }
          }
        }
        all &= check("analytic gradient vs finite differences",
                     (fd - grad).norm() <= 1e-5 * grad.norm());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-aided multi-carrier secrecy-rate simulator"};
  app.require_subcommand(1);

  SweepCliArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte Carlo sum-secrecy sweep over relay or TX power");
  sweep->add_option("--config", sweep_args.config_path,
                    "JSON experiment config (overrides inline flags)");
  sweep->add_option("--k", sweep_args.k, "number of users");
  sweep->add_option("--m", sweep_args.m, "number of subcarriers");
  sweep->add_option("--n", sweep_args.n,
                    "relay antennas (default: minimum for full streams)");
  sweep->add_option("--sweep", sweep_args.sweep, "sweep axis: relay|tx");
  sweep->add_option("--db-range", sweep_args.db_range,
                    "sweep values, start:stop:step in dB");
  sweep->add_option("--tx-db", sweep_args.tx_db, "fixed TX power (dB)");
  sweep->add_option("--relay-db", sweep_args.relay_db,
                    "fixed relay power (dB)");
  sweep->add_option("--algos", sweep_args.algos,
                    "algorithms: effin optin repeater-fs repeater-os ic-fs ic-os")
      ->delimiter(',');
  sweep->add_option("--trials", sweep_args.trials, "Monte Carlo trials");
  sweep->add_option("--seed", sweep_args.seed, "base RNG seed");
  sweep->add_option("--dist", sweep_args.dist,
                    "channel distribution: uniform01|cgauss");
  sweep->add_option("--out", sweep_args.out, "output path (default stdout)");
  sweep->add_option("--format", sweep_args.format, "csv|json");

  std::string fixture = "fixtures/table1.json";
  CLI::App* replay = app.add_subcommand(
      "replay-table1",
      "Recompute the reference instance and compare with its known rates");
  replay->add_option("--fixture", fixture, "fixture path");

  app.add_subcommand("check", "Run quick invariant and gradient self-tests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sweep->parsed()) return run_sweep_command(sweep_args);
  if (replay->parsed()) return run_replay_command(fixture);
  return run_check_command();
}
