#include "iln/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace iln {

const char* to_string(SharingMode m) {
  return m == SharingMode::FullSpectrum ? "fs" : "os";
}

const char* to_string(BaselineKind k) {
  return k == BaselineKind::Repeater ? "repeater" : "ic";
}

RelayMatrix repeater_relay(const Scenario& scenario) {
  const int mn = scenario.num_subcarriers * scenario.relay_antennas;
  return RelayMatrix::scaled_identity(
      scenario.num_subcarriers, scenario.relay_antennas,
      std::sqrt(scenario.relay_power_budget / mn));
}

RelayMatrix ic_relay(const Scenario& scenario) {
  return RelayMatrix::zero(scenario.num_subcarriers, scenario.relay_antennas);
}

namespace {

// Scalar per-subcarrier secrecy estimate used only to pick subcarriers: the
// direct-link rate against the collusion power sum, both at an equal split
// of the TX budget and with the relay's amplified noise at each eavesdropper.
double secrecy_estimate(const ChannelSet& ch, const RelayMatrix& relay,
                        const Scenario& scenario, int user, int m) {
  const double p = scenario.tx_power_budget[user] / ch.num_subcarriers();
  const auto equivalent = [&](int rx) {
    return ch.direct(rx, user, m) +
           (ch.downlink(rx, m).adjoint() * relay.block(m, m) *
            ch.uplink(user, m))(0, 0);
  };
  const double own = std::norm(equivalent(user));
  double collusion = 0.0;
  for (int j = 0; j < ch.num_users(); ++j) {
    if (j == user) continue;
    const double amplified =
        1.0 + (relay.block(m, m).adjoint() * ch.downlink(j, m)).squaredNorm();
    collusion += std::norm(equivalent(j)) * p / amplified;
  }
  const double estimate =
      std::log2(1.0 + own * p) - std::log2(1.0 + collusion);
  return std::max(0.0, estimate);
}

}  // namespace

SharingAssignment assign_spectrum(const ChannelSet& ch,
                                  const RelayMatrix& relay,
                                  const Scenario& scenario, SharingMode mode) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  SharingAssignment out;
  out.mode = mode;
  out.active.resize(K);
  out.per_subcarrier_power.assign(K, 0.0);

  std::vector<std::vector<double>> estimate(K, std::vector<double>(M));
  for (int i = 0; i < K; ++i) {
    for (int m = 0; m < M; ++m) {
      estimate[i][m] = secrecy_estimate(ch, relay, scenario, i, m);
    }
  }

  if (mode == SharingMode::Orthogonal) {
    // Contiguous equal blocks in user order.
    for (int i = 0; i < K; ++i) {
      const int lo = static_cast<int>(static_cast<long>(i) * M / K);
      const int hi = static_cast<int>(static_cast<long>(i + 1) * M / K);
      for (int m = lo; m < hi; ++m) {
        if (estimate[i][m] > 0.0) out.active[i].push_back(m);
      }
    }
  } else {
    // Contended subcarriers go to the user with the higher estimate,
    // lowest index on ties.
    for (int m = 0; m < M; ++m) {
      int winner = -1;
      for (int i = 0; i < K; ++i) {
        if (estimate[i][m] <= 0.0) continue;
        if (winner < 0 || estimate[i][m] > estimate[winner][m]) winner = i;
      }
      if (winner >= 0) out.active[winner].push_back(m);
    }
  }

  for (int i = 0; i < K; ++i) {
    if (!out.active[i].empty()) {
      out.per_subcarrier_power[i] =
          scenario.tx_power_budget[i] / out.active[i].size();
    }
  }
  return out;
}

RateReport baseline_report(const ChannelSet& ch, const Scenario& scenario,
                           BaselineKind kind, SharingMode mode) {
  const RelayMatrix relay = kind == BaselineKind::Repeater
                                ? repeater_relay(scenario)
                                : ic_relay(scenario);
  const SharingAssignment assignment =
      assign_spectrum(ch, relay, scenario, mode);
  const int M = ch.num_subcarriers();
  std::vector<CMatrix> mats;
  for (int i = 0; i < ch.num_users(); ++i) {
    CMatrix p = CMatrix::Zero(M, M);
    for (int m : assignment.active[i]) {
      p(m, m) = std::sqrt(assignment.per_subcarrier_power[i]);
    }
    mats.push_back(std::move(p));
  }
  const Precoders precoders = Precoders::from_matrices(std::move(mats));
  return secrecy_report(ch, relay, precoders, /*assert_neutralized=*/false);
}

}  // namespace iln
