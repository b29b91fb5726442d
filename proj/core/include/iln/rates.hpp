#pragma once

#include <vector>

#include "iln/channel.hpp"

namespace iln {

// Frobenius-norm threshold under which a design counts as exactly
// neutralized and the simplified (leakage-free) rate expression applies.
inline constexpr double kNeutralizationResidualTol = 1e-8;

struct RateReport {
  std::vector<double> per_user_rate;     // bits/sec/Hz
  std::vector<double> per_user_leakage;  // worst-case colluding eavesdropper
  std::vector<double> per_user_secrecy;  // (rate - leakage)^+
  std::vector<double> tx_power_used;
  double sum_secrecy = 0.0;
  double relay_power_used = 0.0;
};

/// Achievable rate of user i: log-det of the whitened desired-signal
/// covariance against interference, amplified relay noise and receiver noise.
double user_rate(const ChannelSet& ch, const RelayMatrix& relay,
                 const Precoders& p, int user);

/// Worst-case leakage of user i's message to the colluding eavesdroppers
/// (all other messages pre-subtracted). Zero when there is a single user.
double leakage_rate(const ChannelSet& ch, const RelayMatrix& relay,
                    const Precoders& p, int user);

/// max over (i, j != i) of ||Hbar_{ji} Phat_i||_F, the worst leftover
/// eavesdropper channel after precoding.
double neutralization_residual(const ChannelSet& ch, const RelayMatrix& relay,
                               const Precoders& p);

/// Full report for a design. When assert_neutralized is set and the residual
/// check passes, the simplified interference- and leakage-free expression is
/// used; otherwise each term is evaluated in full.
RateReport secrecy_report(const ChannelSet& ch, const RelayMatrix& relay,
                          const Precoders& p, bool assert_neutralized = false);

/// tr(R (sum_i F_i P_i P_i^H F_i^H + I) R^H): transmit power spent by the
/// relay on forwarded signals plus amplified noise.
double relay_tx_power(const ChannelSet& ch, const RelayMatrix& relay,
                      const Precoders& p);

}  // namespace iln
