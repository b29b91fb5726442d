#include "iln/rates.hpp"

#include <algorithm>
#include <stdexcept>

namespace iln {

namespace {

// log2 det(I + S C^{-1}) for Hermitian PSD S and PD C, evaluated as
// logdet(C + S) - logdet(C) so that only Cholesky factorizations of
// I-plus-PSD matrices are ever taken.
double capacity_gain(const CMatrix& signal_cov, const CMatrix& noise_cov) {
  return logdet_psd(noise_cov + signal_cov) - logdet_psd(noise_cov);
}

}  // namespace

double user_rate(const ChannelSet& ch, const RelayMatrix& relay,
                 const Precoders& p, int user) {
  const int M = ch.num_subcarriers();
  const CMatrix gr = ch.downlink_matrix(user).adjoint() * relay.matrix;
  CMatrix noise_cov = CMatrix::Identity(M, M) + gr * gr.adjoint();
  for (int j = 0; j < ch.num_users(); ++j) {
    if (j == user) continue;
    const CMatrix cross = equivalent_channel(ch, relay, j, user) *
                          p.matrices[j];
    noise_cov += cross * cross.adjoint();
  }
  const CMatrix sig = equivalent_channel(ch, relay, user, user) *
                      p.matrices[user];
  return capacity_gain(sig * sig.adjoint(), noise_cov);
}

double leakage_rate(const ChannelSet& ch, const RelayMatrix& relay,
                    const Precoders& p, int user) {
  const int K = ch.num_users();
  if (K < 2) return 0.0;
  const auto [hbar_minus, g_minus] = stack_eavesdroppers(ch, relay, user);
  const Index dim = hbar_minus.rows();
  const CMatrix gr = g_minus.adjoint() * relay.matrix;
  const CMatrix noise_cov = CMatrix::Identity(dim, dim) + gr * gr.adjoint();
  const CMatrix leak = hbar_minus * p.matrices[user];
  return capacity_gain(leak * leak.adjoint(), noise_cov);
}

double neutralization_residual(const ChannelSet& ch, const RelayMatrix& relay,
                               const Precoders& p) {
  double worst = 0.0;
  for (int i = 0; i < ch.num_users(); ++i) {
    const CMatrix phat = p.compact(i);
    for (int j = 0; j < ch.num_users(); ++j) {
      if (j == i) continue;
      worst = std::max(
          worst, (equivalent_channel(ch, relay, i, j) * phat).norm());
    }
  }
  return worst;
}

RateReport secrecy_report(const ChannelSet& ch, const RelayMatrix& relay,
                          const Precoders& p, bool assert_neutralized) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  RateReport report;
  report.per_user_rate.resize(K);
  report.per_user_leakage.resize(K);
  report.per_user_secrecy.resize(K);
  report.tx_power_used.resize(K);

  const bool simplified =
      assert_neutralized &&
      neutralization_residual(ch, relay, p) <= kNeutralizationResidualTol;

  for (int i = 0; i < K; ++i) {
    if (simplified) {
      const CMatrix gr = ch.downlink_matrix(i).adjoint() * relay.matrix;
      const CMatrix noise_cov =
          CMatrix::Identity(M, M) + gr * gr.adjoint();
      const CMatrix sig = equivalent_channel(ch, relay, i, i) * p.matrices[i];
      report.per_user_rate[i] = capacity_gain(sig * sig.adjoint(), noise_cov);
      report.per_user_leakage[i] = 0.0;
    } else {
      report.per_user_rate[i] = user_rate(ch, relay, p, i);
      report.per_user_leakage[i] = leakage_rate(ch, relay, p, i);
    }
    report.per_user_secrecy[i] =
        std::max(0.0, report.per_user_rate[i] - report.per_user_leakage[i]);
    report.tx_power_used[i] = p.power(i);
    report.sum_secrecy += report.per_user_secrecy[i];
  }
  report.relay_power_used = relay_tx_power(ch, relay, p);
  return report;
}

double relay_tx_power(const ChannelSet& ch, const RelayMatrix& relay,
                      const Precoders& p) {
  double power = relay.matrix.squaredNorm();  // amplified unit-variance noise
  for (int i = 0; i < ch.num_users(); ++i) {
    power += (relay.matrix * ch.uplink_matrix(i) * p.matrices[i])
                 .squaredNorm();
  }
  return power;
}

}  // namespace iln
