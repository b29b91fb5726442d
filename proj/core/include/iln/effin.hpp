#pragma once

#include <string>
#include <vector>

#include "iln/channel.hpp"
#include "iln/rates.hpp"

namespace iln {

/// Per-subcarrier minimum-norm neutralizing relay: block-diagonal R whose
/// m-th block solves h_{ji}(m) + g_j^H(m) R_mm f_i(m) = 0 for all i != j.
struct SubcarrierNeutralization {
  RelayMatrix relay;
  double max_residual = 0.0;
  int worst_subcarrier = -1;
  bool consistent = false;
};

SubcarrierNeutralization effin_relay(const ChannelSet& ch);

/// The concave precoder program: maximize sum_i log2 det(I + Q_i W_i) over
/// PSD Q_i subject to tr(Q_i) <= tx budget and the coupled relay-power
/// constraint sum_i tr(Q_i X_i) <= residual relay budget.
struct Q1Problem {
  std::vector<CMatrix> whitened_gram;    // W_i, Hermitian PSD
  std::vector<CMatrix> relay_coupling;   // X_i = F_i^H R^H R F_i
  std::vector<double> tx_budget;         // P_i^max
  double residual_relay_budget = 0.0;    // P_r^max - tr(R R^H)
};

struct Q1Solution {
  std::vector<CMatrix> covariance;  // Q_i, Hermitian PSD
  std::vector<double> tx_duals;     // lambda_i
  double relay_dual = 0.0;          // mu
  double objective = 0.0;           // bits/sec/Hz
  double kkt_residual = 0.0;
};

Q1Problem build_q1(const ChannelSet& ch, const Scenario& scenario,
                   const RelayMatrix& relay);

/// Dual generalized water-filling with K+1 multipliers found by nested
/// bisection (relay dual outside, per-user duals inside). Throws on a
/// negative residual relay budget or failure to reach the KKT tolerance.
Q1Solution solve_q1(const Q1Problem& problem, double tol = 1e-8);

/// Eigendecomposes each Q_i and sets P_i = U_i D_i^{1/2}; eigenvalues below
/// the cutoff produce exactly-zero trailing columns.
Precoders precoders_from_covariances(const std::vector<CMatrix>& covariances);

struct AlgorithmResult {
  bool feasible = false;
  RelayMatrix relay;
  Precoders precoders;
  RateReport report;
  std::string infeasible_reason;
};

/// The complete efficient design: per-subcarrier neutralizing relay followed
/// by the optimal precoders from the concave program. Infeasibility (not
/// enough relay power or an inconsistent subcarrier system) is reported as a
/// zero-rate result, not an exception.
AlgorithmResult effin(const ChannelSet& ch, const Scenario& scenario);

}  // namespace iln
