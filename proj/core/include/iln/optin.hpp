#pragma once

#include <vector>

#include "iln/channel.hpp"
#include "iln/effin.hpp"
#include "iln/neutralize.hpp"

namespace iln {

/// Data of the relay-side problem after eliminating R through
/// pseudo-inverses of G^H and F P. All blocks are M x M; indices follow the
/// stacked KM ordering.
struct Q2Instance {
  CMatrix f_gram;          // Ftilde = (FP)^+ (FP)^{H+}, KM x KM, Hermitian PSD
  std::vector<CMatrix> x;  // X_i, M x M, Hermitian PSD
  std::vector<CMatrix> y;  // Y_i, 2M x 2M, Hermitian
  std::vector<CMatrix> z;  // Z_i = [[I,0],[0,0]] + Y_i
  CMatrix pinv_g_herm;     // (G^H)^+, MN x KM
  CMatrix g_gram;          // G^+ (G^H)^+, KM x KM
  CMatrix hp;              // H P, KM x KM
  std::vector<CMatrix> row_projector;  // P_i^+ P_i, reachable-row projector
  int num_users = 0;
  int subcarriers = 0;
  bool pinv_fallback = false;  // explicit-inverse pinv formulas inapplicable
};

Q2Instance build_q2(const ChannelSet& ch, const Precoders& p);

/// Sum over users of the two-log-det form of the leakage-free rate.
double q2_objective(const Q2Instance& q2, const CMatrix& target);

/// Relay transmit power of the relay reconstructed from the target, in the
/// trace form tr((G^H)^+ (T - HP)(Ftilde + I)(T - HP)^H G^+).
double q2_power(const Q2Instance& q2, const CMatrix& target);

/// Conjugate (Wirtinger) gradient of the Lagrangian with respect to the
/// target's conjugate, restricted to the block-diagonal structure.
CMatrix q2_gradient(const Q2Instance& q2, const CMatrix& target,
                    double lambda);

struct OptinOptions {
  double threshold = 1e-4;         // outer stop: sum-secrecy improvement
  int max_outer = 30;
  int max_inner = 200;             // ascent steps per dual trial
  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  double power_tol = 1e-6;         // feasibility slack on the relay power
  double inner_improvement = 1e-6; // ascent stop: Lagrangian improvement
};

struct OptinState {
  CMatrix target;          // block-diagonal T
  double lambda = 0.0;
  double objective = 0.0;  // q2_objective at target
  double power_residual = 0.0;  // q2_power - budget
  int iterations = 0;
  bool line_search_failed = false;
};

/// Projected gradient ascent on the Lagrangian with backtracking line
/// search; the power multiplier is bracketed and bisected until the returned
/// target is feasible with small complementary slackness. Throws on an
/// infeasible starting target.
OptinState solve_q2(const Q2Instance& q2, const CMatrix& target_init,
                    double relay_budget, const OptinOptions& opts = {});

struct OptinResult {
  AlgorithmResult design;
  std::vector<double> trace;  // sum secrecy after each outer alternation
  double max_iterate_leakage = 0.0;
  bool monotone = true;  // false if any outer alternation lost sum secrecy
};

/// Alternating optimization seeded at the efficient design: gradient ascent
/// over the equivalent-channel target (relay side), then a precoder refresh
/// through the concave program, until the sum secrecy rate improvement
/// drops below the threshold.
OptinResult optin(const ChannelSet& ch, const Scenario& scenario,
                  const OptinOptions& opts = {});

}  // namespace iln
