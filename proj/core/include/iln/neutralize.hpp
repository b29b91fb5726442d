#pragma once

#include <vector>

#include "iln/channel.hpp"

namespace iln {

/// The stacked linear system A vec(R) = b whose solutions are exactly the
/// relay matrices that cancel every transmitter's signal at every unintended
/// receiver. A has sum_i S_i (K-1) M rows and (MN)^2 columns.
struct NeutralizationSystem {
  CMatrix coefficients;      // A
  CVector rhs;               // b
  SvdFactors svd;            // factors of A
  CVector min_norm_solution; // A^+ b, vec form
  double residual = 0.0;     // ||A A^+ b - b||
  int subcarriers = 0;
  int antennas = 0;

  int relay_dim() const { return subcarriers * antennas; }
  Index family_dim() const { return svd.right_null.cols(); }
  bool consistent(double tol = 1e-8) const {
    return residual <= tol * (1.0 + rhs.norm());
  }
};

/// Smallest relay antenna count N with M N^2 >= (K-1) sum_i S_i, the
/// dimension count needed for the stacked system to be solvable.
int min_antennas(int num_users, int num_subcarriers,
                 const std::vector<int>& streams);

NeutralizationSystem build_system(const ChannelSet& ch, const Precoders& p);

/// Infeasibility is an ordinary outcome here: the harness plots zero-rate
/// points for budgets or antenna counts that cannot neutralize.
struct NeutralizeOutcome {
  RelayMatrix relay;
  double residual = 0.0;
  bool consistent = false;
};

NeutralizeOutcome solve_min_norm(const NeutralizationSystem& sys);

/// A^+ b shifted by the null-space element parameterized by y (one coefficient
/// per null direction). Any y keeps the neutralization residual unchanged.
RelayMatrix neutralized_family(const NeutralizationSystem& sys,
                               const CVector& y);

/// Relay transmit power of the minimum-norm neutralizing solution.
/// Throws std::domain_error when the system is inconsistent.
double min_neutralization_power(const ChannelSet& ch, const Precoders& p);

/// Minimum relay transmit power over the whole neutralizing family, found by
/// weighted least squares over the null space. Never exceeds
/// min_neutralization_power; the gap is diagnostic output, the min-norm
/// solution is what the algorithms use.
double weighted_min_neutralization_power(const ChannelSet& ch,
                                         const Precoders& p);

struct ProjectionOutcome {
  RelayMatrix relay;
  double residual = 0.0;  // ||(H + G^H R F) P - T||_F / (1 + ||T||_F)
};

/// Solves (H + G^H R F) P = T for R through pseudo-inverses, where T is the
/// block-diagonal target of per-user equivalent channels after precoding.
/// The residual reports how far the target is from reachable.
ProjectionOutcome relay_from_T(const ChannelSet& ch, const Precoders& p,
                               const CMatrix& target);

}  // namespace iln
