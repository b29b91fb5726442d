#include "iln/neutralize.hpp"

#include <numeric>
#include <stdexcept>

namespace iln {

int min_antennas(int num_users, int num_subcarriers,
                 const std::vector<int>& streams) {
  if (num_users < 2) throw std::invalid_argument("min_antennas: need K >= 2");
  const long required =
      static_cast<long>(num_users - 1) *
      std::accumulate(streams.begin(), streams.end(), 0L);
  int n = 1;
  while (static_cast<long>(num_subcarriers) * n * n < required) ++n;
  return n;
}

NeutralizationSystem build_system(const ChannelSet& ch, const Precoders& p) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  const int MN = ch.relay_dim();
  const RelayMatrix no_relay = RelayMatrix::zero(M, ch.relay_antennas());

  Index rows = 0;
  for (int i = 0; i < K; ++i) rows += p.streams(i) * (K - 1) * M;

  NeutralizationSystem sys;
  sys.subcarriers = M;
  sys.antennas = ch.relay_antennas();
  sys.coefficients = CMatrix::Zero(rows, static_cast<Index>(MN) * MN);
  sys.rhs = CVector::Zero(rows);

  Index row = 0;
  for (int i = 0; i < K; ++i) {
    const CMatrix phat = p.compact(i);
    if (phat.cols() == 0) continue;
    const CMatrix fp = ch.uplink_matrix(i) * phat;  // NM x S_i
    const auto [h_minus, g_minus] = stack_eavesdroppers(ch, no_relay, i);
    const Index block_rows = phat.cols() * (K - 1) * M;
    sys.coefficients.middleRows(row, block_rows) =
        kron(fp.transpose(), g_minus.adjoint());
    sys.rhs.segment(row, block_rows) = -vec(h_minus * phat);
    row += block_rows;
  }

  sys.svd = svd_full(sys.coefficients);
  if (sys.svd.rank == 0) {
    sys.min_norm_solution = CVector::Zero(sys.coefficients.cols());
  } else {
    sys.min_norm_solution =
        sys.svd.right_signal *
        sys.svd.singular_values.cwiseInverse().asDiagonal() *
        (sys.svd.left_signal.adjoint() * sys.rhs);
  }
  sys.residual =
      (sys.coefficients * sys.min_norm_solution - sys.rhs).norm();
  return sys;
}

NeutralizeOutcome solve_min_norm(const NeutralizationSystem& sys) {
  NeutralizeOutcome out;
  out.relay = RelayMatrix::general(
      unvec(sys.min_norm_solution, sys.relay_dim(), sys.relay_dim()),
      sys.antennas);
  out.residual = sys.residual;
  out.consistent = sys.consistent();
  return out;
}

RelayMatrix neutralized_family(const NeutralizationSystem& sys,
                               const CVector& y) {
  if (y.size() != sys.family_dim()) {
    throw std::invalid_argument(
        "neutralized_family: coefficient vector must match the null-space "
        "dimension " +
        std::to_string(sys.family_dim()));
  }
  const CVector x = sys.min_norm_solution + sys.svd.right_null * y;
  return RelayMatrix::general(unvec(x, sys.relay_dim(), sys.relay_dim()),
                              sys.antennas);
}

namespace {

// Signal-plus-noise weight of the relay power quadratic form,
// sum_i F_i P_i P_i^H F_i^H + I, of size MN.
CMatrix relay_power_weight(const ChannelSet& ch, const Precoders& p) {
  const int MN = ch.relay_dim();
  CMatrix q = CMatrix::Identity(MN, MN);
  for (int i = 0; i < ch.num_users(); ++i) {
    const CMatrix fp = ch.uplink_matrix(i) * p.matrices[i];
    q += fp * fp.adjoint();
  }
  return q;
}

}  // namespace

double min_neutralization_power(const ChannelSet& ch, const Precoders& p) {
  const NeutralizationSystem sys = build_system(ch, p);
  if (!sys.consistent()) {
    throw std::domain_error(
        "min_neutralization_power: neutralization system is inconsistent "
        "(residual " +
        std::to_string(sys.residual) + ")");
  }
  const CMatrix r =
      unvec(sys.min_norm_solution, sys.relay_dim(), sys.relay_dim());
  return (r * relay_power_weight(ch, p)).cwiseProduct(r.conjugate())
      .sum()
      .real();
}

double weighted_min_neutralization_power(const ChannelSet& ch,
                                         const Precoders& p) {
  const NeutralizationSystem sys = build_system(ch, p);
  if (!sys.consistent()) {
    throw std::domain_error(
        "weighted_min_neutralization_power: system is inconsistent");
  }
  const Index mn = sys.relay_dim();
  const CMatrix weight = relay_power_weight(ch, p);
  // Power of vec x is x^H (W^T kron I) x. Minimize over x = x0 + V2 y:
  // y* solves (V2^H Q V2) y = -V2^H Q x0 with Q = W^T kron I, applied
  // matrix-wise as X -> X W to avoid forming the Kronecker product.
  const auto apply_q = [&](const CMatrix& cols) {
    CMatrix out(cols.rows(), cols.cols());
    for (Index c = 0; c < cols.cols(); ++c) {
      out.col(c) = vec(CMatrix(unvec(cols.col(c), mn, mn) * weight));
    }
    return out;
  };
  const CMatrix qv2 = apply_q(sys.svd.right_null);
  const CMatrix gram = sys.svd.right_null.adjoint() * qv2;
  const CVector rhs =
      -(qv2.adjoint() * sys.min_norm_solution);
  const CVector y = gram.ldlt().solve(rhs);
  const CVector x = sys.min_norm_solution + sys.svd.right_null * y;
  const CMatrix r = unvec(x, mn, mn);
  return (r * weight).cwiseProduct(r.conjugate()).sum().real();
}

ProjectionOutcome relay_from_T(const ChannelSet& ch, const Precoders& p,
                               const CMatrix& target) {
  const int KM = ch.num_users() * ch.num_subcarriers();
  if (target.rows() != KM || target.cols() != KM) {
    throw std::invalid_argument("relay_from_T: target must be KM x KM");
  }
  const CMatrix h = stacked_direct_matrix(ch);
  const CMatrix g = stacked_downlink_matrix(ch);
  const CMatrix f = stacked_uplink_matrix(ch);
  const CMatrix pd = p.block_diagonal();
  const CMatrix fp = f * pd;
  const CMatrix r = pinv(g.adjoint()) * (target - h * pd) * pinv(fp);

  ProjectionOutcome out;
  out.relay = RelayMatrix::general(r, ch.relay_antennas());
  out.residual = ((h + g.adjoint() * out.relay.matrix * f) * pd - target)
                     .norm() /
                 (1.0 + target.norm());
  return out;
}

}  // namespace iln
