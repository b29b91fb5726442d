#include "iln/optin.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace iln {

namespace {

constexpr double kLn2 = 0.6931471805599453;

CMatrix target_block(const CMatrix& target, int user, int m) {
  return target.block(user * m, user * m, m, m);
}

}  // namespace

Q2Instance build_q2(const ChannelSet& ch, const Precoders& p) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  const int MN = ch.relay_dim();
  const int KM = K * M;

  Q2Instance q2;
  q2.num_users = K;
  q2.subcarriers = M;

  const CMatrix g = stacked_downlink_matrix(ch);
  const CMatrix f = stacked_uplink_matrix(ch);
  const CMatrix pd = p.block_diagonal();
  const CMatrix fp = f * pd;

  const SvdFactors fp_svd = svd_full(fp);
  const SvdFactors gh_svd = svd_full(g.adjoint());
  q2.pinv_fallback = fp_svd.rank < std::min<Index>(MN, KM) ||
                     gh_svd.rank < std::min<Index>(MN, KM);

  const CMatrix pinv_fp = pinv(fp);
  q2.f_gram = pinv_fp * pinv_fp.adjoint();
  q2.f_gram = 0.5 * (q2.f_gram + q2.f_gram.adjoint());
  q2.pinv_g_herm = pinv(g.adjoint());
  q2.g_gram = q2.pinv_g_herm.adjoint() * q2.pinv_g_herm;
  q2.hp = stacked_direct_matrix(ch) * pd;

  const CMatrix hpf = q2.hp * q2.f_gram;
  for (int i = 0; i < K; ++i) {
    CMatrix x = hpf.block(i * M, 0, M, KM) *
                q2.hp.block(i * M, 0, M, KM).adjoint();
    x = 0.5 * (x + x.adjoint());
    const CMatrix coupling = hpf.block(i * M, i * M, M, M);  // sum_m H_im P_m Ftilde_mi
    CMatrix y(2 * M, 2 * M);
    y.topLeftCorner(M, M) = q2.f_gram.block(i * M, i * M, M, M);
    y.topRightCorner(M, M) = -coupling.adjoint();
    y.bottomLeftCorner(M, M) = -coupling;
    y.bottomRightCorner(M, M) = CMatrix::Identity(M, M);
    CMatrix z = y;
    z.topLeftCorner(M, M) += CMatrix::Identity(M, M);
    q2.x.push_back(std::move(x));
    q2.y.push_back(std::move(y));
    q2.z.push_back(std::move(z));

    const CMatrix& pi = p.matrices[i];
    if (p.streams(i) == M) {
      q2.row_projector.push_back(CMatrix::Identity(M, M));
    } else {
      CMatrix proj = pinv(pi) * pi;
      q2.row_projector.push_back(0.5 * (proj + proj.adjoint()));
    }
  }
  return q2;
}

double q2_objective(const Q2Instance& q2, const CMatrix& target) {
  const int M = q2.subcarriers;
  double total = 0.0;
  for (int i = 0; i < q2.num_users; ++i) {
    CMatrix tbar(M, 2 * M);
    tbar.leftCols(M) = target_block(target, i, M);
    tbar.rightCols(M) = CMatrix::Identity(M, M);
    const CMatrix with_signal = q2.x[i] + tbar * q2.z[i] * tbar.adjoint();
    const CMatrix noise_only = q2.x[i] + tbar * q2.y[i] * tbar.adjoint();
    total += logdet_psd(with_signal) - logdet_psd(noise_only);
  }
  return total;
}

double q2_power(const Q2Instance& q2, const CMatrix& target) {
  const Index km = q2.hp.rows();
  const CMatrix d = q2.pinv_g_herm * (target - q2.hp);
  const CMatrix weighted =
      d * (q2.f_gram + CMatrix::Identity(km, km));
  return weighted.cwiseProduct(d.conjugate()).sum().real();
}

CMatrix q2_gradient(const Q2Instance& q2, const CMatrix& target,
                    double lambda) {
  const int M = q2.subcarriers;
  const Index km = q2.hp.rows();
  const CMatrix power_grad =
      q2.g_gram * (target - q2.hp) *
      (q2.f_gram + CMatrix::Identity(km, km));

  CMatrix grad = CMatrix::Zero(km, km);
  for (int i = 0; i < q2.num_users; ++i) {
    CMatrix tbar(M, 2 * M);
    tbar.leftCols(M) = target_block(target, i, M);
    tbar.rightCols(M) = CMatrix::Identity(M, M);
    const CMatrix with_signal = q2.x[i] + tbar * q2.z[i] * tbar.adjoint();
    const CMatrix noise_only = q2.x[i] + tbar * q2.y[i] * tbar.adjoint();
    const CMatrix signal_term = Eigen::LLT<CMatrix>(
        0.5 * (with_signal + with_signal.adjoint()))
        .solve(tbar * q2.z[i].leftCols(M));
    const CMatrix noise_term = Eigen::LLT<CMatrix>(
        0.5 * (noise_only + noise_only.adjoint()))
        .solve(tbar * q2.y[i].leftCols(M));
    grad.block(i * M, i * M, M, M) =
        (signal_term - noise_term) / kLn2 -
        lambda * power_grad.block(i * M, i * M, M, M);
  }
  return grad;
}

namespace {

struct Evaluation {
  double objective = 0.0;
  double power = 0.0;
};

std::optional<Evaluation> evaluate(const Q2Instance& q2,
                                   const CMatrix& target) {
  Evaluation e;
  try {
    e.objective = q2_objective(q2, target);
  } catch (const std::exception&) {
    return std::nullopt;  // log-det argument lost positive definiteness
  }
  e.power = q2_power(q2, target);
  return e;
}

}  // namespace

OptinState solve_q2(const Q2Instance& q2, const CMatrix& target_init,
                    double relay_budget, const OptinOptions& opts) {
  const int M = q2.subcarriers;
  const double power_slack = opts.power_tol * std::max(1.0, relay_budget);
  const auto init = evaluate(q2, target_init);
  if (!init || init->power > relay_budget + power_slack) {
    throw std::invalid_argument(
        "solve_q2: starting target is infeasible for the relay budget");
  }

  OptinState state;
  CMatrix best_target = target_init;
  double best_objective = init->objective;

  const auto consider = [&](const CMatrix& t, const Evaluation& e) {
    if (e.power <= relay_budget + power_slack &&
        e.objective > best_objective) {
      best_objective = e.objective;
      best_target = t;
    }
  };

  // Backtracking gradient ascent on the Lagrangian at a fixed multiplier.
  // Directions are restricted to the block-diagonal structure and, for
  // rank-deficient precoders, to the rows the precoder can reach, which
  // keeps every iterate's target realizable by an actual relay matrix.
  const auto ascend = [&](double lambda, CMatrix t,
                          Evaluation e) -> std::pair<CMatrix, Evaluation> {
    double lagrangian = e.objective - lambda * (e.power - relay_budget);
    double step = opts.initial_step;
    for (int it = 0; it < opts.max_inner; ++it) {
      ++state.iterations;
      CMatrix grad = q2_gradient(q2, t, lambda);
      for (int i = 0; i < q2.num_users; ++i) {
        grad.block(i * M, i * M, M, M) =
            grad.block(i * M, i * M, M, M) * q2.row_projector[i];
      }
      const double gsq = grad.squaredNorm();
      if (gsq <= 1e-18) break;
      bool accepted = false;
      double improvement = 0.0;
      for (double s = step; s > 1e-14; s *= opts.shrink) {
        const CMatrix cand = t + s * grad;
        const auto ce = evaluate(q2, cand);
        if (!ce) continue;
        const double cl =
            ce->objective - lambda * (ce->power - relay_budget);
        if (cl >= lagrangian + opts.armijo * s * gsq) {
          improvement = cl - lagrangian;
          t = cand;
          e = *ce;
          lagrangian = cl;
          consider(t, e);
          accepted = true;
          step = std::min(opts.initial_step, 2.0 * s);
          break;
        }
      }
      if (!accepted) {
        state.line_search_failed = true;
        break;
      }
      if (improvement < opts.inner_improvement) break;
    }
    return {std::move(t), e};
  };

  auto [t, e] = ascend(0.0, target_init, *init);
  double lambda = 0.0;
  if (e.power > relay_budget + power_slack) {
    double hi = 1.0;
    auto [t_hi, e_hi] = ascend(hi, t, e);
    for (int it = 0;
         it < 60 && e_hi.power > relay_budget + power_slack; ++it) {
      hi *= 2.0;
      std::tie(t_hi, e_hi) = ascend(hi, t_hi, e_hi);
    }
    double lo = 0.0;
    while (hi - lo > 1e-9 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      auto [t_mid, e_mid] = ascend(mid, t_hi, e_hi);
      if (e_mid.power > relay_budget + power_slack) {
        lo = mid;
      } else {
        hi = mid;
        t_hi = std::move(t_mid);
        e_hi = e_mid;
        if (hi * std::abs(relay_budget - e_hi.power) <=
            opts.power_tol * std::max(1.0, relay_budget)) {
          break;
        }
      }
    }
    lambda = hi;
    t = std::move(t_hi);
    e = e_hi;
  }

  if (best_objective > e.objective) {
    t = best_target;
    e = *evaluate(q2, t);
  }
  state.target = std::move(t);
  state.lambda = lambda;
  state.objective = e.objective;
  state.power_residual = e.power - relay_budget;
  return state;
}

namespace {

// Orthonormal basis of the directions user i may transmit on without
// re-creating leakage: the common right null space of the equivalent
// eavesdropper channels. Identity when the relay neutralizes the full
// matrices (the generic, invertible-precoder case).
CMatrix neutral_subspace(const ChannelSet& ch, const RelayMatrix& relay,
                         int user) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  CMatrix stacked((K - 1) * M, M);
  int slot = 0;
  for (int j = 0; j < K; ++j) {
    if (j == user) continue;
    stacked.middleRows(slot * M, M) = equivalent_channel(ch, relay, user, j);
    ++slot;
  }
  if (stacked.norm() <= 1e-8 * (1.0 + std::sqrt(double(K - 1) * M))) {
    return CMatrix::Identity(M, M);
  }
  return svd_full(stacked).right_null;
}

}  // namespace

OptinResult optin(const ChannelSet& ch, const Scenario& scenario,
                  const OptinOptions& opts) {
  OptinResult result;
  result.design = effin(ch, scenario);
  if (!result.design.feasible) return result;

  const int K = ch.num_users();
  RelayMatrix relay = result.design.relay;
  Precoders precoders = result.design.precoders;
  RateReport report = result.design.report;
  result.trace.push_back(report.sum_secrecy);
  for (int i = 0; i < K; ++i) {
    result.max_iterate_leakage = std::max(
        result.max_iterate_leakage, leakage_rate(ch, relay, precoders, i));
  }

  const int M = ch.num_subcarriers();
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const Q2Instance q2 = build_q2(ch, precoders);
    CMatrix target_init = CMatrix::Zero(K * M, K * M);
    for (int i = 0; i < K; ++i) {
      target_init.block(i * M, i * M, M, M) =
          equivalent_channel(ch, relay, i, i) * precoders.matrices[i];
    }
    OptinState st;
    try {
      st = solve_q2(q2, target_init, scenario.relay_power_budget, opts);
    } catch (const std::invalid_argument&) {
      break;  // starting target infeasible by a hair; keep the current design
    }
    const ProjectionOutcome proj = relay_from_T(ch, precoders, st.target);
    if (proj.residual > 1e-8) break;  // target drifted out of reach
    relay = proj.relay;

    Q1Problem q1 = build_q1(ch, scenario, relay);
    q1.residual_relay_budget =
        std::max(q1.residual_relay_budget, 0.0);
    std::vector<CMatrix> subspaces;
    Q1Problem reduced = q1;
    for (int i = 0; i < K; ++i) {
      CMatrix v = neutral_subspace(ch, relay, i);
      reduced.whitened_gram[i] =
          v.adjoint() * q1.whitened_gram[i] * v;
      reduced.relay_coupling[i] =
          v.adjoint() * q1.relay_coupling[i] * v;
      subspaces.push_back(std::move(v));
    }
    const Q1Solution sol = solve_q1(reduced);
    std::vector<CMatrix> lifted;
    for (int i = 0; i < K; ++i) {
      CMatrix q = subspaces[i] * sol.covariance[i] * subspaces[i].adjoint();
      lifted.push_back(0.5 * (q + q.adjoint()));
    }
    precoders = precoders_from_covariances(lifted);
    report = secrecy_report(ch, relay, precoders, /*assert_neutralized=*/true);

    for (int i = 0; i < K; ++i) {
      result.max_iterate_leakage = std::max(
          result.max_iterate_leakage,
          leakage_rate(ch, relay, precoders, i));
    }
    const double previous = result.trace.back();
    result.trace.push_back(report.sum_secrecy);
    if (report.sum_secrecy < previous - 1e-12) result.monotone = false;
    if (report.sum_secrecy - previous < opts.threshold) break;
  }

  result.design.relay = std::move(relay);
  result.design.precoders = std::move(precoders);
  result.design.report = std::move(report);
  return result;
}

}  // namespace iln
