#include "iln/effin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iln {

namespace {

constexpr double kLn2 = 0.6931471805599453;
// Floor applied to the whitening matrix's eigenvalues; a per-user dual of
// zero with a rank-deficient coupling matrix would otherwise make the inner
// maximizer unbounded.
constexpr double kDualFloor = 1e-12;

struct InnerSolution {
  CMatrix covariance;
  double tr_q = 0.0;
  double tr_qx = 0.0;
  double objective = 0.0;
};

bool exactly_diagonal(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex{0.0, 0.0}) return false;
    }
  }
  return true;
}

// Closed-form maximizer of log2 det(I + Q W) - lambda tr(Q) - mu tr(Q X)
// over Q >= 0: whiten by B = lambda I + mu X, water-fill the eigenvalues of
// B^{-1/2} W B^{-1/2} at level 1/ln 2, and map back.
class UserSubproblem {
 public:
  UserSubproblem(const CMatrix& w, const CMatrix& x)
      : w_(w), x_(x), diagonal_(exactly_diagonal(w) && exactly_diagonal(x)) {
    if (!diagonal_) {
      std::tie(x_eigvals_, x_eigvecs_) = eigh(x);
    }
  }

  InnerSolution solve(double lambda, double mu) const {
    return diagonal_ ? solve_diagonal(lambda, mu) : solve_dense(lambda, mu);
  }

 private:
  InnerSolution solve_diagonal(double lambda, double mu) const {
    const Index m = w_.rows();
    InnerSolution out;
    out.covariance = CMatrix::Zero(m, m);
    for (Index k = 0; k < m; ++k) {
      const double w = w_(k, k).real();
      const double b = std::max(lambda + mu * x_(k, k).real(), kDualFloor);
      if (w <= 0.0) continue;
      const double q = std::max(0.0, 1.0 / (b * kLn2) - 1.0 / w);
      if (q <= 0.0) continue;
      out.covariance(k, k) = q;
      out.tr_q += q;
      out.tr_qx += q * x_(k, k).real();
      out.objective += std::log2(1.0 + q * w);
    }
    return out;
  }

  InnerSolution solve_dense(double lambda, double mu) const {
    const Index m = w_.rows();
    RVector b = (lambda + mu * x_eigvals_.array())
                    .max(kDualFloor)
                    .matrix();
    const CMatrix whiten =
        x_eigvecs_ * b.cwiseSqrt().cwiseInverse().asDiagonal() *
        x_eigvecs_.adjoint();
    const CMatrix wt = whiten * w_ * whiten;
    const auto [d, u] = eigh(wt);

    InnerSolution out;
    RVector fill = RVector::Zero(m);
    for (Index k = 0; k < m; ++k) {
      if (d(k) <= 0.0) continue;
      const double q = std::max(0.0, 1.0 / kLn2 - 1.0 / d(k));
      if (q <= 0.0) continue;
      fill(k) = q;
      out.objective += std::log2(1.0 + q * d(k));
    }
    const CMatrix carrier = whiten * u;
    out.covariance = carrier * fill.asDiagonal() * carrier.adjoint();
    out.covariance = 0.5 * (out.covariance + out.covariance.adjoint());
    out.tr_q = out.covariance.trace().real();
    out.tr_qx = (out.covariance * x_).trace().real();
    return out;
  }

  const CMatrix& w_;
  const CMatrix& x_;
  bool diagonal_;
  RVector x_eigvals_;
  CMatrix x_eigvecs_;
};

struct UserDualPoint {
  double lambda = 0.0;
  InnerSolution inner;
};

// Root of a monotone nonincreasing function on [lo, hi] with f(lo) > 0 >=
// f(hi), by the Illinois variant of regula falsi. Returns a point with
// f <= 0 (the feasible side).
template <typename F>
double feasible_root(F&& f, double lo, double f_lo, double hi, double f_hi,
                     int max_iter, double tol) {
  double end = hi;
  for (int it = 0; it < max_iter; ++it) {
    if (hi - lo <= tol * std::max(1.0, hi) || f_hi >= -tol) break;
    double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    const double width = hi - lo;
    mid = std::clamp(mid, lo + 1e-3 * width, hi - 1e-3 * width);
    const double f_mid = f(mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
      f_hi *= 0.5;  // Illinois weighting keeps the secant moving
    } else {
      hi = mid;
      f_hi = f_mid;
      end = hi;
      f_lo *= 0.5;
    }
  }
  return end;
}

// Per-user dual so the transmit power constraint is tight, or zero when the
// constraint is slack with no multiplier.
UserDualPoint solve_user(const UserSubproblem& sub, double budget, double mu,
                         int max_iter) {
  UserDualPoint point;
  point.inner = sub.solve(0.0, mu);
  const double f0 = point.inner.tr_q - budget;
  if (f0 <= budget * 1e-12 + 1e-15) {
    return point;
  }
  double lo = 0.0;
  double f_lo = f0;
  double hi = 1.0;
  double f_hi = sub.solve(hi, mu).tr_q - budget;
  for (int it = 0; it < max_iter && f_hi > 0.0; ++it) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = sub.solve(hi, mu).tr_q - budget;
  }
  const double lambda = feasible_root(
      [&](double lam) { return sub.solve(lam, mu).tr_q - budget; }, lo, f_lo,
      hi, f_hi, max_iter, 1e-12 * std::max(1.0, budget));
  point.lambda = lambda;
  point.inner = sub.solve(lambda, mu);
  return point;
}

}  // namespace

SubcarrierNeutralization effin_relay(const ChannelSet& ch) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  const int N = ch.relay_antennas();

  SubcarrierNeutralization out;
  out.consistent = true;
  std::vector<CMatrix> blocks;
  blocks.reserve(M);
  for (int m = 0; m < M; ++m) {
    CMatrix a(K * (K - 1), N * N);
    CVector b(K * (K - 1));
    for (int i = 0; i < K; ++i) {
      CMatrix g_minus(N, K - 1);
      int slot = 0;
      for (int j = 0; j < K; ++j) {
        if (j == i) continue;
        g_minus.col(slot) = ch.downlink(j, m);
        b(i * (K - 1) + slot) = -ch.direct(j, i, m);
        ++slot;
      }
      a.middleRows(i * (K - 1), K - 1) =
          kron(ch.uplink(i, m).transpose(), g_minus.adjoint());
    }
    const CVector x = pinv(a) * b;
    const double residual = (a * x - b).norm();
    if (residual > out.max_residual) {
      out.max_residual = residual;
      out.worst_subcarrier = m;
    }
    if (residual > 1e-8 * (1.0 + b.norm())) out.consistent = false;
    blocks.push_back(unvec(x, N, N));
  }
  out.relay = RelayMatrix::from_frequency_blocks(blocks, N);
  return out;
}

Q1Problem build_q1(const ChannelSet& ch, const Scenario& scenario,
                   const RelayMatrix& relay) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  Q1Problem q1;
  q1.tx_budget = scenario.tx_power_budget;
  q1.residual_relay_budget =
      scenario.relay_power_budget - relay.matrix.squaredNorm();
  for (int i = 0; i < K; ++i) {
    const CMatrix gr = ch.downlink_matrix(i).adjoint() * relay.matrix;
    const CMatrix noise_cov = CMatrix::Identity(M, M) + gr * gr.adjoint();
    const CMatrix hbar = equivalent_channel(ch, relay, i, i);
    CMatrix w = hbar.adjoint() *
                Eigen::LLT<CMatrix>(noise_cov).solve(hbar);
    w = 0.5 * (w + w.adjoint());
    const CMatrix rf = relay.matrix * ch.uplink_matrix(i);
    CMatrix x = rf.adjoint() * rf;
    x = 0.5 * (x + x.adjoint());
    q1.whitened_gram.push_back(std::move(w));
    q1.relay_coupling.push_back(std::move(x));
  }
  return q1;
}

Q1Solution solve_q1(const Q1Problem& problem, double tol) {
  const int K = static_cast<int>(problem.whitened_gram.size());
  if (problem.residual_relay_budget < 0.0) {
    throw std::domain_error(
        "solve_q1: residual relay budget is negative (neutralization alone "
        "exceeds the relay power constraint)");
  }
  constexpr int kMaxIter = 200;

  std::vector<UserSubproblem> subs;
  subs.reserve(K);
  for (int i = 0; i < K; ++i) {
    subs.emplace_back(problem.whitened_gram[i], problem.relay_coupling[i]);
  }

  std::vector<UserDualPoint> points(K);
  auto relay_usage = [&](double mu) {
    double usage = 0.0;
    for (int i = 0; i < K; ++i) {
      points[i] = solve_user(subs[i], problem.tx_budget[i], mu, kMaxIter);
      usage += points[i].inner.tr_qx;
    }
    return usage;
  };

  const double pbar = problem.residual_relay_budget;
  double mu = 0.0;
  double usage = relay_usage(0.0);
  // Any overshoot at mu = 0 goes through the root search, whose feasible-
  // side iterate keeps usage <= pbar; downstream stages rely on the returned
  // point never exceeding the relay budget.
  if (usage > pbar) {
    double lo = 0.0;
    double f_lo = usage - pbar;
    double hi = 1.0;
    double f_hi = relay_usage(hi) - pbar;
    for (int it = 0; it < kMaxIter && f_hi > 0.0; ++it) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = relay_usage(hi) - pbar;
    }
    mu = feasible_root(
        [&](double m) { return relay_usage(m) - pbar; }, lo, f_lo, hi, f_hi,
        kMaxIter, 1e-12 * std::max(1.0, pbar));
    usage = relay_usage(mu);
  }

  Q1Solution sol;
  sol.relay_dual = mu;
  double kkt = std::max(0.0, usage - pbar) / std::max(1.0, pbar);
  kkt = std::max(kkt, mu * std::abs(pbar - usage) / std::max(1.0, pbar));
  for (int i = 0; i < K; ++i) {
    const double p = problem.tx_budget[i];
    const double tr_q = points[i].inner.tr_q;
    kkt = std::max(kkt, std::max(0.0, tr_q - p) / std::max(1.0, p));
    kkt = std::max(kkt,
                   points[i].lambda * std::abs(p - tr_q) / std::max(1.0, p));
    sol.tx_duals.push_back(points[i].lambda);
    sol.covariance.push_back(points[i].inner.covariance);
    sol.objective += points[i].inner.objective;
  }
  sol.kkt_residual = kkt;
  if (kkt > tol) {
    throw std::runtime_error(
        "solve_q1: dual bisection did not reach the KKT tolerance (residual " +
        std::to_string(kkt) + ")");
  }
  return sol;
}

Precoders precoders_from_covariances(
    const std::vector<CMatrix>& covariances) {
  std::vector<CMatrix> mats;
  mats.reserve(covariances.size());
  for (const CMatrix& q : covariances) {
    const auto [d, u] = eigh(q);
    const double cutoff = 1e-12 * std::max(1.0, d.size() > 0 ? d(0) : 0.0);
    CMatrix p = CMatrix::Zero(q.rows(), q.cols());
    for (Index k = 0; k < d.size(); ++k) {
      if (d(k) > cutoff) p.col(k) = u.col(k) * std::sqrt(d(k));
    }
    mats.push_back(std::move(p));
  }
  return Precoders::from_matrices(std::move(mats));
}

AlgorithmResult effin(const ChannelSet& ch, const Scenario& scenario) {
  AlgorithmResult result;
  const SubcarrierNeutralization rel = effin_relay(ch);
  result.relay = rel.relay;
  if (!rel.consistent) {
    result.infeasible_reason =
        "per-subcarrier neutralization inconsistent on subcarrier " +
        std::to_string(rel.worst_subcarrier) + " (residual " +
        std::to_string(rel.max_residual) + ")";
    return result;
  }
  Q1Problem q1 = build_q1(ch, scenario, rel.relay);
  if (q1.residual_relay_budget < 0.0) {
    result.infeasible_reason =
        "neutralization needs " +
        std::to_string(rel.relay.matrix.squaredNorm()) +
        " relay power, budget is " +
        std::to_string(scenario.relay_power_budget);
    return result;
  }
  const Q1Solution sol = solve_q1(q1);
  result.precoders = precoders_from_covariances(sol.covariance);
  result.report = secrecy_report(ch, rel.relay, result.precoders,
                                 /*assert_neutralized=*/true);
  result.feasible = true;
  return result;
}

}  // namespace iln
