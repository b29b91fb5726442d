#pragma once

// Shared helpers for the test binaries: deterministic random generators,
// independent oracles and finite-difference utilities. Everything here is
// test-only and deliberately avoids the library's own solution paths.

#include <cmath>
#include <random>
#include <vector>

#include "iln/channel.hpp"
#include "iln/numerics.hpp"
#include "iln/optin.hpp"

namespace iln::test {

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }

  Complex complex_normal() { return {normal(), normal()}; }

  CMatrix matrix(Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) m(r, c) = complex_normal();
    }
    return m;
  }

  CMatrix hermitian(Index n) {
    const CMatrix a = matrix(n, n);
    return 0.5 * (a + a.adjoint());
  }

  CMatrix psd(Index n, Index rank = -1) {
    const CMatrix a = matrix(n, rank < 0 ? n : rank);
    return a * a.adjoint();
  }

  std::uint64_t integer() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Random full-stream precoders scaled to sit exactly at the power budgets.
inline Precoders random_precoders(Rand& rng, const Scenario& scenario) {
  std::vector<CMatrix> mats;
  for (int i = 0; i < scenario.num_users; ++i) {
    CMatrix p = rng.matrix(scenario.num_subcarriers, scenario.num_subcarriers);
    p *= std::sqrt(scenario.tx_power_budget[i]) / p.norm();
    mats.push_back(std::move(p));
  }
  return Precoders::from_matrices(std::move(mats));
}

/// Central finite differences of the Wirtinger gradient of the relay-side
/// Lagrangian, entry by entry over the block-diagonal target.
inline CMatrix fd_lagrangian_gradient(const Q2Instance& q2,
                                      const CMatrix& target, double lambda,
                                      double budget, double h = 1e-5) {
  const int m = q2.subcarriers;
  const auto lagr = [&](const CMatrix& t) {
    return q2_objective(q2, t) - lambda * (q2_power(q2, t) - budget);
  };
  CMatrix fd = CMatrix::Zero(target.rows(), target.cols());
  for (int i = 0; i < q2.num_users; ++i) {
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        const Index row = i * m + r;
        const Index col = i * m + c;
        CMatrix tp = target;
        CMatrix tm = target;
        tp(row, col) += h;
        tm(row, col) -= h;
        const double dre = (lagr(tp) - lagr(tm)) / (2 * h);
        tp = target;
        tm = target;
        tp(row, col) += Complex(0, h);
        tm(row, col) -= Complex(0, h);
        const double dim = (lagr(tp) - lagr(tm)) / (2 * h);
        // d/dRe = 2 Re(grad), d/dIm = 2 Im(grad) for a Wirtinger gradient.
        fd(row, col) = 0.5 * Complex(dre, dim);
      }
    }
  }
  return fd;
}

/// Independent check of the concave precoder program: projected gradient
/// ascent (Dykstra projection onto the PSD cone and the trace halfspaces,
/// backtracking steps), with the objective only ever scored at points scaled
/// back into the exactly feasible set. Never relies on the library's dual
/// water-filling path.
inline double q1_gradient_oracle(const std::vector<CMatrix>& w,
                                 const std::vector<CMatrix>& x,
                                 const std::vector<double>& budget,
                                 double relay_budget, int iterations = 2000) {
  constexpr double kLn2 = 0.6931471805599453;
  const int k = static_cast<int>(w.size());
  const Index m = w[0].rows();

  double coupling_sq = 0.0;
  for (const CMatrix& xi : x) coupling_sq += xi.squaredNorm();

  const auto project = [&](std::vector<CMatrix> q) {
    std::vector<CMatrix> inc_psd(k, CMatrix::Zero(m, m));
    std::vector<CMatrix> inc_tx(k, CMatrix::Zero(m, m));
    std::vector<CMatrix> inc_relay(k, CMatrix::Zero(m, m));
    for (int sweep = 0; sweep < 150; ++sweep) {
      for (int i = 0; i < k; ++i) {
        CMatrix y = q[i] + inc_psd[i];
        const auto [d, u] = eigh(y);
        CMatrix clipped =
            u * d.cwiseMax(0.0).asDiagonal() * u.adjoint();
        clipped = 0.5 * (clipped + clipped.adjoint());
        inc_psd[i] = y - clipped;
        q[i] = clipped;
      }
      for (int i = 0; i < k; ++i) {
        CMatrix y = q[i] + inc_tx[i];
        const double excess = y.trace().real() - budget[i];
        CMatrix moved = y;
        if (excess > 0) {
          moved -= (excess / m) * CMatrix::Identity(m, m);
        }
        inc_tx[i] = y - moved;
        q[i] = moved;
      }
      if (coupling_sq > 0) {
        double usage = 0.0;
        std::vector<CMatrix> y(k);
        for (int i = 0; i < k; ++i) {
          y[i] = q[i] + inc_relay[i];
          usage += (y[i] * x[i]).trace().real();
        }
        const double excess = usage - relay_budget;
        for (int i = 0; i < k; ++i) {
          CMatrix moved = y[i];
          if (excess > 0) moved -= (excess / coupling_sq) * x[i];
          inc_relay[i] = y[i] - moved;
          q[i] = moved;
        }
      }
    }
    return q;
  };

  // Certified feasible value: clip to the PSD cone first, then scale the
  // clipped point back inside the trace constraints (the set is star-shaped
  // around zero), and only score that exactly-feasible point.
  const auto feasible_objective = [&](const std::vector<CMatrix>& q) {
    std::vector<CMatrix> clipped(k);
    double ratio = 1.0;
    double usage = 0.0;
    for (int i = 0; i < k; ++i) {
      const auto [d, u] = eigh(q[i]);
      clipped[i] = u * d.cwiseMax(0.0).asDiagonal() * u.adjoint();
      ratio = std::max(ratio, clipped[i].trace().real() / budget[i]);
      usage += (clipped[i] * x[i]).trace().real();
    }
    if (relay_budget > 0) ratio = std::max(ratio, usage / relay_budget);
    const double scale = 1.0 / ratio;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const auto [d, u] = eigh(clipped[i]);
      const CMatrix root = u *
                           (scale * d.cwiseMax(0.0)).cwiseSqrt().asDiagonal() *
                           u.adjoint();
      total += logdet_psd(CMatrix::Identity(m, m) + root * w[i] * root);
    }
    return total;
  };

  std::vector<CMatrix> q(k, CMatrix::Zero(m, m));
  double current = 0.0;
  double step = 1.0;
  int resets = 0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<CMatrix> grad(k);
    for (int i = 0; i < k; ++i) {
      const CMatrix inner =
          (CMatrix::Identity(m, m) + q[i] * w[i]).inverse();
      CMatrix g = (w[i] * inner) / kLn2;
      grad[i] = 0.5 * (g + g.adjoint());
    }
    bool accepted = false;
    for (; step > 1e-12; step *= 0.5) {
      std::vector<CMatrix> moved(k);
      for (int i = 0; i < k; ++i) moved[i] = q[i] + step * grad[i];
      moved = project(std::move(moved));
      const double value = feasible_objective(moved);
      if (value > current) {
        q = std::move(moved);
        current = value;
        accepted = true;
        step = std::min(2.0 * step, 4.0);
        break;
      }
    }
    if (!accepted) {
      // Projection raggedness can hide short uphill steps; retry from a
      // fresh step length before concluding stationarity.
      if (++resets > 3) break;
      step = 1.0;
    }
  }
  return current;
}

}  // namespace iln::test
