#include "iln/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iln {

namespace {

void require_hermitian(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix is not square");
  }
  const double scale = 1.0 + a.norm();
  if ((a - a.adjoint()).norm() > 1e-8 * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
  }
}

}  // namespace

CVector vec(const CMatrix& m) { return m.reshaped(); }

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("unvec: vector of length " +
                                std::to_string(v.size()) +
                                " cannot fill a " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " matrix");
  }
  return v.reshaped(rows, cols);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix block_diag(const std::vector<CMatrix>& blocks) {
  Index rows = 0;
  Index cols = 0;
  for (const CMatrix& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  CMatrix out = CMatrix::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const CMatrix& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

SvdFactors svd_full(const CMatrix& a, double rank_tol) {
  if (!a.allFinite()) {
    throw std::invalid_argument("svd_full: input has non-finite entries");
  }
  if (a.rows() == 0 || a.cols() == 0) {
    SvdFactors f;
    f.rank = 0;
    f.singular_values = RVector::Zero(0);
    f.left_signal = CMatrix::Zero(a.rows(), 0);
    f.left_null = CMatrix::Identity(a.rows(), a.rows());
    f.right_signal = CMatrix::Zero(a.cols(), 0);
    f.right_null = CMatrix::Identity(a.cols(), a.cols());
    return f;
  }
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("svd_full: decomposition failed to converge");
  }
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rank_tol * s(0) : 0.0;
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;

  SvdFactors f;
  f.rank = rank;
  f.singular_values = s.head(rank);
  f.left_signal = svd.matrixU().leftCols(rank);
  f.left_null = svd.matrixU().rightCols(a.rows() - rank);
  f.right_signal = svd.matrixV().leftCols(rank);
  f.right_null = svd.matrixV().rightCols(a.cols() - rank);
  return f;
}

CMatrix pinv(const CMatrix& a, double rank_tol) {
  const SvdFactors f = svd_full(a, rank_tol);
  if (f.rank == 0) return CMatrix::Zero(a.cols(), a.rows());
  return f.right_signal *
         f.singular_values.cwiseInverse().asDiagonal() *
         f.left_signal.adjoint();
}

double logdet_psd(const CMatrix& a) {
  require_hermitian(a, "logdet_psd");
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::LLT<CMatrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("logdet_psd: matrix is not positive definite");
  }
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Index k = 0; k < sym.rows(); ++k) {
    acc += std::log2(l(k, k).real());
  }
  return 2.0 * acc;
}

std::pair<RVector, CMatrix> eigh(const CMatrix& a) {
  require_hermitian(a, "eigh");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigendecomposition failed to converge");
  }
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

}  // namespace iln
