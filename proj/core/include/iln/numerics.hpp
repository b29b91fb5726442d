#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace iln {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;

/// Full SVD of A split at the numerical rank: A = U1 diag(s) V1^H, with U2/V2
/// orthonormal bases of the left/right null spaces. The rank counts singular
/// values strictly above rank_tol * s_max.
struct SvdFactors {
  CMatrix left_signal;      // U1, rows x rank
  CMatrix left_null;        // U2, rows x (rows - rank)
  CMatrix right_signal;     // V1, cols x rank
  CMatrix right_null;       // V2, cols x (cols - rank)
  RVector singular_values;  // descending, length = rank
  Index rank = 0;
};

// Column-major vectorization and its inverse.
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Index rows, Index cols);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix block_diag(const std::vector<CMatrix>& blocks);

SvdFactors svd_full(const CMatrix& a, double rank_tol = kDefaultRankTol);

/// Moore-Penrose pseudo-inverse via SVD thresholding.
CMatrix pinv(const CMatrix& a, double rank_tol = kDefaultRankTol);

/// log2 det of a Hermitian positive definite matrix, computed from a Cholesky
/// factorization of the symmetrized input. Throws if the input is visibly
/// non-Hermitian or not positive definite.
double logdet_psd(const CMatrix& a);

/// Eigendecomposition of a Hermitian matrix; eigenvalues descending,
/// eigenvectors as matching columns.
std::pair<RVector, CMatrix> eigh(const CMatrix& a);

}  // namespace iln
