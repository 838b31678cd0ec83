#ifndef CLUSTSIG_DECOMP_HPP
#define CLUSTSIG_DECOMP_HPP

#include <utility>

#include "clustsig/cluster.hpp"
#include "clustsig/dataset.hpp"

namespace clustsig {

// Orthogonal split X = P0 X + P1 X + P2 X for a tested cluster pair:
//   P0 X  between-cluster contrast (rank 1),
//   P1 X  within-cluster spread over the two clusters (rank m-2),
//   P2 X  everything else: the combined mean and the untested rows
//         (rank n-m+1).
// Projections are applied by closed-form centering; no n-by-n matrices are
// ever formed.
struct Decomposition {
  Eigen::VectorXd v;  // contrast 1_Ck/|Ck| - 1_Ck'/|Ck'|
  Eigen::VectorXd w;  // combined-mean direction 1_{Ck u Ck'}/m
  int m = 0;          // |Ck| + |Ck'|
  std::pair<int, int> pair{0, 1};

  DataMatrix p0x, p1x, p2x;
  double norm0 = 0.0;  // ||P0 X||_F
  double norm1 = 0.0;  // ||P1 X||_F
  DataMatrix dir0, dir1;  // unit-Frobenius directions of P0 X, P1 X

  double v_norm = 0.0;  // ||v||_2 = sqrt(1/|Ck| + 1/|Ck'|)

  int n() const { return static_cast<int>(p0x.rows()); }
  int q() const { return static_cast<int>(p0x.cols()); }
  // Conserved total norm of the two conditioned components.
  double conditioned_norm() const { return std::hypot(norm0, norm1); }
  // Observed value of ||X^T v||_2.
  double phi_obs() const { return v_norm * norm0; }
};

Decomposition build_decomposition(const DataMatrix& x, const ClusterPartition& part,
                                  int k, int k_prime);

// R = (m-2) ||P0 X||_F^2 / ||P1 X||_F^2; the F-ratio statistic.
double statistic_R(const Decomposition& d);

// The data that would have produced statistic value r with every
// conditioned component unchanged. x'(R) reproduces X.
DataMatrix reconstruct_x_prime(const Decomposition& d, double r);

// Same reconstruction parametrized by z = r/(m-2+r) in (0,1); used by the
// sampling paths where r may be astronomically large.
DataMatrix reconstruct_x_prime_z(const Decomposition& d, double z);

// Known-sigma reconstruction: only the span-of-v component moves.
DataMatrix reconstruct_x_phi(const Decomposition& d, double phi);

struct SigmaEstimate {
  enum class Mode { true_sigma, all, clustered };
  double value = 0.0;  // standard-deviation scale
  Mode mode = Mode::true_sigma;
};

// Treats the data as one cluster: value^2 = sum ||X_i - mean||^2 / ((n-1) q).
SigmaEstimate sigma_hat_all(const DataMatrix& x);

// Pools within-cluster variation: value^2 = sum_k sum_{i in C_k}
// ||X_i - mean_k||^2 / ((n-K) q).
SigmaEstimate sigma_hat_clustered(const DataMatrix& x, const ClusterPartition& part);

}  // namespace clustsig

#endif
