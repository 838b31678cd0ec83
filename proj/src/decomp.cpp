#include "clustsig/decomp.hpp"

#include <cmath>

#include "clustsig/errors.hpp"

namespace clustsig {

namespace {
constexpr double kDegenerateRel = 1e-12;
}

Decomposition build_decomposition(const DataMatrix& x, const ClusterPartition& part,
                                  int k, int k_prime) {
  const int n = static_cast<int>(x.rows());
  if (part.n() != n) throw DimensionError("partition and data sizes differ");
  if (k == k_prime) throw ConfigError("cluster pair must be distinct");
  if (k < 0 || k >= part.k || k_prime < 0 || k_prime >= part.k) {
    throw ConfigError("cluster index out of range");
  }

  auto ik = part.members(k);
  auto ikp = part.members(k_prime);
  const int a = static_cast<int>(ik.size());
  const int b = static_cast<int>(ikp.size());
  if (a == 0 || b == 0) throw DegenerateDataError("empty cluster in tested pair");
  const int m = a + b;
  if (m < 3) {
    throw InsufficientDataError("tested clusters contain m = " + std::to_string(m) +
                                " points; need m >= 3 for (m-2)q degrees of freedom");
  }

  Decomposition d;
  d.m = m;
  d.pair = {k, k_prime};
  d.v = Eigen::VectorXd::Zero(n);
  d.w = Eigen::VectorXd::Zero(n);
  for (int i : ik) d.v(i) = 1.0 / a;
  for (int i : ikp) d.v(i) = -1.0 / b;
  for (int i : ik) d.w(i) = 1.0 / m;
  for (int i : ikp) d.w(i) = 1.0 / m;
  d.v_norm = std::sqrt(1.0 / a + 1.0 / b);

  Eigen::RowVectorXd mean_k = Eigen::RowVectorXd::Zero(x.cols());
  Eigen::RowVectorXd mean_kp = Eigen::RowVectorXd::Zero(x.cols());
  for (int i : ik) mean_k += x.row(i);
  for (int i : ikp) mean_kp += x.row(i);
  mean_k /= a;
  mean_kp /= b;
  Eigen::RowVectorXd diff = mean_k - mean_kp;

  d.p0x = DataMatrix::Zero(n, x.cols());
  d.p1x = DataMatrix::Zero(n, x.cols());
  // P0 X rows are +-(weight) * (mean_k - mean_k'); weights b/m and a/m come
  // from v_i / ||v||^2.
  for (int i : ik) d.p0x.row(i) = (static_cast<double>(b) / m) * diff;
  for (int i : ikp) d.p0x.row(i) = -(static_cast<double>(a) / m) * diff;
  for (int i : ik) d.p1x.row(i) = x.row(i) - mean_k;
  for (int i : ikp) d.p1x.row(i) = x.row(i) - mean_kp;
  d.p2x = x - d.p0x - d.p1x;

  d.norm0 = d.p0x.norm();
  d.norm1 = d.p1x.norm();
  const double scale = x.norm();
  if (d.norm0 <= kDegenerateRel * scale || d.norm1 <= kDegenerateRel * scale) {
    throw DegenerateDataError(
        "projected component with (numerically) zero norm; unit directions undefined");
  }
  d.dir0 = d.p0x / d.norm0;
  d.dir1 = d.p1x / d.norm1;
  return d;
}

double statistic_R(const Decomposition& d) {
  if (d.norm1 <= 0.0) throw DegenerateDataError("statistic_R: zero within-cluster norm");
  double ratio = d.norm0 / d.norm1;
  return (d.m - 2) * ratio * ratio;
}

DataMatrix reconstruct_x_prime(const Decomposition& d, double r) {
  if (!(r > 0.0)) throw ConfigError("reconstruct_x_prime: r must be positive");
  return reconstruct_x_prime_z(d, r / (d.m - 2 + r));
}

DataMatrix reconstruct_x_prime_z(const Decomposition& d, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw ConfigError("reconstruct_x_prime_z: z outside [0,1]");
  const double s = d.conditioned_norm();
  return (std::sqrt(z) * d.dir0 + std::sqrt(1.0 - z) * d.dir1) * s + d.p2x;
}

DataMatrix reconstruct_x_phi(const Decomposition& d, double phi) {
  if (!(phi > 0.0)) throw ConfigError("reconstruct_x_phi: phi must be positive");
  return (phi / d.v_norm) * d.dir0 + d.p1x + d.p2x;
}

SigmaEstimate sigma_hat_all(const DataMatrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw DimensionError("sigma_hat_all needs n >= 2");
  Eigen::RowVectorXd mean = x.colwise().mean();
  double ss = (x.rowwise() - mean).squaredNorm();
  double v2 = ss / static_cast<double>((n - 1) * x.cols());
  if (v2 <= 0.0) throw DegenerateDataError("sigma_hat_all: zero total variation");
  return {std::sqrt(v2), SigmaEstimate::Mode::all};
}

SigmaEstimate sigma_hat_clustered(const DataMatrix& x, const ClusterPartition& part) {
  const Eigen::Index n = x.rows();
  if (part.n() != n) throw DimensionError("partition and data sizes differ");
  if (n <= part.k) throw DimensionError("sigma_hat_clustered needs n > K");
  double ss = 0.0;
  for (int c = 0; c < part.k; ++c) {
    auto idx = part.members(c);
    if (idx.empty()) continue;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
    for (int i : idx) mean += x.row(i);
    mean /= static_cast<double>(idx.size());
    for (int i : idx) ss += (x.row(i) - mean).squaredNorm();
  }
  double v2 = ss / static_cast<double>((n - part.k) * x.cols());
  if (v2 <= 0.0) {
    throw DegenerateDataError("sigma_hat_clustered: zero within-cluster variation");
  }
  return {std::sqrt(v2), SigmaEstimate::Mode::clustered};
}

}  // namespace clustsig
