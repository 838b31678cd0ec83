#include "clustsig/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clustsig/errors.hpp"

namespace clustsig {

Linkage parse_linkage(const std::string& s) {
  if (s == "average" || s == "avg") return Linkage::average;
  if (s == "complete") return Linkage::complete;
  if (s == "single") return Linkage::single;
  throw ConfigError("unknown linkage: " + s);
}

Metric parse_metric(const std::string& s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "sqeuclidean") return Metric::sqeuclidean;
  throw ConfigError("unknown metric: " + s);
}

const char* linkage_name(Linkage l) {
  switch (l) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "?";
}

const char* metric_name(Metric m) {
  return m == Metric::euclidean ? "euclidean" : "sqeuclidean";
}

std::vector<int> ClusterPartition::members(int cluster) const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i) {
    if (labels[i] == cluster) out.push_back(i);
  }
  return out;
}

int ClusterPartition::cluster_size(int cluster) const {
  int c = 0;
  for (int l : labels) c += (l == cluster);
  return c;
}

namespace {

std::vector<int> canonicalize(const std::vector<int>& raw, int* k_out) {
  std::vector<int> out(raw.size());
  std::vector<int> remap;
  for (size_t i = 0; i < raw.size(); ++i) {
    int r = raw[i];
    int mapped = -1;
    for (size_t j = 0; j < remap.size(); ++j) {
      if (remap[j] == r) {
        mapped = static_cast<int>(j);
        break;
      }
    }
    if (mapped < 0) {
      mapped = static_cast<int>(remap.size());
      remap.push_back(r);
    }
    out[i] = mapped;
  }
  *k_out = static_cast<int>(remap.size());
  return out;
}

}  // namespace

ClusterPartition make_partition(const std::vector<int>& labels) {
  ClusterPartition p;
  p.labels = canonicalize(labels, &p.k);
  return p;
}

ClusterPartition hclust(const DataMatrix& x, Linkage linkage, int k, Metric metric) {
  const int n = static_cast<int>(x.rows());
  if (k < 1 || k > n) {
    throw ConfigError("hclust: K must be in [1, n], got " + std::to_string(k));
  }

  std::vector<double> d(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double sq = (x.row(i) - x.row(j)).squaredNorm();
      double v = metric == Metric::sqeuclidean ? sq : std::sqrt(sq);
      d[static_cast<size_t>(i) * n + j] = v;
      d[static_cast<size_t>(j) * n + i] = v;
    }
  }

  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;
  std::vector<int> size(n, 1);
  std::vector<int> memb(n);
  for (int i = 0; i < n; ++i) memb[i] = i;

  ClusterPartition part;
  part.merge_history.reserve(n - k);

  for (int step = 0; step < n - k; ++step) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    // Scanning representatives in ascending order with a strict '<' keeps
    // the first (lexicographically smallest) pair among ties.
    for (size_t ai = 0; ai + 1 < active.size(); ++ai) {
      const int i = active[ai];
      const double* row = d.data() + static_cast<size_t>(i) * n;
      for (size_t aj = ai + 1; aj < active.size(); ++aj) {
        const int j = active[aj];
        if (row[j] < best) {
          best = row[j];
          bi = i;
          bj = j;
        }
      }
    }

    for (int h : active) {
      if (h == bi || h == bj) continue;
      double dih = d[static_cast<size_t>(bi) * n + h];
      double djh = d[static_cast<size_t>(bj) * n + h];
      double nv;
      switch (linkage) {
        case Linkage::single: nv = std::min(dih, djh); break;
        case Linkage::complete: nv = std::max(dih, djh); break;
        case Linkage::average:
        default:
          nv = (size[bi] * dih + size[bj] * djh) / (size[bi] + size[bj]);
          break;
      }
      d[static_cast<size_t>(bi) * n + h] = nv;
      d[static_cast<size_t>(h) * n + bi] = nv;
    }

    part.merge_history.push_back({bi, bj, best});
    size[bi] += size[bj];
    active.erase(std::find(active.begin(), active.end(), bj));
    for (int& m : memb) {
      if (m == bj) m = bi;
    }
  }

  part.labels = canonicalize(memb, &part.k);
  return part;
}

bool partitions_equal(const ClusterPartition& a, const ClusterPartition& b) {
  if (a.labels.size() != b.labels.size()) {
    throw DimensionError("partitions_equal: label vectors differ in length");
  }
  // Same partition iff labels are in bijection.
  std::vector<int> fwd(a.k, -1), rev(b.k, -1);
  for (size_t i = 0; i < a.labels.size(); ++i) {
    int la = a.labels[i], lb = b.labels[i];
    if (la < 0 || la >= a.k || lb < 0 || lb >= b.k) return false;
    if (fwd[la] == -1) fwd[la] = lb;
    else if (fwd[la] != lb) return false;
    if (rev[lb] == -1) rev[lb] = la;
    else if (rev[lb] != la) return false;
  }
  return true;
}

}  // namespace clustsig
