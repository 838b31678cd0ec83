#ifndef CLUSTSIG_CLUSTER_HPP
#define CLUSTSIG_CLUSTER_HPP

#include <string>
#include <vector>

#include "clustsig/dataset.hpp"

namespace clustsig {

enum class Linkage { average, complete, single };

// Dissimilarity fed to the linkage recurrence. Both are location- and
// scale-invariant selections; `sqeuclidean` matches the convention common
// in R analyses of this kind and generally yields different trees.
enum class Metric { euclidean, sqeuclidean };

Linkage parse_linkage(const std::string& s);
Metric parse_metric(const std::string& s);
const char* linkage_name(Linkage l);
const char* metric_name(Metric m);

struct MergeStep {
  int a;        // surviving cluster id (min original row index of its members)
  int b;        // absorbed cluster id
  double dist;  // linkage dissimilarity at the merge
};

struct ClusterPartition {
  std::vector<int> labels;  // values 0..k-1, canonicalized by first appearance
  int k = 0;
  std::vector<MergeStep> merge_history;

  int n() const { return static_cast<int>(labels.size()); }
  std::vector<int> members(int cluster) const;
  int cluster_size(int cluster) const;
};

// Partition from raw labels (no merge history); used for pre-fixed clusters.
ClusterPartition make_partition(const std::vector<int>& labels);

// Agglomerative clustering on pairwise Euclidean (or squared Euclidean)
// dissimilarities via the Lance-Williams recurrence, cut at K clusters.
//
// Ties: when several pairs attain the minimal linkage value, the merged
// pair is the lexicographically smallest (id_a, id_b), where a cluster's id
// is the smallest original row index among its members. This makes the
// procedure fully deterministic, which the truncation-set scans rely on.
ClusterPartition hclust(const DataMatrix& x, Linkage linkage, int k,
                        Metric metric = Metric::euclidean);

// True iff the two labelings induce the same set partition of the rows
// (label-permutation invariant).
bool partitions_equal(const ClusterPartition& a, const ClusterPartition& b);

}  // namespace clustsig

#endif
