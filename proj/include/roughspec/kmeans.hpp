#pragma once

#include "roughspec/simcore.hpp"

#include <cstdint>

namespace roughspec {

struct KMeansConfig {
  int k = 2;
  int restarts = 10;
  int max_iter = 100;
  double tol = 1e-9;  // relative objective improvement that ends a restart
  std::uint64_t seed = 0;

  void validate() const;
};

struct KMeansResult {
  Partition partition{{}, 1};
  Matrix centroids;  // k x d
  double objective = 0.0;  // sum_i w_i ||x_i - mu(C_i)||^2
  int iterations_run = 0;
  int restart_chosen = 0;
};

/// Lloyd iterations from k-means++ seeds, best of cfg.restarts (restart r uses
/// seed + r). Points are visited in lexicographic coordinate order while
/// seeding, so permuting the input permutes the labels. Nearest-centroid ties
/// go to the lowest centroid index; an emptied cluster takes the point
/// farthest from its centroid.
///
/// Requires unweighted (or equally weighted) input and k <= n.
KMeansResult kmeans(const Embedding& e, const KMeansConfig& cfg);

/// Same algorithm with weighted centroids mu = sum w_i x_i / sum w_i and a
/// weighted objective; k-means++ sampling probabilities are scaled by w.
KMeansResult weighted_kmeans(const Embedding& e, const KMeansConfig& cfg);

/// Dispatches on the presence of weights.
KMeansResult cluster_embedding(const Embedding& e, const KMeansConfig& cfg);

/// Weighted means per cluster; rows of empty clusters are zero.
Matrix weighted_centroids(const Matrix& coords, const Vector& weights, const Partition& p);

double weighted_objective(const Matrix& coords, const Vector& weights, const Partition& p,
                          const Matrix& centroids);

}  // namespace roughspec
