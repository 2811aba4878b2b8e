#include "roughspec/kmeans.hpp"

#include "roughspec/errors.hpp"
#include "roughspec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace roughspec {

void KMeansConfig::validate() const {
  if (k < 1) throw ValidationError("k-means needs k >= 1");
  if (restarts < 1) throw ValidationError("k-means needs restarts >= 1");
  if (max_iter < 1) throw ValidationError("k-means needs max_iter >= 1");
  if (!(tol > 0.0)) throw ValidationError("k-means needs tol > 0");
}

Matrix weighted_centroids(const Matrix& coords, const Vector& weights, const Partition& p) {
  Matrix c = Matrix::Zero(p.k(), coords.cols());
  Vector mass = Vector::Zero(p.k());
  for (Index i = 0; i < coords.rows(); ++i) {
    const int j = p[static_cast<std::size_t>(i)];
    c.row(j) += weights(i) * coords.row(i);
    mass(j) += weights(i);
  }
  for (Index j = 0; j < p.k(); ++j) {
    if (mass(j) > 0.0) c.row(j) /= mass(j);
  }
  return c;
}

double weighted_objective(const Matrix& coords, const Vector& weights, const Partition& p,
                          const Matrix& centroids) {
  double obj = 0.0;
  for (Index i = 0; i < coords.rows(); ++i) {
    obj += weights(i) * (coords.row(i) - centroids.row(p[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return obj;
}

namespace {

struct RunResult {
  std::vector<int> labels;
  int iterations = 0;
  double objective = 0.0;
};

class Lloyd {
 public:
  Lloyd(const Matrix& x, const Vector& w, int k, const KMeansConfig& cfg)
      : x_(x), w_(w), k_(k), cfg_(cfg), n_(x.rows()) {}

  RunResult run(rng::Engine& eng) {
    Matrix c = seed_plus_plus(eng);
    std::vector<int> labels(static_cast<std::size_t>(n_));
    assign(c, labels);
    repair_empty(c, labels);

    RunResult out;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg_.max_iter; ++it) {
      out.iterations = it;
      c = centroids(labels);
      const double obj = objective(c, labels);
      if (obj > prev * (1.0 + 1e-12) + 1e-300) {
        throw NumericalError("k-means objective increased from " + std::to_string(prev) + " to " +
                             std::to_string(obj) + " at iteration " + std::to_string(it));
      }
      out.objective = obj;
      std::vector<int> next = labels;
      assign(c, next);
      repair_empty(c, next);
      if (next == labels) break;  // fixed point
      const bool stalled = std::isfinite(prev) && prev - obj <= cfg_.tol * prev;
      labels = std::move(next);
      if (stalled || it == cfg_.max_iter) {
        c = centroids(labels);
        out.objective = objective(c, labels);
        break;
      }
      prev = obj;
    }
    out.labels = std::move(labels);
    return out;
  }

 private:
  double sq(Index i, const Matrix& c, Index j) const { return (x_.row(i) - c.row(j)).squaredNorm(); }

  Matrix seed_plus_plus(rng::Engine& eng) const {
    Matrix c(k_, x_.cols());
    std::vector<double> prob(static_cast<std::size_t>(n_));
    std::vector<bool> chosen(static_cast<std::size_t>(n_), false);
    for (Index i = 0; i < n_; ++i) prob[static_cast<std::size_t>(i)] = w_(i);
    Index first = static_cast<Index>(rng::categorical(eng, prob));
    c.row(0) = x_.row(first);
    chosen[static_cast<std::size_t>(first)] = true;

    Vector best = Vector::Constant(n_, std::numeric_limits<double>::infinity());
    for (int j = 1; j < k_; ++j) {
      double total = 0.0;
      for (Index i = 0; i < n_; ++i) {
        best(i) = std::min(best(i), sq(i, c, j - 1));
        prob[static_cast<std::size_t>(i)] = w_(i) * best(i);
        total += prob[static_cast<std::size_t>(i)];
      }
      Index pick = 0;
      if (total > 0.0) {
        pick = static_cast<Index>(rng::categorical(eng, prob));
      } else {
        // fewer distinct points than k: take the first unused one
        while (pick < n_ - 1 && chosen[static_cast<std::size_t>(pick)]) ++pick;
      }
      chosen[static_cast<std::size_t>(pick)] = true;
      c.row(j) = x_.row(pick);
    }
    return c;
  }

  void assign(const Matrix& c, std::vector<int>& labels) const {
    for (Index i = 0; i < n_; ++i) {
      int arg = 0;
      double best = sq(i, c, 0);
      for (int j = 1; j < k_; ++j) {
        const double d = sq(i, c, j);
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      labels[static_cast<std::size_t>(i)] = arg;
    }
  }

  void repair_empty(Matrix& c, std::vector<int>& labels) const {
    while (true) {
      std::vector<Index> counts(static_cast<std::size_t>(k_), 0);
      for (int l : labels) ++counts[static_cast<std::size_t>(l)];
      const auto empty = std::find(counts.begin(), counts.end(), 0);
      if (empty == counts.end()) return;
      const int target = static_cast<int>(empty - counts.begin());
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n_; ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(l)] < 2) continue;
        const double d = sq(i, c, l);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) return;  // k > n cannot happen after validation
      labels[static_cast<std::size_t>(far)] = target;
      c.row(target) = x_.row(far);
    }
  }

  Matrix centroids(const std::vector<int>& labels) const {
    return weighted_centroids(x_, w_, Partition(labels, k_));
  }

  double objective(const Matrix& c, const std::vector<int>& labels) const {
    double obj = 0.0;
    for (Index i = 0; i < n_; ++i) obj += w_(i) * sq(i, c, labels[static_cast<std::size_t>(i)]);
    return obj;
  }

  const Matrix& x_;
  const Vector& w_;
  int k_;
  const KMeansConfig& cfg_;
  Index n_;
};

KMeansResult run_kmeans(const Embedding& e, const Vector& weights, const KMeansConfig& cfg) {
  cfg.validate();
  e.validate();
  const Index n = e.size();
  if (cfg.k > n) {
    throw ValidationError("k-means: k=" + std::to_string(cfg.k) + " exceeds point count " +
                          std::to_string(n));
  }

  // canonical order: lexicographic by coordinates, then weight, then index
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index c = 0; c < e.dimension(); ++c) {
      if (e.coords(a, c) != e.coords(b, c)) return e.coords(a, c) < e.coords(b, c);
    }
    if (weights(a) != weights(b)) return weights(a) < weights(b);
    return a < b;
  });
  Matrix x(n, e.dimension());
  Vector w(n);
  const double w_max = weights.maxCoeff();
  for (Index r = 0; r < n; ++r) {
    x.row(r) = e.coords.row(order[static_cast<std::size_t>(r)]);
    w(r) = weights(order[static_cast<std::size_t>(r)]) / w_max;
  }

  Lloyd lloyd(x, w, cfg.k, cfg);
  RunResult best;
  int best_restart = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    auto eng = rng::stream(cfg.seed + static_cast<std::uint64_t>(r), 0);
    RunResult res = lloyd.run(eng);
    if (best_restart < 0 || res.objective < best.objective) {
      best = std::move(res);
      best_restart = r;
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    labels[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
        best.labels[static_cast<std::size_t>(r)];
  }
  Partition p(std::move(labels), cfg.k);
  Vector unit_w = weights / w_max;
  Matrix centroids = weighted_centroids(e.coords, unit_w, p);
  const double objective = weighted_objective(e.coords, weights, p, centroids);
  return {std::move(p), std::move(centroids), objective, best.iterations, best_restart};
}

}  // namespace

KMeansResult kmeans(const Embedding& e, const KMeansConfig& cfg) {
  if (e.weights && e.weights->size() > 0 &&
      e.weights->maxCoeff() != e.weights->minCoeff()) {
    throw ValidationError("kmeans: embedding carries unequal weights; use weighted_kmeans");
  }
  return run_kmeans(e, Vector::Ones(e.size()), cfg);
}

KMeansResult weighted_kmeans(const Embedding& e, const KMeansConfig& cfg) {
  if (!e.weights) throw ValidationError("weighted_kmeans: embedding has no weights");
  e.validate();
  return run_kmeans(e, *e.weights, cfg);
}

KMeansResult cluster_embedding(const Embedding& e, const KMeansConfig& cfg) {
  return e.weights ? weighted_kmeans(e, cfg) : kmeans(e, cfg);
}

}  // namespace roughspec
