#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roughspec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric n x n matrix of pairwise similarities in [0, 1] with a zero
/// diagonal. Validated on construction and immutable afterwards.
class SimilarityMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-10;

  /// Throws ValidationError naming the first offending cell. Pairs that differ
  /// by at most kSymmetryTolerance are replaced by their mean.
  explicit SimilarityMatrix(Matrix entries, std::vector<std::string> item_ids = {});

  Index size() const { return entries_.rows(); }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  const Matrix& entries() const { return entries_; }

  const std::vector<std::string>& item_ids() const { return item_ids_; }
  bool has_item_ids() const { return !item_ids_.empty(); }
  /// External id of item i, or its decimal index when no ids are attached.
  std::string id_of(Index i) const;

  /// Principal submatrix on `keep` (in the given order); ids follow along.
  SimilarityMatrix submatrix(std::span<const Index> keep) const;

 private:
  Matrix entries_;
  std::vector<std::string> item_ids_;
};

struct DegreeInfo {
  Vector degrees;
  /// Degrees with the diagonal counted as 1, i.e. degrees + 1.
  Vector augmented_degrees;
};

/// Row sums accumulated in ascending column order.
DegreeInfo degree_info(const SimilarityMatrix& s);

/// Assignment of n items to k clusters. Empty clusters are representable.
class Partition {
 public:
  Partition(std::vector<int> labels, int k);
  /// k = max label + 1.
  static Partition from_labels(std::vector<int> labels);

  int k() const { return k_; }
  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<Index> cardinalities() const;
  bool has_empty_cluster() const;
  std::vector<Index> members(int cluster) const;

 private:
  std::vector<int> labels_;
  int k_;
};

/// n points in d dimensions, optionally weighted.
struct Embedding {
  Matrix coords;                 // n x d, one row per item
  std::optional<Vector> weights;  // strictly positive when present
  std::string kind;
  /// Gower embeddings only: sum of |lambda| over dropped negative eigenvalues.
  double dropped_mass = 0.0;
  double trace = 0.0;

  Index size() const { return coords.rows(); }
  Index dimension() const { return coords.cols(); }
  /// Throws ValidationError when coords are empty/non-finite or weights invalid.
  void validate() const;
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column i belongs to values[i], unit length
};

/// Dense symmetric eigendecomposition. Rejects inputs that are asymmetric
/// beyond 1e-10 or contain non-finite values.
EigenDecomposition symmetric_eig(const Matrix& matrix);

/// Similarity CSV: first line `n=<count>`, then n rows of n comma-separated
/// values. Item ids, when present, live in a sidecar `<path>.ids.json`.
SimilarityMatrix read_similarity_csv(const std::filesystem::path& path);
void write_similarity_csv(const SimilarityMatrix& s, const std::filesystem::path& path);
std::filesystem::path ids_sidecar_path(const std::filesystem::path& csv_path);

/// `# kind=<tag>` line, header `dim_1..dim_d[,weight]`, one row per item.
void write_embedding_csv(const Embedding& e, const std::filesystem::path& path);

/// %.17g, round-trips exactly through strtod.
std::string format_double(double v);

}  // namespace roughspec
