#pragma once

#include "roughspec/simcore.hpp"

#include "json.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace roughspec {

/// sum_j (1/n_j) * cut(C_j). Throws ValidationError on an empty cluster.
double rcut(const SimilarityMatrix& s, const Partition& p);
/// sum_j (1/V_j) * cut(C_j), V_j the cluster volume. Throws on zero volume.
double ncut(const SimilarityMatrix& s, const Partition& p);
/// sum_j 1/(n_j + V_j) * cut(C_j).
double nrcut(const SimilarityMatrix& s, const Partition& p);

struct CutCriteria {
  double rcut = 0.0;
  double ncut = 0.0;
  double nrcut = 0.0;
};
CutCriteria cut_criteria(const SimilarityMatrix& s, const Partition& p);

/// Rows are true labels, columns predicted clusters.
struct ConfusionMatrix {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return counts.empty() ? 0 : counts.front().size(); }
  std::int64_t total() const;
};

/// Builds the table from raw counts (validated rectangular and nonnegative).
ConfusionMatrix make_confusion(std::vector<std::vector<std::int64_t>> counts);

/// Throws ValidationError on a length mismatch or a negative true label.
ConfusionMatrix confusion(std::span<const int> truth, const Partition& pred,
                          std::vector<std::string> row_names = {});

struct MatchScore {
  std::vector<int> mapping;  // predicted column -> true row, -1 when unmatched
  std::int64_t correct = 0;
  std::int64_t total = 0;
  double relative_error = 0.0;  // 1 - correct / total
  double f1 = 0.0;              // support-weighted F1 of each true label vs its matched column
};

/// Optimal injective matching of predicted clusters to true labels.
MatchScore match_and_score(const ConfusionMatrix& cm);

/// Maximum-weight assignment on an r x c table (Hungarian method on the
/// padded square). Returns, for every row, its column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight);

/// Exact best matched total via dynamic programming over column subsets.
/// Requires min(r, c) <= 20.
std::int64_t best_matching_total(const ConfusionMatrix& cm);

struct EquivalencePair {
  int j = 0;
  int j_other = 0;
  double lhs = 0.0;  // s_j^2 / s_0^2
  double rhs = 0.0;
  bool holds = false;
};

/// Checks s_j^2/s_0^2 > ((n_j-1)s_j + (n-n_j)s_0) / ((n_j'-1)s_j' + (n-n_j)s_0)
/// for every ordered cluster pair. s_j is the mean within-cluster similarity
/// (0 for singletons), s_0 the mean cross-cluster similarity.
struct EquivalenceReport {
  bool exact_block = false;  // s_0 == 0: every GSC variant agrees, nothing to compare
  double s0 = 0.0;
  std::vector<double> within_mean;
  std::vector<Index> sizes;
  std::vector<EquivalencePair> pairs;

  std::vector<EquivalencePair> violations() const;
};

EquivalenceReport equivalence_diagnostic(const SimilarityMatrix& s, const Partition& p);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const MatchScore& m);
nlohmann::json to_json(const CutCriteria& c);
nlohmann::json to_json(const EquivalenceReport& r);

}  // namespace roughspec
