#pragma once

#include "roughspec/corpus.hpp"
#include "roughspec/simcore.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace roughspec {

struct ClusterExplanation {
  int cluster = 0;
  std::vector<std::pair<std::string, double>> top_terms;  // descending weight, ties by term
  std::vector<std::pair<std::string, double>> member_similarities;  // (doc id, cosine to centroid)
  bool empty = false;  // cluster had no members
};

/// Centroid of each cluster = mean of its members' unit-normalized term
/// vectors. Top terms are the w largest positive centroid coordinates.
/// `p` must cover exactly the documents of `space`; requires w >= 1.
std::vector<ClusterExplanation> explain_clusters(const TermVectorSpace& space, const Partition& p,
                                                 int w = 10);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);
std::vector<std::string> term_set(const ClusterExplanation& e);

struct DriftEntry {
  int before_cluster = 0;
  int after_cluster = 0;
  double jaccard = 0.0;
};

/// Jaccard overlap of top-term sets, cluster by cluster. `after_of_before[c]`
/// names the cluster of `after` matched to cluster c of `before` (-1 skips);
/// when empty, clusters are paired by id.
std::vector<DriftEntry> explanation_drift(const std::vector<ClusterExplanation>& before,
                                          const std::vector<ClusterExplanation>& after,
                                          const std::vector<int>& after_of_before = {});

nlohmann::json to_json(const std::vector<ClusterExplanation>& ex);
std::string to_markdown(const std::vector<ClusterExplanation>& ex);
void write_explanations(const std::vector<ClusterExplanation>& ex, const std::filesystem::path& json_path,
                        const std::filesystem::path& markdown_path);

}  // namespace roughspec
