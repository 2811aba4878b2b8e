#include "roughspec/explain.hpp"

#include "roughspec/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace roughspec {

std::vector<ClusterExplanation> explain_clusters(const TermVectorSpace& space, const Partition& p,
                                                 int w) {
  if (w < 1) throw ValidationError("explain: w must be >= 1, got " + std::to_string(w));
  if (static_cast<Index>(p.size()) != space.size()) {
    throw ValidationError("explain: partition covers " + std::to_string(p.size()) +
                          " documents, term space has " + std::to_string(space.size()));
  }
  const Index v = space.doc_vectors.cols();
  Matrix unit = space.doc_vectors;
  for (Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm > 0.0) unit.row(i) /= norm;
  }

  std::vector<ClusterExplanation> out;
  for (int c = 0; c < p.k(); ++c) {
    ClusterExplanation ex;
    ex.cluster = c;
    const auto members = p.members(c);
    if (members.empty()) {
      ex.empty = true;
      out.push_back(std::move(ex));
      continue;
    }
    Vector centroid = Vector::Zero(v);
    for (Index i : members) centroid += unit.row(i).transpose();
    centroid /= static_cast<double>(members.size());

    std::vector<Index> order;
    for (Index t = 0; t < v; ++t) {
      if (centroid(t) > 0.0) order.push_back(t);
    }
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (centroid(a) != centroid(b)) return centroid(a) > centroid(b);
      return space.vocabulary[static_cast<std::size_t>(a)] < space.vocabulary[static_cast<std::size_t>(b)];
    });
    if (order.size() > static_cast<std::size_t>(w)) order.resize(static_cast<std::size_t>(w));
    for (Index t : order) ex.top_terms.emplace_back(space.vocabulary[static_cast<std::size_t>(t)], centroid(t));

    const double cnorm = centroid.norm();
    for (Index i : members) {
      const double cos = cnorm > 0.0 ? unit.row(i).dot(centroid) / cnorm : 0.0;
      ex.member_similarities.emplace_back(space.doc_ids[static_cast<std::size_t>(i)], std::max(0.0, cos));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

std::vector<std::string> term_set(const ClusterExplanation& e) {
  std::vector<std::string> terms;
  for (const auto& [t, _] : e.top_terms) terms.push_back(t);
  return terms;
}

std::vector<DriftEntry> explanation_drift(const std::vector<ClusterExplanation>& before,
                                          const std::vector<ClusterExplanation>& after,
                                          const std::vector<int>& after_of_before) {
  if (!after_of_before.empty() && after_of_before.size() != before.size()) {
    throw ValidationError("explanation_drift: mapping length differs from cluster count");
  }
  std::vector<DriftEntry> out;
  for (std::size_t c = 0; c < before.size(); ++c) {
    const int target = after_of_before.empty() ? static_cast<int>(c) : after_of_before[c];
    if (target < 0 || target >= static_cast<int>(after.size())) continue;
    out.push_back({static_cast<int>(c), target,
                   jaccard(term_set(before[c]), term_set(after[static_cast<std::size_t>(target)]))});
  }
  return out;
}

nlohmann::json to_json(const std::vector<ClusterExplanation>& ex) {
  auto arr = nlohmann::json::array();
  for (const auto& e : ex) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [t, wt] : e.top_terms) terms.push_back({{"term", t}, {"weight", wt}});
    nlohmann::json members = nlohmann::json::array();
    for (const auto& [id, sim] : e.member_similarities) members.push_back({{"id", id}, {"similarity", sim}});
    arr.push_back({{"cluster", e.cluster}, {"empty", e.empty}, {"top_terms", terms}, {"members", members}});
  }
  return {{"clusters", arr}};
}

std::string to_markdown(const std::vector<ClusterExplanation>& ex) {
  std::ostringstream md;
  md << "# Cluster explanations\n";
  char buf[64];
  for (const auto& e : ex) {
    md << "\n## Cluster " << e.cluster << "\n\n";
    if (e.empty) {
      md << "_empty cluster_\n";
      continue;
    }
    md << "Top words: ";
    for (std::size_t i = 0; i < e.top_terms.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.4f", e.top_terms[i].second);
      md << (i ? ", " : "") << e.top_terms[i].first << " (" << buf << ")";
    }
    double mean = 0.0;
    for (const auto& [_, s] : e.member_similarities) mean += s;
    mean /= static_cast<double>(e.member_similarities.size());
    std::snprintf(buf, sizeof buf, "%.4f", mean);
    md << "\n\nMembers: " << e.member_similarities.size() << ", mean cosine to centroid " << buf << "\n";
  }
  return md.str();
}

void write_explanations(const std::vector<ClusterExplanation>& ex, const std::filesystem::path& json_path,
                        const std::filesystem::path& markdown_path) {
  if (!json_path.empty()) {
    std::ofstream js(json_path);
    if (!js) throw ValidationError("cannot write " + json_path.string());
    js << to_json(ex).dump(2) << '\n';
  }
  if (!markdown_path.empty()) {
    std::ofstream md(markdown_path);
    if (!md) throw ValidationError("cannot write " + markdown_path.string());
    md << to_markdown(ex);
  }
}

}  // namespace roughspec
