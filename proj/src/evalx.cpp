#include "roughspec/evalx.hpp"

#include "roughspec/errors.hpp"

#include <algorithm>
#include <limits>

namespace roughspec {

namespace {

void check_sizes(const SimilarityMatrix& s, const Partition& p) {
  if (static_cast<Index>(p.size()) != s.size()) {
    throw ValidationError("partition covers " + std::to_string(p.size()) + " items, matrix has " +
                          std::to_string(s.size()));
  }
}

// cut_j = sum_{i in C_j} sum_{l not in C_j} s_il
std::vector<double> cluster_cuts(const SimilarityMatrix& s, const Partition& p) {
  std::vector<double> cut(static_cast<std::size_t>(p.k()), 0.0);
  for (Index i = 0; i < s.size(); ++i) {
    const int ci = p[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (Index l = 0; l < s.size(); ++l) {
      if (p[static_cast<std::size_t>(l)] != ci) acc += s(i, l);
    }
    cut[static_cast<std::size_t>(ci)] += acc;
  }
  return cut;
}

std::vector<double> volumes(const SimilarityMatrix& s, const Partition& p) {
  const Vector d = degree_info(s).degrees;
  std::vector<double> vol(static_cast<std::size_t>(p.k()), 0.0);
  for (Index i = 0; i < s.size(); ++i) vol[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] += d(i);
  return vol;
}

void require_nonempty(const Partition& p) {
  const auto sizes = p.cardinalities();
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (sizes[j] == 0) throw ValidationError("cluster " + std::to_string(j) + " is empty");
  }
}

}  // namespace

double rcut(const SimilarityMatrix& s, const Partition& p) {
  check_sizes(s, p);
  require_nonempty(p);
  const auto cut = cluster_cuts(s, p);
  const auto sizes = p.cardinalities();
  double q = 0.0;
  for (std::size_t j = 0; j < cut.size(); ++j) q += cut[j] / static_cast<double>(sizes[j]);
  return q;
}

double ncut(const SimilarityMatrix& s, const Partition& p) {
  check_sizes(s, p);
  require_nonempty(p);
  const auto cut = cluster_cuts(s, p);
  const auto vol = volumes(s, p);
  double q = 0.0;
  for (std::size_t j = 0; j < cut.size(); ++j) {
    if (!(vol[j] > 0.0)) throw ValidationError("cluster " + std::to_string(j) + " has zero volume");
    q += cut[j] / vol[j];
  }
  return q;
}

double nrcut(const SimilarityMatrix& s, const Partition& p) {
  check_sizes(s, p);
  require_nonempty(p);
  const auto cut = cluster_cuts(s, p);
  const auto vol = volumes(s, p);
  const auto sizes = p.cardinalities();
  double q = 0.0;
  for (std::size_t j = 0; j < cut.size(); ++j) q += cut[j] / (static_cast<double>(sizes[j]) + vol[j]);
  return q;
}

CutCriteria cut_criteria(const SimilarityMatrix& s, const Partition& p) {
  return {rcut(s, p), ncut(s, p), nrcut(s, p)};
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

ConfusionMatrix make_confusion(std::vector<std::vector<std::int64_t>> counts) {
  ConfusionMatrix cm;
  const std::size_t cols = counts.empty() ? 0 : counts.front().size();
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r].size() != cols) throw ValidationError("confusion matrix rows differ in length");
    for (auto c : counts[r]) {
      if (c < 0) throw ValidationError("confusion matrix has a negative count in row " + std::to_string(r));
    }
  }
  cm.counts = std::move(counts);
  for (std::size_t r = 0; r < cm.rows(); ++r) cm.row_names.push_back(std::to_string(r));
  for (std::size_t c = 0; c < cols; ++c) cm.col_names.push_back(std::to_string(c));
  return cm;
}

ConfusionMatrix confusion(std::span<const int> truth, const Partition& pred,
                          std::vector<std::string> row_names) {
  if (truth.size() != pred.size()) {
    throw ValidationError("true labels have length " + std::to_string(truth.size()) +
                          ", predicted " + std::to_string(pred.size()));
  }
  int rows = static_cast<int>(row_names.size());
  for (int t : truth) {
    if (t < 0) throw ValidationError("negative true label");
    rows = std::max(rows, t + 1);
  }
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(rows),
                                                std::vector<std::int64_t>(static_cast<std::size_t>(pred.k()), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
  }
  auto cm = make_confusion(std::move(counts));
  for (std::size_t r = 0; r < row_names.size(); ++r) cm.row_names[r] = row_names[r];
  return cm;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const std::size_t r = weight.size();
  const std::size_t c = r ? weight.front().size() : 0;
  const std::size_t n = std::max(r, c);
  if (n == 0) return {};
  double w_max = 0.0;
  for (const auto& row : weight) {
    for (double w : row) w_max = std::max(w_max, w);
  }
  // square cost matrix, 1-based with potentials (classic O(n^3) formulation)
  auto cost = [&](std::size_t i, std::size_t j) {
    const double w = (i < r && j < c) ? weight[i][j] : 0.0;
    return w_max - w;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(r, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match_col[j];
    if (i >= 1 && i - 1 < r && j - 1 < c) row_to_col[i - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

std::int64_t best_matching_total(const ConfusionMatrix& cm) {
  // iterate over the longer side, subset-mask the shorter one
  const bool transpose = cm.cols() > cm.rows();
  const std::size_t outer = transpose ? cm.cols() : cm.rows();
  const std::size_t inner = transpose ? cm.rows() : cm.cols();
  if (inner > 20) throw ValidationError("best_matching_total: table too large for exact search");
  auto at = [&](std::size_t o, std::size_t i) {
    return transpose ? cm.counts[i][o] : cm.counts[o][i];
  };
  const std::size_t masks = std::size_t{1} << inner;
  std::vector<std::int64_t> best(masks, std::numeric_limits<std::int64_t>::min());
  best[0] = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    std::vector<std::int64_t> next = best;  // outer item left unmatched
    for (std::size_t mask = 0; mask < masks; ++mask) {
      if (best[mask] == std::numeric_limits<std::int64_t>::min()) continue;
      for (std::size_t i = 0; i < inner; ++i) {
        if (mask & (std::size_t{1} << i)) continue;
        const std::size_t nm = mask | (std::size_t{1} << i);
        next[nm] = std::max(next[nm], best[mask] + at(o, i));
      }
    }
    best = std::move(next);
  }
  return *std::max_element(best.begin(), best.end());
}

MatchScore match_and_score(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (cm.rows() == 0 || cm.cols() == 0 || total == 0) {
    throw ValidationError("match_and_score: empty confusion matrix");
  }
  std::vector<std::vector<double>> w(cm.rows(), std::vector<double>(cm.cols()));
  for (std::size_t r = 0; r < cm.rows(); ++r) {
    for (std::size_t c = 0; c < cm.cols(); ++c) w[r][c] = static_cast<double>(cm.counts[r][c]);
  }
  const auto row_to_col = max_weight_assignment(w);

  MatchScore score;
  score.total = total;
  score.mapping.assign(cm.cols(), -1);
  std::vector<std::int64_t> col_size(cm.cols(), 0);
  for (std::size_t r = 0; r < cm.rows(); ++r) {
    for (std::size_t c = 0; c < cm.cols(); ++c) col_size[c] += cm.counts[r][c];
  }
  double f1_acc = 0.0;
  for (std::size_t r = 0; r < cm.rows(); ++r) {
    std::int64_t support = 0;
    for (auto v : cm.counts[r]) support += v;
    const int c = row_to_col[r];
    if (c < 0) continue;
    score.mapping[static_cast<std::size_t>(c)] = static_cast<int>(r);
    const std::int64_t hit = cm.counts[r][static_cast<std::size_t>(c)];
    score.correct += hit;
    const std::int64_t denom = support + col_size[static_cast<std::size_t>(c)];
    if (denom > 0) f1_acc += static_cast<double>(support) * 2.0 * static_cast<double>(hit) / static_cast<double>(denom);
  }
  if (std::max(cm.rows(), cm.cols()) <= 10 && best_matching_total(cm) != score.correct) {
    throw NumericalError("Hungarian matching disagrees with exact subset search");
  }
  score.relative_error = 1.0 - static_cast<double>(score.correct) / static_cast<double>(total);
  score.f1 = f1_acc / static_cast<double>(total);
  return score;
}

std::vector<EquivalencePair> EquivalenceReport::violations() const {
  std::vector<EquivalencePair> out;
  for (const auto& p : pairs) {
    if (!p.holds) out.push_back(p);
  }
  return out;
}

EquivalenceReport equivalence_diagnostic(const SimilarityMatrix& s, const Partition& p) {
  check_sizes(s, p);
  require_nonempty(p);
  const int k = p.k();
  EquivalenceReport rep;
  rep.sizes = p.cardinalities();
  std::vector<double> within(static_cast<std::size_t>(k), 0.0);
  double cross = 0.0;
  double cross_pairs = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    const int ci = p[static_cast<std::size_t>(i)];
    for (Index l = 0; l < s.size(); ++l) {
      if (l == i) continue;
      if (p[static_cast<std::size_t>(l)] == ci) {
        within[static_cast<std::size_t>(ci)] += s(i, l);
      } else {
        cross += s(i, l);
        cross_pairs += 1.0;
      }
    }
  }
  for (int j = 0; j < k; ++j) {
    const double nj = static_cast<double>(rep.sizes[static_cast<std::size_t>(j)]);
    rep.within_mean.push_back(nj > 1 ? within[static_cast<std::size_t>(j)] / (nj * (nj - 1)) : 0.0);
  }
  rep.s0 = cross_pairs > 0 ? cross / cross_pairs : 0.0;
  if (rep.s0 == 0.0) {
    rep.exact_block = true;
    return rep;
  }
  const double n = static_cast<double>(s.size());
  for (int j = 0; j < k; ++j) {
    for (int jo = 0; jo < k; ++jo) {
      if (jo == j) continue;
      const double nj = static_cast<double>(rep.sizes[static_cast<std::size_t>(j)]);
      const double njo = static_cast<double>(rep.sizes[static_cast<std::size_t>(jo)]);
      const double sj = rep.within_mean[static_cast<std::size_t>(j)];
      const double sjo = rep.within_mean[static_cast<std::size_t>(jo)];
      EquivalencePair pr;
      pr.j = j;
      pr.j_other = jo;
      pr.lhs = (sj * sj) / (rep.s0 * rep.s0);
      pr.rhs = ((nj - 1) * sj + (n - nj) * rep.s0) / ((njo - 1) * sjo + (n - nj) * rep.s0);
      pr.holds = pr.lhs > pr.rhs;
      rep.pairs.push_back(pr);
    }
  }
  return rep;
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"rows", cm.row_names}, {"cols", cm.col_names}, {"counts", cm.counts}};
}

nlohmann::json to_json(const MatchScore& m) {
  return {{"mapping", m.mapping},
          {"correct", m.correct},
          {"total", m.total},
          {"relative_error", m.relative_error},
          {"f1", m.f1}};
}

nlohmann::json to_json(const CutCriteria& c) {
  return {{"rcut", c.rcut}, {"ncut", c.ncut}, {"nrcut", c.nrcut}};
}

nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json j{{"exact_block", r.exact_block},
                   {"s0", r.s0},
                   {"within_mean", r.within_mean},
                   {"sizes", r.sizes}};
  if (r.exact_block) {
    j["note"] = "exact block case, all methods equivalent";
    return j;
  }
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"j", p.j}, {"j_other", p.j_other}, {"lhs", p.lhs}, {"rhs", p.rhs}, {"holds", p.holds}});
  }
  return j;
}

}  // namespace roughspec
