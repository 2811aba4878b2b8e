#include "roughspec/roughfilter.hpp"

#include "roughspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace roughspec {

FilterProfile similarity_profile(const SimilarityMatrix& s, double q) {
  const Index n = s.size();
  if (!(q > 0.0 && q <= 0.5)) throw ValidationError("profile fraction q must lie in (0, 0.5]");
  if (n < 2) throw ValidationError("similarity profile needs at least 2 documents");

  FilterProfile prof;
  prof.q = q;
  // the epsilon keeps e.g. 0.05 * 20 from rounding up to 2
  prof.count_per_side =
      std::max<Index>(1, static_cast<Index>(std::ceil(q * static_cast<double>(n - 1) - 1e-9)));
  const Index m = prof.count_per_side;
  prof.records.resize(static_cast<std::size_t>(n));

  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (Index l = 0; l < n; ++l) {
      if (l != i) row[pos++] = s(i, l);
    }
    std::sort(row.begin(), row.end());
    double bot = 0.0;
    double top = 0.0;
    for (Index c = 0; c < m; ++c) {
      bot += row[static_cast<std::size_t>(c)];
      top += row[row.size() - 1 - static_cast<std::size_t>(c)];
    }
    auto& rec = prof.records[static_cast<std::size_t>(i)];
    rec.doc = i;
    rec.avg_top = top / static_cast<double>(m);
    rec.avg_bot = bot / static_cast<double>(m);
    rec.avg_diff = rec.avg_top - rec.avg_bot;
  }

  prof.sorted_order.resize(static_cast<std::size_t>(n));
  std::iota(prof.sorted_order.begin(), prof.sorted_order.end(), Index{0});
  std::stable_sort(prof.sorted_order.begin(), prof.sorted_order.end(), [&](Index a, Index b) {
    return prof.records[static_cast<std::size_t>(a)].avg_diff <
           prof.records[static_cast<std::size_t>(b)].avg_diff;
  });
  return prof;
}

std::vector<Index> removed_at(const FilterProfile& profile, double t) {
  std::vector<Index> out;
  for (const auto& r : profile.records) {
    if (r.avg_diff < t) out.push_back(r.doc);
  }
  return out;
}

FilterResult filter_boundary(const SimilarityMatrix& s, const FilterProfile& profile, double t) {
  if (static_cast<Index>(profile.records.size()) != s.size()) {
    throw ValidationError("profile covers " + std::to_string(profile.records.size()) +
                          " documents, matrix has " + std::to_string(s.size()));
  }
  if (!(t >= 0.0)) throw ValidationError("filter threshold must be >= 0");
  std::vector<Index> kept;
  std::vector<Index> removed;
  for (const auto& r : profile.records) {
    (r.avg_diff >= t ? kept : removed).push_back(r.doc);
  }
  if (kept.empty()) {
    throw ValidationError("threshold " + format_double(t) + " removes all " +
                          std::to_string(s.size()) + " documents; nothing left to cluster");
  }
  return {s.submatrix(kept), std::move(kept), std::move(removed)};
}

double suggest_threshold(const FilterProfile& profile) {
  const auto n = profile.sorted_order.size();
  if (n < 3) throw ValidationError("suggest_threshold needs at least 3 documents");
  auto diff_at = [&](std::size_t rank) {
    return profile.records[static_cast<std::size_t>(profile.sorted_order[rank])].avg_diff;
  };
  const std::size_t half = (n + 1) / 2;
  double best_gap = 0.0;
  double suggestion = 0.0;
  for (std::size_t i = 0; i < half && i + 1 < n; ++i) {
    const double gap = diff_at(i + 1) - diff_at(i);
    if (gap > best_gap) {
      best_gap = gap;
      suggestion = diff_at(i + 1);
    }
  }
  return suggestion;
}

void write_profile_csv(const FilterProfile& profile, const SimilarityMatrix& s,
                       std::span<const double> thresholds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "doc_id,avg_top,avg_bot,avg_diff";
  for (double t : thresholds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    out << ",removed_at_" << buf;
  }
  out << '\n';
  for (Index idx : profile.sorted_order) {
    const auto& r = profile.records[static_cast<std::size_t>(idx)];
    out << s.id_of(r.doc) << ',' << format_double(r.avg_top) << ',' << format_double(r.avg_bot)
        << ',' << format_double(r.avg_diff);
    for (double t : thresholds) out << ',' << (r.avg_diff < t ? 1 : 0);
    out << '\n';
  }
}

}  // namespace roughspec
