#include "doctest.h"

#include "../support/oracles.hpp"
#include "roughspec/errors.hpp"
#include "roughspec/roughfilter.hpp"
#include "roughspec/synthgen.hpp"

#include <filesystem>
#include <fstream>

using namespace roughspec;

namespace {

FilterProfile profile_of(std::vector<double> diffs) {
  FilterProfile p;
  for (std::size_t i = 0; i < diffs.size(); ++i) p.records.push_back({Index(i), diffs[i], 0.0, diffs[i]});
  for (std::size_t i = 0; i < diffs.size(); ++i) p.sorted_order.push_back(Index(i));
  std::stable_sort(p.sorted_order.begin(), p.sorted_order.end(),
                   [&](Index a, Index b) { return diffs[std::size_t(a)] < diffs[std::size_t(b)]; });
  return p;
}

SimilarityMatrix constant(Index n, double c) {
  Matrix m = Matrix::Constant(n, n, c);
  m.diagonal().setZero();
  return SimilarityMatrix(m);
}

}  // namespace

TEST_CASE("constant similarity gives zero differences") {
  const auto s = constant(12, 0.37);
  const auto p = similarity_profile(s);
  for (const auto& r : p.records) CHECK(r.avg_diff == doctest::Approx(0.0));
  CHECK(filter_boundary(s, p, 0.0).removed.empty());
  CHECK_THROWS_AS(filter_boundary(s, p, 0.05), ValidationError);
}

TEST_CASE("count per side uses the ceiling") {
  std::mt19937_64 g(2);
  const auto s = oracle::random_similarity(g, 21);
  const auto p = similarity_profile(s, 0.05);
  CHECK(p.count_per_side == 1);
  for (Index j = 0; j < 21; ++j) {
    double mx = 0.0, mn = 1.0;
    for (Index l = 0; l < 21; ++l) {
      if (l == j) continue;
      mx = std::max(mx, s(j, l));
      mn = std::min(mn, s(j, l));
    }
    CHECK(p.records[std::size_t(j)].avg_top == mx);
    CHECK(p.records[std::size_t(j)].avg_bot == mn);
  }
  CHECK(similarity_profile(s, 0.1).count_per_side == 2);
  CHECK(similarity_profile(s, 0.5).count_per_side == 10);
}

TEST_CASE("profile matches the sort-and-average oracle (property)") {
  std::mt19937_64 g(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 2 + Index(g() % 60);
    const double q = std::vector<double>{0.05, 0.1, 0.2, 0.5}[std::size_t(rep % 4)];
    const auto s = oracle::random_similarity(g, n);
    const auto p = similarity_profile(s, q);
    const Index count = std::max<Index>(1, Index(std::ceil(q * double(n - 1) - 1e-9)));
    CHECK(p.count_per_side == count);
    for (Index j = 0; j < n; ++j) {
      const auto [top, bot] = oracle::top_bottom(s.entries(), j, count);
      CHECK(p.records[std::size_t(j)].avg_top == doctest::Approx(top).epsilon(1e-12));
      CHECK(p.records[std::size_t(j)].avg_bot == doctest::Approx(bot).epsilon(1e-12));
      CHECK(p.records[std::size_t(j)].avg_diff >= 0.0);
    }
    for (std::size_t i = 1; i < p.sorted_order.size(); ++i) {
      const auto& a = p.records[std::size_t(p.sorted_order[i - 1])];
      const auto& b = p.records[std::size_t(p.sorted_order[i])];
      CHECK((a.avg_diff < b.avg_diff || (a.avg_diff == b.avg_diff && a.doc < b.doc)));
    }
    // monotone removal in t
    const auto r1 = removed_at(p, 0.2);
    const auto r2 = removed_at(p, 0.4);
    CHECK(std::includes(r2.begin(), r2.end(), r1.begin(), r1.end()));
  }
}

TEST_CASE("argument checks") {
  std::mt19937_64 g(1);
  const auto s = oracle::random_similarity(g, 5);
  CHECK_THROWS_AS(similarity_profile(s, 0.0), ValidationError);
  CHECK_THROWS_AS(similarity_profile(s, 0.6), ValidationError);
  CHECK_THROWS_AS(similarity_profile(SimilarityMatrix(Matrix::Zero(1, 1))), ValidationError);
  const auto p = similarity_profile(s);
  CHECK_THROWS_AS(filter_boundary(s, p, -0.1), ValidationError);
  CHECK_THROWS_AS(filter_boundary(oracle::random_similarity(g, 6), p, 0.1), ValidationError);
}

TEST_CASE("filter keeps exactly the documents at or above t") {
  std::mt19937_64 g(13);
  const auto s = oracle::random_similarity(g, 40, 0.0, 1.0, 0.5);
  const auto p = similarity_profile(s, 0.1);
  const double t = p.records[std::size_t(p.sorted_order[10])].avg_diff;
  const auto f = filter_boundary(s, p, t);
  for (Index i : f.kept) CHECK(p.records[std::size_t(i)].avg_diff >= t);
  for (Index i : f.removed) CHECK(p.records[std::size_t(i)].avg_diff < t);
  CHECK(f.kept.size() + f.removed.size() == 40);
  for (std::size_t a = 0; a < f.kept.size(); ++a)
    for (std::size_t b = 0; b < f.kept.size(); ++b) CHECK(f.core(Index(a), Index(b)) == s(f.kept[a], f.kept[b]));
}

TEST_CASE("injected noise is removed exactly") {
  const auto base = generate(dataset_preset(1, 77, 300));
  const auto data = inject_noise(base, 30, 0.08, 5);
  const auto p = similarity_profile(data.similarity, 0.05);
  const auto f = filter_boundary(data.similarity, p, 0.1);
  std::vector<Index> noise;
  for (std::size_t i = 0; i < data.noise.size(); ++i)
    if (data.noise[i]) noise.push_back(Index(i));
  CHECK(f.removed == noise);
}

TEST_CASE("re-filtering the core keeps planted documents") {
  // margin: min_in - max_out/m = 0.3 - 0.15 >= t + 0.05 for t = 0.1
  const auto data = inject_noise(generate(dataset_preset(1, 8, 300)), 20, 0.08, 1);
  const auto f = filter_boundary(data.similarity, similarity_profile(data.similarity), 0.1);
  const auto f2 = filter_boundary(f.core, similarity_profile(f.core), 0.1);
  CHECK(f2.removed.empty());
}

TEST_CASE("suggest_threshold") {
  CHECK(suggest_threshold(profile_of({0.01, 0.02, 0.03, 0.5, 0.51, 0.52})) > 0.03);
  CHECK(suggest_threshold(profile_of({0.01, 0.02, 0.03, 0.5, 0.51, 0.52})) <= 0.5);
  CHECK(suggest_threshold(profile_of({0.2, 0.2, 0.2, 0.2})) == 0.0);
  CHECK_THROWS_AS(suggest_threshold(profile_of({0.1, 0.2})), ValidationError);

  std::mt19937_64 g(3);
  std::normal_distribution<double> lo(0.05, 0.01), hi(0.4, 0.02);
  std::vector<double> d;
  for (int i = 0; i < 40; ++i) d.push_back(std::max(0.0, lo(g)));
  for (int i = 0; i < 60; ++i) d.push_back(hi(g));
  const double t = suggest_threshold(profile_of(d));
  for (int i = 0; i < 40; ++i) CHECK(d[std::size_t(i)] < t);
  for (int i = 40; i < 100; ++i) CHECK(d[std::size_t(i)] >= t);
}

TEST_CASE("profile CSV") {
  const auto s = constant(4, 0.5);
  const auto p = similarity_profile(s);
  const auto path = std::filesystem::temp_directory_path() / "roughspec_profile.csv";
  const std::vector<double> ts{0.1, 0.2};
  write_profile_csv(p, s, ts, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "doc_id,avg_top,avg_bot,avg_diff,removed_at_0.1,removed_at_0.2");
  CHECK(row.rfind("0,", 0) == 0);
  CHECK(row.substr(row.size() - 4) == ",1,1");
}
