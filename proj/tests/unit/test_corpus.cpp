#include "doctest.h"

#include "../support/oracles.hpp"
#include "roughspec/corpus.hpp"
#include "roughspec/errors.hpp"

#include <filesystem>
#include <map>
#include <set>

using namespace roughspec;

namespace {

Corpus make(std::initializer_list<const char*> texts) {
  Corpus c;
  int i = 0;
  for (const char* t : texts) c.docs.push_back({"d" + std::to_string(i++), t, std::nullopt});
  return c;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Hello, WORLD! 7 42 x") == std::vector<std::string>{"hello", "world", "42", "x"});
  CHECK(tokenize("caf\xc3\xa9 bar") == std::vector<std::string>{"caf\xc3\xa9", "bar"});
  CHECK(tokenize("").empty());
}

TEST_CASE("singleton pruning") {
  auto space = build_term_space(make({"a b", "b c"}));
  CHECK(space.vocabulary == std::vector<std::string>{"b"});
  CHECK(space.size() == 2);

  CHECK_THROWS_AS(build_term_space(make({"a", "b"})), ValidationError);

  space = build_term_space(make({"a b", "b c", "zzz"}));
  CHECK(space.dropped_docs == std::vector<std::string>{"d2"});
  CHECK(space.doc_ids == std::vector<std::string>{"d0", "d1"});
}

TEST_CASE("every kept term has document frequency >= 2 (property)") {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 5; ++rep) {
    Corpus c;
    for (int d = 0; d < 100; ++d) {
      std::string text;
      const int len = 1 + int(g() % 6);
      for (int t = 0; t < len; ++t) text += "t" + std::to_string(g() % 50) + " ";
      c.docs.push_back({"doc" + std::to_string(d), text, std::nullopt});
    }
    const auto space = build_term_space(c);
    std::map<std::string, std::set<int>> df;
    for (int d = 0; d < 100; ++d) {
      for (const auto& tok : tokenize(c.docs[std::size_t(d)].text)) df[tok].insert(d);
    }
    for (const auto& term : space.vocabulary) CHECK(df[term].size() >= 2);
    for (const auto& [term, docs] : df) {
      const bool kept = std::binary_search(space.vocabulary.begin(), space.vocabulary.end(), term);
      CHECK(kept == (docs.size() >= 2));
    }
    CHECK(std::is_sorted(space.vocabulary.begin(), space.vocabulary.end()));
    for (Index i = 0; i < space.size(); ++i) CHECK(space.doc_vectors.row(i).sum() > 0.0);

    // pruning idempotence on the surviving documents
    Corpus again;
    for (Index src : space.source_index) again.docs.push_back(c.docs[std::size_t(src)]);
    CHECK(build_term_space(again).vocabulary == space.vocabulary);
  }
}

TEST_CASE("cosine similarity") {
  auto s = cosine_similarity(build_term_space(make({"x y", "x y", "x y"})));
  CHECK(s(0, 1) == doctest::Approx(1.0));
  CHECK(s(1, 1) == 0.0);

  s = cosine_similarity(build_term_space(make({"a a", "a", "b", "b b"})));
  CHECK(s(0, 2) == 0.0);
  CHECK(s(0, 1) == doctest::Approx(1.0));

  std::mt19937_64 g(3);
  Matrix v(10, 7);
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 7; ++j) v(i, j) = oracle::unif(g) < 0.4 ? 0.0 : oracle::unif(g, 0, 5);
    v(i, i % 7) += 1.0;
  }
  const auto c = cosine_of_rows(v);
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) {
      const double expect = i == j ? 0.0 : v.row(i).dot(v.row(j)) / (v.row(i).norm() * v.row(j).norm());
      CHECK(std::abs(c(i, j) - expect) < 1e-12);
    }
  }
}

TEST_CASE("tfidf weighting keeps shape and [0,1] similarities") {
  auto space = build_term_space(make({"a b b", "a b c", "c c a", "b c"}), TermWeighting::TFIDF);
  CHECK(space.vocabulary == std::vector<std::string>{"a", "b", "c"});
  // idf(a) = log(5/4) + 1, tf(a, d0) = 1
  CHECK(space.doc_vectors(0, 0) == doctest::Approx(std::log(5.0 / 4.0) + 1.0));
  CHECK_NOTHROW(cosine_similarity(space));
}

TEST_CASE("svd_reduce") {
  std::mt19937_64 g(8);
  Corpus c;
  for (int d = 0; d < 12; ++d) {
    std::string t;
    for (int k = 0; k < 8; ++k) t += "w" + std::to_string(g() % 9) + " ";
    c.docs.push_back({"d" + std::to_string(d), t, std::nullopt});
  }
  const auto space = build_term_space(c);
  const Index full = std::min<Index>(space.size(), Index(space.vocabulary.size()));
  const auto full_sim = cosine_similarity(svd_reduce(space, full));
  const auto raw = cosine_similarity(space);
  CHECK((full_sim.entries() - raw.entries()).cwiseAbs().maxCoeff() < 1e-8);

  CHECK_THROWS_AS(svd_reduce(space, 0), ValidationError);
  CHECK_THROWS_AS(svd_reduce(space, full + 1), ValidationError);

  const auto r = svd_reduce(space, 2);
  CHECK(r.coords.cols() == 2);
  CHECK(r.singular_values(0) >= r.singular_values(1));
  CHECK(default_svd_rank(space) == std::min<Index>({100, space.size() - 1, Index(space.vocabulary.size())}));
}

TEST_CASE("rank-1 projection of two orthogonal groups") {
  // docs 0,1 use terms {a,b} heavily, docs 2,3 use {c,d} lightly
  TermVectorSpace space;
  space.vocabulary = {"a", "b", "c", "d"};
  space.doc_ids = {"0", "1", "2", "3"};
  space.labels.resize(4);
  space.source_index = {0, 1, 2, 3};
  space.doc_vectors.resize(4, 4);
  space.doc_vectors << 3, 1, 0, 0, 1, 3, 0, 0, 0, 0, 1, 0.5, 0, 0, 0.5, 1;
  const auto r = svd_reduce(space, 1);
  // leading direction is (1,1,0,0)/sqrt2 with sigma = 4 (the heavier block)
  CHECK(r.singular_values(0) == doctest::Approx(4.0));
  const auto s = cosine_similarity(r);
  CHECK(s(0, 1) == doctest::Approx(1.0));
  CHECK(s(0, 2) == 0.0);
}

TEST_CASE("corpus JSONL round trip") {
  Corpus c = make({"alpha beta", "beta gamma"});
  c.docs[0].label = "x";
  const auto p = std::filesystem::temp_directory_path() / "roughspec_corpus_rt.jsonl";
  write_corpus_jsonl(c, p);
  const auto back = read_corpus_jsonl(p);
  REQUIRE(back.docs.size() == 2);
  CHECK(back.docs[0].label == std::optional<std::string>("x"));
  CHECK(!back.docs[1].label.has_value());
  CHECK(back.docs[1].text == "beta gamma");

  Corpus dup = make({"a", "b"});
  dup.docs[1].id = "d0";
  CHECK_THROWS_AS(dup.validate(), ValidationError);
}
