#include "roughspec/corpus.hpp"

#include "roughspec/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace roughspec {

void Corpus::validate() const {
  if (docs.empty()) throw ValidationError("corpus is empty");
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.id).second) throw ValidationError("duplicate document id `" + d.id + "`");
  }
}

Corpus read_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus " + path.string());
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      Document d;
      d.id = obj.at("id").get<std::string>();
      d.text = obj.at("text").get<std::string>();
      if (obj.contains("label") && !obj.at("label").is_null()) {
        d.label = obj.at("label").get<std::string>();
      }
      corpus.docs.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  corpus.validate();
  return corpus;
}

void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& d : corpus.docs) {
    nlohmann::json obj{{"id", d.id}, {"text", d.text}};
    obj["label"] = d.label ? nlohmann::json(*d.label) : nlohmann::json(nullptr);
    out << obj.dump() << '\n';
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    const bool single_digit = cur.size() == 1 && cur[0] >= '0' && cur[0] <= '9';
    if (!single_digit) tokens.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      cur.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TermVectorSpace build_term_space(const Corpus& corpus, TermWeighting weighting) {
  corpus.validate();
  const std::size_t n_docs = corpus.docs.size();

  std::vector<std::map<std::string, int>> counts(n_docs);
  std::unordered_map<std::string, int> doc_freq;
  for (std::size_t d = 0; d < n_docs; ++d) {
    for (auto& tok : tokenize(corpus.docs[d].text)) ++counts[d][std::move(tok)];
    for (const auto& [term, c] : counts[d]) ++doc_freq[term];
  }

  std::set<std::string> kept_terms;
  for (const auto& [term, df] : doc_freq) {
    if (df >= 2) kept_terms.insert(term);
  }

  TermVectorSpace space;
  space.vocabulary.assign(kept_terms.begin(), kept_terms.end());
  std::unordered_map<std::string, Index> column;
  for (std::size_t t = 0; t < space.vocabulary.size(); ++t) {
    column.emplace(space.vocabulary[t], static_cast<Index>(t));
  }

  std::vector<std::size_t> survivors;
  for (std::size_t d = 0; d < n_docs; ++d) {
    const bool has_term = std::any_of(counts[d].begin(), counts[d].end(),
                                      [&](const auto& kv) { return kept_terms.count(kv.first) > 0; });
    if (has_term) {
      survivors.push_back(d);
    } else {
      space.dropped_docs.push_back(corpus.docs[d].id);
    }
  }
  if (survivors.empty()) {
    throw ValidationError("empty collection: every document was dropped by singleton-term pruning");
  }

  const auto vocab = static_cast<Index>(space.vocabulary.size());
  space.doc_vectors = Matrix::Zero(static_cast<Index>(survivors.size()), vocab);
  Vector idf = Vector::Ones(vocab);
  if (weighting == TermWeighting::TFIDF) {
    for (Index t = 0; t < vocab; ++t) {
      const double df = doc_freq.at(space.vocabulary[static_cast<std::size_t>(t)]);
      idf(t) = std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + df)) + 1.0;
    }
  }
  for (std::size_t r = 0; r < survivors.size(); ++r) {
    const auto& doc = corpus.docs[survivors[r]];
    space.doc_ids.push_back(doc.id);
    space.labels.push_back(doc.label);
    space.source_index.push_back(static_cast<Index>(survivors[r]));
    for (const auto& [term, c] : counts[survivors[r]]) {
      auto it = column.find(term);
      if (it == column.end()) continue;
      space.doc_vectors(static_cast<Index>(r), it->second) = c * idf(it->second);
    }
  }
  return space;
}

SimilarityMatrix cosine_of_rows(const Matrix& rows, std::vector<std::string> ids) {
  const Index n = rows.rows();
  Vector norms = rows.rowwise().norm();
  Matrix gram = rows * rows.transpose();
  Matrix s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j || norms(i) == 0.0 || norms(j) == 0.0) {
        s(i, j) = 0.0;
        continue;
      }
      s(i, j) = std::clamp(gram(i, j) / (norms(i) * norms(j)), 0.0, 1.0);
    }
  }
  // gram is symmetric up to rounding of the product; mirror the upper triangle
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) s(j, i) = s(i, j);
  }
  return SimilarityMatrix(std::move(s), std::move(ids));
}

SimilarityMatrix cosine_similarity(const TermVectorSpace& space) {
  return cosine_of_rows(space.doc_vectors, space.doc_ids);
}

Index default_svd_rank(const TermVectorSpace& space) {
  const Index r = std::min<Index>({100, space.size() - 1, static_cast<Index>(space.vocabulary.size())});
  return std::max<Index>(r, 1);
}

ReducedSpace svd_reduce(const TermVectorSpace& space, Index rank) {
  const Index limit = std::min(space.size(), static_cast<Index>(space.vocabulary.size()));
  if (rank < 1 || rank > limit) {
    throw ValidationError("svd rank " + std::to_string(rank) + " outside [1, " +
                          std::to_string(limit) + "]");
  }
  Eigen::BDCSVD<Matrix> svd(space.doc_vectors, Eigen::ComputeThinU);
  ReducedSpace out;
  out.doc_ids = space.doc_ids;
  out.singular_values = svd.singularValues().head(rank);
  out.coords = svd.matrixU().leftCols(rank) * out.singular_values.asDiagonal();
  return out;
}

SimilarityMatrix cosine_similarity(const ReducedSpace& space) {
  return cosine_of_rows(space.coords, space.doc_ids);
}

}  // namespace roughspec
