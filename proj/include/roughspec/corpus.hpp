#pragma once

#include "roughspec/simcore.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roughspec {

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> label;
};

struct Corpus {
  std::vector<Document> docs;

  /// Nonempty, unique ids.
  void validate() const;
};

/// One JSON object per line: {"id": str, "text": str, "label": str|null}.
Corpus read_corpus_jsonl(const std::filesystem::path& path);
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

enum class TermWeighting { TF, TFIDF };

/// Documents in term-vector space after singleton-term pruning.
struct TermVectorSpace {
  std::vector<std::string> doc_ids;                 // surviving documents, corpus order
  std::vector<std::optional<std::string>> labels;   // parallel to doc_ids
  std::vector<Index> source_index;                  // position in the input corpus
  std::vector<std::string> vocabulary;              // lexicographic
  Matrix doc_vectors;                               // doc_ids.size() x vocabulary.size()
  std::vector<std::string> dropped_docs;            // empty after pruning

  Index size() const { return doc_vectors.rows(); }
};

/// Lowercase, split on anything that is not an ASCII letter/digit (bytes >= 0x80
/// stay inside tokens so UTF-8 words survive), drop single-digit tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Terms occurring in exactly one document of the collection are removed once;
/// documents left without terms are dropped. TFIDF uses the smoothed idf
/// log((1+n)/(1+df)) + 1. Throws ValidationError when nothing survives.
TermVectorSpace build_term_space(const Corpus& corpus, TermWeighting weighting = TermWeighting::TF);

/// Pairwise cosine of document vectors, diagonal forced to 0, clamped to [0,1].
SimilarityMatrix cosine_similarity(const TermVectorSpace& space);

/// Documents projected onto the leading singular directions of the doc-term matrix.
struct ReducedSpace {
  std::vector<std::string> doc_ids;
  Matrix coords;            // n x rank, U_r * Sigma_r
  Vector singular_values;   // leading `rank` values, descending
};

/// Throws ValidationError unless 1 <= rank <= min(n, |V|).
ReducedSpace svd_reduce(const TermVectorSpace& space, Index rank);

/// min(100, n - 1, |V|), at least 1.
Index default_svd_rank(const TermVectorSpace& space);

/// Cosine on projected coordinates; negative cosines clamp to 0, zero rows give 0.
SimilarityMatrix cosine_similarity(const ReducedSpace& space);

/// Row-wise cosine of arbitrary coordinates under the same clamping rules.
SimilarityMatrix cosine_of_rows(const Matrix& rows, std::vector<std::string> ids = {});

}  // namespace roughspec
