#pragma once

#include "roughspec/corpus.hpp"
#include "roughspec/simcore.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace roughspec {

/// Block-similarity generator parameters. Within cluster i similarities are
/// U(min_in[i], max_in[i]); between clusters i and k they are
/// U(0, (max_out[i] + max_out[k]) / (2m)).
struct GeneratorParams {
  Index n = 0;
  std::vector<double> props;
  std::vector<double> min_in;
  std::vector<double> max_in;
  std::vector<double> max_out;
  std::uint64_t seed = 0;

  int m() const { return static_cast<int>(props.size()); }
  void validate() const;
};

nlohmann::json to_json(const GeneratorParams& p);
GeneratorParams generator_params_from_json(const nlohmann::json& j);

struct GeneratedData {
  SimilarityMatrix similarity;
  Partition truth;
  std::vector<bool> noise;  // true for injected noise items
};

/// Items are assigned i.i.d. by props (stream 0); row i of the upper triangle
/// is filled from stream i + 1. An assignment leaving a cluster empty is
/// redrawn, up to 100 attempts.
GeneratedData generate(const GeneratorParams& params);

/// Published parameter sets of synthetic datasets 1-4 (n = 1500 unless overridden).
GeneratorParams dataset_preset(int id, std::uint64_t seed = 0, std::optional<Index> n = std::nullopt);

/// Appends `count` items whose similarity to every other item is U(0, max_sim).
/// Each gets a uniformly drawn cluster label and is flagged in `noise`.
GeneratedData inject_noise(const GeneratedData& data, Index count, double max_sim, std::uint64_t seed);

/// Text corpus with one planted vocabulary block per cluster. Cluster docs draw
/// each token from their block with probability in_block_fraction, otherwise
/// from a shared background vocabulary; noise docs draw only background tokens
/// and carry a uniformly drawn cluster label.
struct PlantedCorpusParams {
  int clusters = 4;
  int docs_per_cluster = 60;
  int noise_docs = 40;
  int block_vocab = 30;
  int background_vocab = 400;
  int doc_length = 20;
  double in_block_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlantedCorpus {
  Corpus corpus;
  std::vector<int> truth;                          // parallel to corpus.docs
  std::vector<bool> noise;
  std::vector<std::vector<std::string>> planted_terms;  // per cluster
};

PlantedCorpus planted_corpus(const PlantedCorpusParams& params);

/// Label name used by planted_corpus for cluster c.
std::string planted_label(int cluster);

}  // namespace roughspec
