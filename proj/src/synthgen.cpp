#include "roughspec/synthgen.hpp"

#include "roughspec/errors.hpp"
#include "roughspec/rng.hpp"

#include <algorithm>
#include <cmath>

namespace roughspec {

void GeneratorParams::validate() const {
  const auto m_sz = props.size();
  if (m_sz == 0) throw ValidationError("generator needs at least one cluster");
  if (min_in.size() != m_sz || max_in.size() != m_sz || max_out.size() != m_sz) {
    throw ValidationError("props, min_in, max_in and max_out must all have length m=" +
                          std::to_string(m_sz));
  }
  if (n < 1) throw ValidationError("generator needs n >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < m_sz; ++i) {
    const std::string at = " for cluster " + std::to_string(i);
    if (!(props[i] > 0.0)) throw ValidationError("props must be positive" + at);
    if (!(min_in[i] >= 0.0 && max_in[i] <= 1.0 && min_in[i] <= max_in[i])) {
      throw ValidationError("need 0 <= min_in <= max_in <= 1" + at);
    }
    if (!(max_out[i] >= 0.0 && max_out[i] <= static_cast<double>(m_sz))) {
      throw ValidationError("max_out must lie in [0, m]" + at);
    }
    total += props[i];
  }
  for (std::size_t i = 0; i < m_sz; ++i) {
    if (static_cast<double>(n) * props[i] / total < 1.0) {
      throw ValidationError("expected size of cluster " + std::to_string(i) + " is below 1");
    }
  }
}

nlohmann::json to_json(const GeneratorParams& p) {
  return {{"n", p.n},           {"m", p.m()},           {"props", p.props},
          {"min_in", p.min_in}, {"max_in", p.max_in}, {"max_out", p.max_out},
          {"seed", p.seed}};
}

GeneratorParams generator_params_from_json(const nlohmann::json& j) {
  GeneratorParams p;
  try {
    p.n = j.at("n").get<Index>();
    p.props = j.at("props").get<std::vector<double>>();
    p.min_in = j.at("min_in").get<std::vector<double>>();
    p.max_in = j.at("max_in").get<std::vector<double>>();
    p.max_out = j.at("max_out").get<std::vector<double>>();
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("generator params: ") + e.what());
  }
  p.validate();
  return p;
}

GeneratedData generate(const GeneratorParams& params) {
  params.validate();
  const Index n = params.n;
  const int m = params.m();

  auto assign_eng = rng::stream(params.seed, 0);
  std::vector<int> labels(static_cast<std::size_t>(n));
  bool complete = false;
  for (int attempt = 0; attempt < 100 && !complete; ++attempt) {
    std::vector<Index> counts(static_cast<std::size_t>(m), 0);
    for (auto& l : labels) {
      l = static_cast<int>(rng::categorical(assign_eng, params.props));
      ++counts[static_cast<std::size_t>(l)];
    }
    complete = std::find(counts.begin(), counts.end(), 0) == counts.end();
  }
  if (!complete) {
    throw ValidationError("generator left a cluster empty in 100 assignment attempts");
  }

  Matrix s = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    auto row_eng = rng::stream(params.seed, static_cast<std::uint64_t>(i) + 1);
    const auto a = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    for (Index j = i + 1; j < n; ++j) {
      const auto b = static_cast<std::size_t>(labels[static_cast<std::size_t>(j)]);
      const double v = (a == b)
                           ? rng::uniform(row_eng, params.min_in[a], params.max_in[a])
                           : rng::uniform(row_eng, 0.0,
                                          (params.max_out[a] + params.max_out[b]) / (2.0 * m));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return {SimilarityMatrix(std::move(s)), Partition(std::move(labels), m),
          std::vector<bool>(static_cast<std::size_t>(n), false)};
}

GeneratorParams dataset_preset(int id, std::uint64_t seed, std::optional<Index> n) {
  GeneratorParams p;
  p.n = n.value_or(1500);
  p.seed = seed;
  switch (id) {
    case 1:
      p.props = {1.0, 0.5, 1.0, 0.5};
      p.min_in = {0.3, 0.3, 0.3, 0.3};
      p.max_in = {0.7, 0.7, 0.7, 0.7};
      p.max_out = {0.6, 0.6, 0.6, 0.6};
      break;
    case 2:
      p.props = {1.0, 0.5, 1.0, 0.5};
      p.min_in = {0.3, 0.35, 0.4, 0.45};
      p.max_in = {0.7, 0.65, 0.6, 0.55};
      p.max_out = {0.5, 0.6, 0.7, 0.8};
      break;
    case 3:
      p.props = {1.0, 1.0 / 3, 1.0 / 9, 1.0 / 27};
      p.min_in = {0.3, 0.3, 0.3, 0.3};
      p.max_in = {0.7, 0.7, 0.7, 0.7};
      p.max_out = {0.6, 0.7, 0.8, 0.9};
      break;
    case 4:
      p.props = {1.0, 3.0, 9.0, 27.0};
      p.min_in = {0.3, 0.35, 0.4, 0.45};
      p.max_in = {0.7, 0.65, 0.6, 0.55};
      p.max_out = {0.6, 0.7, 0.8, 0.9};
      break;
    default:
      throw ValidationError("unknown dataset preset " + std::to_string(id) + " (expected 1-4)");
  }
  return p;
}

GeneratedData inject_noise(const GeneratedData& data, Index count, double max_sim,
                           std::uint64_t seed) {
  if (count < 0) throw ValidationError("noise count must be >= 0");
  if (!(max_sim >= 0.0 && max_sim <= 1.0)) throw ValidationError("noise max_sim must lie in [0,1]");
  const Index n0 = data.similarity.size();
  const Index n = n0 + count;
  Matrix s = Matrix::Zero(n, n);
  s.topLeftCorner(n0, n0) = data.similarity.entries();
  for (Index i = n0; i < n; ++i) {
    auto eng = rng::stream(seed, static_cast<std::uint64_t>(i) + 1);
    for (Index j = 0; j < i; ++j) {
      const double v = rng::uniform(eng, 0.0, max_sim);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  auto label_eng = rng::stream(seed, 0);
  std::vector<int> labels = data.truth.labels();
  std::vector<double> uniform_props(static_cast<std::size_t>(data.truth.k()), 1.0);
  std::vector<bool> noise = data.noise;
  for (Index i = n0; i < n; ++i) {
    labels.push_back(static_cast<int>(rng::categorical(label_eng, uniform_props)));
    noise.push_back(true);
  }
  std::vector<std::string> ids;
  if (data.similarity.has_item_ids()) {
    ids = data.similarity.item_ids();
    for (Index i = n0; i < n; ++i) ids.push_back("noise" + std::to_string(i - n0));
  }
  return {SimilarityMatrix(std::move(s), std::move(ids)), Partition(std::move(labels), data.truth.k()),
          std::move(noise)};
}

void PlantedCorpusParams::validate() const {
  if (clusters < 1 || docs_per_cluster < 1 || noise_docs < 0 || block_vocab < 1 ||
      background_vocab < 1 || doc_length < 1) {
    throw ValidationError("planted corpus parameters must be positive");
  }
  if (!(in_block_fraction >= 0.0 && in_block_fraction <= 1.0)) {
    throw ValidationError("in_block_fraction must lie in [0,1]");
  }
}

std::string planted_label(int cluster) { return "topic" + std::to_string(cluster); }

PlantedCorpus planted_corpus(const PlantedCorpusParams& params) {
  params.validate();
  PlantedCorpus out;
  out.planted_terms.resize(static_cast<std::size_t>(params.clusters));
  for (int c = 0; c < params.clusters; ++c) {
    for (int t = 0; t < params.block_vocab; ++t) {
      out.planted_terms[static_cast<std::size_t>(c)].push_back("c" + std::to_string(c) + "w" +
                                                               std::to_string(t));
    }
  }
  auto eng = rng::stream(params.seed, 0);
  auto pick = [&](int bound) {
    return static_cast<int>(rng::uniform01(eng) * static_cast<double>(bound));
  };
  auto background = [&] { return "bg" + std::to_string(pick(params.background_vocab)); };

  int doc_no = 0;
  auto add_doc = [&](std::string text, int label, bool noise) {
    out.corpus.docs.push_back({"d" + std::to_string(doc_no++), std::move(text), planted_label(label)});
    out.truth.push_back(label);
    out.noise.push_back(noise);
  };
  for (int c = 0; c < params.clusters; ++c) {
    for (int d = 0; d < params.docs_per_cluster; ++d) {
      std::string text;
      for (int t = 0; t < params.doc_length; ++t) {
        if (t) text += ' ';
        if (rng::uniform01(eng) < params.in_block_fraction) {
          text += out.planted_terms[static_cast<std::size_t>(c)][static_cast<std::size_t>(
              pick(params.block_vocab))];
        } else {
          text += background();
        }
      }
      add_doc(std::move(text), c, false);
    }
  }
  for (int d = 0; d < params.noise_docs; ++d) {
    std::string text;
    for (int t = 0; t < params.doc_length; ++t) {
      if (t) text += ' ';
      text += background();
    }
    add_doc(std::move(text), pick(params.clusters), true);
  }
  return out;
}

}  // namespace roughspec
