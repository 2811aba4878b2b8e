#include "roughspec/pipeline.hpp"

#include "roughspec/errors.hpp"
#include "roughspec/gower.hpp"
#include "roughspec/rng.hpp"
#include "roughspec/roughfilter.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace roughspec {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ValidationError(where + ": unknown key `" + key + "`");
    }
  }
}

template <typename T>
T get_as(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

std::string threshold_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

TermVectorSpace subset_space(const TermVectorSpace& space, const std::vector<Index>& rows) {
  TermVectorSpace out;
  out.vocabulary = space.vocabulary;
  out.doc_vectors.resize(static_cast<Index>(rows.size()), space.doc_vectors.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<std::size_t>(rows[r]);
    out.doc_ids.push_back(space.doc_ids[i]);
    out.labels.push_back(space.labels[i]);
    out.source_index.push_back(space.source_index[i]);
    out.doc_vectors.row(static_cast<Index>(r)) = space.doc_vectors.row(rows[r]);
  }
  return out;
}

void truth_from_labels(const std::vector<std::optional<std::string>>& labels, PreparedInput& in) {
  if (std::any_of(labels.begin(), labels.end(), [](const auto& l) { return !l.has_value(); })) return;
  std::set<std::string> names;
  for (const auto& l : labels) names.insert(*l);
  in.label_names.assign(names.begin(), names.end());
  for (const auto& l : labels) {
    const auto it = std::lower_bound(in.label_names.begin(), in.label_names.end(), *l);
    in.truth.push_back(static_cast<int>(it - in.label_names.begin()));
  }
}

void from_corpus(const Corpus& corpus, TermWeighting weighting, PreparedInput& in) {
  auto space = build_term_space(corpus, weighting);
  in.similarity = cosine_similarity(space);
  truth_from_labels(space.labels, in);
  in.space = std::move(space);
}

void from_generated(const GeneratedData& data, PreparedInput& in) {
  in.similarity = data.similarity;
  in.truth = data.truth.labels();
  for (int c = 0; c < data.truth.k(); ++c) in.label_names.push_back(std::to_string(c));
  in.noise = data.noise;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::L: return "L";
    case Method::N: return "N";
    case Method::RW: return "RW";
    case Method::Kamvar: return "Kamvar";
    case Method::K: return "K";
    case Method::M: return "M";
    case Method::B: return "B";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::L, Method::N, Method::RW, Method::Kamvar, Method::K, Method::M, Method::B}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown method `" + name + "` (expected L, N, RW, Kamvar, K, M or B)");
}

std::string MethodSpec::label() const {
  if (table5_id) return "T5." + std::to_string(*table5_id);
  std::string s = to_string(method);
  if (spectral.unit_rows) s += "+unit";
  if (spectral.extra_dimension) s += "+extra";
  if (spectral.skip_trivial) s += "+skip";
  if (svd) s += "+svd";
  return s;
}

void MethodSpec::validate() const {
  spectral.validate();
  const bool gower = method == Method::K || method == Method::M || method == Method::B;
  if (gower && (spectral.extra_dimension || spectral.unit_rows || spectral.skip_trivial)) {
    throw ValidationError("method " + to_string(method) + " takes no spectral flags");
  }
  if (spectral.svd_rank && !svd) throw ValidationError("svd_rank given without svd");
}

MethodSpec plain_method(Method m, int k) {
  MethodSpec spec;
  spec.method = m;
  spec.spectral.k = k;
  return spec;
}

MethodSpec table5_variant(int id, int k) {
  if (id < 0 || id > 8) throw ValidationError("method variant id must be 0..8, got " + std::to_string(id));
  MethodSpec spec;
  spec.spectral.k = k;
  spec.table5_id = id;
  spec.method = id <= 1 ? Method::L : id <= 3 ? Method::Kamvar : Method::N;
  spec.spectral.unit_rows = id != 4;
  spec.spectral.extra_dimension = id == 1 || id == 3 || id == 6 || id == 7;
  spec.svd = id >= 7;
  return spec;
}

Embedding embed(const SimilarityMatrix& s, const MethodSpec& m) {
  m.validate();
  switch (m.method) {
    case Method::L: return spectral_embed(s, LaplacianKind::Combinatorial, m.spectral);
    case Method::N: return spectral_embed(s, LaplacianKind::Normalized, m.spectral);
    case Method::RW: return spectral_embed(s, LaplacianKind::RandomWalk, m.spectral);
    case Method::Kamvar: return spectral_embed(s, LaplacianKind::KamvarAffinity, m.spectral);
    case Method::K: return k_embedding(s);
    case Method::M: return m_embedding(s);
    case Method::B: return b_embedding(s);
  }
  throw ValidationError("unknown method");
}

KMeansResult cluster_similarity(const SimilarityMatrix& s, const MethodSpec& m, KMeansConfig cfg) {
  cfg.k = m.spectral.k;
  return cluster_embedding(embed(s, m), cfg);
}

void InputSpec::validate() const {
  const int sources = int(similarity.has_value()) + int(corpus.has_value()) + int(preset.has_value()) +
                      int(generator.has_value()) + int(planted.has_value());
  if (sources != 1) {
    throw ValidationError("input `" + name + "` needs exactly one source (similarity, corpus, preset, generator, planted), got " +
                          std::to_string(sources));
  }
  if (labels && !similarity) throw ValidationError("input `" + name + "`: labels only apply to a similarity CSV");
  if (noise_count < 0 || !(noise_max_sim >= 0.0 && noise_max_sim <= 1.0)) {
    throw ValidationError("input `" + name + "`: noise needs count >= 0 and max_sim in [0,1]");
  }
  if (noise_count > 0 && !preset && !generator) {
    throw ValidationError("input `" + name + "`: noise injection applies to preset/generator inputs only");
  }
}

PreparedInput prepare_input(const InputSpec& spec, std::uint64_t data_seed) {
  spec.validate();
  PreparedInput in;
  in.name = spec.name;
  const std::uint64_t seed = spec.seed.value_or(data_seed);
  if (spec.similarity) {
    in.similarity = read_similarity_csv(*spec.similarity);
    in.provenance = {{"similarity", spec.similarity->string()}};
    if (spec.labels) {
      std::ifstream js(*spec.labels);
      if (!js) throw ValidationError("cannot open labels file " + spec.labels->string());
      json doc;
      try {
        js >> doc;
        in.truth = doc.at("labels").get<std::vector<int>>();
        if (doc.contains("noise")) in.noise = doc.at("noise").get<std::vector<bool>>();
      } catch (const json::exception& e) {
        throw ValidationError(spec.labels->string() + ": " + e.what());
      }
      if (static_cast<Index>(in.truth.size()) != in.similarity.size()) {
        throw ValidationError(spec.labels->string() + ": " + std::to_string(in.truth.size()) +
                              " labels for " + std::to_string(in.similarity.size()) + " items");
      }
      const int k = in.truth.empty() ? 0 : *std::max_element(in.truth.begin(), in.truth.end()) + 1;
      for (int c = 0; c < k; ++c) in.label_names.push_back(std::to_string(c));
    }
  } else if (spec.corpus) {
    from_corpus(read_corpus_jsonl(*spec.corpus), spec.weighting, in);
    in.provenance = {{"corpus", spec.corpus->string()}};
  } else if (spec.planted) {
    auto params = *spec.planted;
    params.seed = seed;
    const auto pc = planted_corpus(params);
    from_corpus(pc.corpus, spec.weighting, in);
    // keep the noise flags of surviving documents
    for (Index src : in.space->source_index) in.noise.push_back(pc.noise[static_cast<std::size_t>(src)]);
    in.provenance = {{"planted_seed", seed}};
  } else {
    GeneratorParams params = spec.preset ? dataset_preset(*spec.preset, seed, spec.n) : *spec.generator;
    if (!spec.preset && spec.seed) params.seed = *spec.seed;
    auto data = generate(params);
    if (spec.noise_count > 0) data = inject_noise(data, spec.noise_count, spec.noise_max_sim, rng::derive(params.seed, 1));
    from_generated(data, in);
    in.provenance = {{"params", to_json(params)}, {"rng", std::string(rng::kGeneratorName)}};
    if (spec.noise_count > 0) in.provenance["noise"] = {{"count", spec.noise_count}, {"max_sim", spec.noise_max_sim}};
  }
  return in;
}

SimilarityMatrix method_similarity(const PreparedInput& in, const MethodSpec& m, const std::vector<Index>& kept) {
  if (!m.svd) return in.similarity.submatrix(kept);
  if (!in.space) throw ValidationError("method " + m.label() + " needs a corpus input for the SVD projection");
  const auto sub = subset_space(*in.space, kept);
  const Index rank = m.spectral.svd_rank.value_or(default_svd_rank(sub));
  return cosine_similarity(svd_reduce(sub, rank));
}

PipelineRun run_pipeline(const PreparedInput& in, const MethodSpec& m, const KMeansConfig& cfg, double q,
                         double t) {
  if (t < 0.0) throw ValidationError("threshold must be >= 0");
  PipelineRun run;
  run.threshold = t;
  if (t > 0.0) {
    const auto profile = similarity_profile(in.similarity, q);
    const auto filtered = filter_boundary(in.similarity, profile, t);
    run.kept = filtered.kept;
    run.removed = filtered.removed;
  } else {
    run.kept = all_indices(in.similarity.size());
  }
  const auto s = method_similarity(in, m, run.kept);
  run.embedding = embed(s, m);
  KMeansConfig kc = cfg;
  kc.k = m.spectral.k;
  run.kmeans = cluster_embedding(run.embedding, kc);
  if (!run.kmeans.partition.has_empty_cluster()) run.criteria = cut_criteria(s, run.kmeans.partition);
  if (!in.truth.empty()) {
    std::vector<int> truth;
    for (Index i : run.kept) truth.push_back(in.truth[static_cast<std::size_t>(i)]);
    run.confusion = confusion(truth, run.kmeans.partition, in.label_names);
    run.score = match_and_score(*run.confusion);
  }
  return run;
}

std::uint64_t PipelineConfig::kmeans_seed() const {
  return kmeans_seed_explicit ? kmeans.seed : rng::derive(seed, kKMeansStage);
}

std::uint64_t PipelineConfig::data_seed(std::size_t index) const { return rng::derive(seed, index); }

nlohmann::json to_json(const MethodSpec& m) {
  json j{{"name", to_string(m.method)},
         {"k", m.spectral.k},
         {"extra_dimension", m.spectral.extra_dimension},
         {"unit_rows", m.spectral.unit_rows},
         {"svd", m.svd},
         {"label", m.label()}};
  if (m.spectral.svd_rank) j["svd_rank"] = *m.spectral.svd_rank;
  if (m.spectral.skip_trivial) j["skip_trivial"] = true;
  if (m.table5_id) j["variant"] = *m.table5_id;
  return j;
}

MethodSpec method_from_json(const json& j, std::optional<int> default_k) {
  if (j.is_string()) {
    if (!default_k) throw ValidationError("method `" + j.get<std::string>() + "`: k is unknown");
    return plain_method(parse_method(j.get<std::string>()), *default_k);
  }
  if (j.is_number_integer()) {
    if (!default_k) throw ValidationError("method variant: k is unknown");
    return table5_variant(j.get<int>(), *default_k);
  }
  const std::string where = "method";
  check_keys(j, {"name", "variant", "k", "extra_dimension", "unit_rows", "svd", "svd_rank", "skip_trivial"}, where);
  std::optional<int> k = default_k;
  if (j.contains("k")) k = get_as<int>(j, "k", where);
  if (!k) throw ValidationError("method: k is required when the input has no labels");
  MethodSpec m;
  if (j.contains("variant")) {
    if (j.contains("name")) throw ValidationError("method: give either name or variant, not both");
    m = table5_variant(get_as<int>(j, "variant", where), *k);
  } else {
    m = plain_method(parse_method(get_as<std::string>(j, "name", where)), *k);
  }
  if (j.contains("extra_dimension")) m.spectral.extra_dimension = get_as<bool>(j, "extra_dimension", where);
  if (j.contains("unit_rows")) m.spectral.unit_rows = get_as<bool>(j, "unit_rows", where);
  if (j.contains("svd")) m.svd = get_as<bool>(j, "svd", where);
  if (j.contains("svd_rank")) m.spectral.svd_rank = get_as<Index>(j, "svd_rank", where);
  if (j.contains("skip_trivial")) m.spectral.skip_trivial = get_as<bool>(j, "skip_trivial", where);
  m.validate();
  return m;
}

InputSpec input_from_json(const json& j) {
  const std::string where = "input";
  check_keys(j, {"name", "similarity", "labels", "corpus", "weighting", "preset", "n", "generator", "planted", "seed",
                 "noise"},
             where);
  InputSpec in;
  if (j.contains("name")) in.name = get_as<std::string>(j, "name", where);
  if (j.contains("similarity")) in.similarity = get_as<std::string>(j, "similarity", where);
  if (j.contains("labels")) in.labels = get_as<std::string>(j, "labels", where);
  if (j.contains("corpus")) in.corpus = get_as<std::string>(j, "corpus", where);
  if (j.contains("weighting")) {
    const auto w = get_as<std::string>(j, "weighting", where);
    if (w == "tf") in.weighting = TermWeighting::TF;
    else if (w == "tfidf") in.weighting = TermWeighting::TFIDF;
    else throw ValidationError("input.weighting must be `tf` or `tfidf`, got `" + w + "`");
  }
  if (j.contains("preset")) in.preset = get_as<int>(j, "preset", where);
  if (j.contains("n")) {
    if (!in.preset) throw ValidationError("input.n applies to presets only");
    in.n = get_as<Index>(j, "n", where);
  }
  if (j.contains("generator")) {
    check_keys(j["generator"], {"n", "props", "min_in", "max_in", "max_out", "seed"}, "input.generator");
    in.generator = generator_params_from_json(j["generator"]);
  }
  if (j.contains("planted")) {
    const auto& pj = j["planted"];
    const std::string pw = "input.planted";
    check_keys(pj, {"clusters", "docs_per_cluster", "noise_docs", "block_vocab", "background_vocab", "doc_length",
                    "in_block_fraction"},
               pw);
    PlantedCorpusParams p;
    if (pj.contains("clusters")) p.clusters = get_as<int>(pj, "clusters", pw);
    if (pj.contains("docs_per_cluster")) p.docs_per_cluster = get_as<int>(pj, "docs_per_cluster", pw);
    if (pj.contains("noise_docs")) p.noise_docs = get_as<int>(pj, "noise_docs", pw);
    if (pj.contains("block_vocab")) p.block_vocab = get_as<int>(pj, "block_vocab", pw);
    if (pj.contains("background_vocab")) p.background_vocab = get_as<int>(pj, "background_vocab", pw);
    if (pj.contains("doc_length")) p.doc_length = get_as<int>(pj, "doc_length", pw);
    if (pj.contains("in_block_fraction")) p.in_block_fraction = get_as<double>(pj, "in_block_fraction", pw);
    p.validate();
    in.planted = p;
  }
  if (j.contains("seed")) in.seed = get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("noise")) {
    const auto& nj = j["noise"];
    check_keys(nj, {"count", "max_sim"}, "input.noise");
    in.noise_count = get_as<Index>(nj, "count", "input.noise");
    if (nj.contains("max_sim")) in.noise_max_sim = get_as<double>(nj, "max_sim", "input.noise");
  }
  in.validate();
  return in;
}

namespace {

// k defaults to the planted cluster count when the input makes it known.
std::optional<int> implied_k(const InputSpec& in) {
  if (in.preset) return 4;
  if (in.generator) return in.generator->m();
  if (in.planted) return in.planted->clusters;
  return std::nullopt;
}

}  // namespace

PipelineConfig parse_pipeline_config(const json& j) {
  check_keys(j, {"$schema", "seed", "input", "datasets", "method", "methods", "filter", "kmeans", "outputs"}, "config");
  PipelineConfig cfg;
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed", "config");
  if (j.contains("input") && j.contains("datasets")) {
    throw ValidationError("config: give either input or datasets, not both");
  }
  std::optional<int> k_hint;
  if (j.contains("input")) {
    cfg.input = input_from_json(j["input"]);
    k_hint = implied_k(*cfg.input);
  }
  if (j.contains("datasets")) {
    if (!j["datasets"].is_array() || j["datasets"].empty()) throw ValidationError("config.datasets must be a nonempty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["datasets"].size(); ++i) {
      auto in = input_from_json(j["datasets"][i]);
      if (in.name.empty()) in.name = "dataset" + std::to_string(i);
      if (!names.insert(in.name).second) throw ValidationError("config.datasets: duplicate name `" + in.name + "`");
      const auto k = implied_k(in);
      if (i == 0) k_hint = k;
      else if (k_hint != k) k_hint.reset();
      cfg.datasets.push_back(std::move(in));
    }
  }
  if (j.contains("method") && j.contains("methods")) throw ValidationError("config: give either method or methods");
  if (j.contains("method")) cfg.method = method_from_json(j["method"], k_hint);
  if (j.contains("methods")) {
    if (!j["methods"].is_array() || j["methods"].empty()) throw ValidationError("config.methods must be a nonempty array");
    for (const auto& mj : j["methods"]) cfg.methods.push_back(method_from_json(mj, k_hint));
  }
  if (j.contains("filter")) {
    const auto& fj = j["filter"];
    check_keys(fj, {"q", "thresholds"}, "config.filter");
    if (fj.contains("q")) cfg.q = get_as<double>(fj, "q", "config.filter");
    if (fj.contains("thresholds")) cfg.thresholds = get_as<std::vector<double>>(fj, "thresholds", "config.filter");
  }
  if (!(cfg.q > 0.0 && cfg.q <= 0.5)) throw ValidationError("filter.q must lie in (0, 0.5]");
  if (cfg.thresholds.empty()) throw ValidationError("filter.thresholds must not be empty");
  for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
    if (!(cfg.thresholds[i] >= 0.0)) throw ValidationError("filter.thresholds must be >= 0");
    if (i && !(cfg.thresholds[i] > cfg.thresholds[i - 1])) {
      throw ValidationError("filter.thresholds must be strictly ascending");
    }
  }
  if (j.contains("kmeans")) {
    const auto& kj = j["kmeans"];
    const std::string kw = "config.kmeans";
    check_keys(kj, {"restarts", "max_iter", "tol", "seed"}, kw);
    if (kj.contains("restarts")) cfg.kmeans.restarts = get_as<int>(kj, "restarts", kw);
    if (kj.contains("max_iter")) cfg.kmeans.max_iter = get_as<int>(kj, "max_iter", kw);
    if (kj.contains("tol")) cfg.kmeans.tol = get_as<double>(kj, "tol", kw);
    if (kj.contains("seed")) {
      cfg.kmeans.seed = get_as<std::uint64_t>(kj, "seed", kw);
      cfg.kmeans_seed_explicit = true;
    }
  }
  cfg.kmeans.validate();
  if (j.contains("outputs")) cfg.outputs = get_as<std::string>(j, "outputs", "config");
  return cfg;
}

PipelineConfig read_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return parse_pipeline_config(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

int worker_threads() {
  if (const char* env = std::getenv("ROUGHSPEC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string cell_key(std::size_t d, std::size_t m, std::size_t t) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "d%03zu_m%03zu_t%03zu", d, m, t);
  return buf;
}

json cell_json(const SweepCell& c) {
  return {{"dataset", c.dataset},       {"method", c.method}, {"threshold", c.threshold},
          {"n_total", c.n_total},       {"n_kept", c.n_kept}, {"relative_error", c.relative_error},
          {"f1", c.f1},                 {"objective", c.objective}};
}

SweepCell cell_from_json(const json& j) {
  SweepCell c;
  c.dataset = j.at("dataset").get<std::string>();
  c.method = j.at("method").get<std::string>();
  c.threshold = j.at("threshold").get<double>();
  c.n_total = j.at("n_total").get<Index>();
  c.n_kept = j.at("n_kept").get<Index>();
  c.relative_error = j.at("relative_error").get<double>();
  c.f1 = j.at("f1").get<double>();
  c.objective = j.at("objective").get<double>();
  return c;
}

}  // namespace

std::vector<SweepCell> run_sweep(const PipelineConfig& cfg, int threads) {
  std::vector<InputSpec> inputs = cfg.datasets;
  if (inputs.empty() && cfg.input) inputs.push_back(*cfg.input);
  std::vector<MethodSpec> methods = cfg.methods;
  if (methods.empty() && cfg.method) methods.push_back(*cfg.method);
  if (inputs.empty() || methods.empty()) throw ValidationError("sweep needs datasets and methods");

  std::vector<PreparedInput> prepared;
  for (std::size_t d = 0; d < inputs.size(); ++d) {
    prepared.push_back(prepare_input(inputs[d], cfg.data_seed(d)));
    if (prepared.back().name.empty()) prepared.back().name = "dataset" + std::to_string(d);
    if (prepared.back().truth.empty()) {
      throw ValidationError("sweep dataset `" + prepared.back().name + "` has no truth labels");
    }
  }

  const std::size_t nm = methods.size();
  const std::size_t nt = cfg.thresholds.size();
  const std::size_t total = prepared.size() * nm * nt;
  std::vector<SweepCell> cells(total);
  std::vector<std::string> keys(total);
  KMeansConfig kc = cfg.kmeans;
  kc.seed = cfg.kmeans_seed();

  std::filesystem::path cell_dir;
  if (cfg.outputs) {
    cell_dir = *cfg.outputs / "cells";
    std::filesystem::create_directories(cell_dir);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t d = idx / (nm * nt);
      const std::size_t m = (idx / nt) % nm;
      const std::size_t t = idx % nt;
      try {
        const auto run = run_pipeline(prepared[d], methods[m], kc, cfg.q, cfg.thresholds[t]);
        SweepCell c;
        c.dataset = prepared[d].name;
        c.method = methods[m].label();
        c.threshold = cfg.thresholds[t];
        c.n_total = prepared[d].similarity.size();
        c.n_kept = static_cast<Index>(run.kept.size());
        c.relative_error = run.score->relative_error;
        c.f1 = run.score->f1;
        c.objective = run.kmeans.objective;
        keys[idx] = cell_key(d, m, t);
        if (!cell_dir.empty()) {
          std::ofstream out(cell_dir / (keys[idx] + ".json"));
          out << cell_json(c).dump() << '\n';
        }
        cells[idx] = std::move(c);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  if (!cell_dir.empty()) {
    // merge back from disk in key order
    std::vector<SweepCell> merged;
    for (const auto& key : keys) {
      std::ifstream in(cell_dir / (key + ".json"));
      json j;
      in >> j;
      merged.push_back(cell_from_json(j));
    }
    return merged;
  }
  return cells;
}

std::vector<ImprovementSummary> summarize_improvement(const std::vector<SweepCell>& cells) {
  std::map<std::pair<std::string, std::string>, double> baseline;
  for (const auto& c : cells) {
    if (c.threshold == 0.0) baseline[{c.dataset, c.method}] = c.relative_error;
  }
  std::map<double, ImprovementSummary> by_t;
  for (const auto& c : cells) {
    if (c.threshold == 0.0) continue;
    const auto it = baseline.find({c.dataset, c.method});
    if (it == baseline.end()) continue;
    auto& s = by_t[c.threshold];
    s.threshold = c.threshold;
    ++s.total;
    if (c.relative_error < it->second) ++s.improved;
    else if (c.relative_error > it->second) ++s.worse;
    else ++s.unchanged;
  }
  std::vector<ImprovementSummary> out;
  for (const auto& [_, s] : by_t) out.push_back(s);
  return out;
}

void write_sweep_outputs(const std::vector<SweepCell>& cells, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "sweep_cells.csv");
    out << "dataset,method,threshold,n_total,n_kept,relative_error,f1,objective\n";
    for (const auto& c : cells) {
      out << c.dataset << ',' << c.method << ',' << threshold_tag(c.threshold) << ',' << c.n_total << ','
          << c.n_kept << ',' << format_double(c.relative_error) << ',' << format_double(c.f1) << ','
          << format_double(c.objective) << '\n';
    }
  }
  std::vector<std::string> datasets, methods;
  std::vector<double> thresholds;
  for (const auto& c : cells) {
    if (std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end()) datasets.push_back(c.dataset);
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
    if (std::find(thresholds.begin(), thresholds.end(), c.threshold) == thresholds.end()) thresholds.push_back(c.threshold);
  }
  for (double t : thresholds) {
    for (const char* metric : {"error", "f1"}) {
      std::ofstream out(dir / (std::string(metric) + "_t" + threshold_tag(t) + ".csv"));
      out << "dataset";
      for (const auto& m : methods) out << ',' << m;
      out << '\n';
      for (const auto& d : datasets) {
        out << d;
        for (const auto& m : methods) {
          out << ',';
          for (const auto& c : cells) {
            if (c.dataset == d && c.method == m && c.threshold == t) {
              out << format_double(metric[0] == 'e' ? c.relative_error : c.f1);
            }
          }
        }
        out << '\n';
      }
    }
  }
  json imp = json::array();
  for (const auto& s : summarize_improvement(cells)) {
    imp.push_back({{"threshold", s.threshold},
                   {"improved", s.improved},
                   {"unchanged", s.unchanged},
                   {"worse", s.worse},
                   {"total", s.total},
                   {"improved_fraction", s.total ? static_cast<double>(s.improved) / s.total : 0.0}});
  }
  std::ofstream(dir / "improvement.json") << json{{"summary", imp}}.dump(2) << '\n';
}

}  // namespace roughspec
