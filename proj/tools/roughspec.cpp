// roughspec command-line driver: generate, profile, filter, cluster,
// evaluate, explain, sweep. Exit status 0 ok, 2 invalid input, 3 numerical failure.

#include "roughspec/corpus.hpp"
#include "roughspec/errors.hpp"
#include "roughspec/evalx.hpp"
#include "roughspec/explain.hpp"
#include "roughspec/pipeline.hpp"
#include "roughspec/rng.hpp"
#include "roughspec/roughfilter.hpp"
#include "roughspec/synthgen.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace roughspec;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<std::string> item_ids(const PreparedInput& in, const std::vector<Index>& rows) {
  std::vector<std::string> ids;
  for (Index i : rows) {
    ids.push_back(in.space ? in.space->doc_ids[static_cast<std::size_t>(i)] : in.similarity.id_of(i));
  }
  return ids;
}

// ---- generate ----

struct GenerateArgs {
  std::optional<int> preset;
  std::string params;
  std::optional<std::uint64_t> seed;
  std::optional<Index> n;
  Index noise = 0;
  double noise_max = 0.08;
  std::string out;
  std::string labels;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.preset.has_value() == !a.params.empty()) throw ValidationError("generate: give exactly one of --preset, --params");
  GeneratorParams p;
  if (a.preset) {
    p = dataset_preset(*a.preset, a.seed.value_or(0), a.n);
  } else {
    const auto j = read_json(a.params);
    p = generator_params_from_json(j);
    if (a.seed) p.seed = *a.seed;
    if (a.n) p.n = *a.n;
  }
  auto data = generate(p);
  if (a.noise > 0) data = inject_noise(data, a.noise, a.noise_max, rng::derive(p.seed, 1));
  write_similarity_csv(data.similarity, a.out);
  json labels{{"labels", data.truth.labels()},
              {"params", to_json(p)},
              {"seed", p.seed},
              {"rng", std::string(rng::kGeneratorName)}};
  if (a.noise > 0) {
    labels["noise"] = data.noise;
    labels["noise_params"] = {{"count", a.noise}, {"max_sim", a.noise_max}};
  }
  write_json(labels, a.labels.empty() ? a.out + ".labels.json" : a.labels);
  return 0;
}

// ---- profile / filter ----

int cmd_profile(const std::string& sim, double q, const std::vector<double>& thresholds, const std::string& out) {
  const auto s = read_similarity_csv(sim);
  const auto profile = similarity_profile(s, q);
  write_profile_csv(profile, s, thresholds, out);
  if (s.size() >= 3) std::printf("suggested threshold: %.6g\n", suggest_threshold(profile));
  return 0;
}

int cmd_filter(const std::string& sim, double q, double t, const std::string& out, const std::string& removed_out) {
  const auto s = read_similarity_csv(sim);
  const auto profile = similarity_profile(s, q);
  const auto res = filter_boundary(s, profile, t);
  write_similarity_csv(res.core, out);
  json removed = json::array();
  for (Index i : res.removed) {
    removed.push_back({{"index", i}, {"id", s.id_of(i)}, {"avg_diff", profile.records[static_cast<std::size_t>(i)].avg_diff}});
  }
  json report{{"q", q}, {"threshold", t}, {"kept", res.kept}, {"removed", removed}};
  write_json(report, removed_out.empty() ? out + ".removed.json" : removed_out);
  std::printf("kept %zu, removed %zu\n", res.kept.size(), res.removed.size());
  return 0;
}

// ---- cluster ----

struct ClusterFlags {
  std::string config;
  std::string similarity, labels, corpus, weighting;
  std::optional<int> preset;
  std::optional<Index> n;
  std::optional<std::uint64_t> seed, data_seed, kmeans_seed;
  std::string method;
  std::optional<int> variant, k, restarts;
  std::optional<bool> unit_rows, extra_dimension, svd, skip_trivial;
  std::optional<double> threshold, q;
  std::string out, embedding;
};

// Flags are folded into the config tree so one parser validates both.
json overlay(const ClusterFlags& f) {
  json j = f.config.empty() ? json::object() : read_json(f.config);
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  const bool new_input = !f.similarity.empty() || !f.corpus.empty() || f.preset.has_value();
  if (new_input) {
    json in = json::object();
    if (!f.similarity.empty()) in["similarity"] = f.similarity;
    if (!f.corpus.empty()) in["corpus"] = f.corpus;
    if (f.preset) in["preset"] = *f.preset;
    j["input"] = in;
  }
  if (!f.labels.empty() || !f.weighting.empty() || f.n || f.data_seed) {
    if (!j.contains("input")) throw ValidationError("input flags need an input source");
    if (!f.labels.empty()) j["input"]["labels"] = f.labels;
    if (!f.weighting.empty()) j["input"]["weighting"] = f.weighting;
    if (f.n) j["input"]["n"] = *f.n;
    if (f.data_seed) j["input"]["seed"] = *f.data_seed;
  }
  if (f.seed) j["seed"] = *f.seed;
  if (!f.method.empty() || f.variant) {
    json m = json::object();
    if (!f.method.empty()) m["name"] = f.method;
    if (f.variant) m["variant"] = *f.variant;
    j["method"] = m;
  }
  if (f.k || f.unit_rows || f.extra_dimension || f.svd || f.skip_trivial) {
    if (!j.contains("method")) throw ValidationError("method flags need --method or --variant");
    if (j["method"].is_string()) j["method"] = json{{"name", j["method"]}};
    if (j["method"].is_number_integer()) j["method"] = json{{"variant", j["method"]}};
    if (f.k) j["method"]["k"] = *f.k;
    if (f.unit_rows) j["method"]["unit_rows"] = *f.unit_rows;
    if (f.extra_dimension) j["method"]["extra_dimension"] = *f.extra_dimension;
    if (f.svd) j["method"]["svd"] = *f.svd;
    if (f.skip_trivial) j["method"]["skip_trivial"] = *f.skip_trivial;
  }
  if (f.threshold) j["filter"]["thresholds"] = json::array({*f.threshold});
  if (f.q) j["filter"]["q"] = *f.q;
  if (f.restarts) j["kmeans"]["restarts"] = *f.restarts;
  if (f.kmeans_seed) j["kmeans"]["seed"] = *f.kmeans_seed;
  return j;
}

int cmd_cluster(const ClusterFlags& f) {
  const json tree = overlay(f);
  const auto cfg = parse_pipeline_config(tree);
  if (!cfg.input) throw ValidationError("cluster: no input given");
  if (!cfg.method) throw ValidationError("cluster: no method given");
  if (cfg.thresholds.size() != 1) throw ValidationError("cluster takes a single threshold; use sweep for several");
  const auto in = prepare_input(*cfg.input, cfg.data_seed(0));
  KMeansConfig kc = cfg.kmeans;
  kc.seed = cfg.kmeans_seed();
  const auto run = run_pipeline(in, *cfg.method, kc, cfg.q, cfg.thresholds.front());

  json result{{"labels", run.kmeans.partition.labels()},
              {"k", run.kmeans.partition.k()},
              {"kept", run.kept},
              {"kept_ids", item_ids(in, run.kept)},
              {"removed", run.removed},
              {"removed_ids", item_ids(in, run.removed)},
              {"objective", run.kmeans.objective},
              {"iterations", run.kmeans.iterations_run},
              {"restart_chosen", run.kmeans.restart_chosen},
              {"threshold", run.threshold},
              {"method", to_json(*cfg.method)},
              {"kmeans_seed", kc.seed},
              {"input", in.provenance},
              {"config", tree}};
  json centroids = json::array();
  for (Index r = 0; r < run.kmeans.centroids.rows(); ++r) {
    json jr = json::array();
    for (Index c = 0; c < run.kmeans.centroids.cols(); ++c) jr.push_back(run.kmeans.centroids(r, c));
    centroids.push_back(jr);
  }
  result["centroids"] = centroids;
  if (run.criteria) result["criteria"] = to_json(*run.criteria);
  if (run.score) {
    result["score"] = to_json(*run.score);
    result["confusion"] = to_json(*run.confusion);
  }
  if (!f.embedding.empty()) write_embedding_csv(run.embedding, f.embedding);
  if (!f.out.empty()) {
    write_json(result, f.out);
    if (run.score) std::printf("relative_error %.6g  f1 %.6g\n", run.score->relative_error, run.score->f1);
  } else {
    write_json(result, "-");
  }
  return 0;
}

// ---- evaluate ----

int cmd_evaluate(const std::string& truth_path, const std::string& corpus_path, const std::string& pred_path,
                 const std::string& sim_path, const std::string& out) {
  if (truth_path.empty() == corpus_path.empty()) throw ValidationError("evaluate: give exactly one of --truth, --corpus");
  const json pred = read_json(pred_path);
  std::vector<int> labels;
  std::vector<std::string> kept_ids;
  try {
    labels = pred.at("labels").get<std::vector<int>>();
    if (pred.contains("kept_ids")) kept_ids = pred.at("kept_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(pred_path + ": " + e.what());
  }
  if (kept_ids.empty()) {
    for (std::size_t i = 0; i < labels.size(); ++i) kept_ids.push_back(std::to_string(i));
  }
  if (kept_ids.size() != labels.size()) throw ValidationError(pred_path + ": labels and kept_ids differ in length");

  std::map<std::string, std::string> truth_of;
  if (!truth_path.empty()) {
    const json t = read_json(truth_path);
    std::vector<int> tl;
    std::vector<std::string> ids;
    try {
      tl = t.at("labels").get<std::vector<int>>();
      if (t.contains("item_ids")) ids = t.at("item_ids").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ValidationError(truth_path + ": " + e.what());
    }
    for (std::size_t i = 0; i < tl.size(); ++i) truth_of[ids.empty() ? std::to_string(i) : ids[i]] = std::to_string(tl[i]);
  } else {
    for (const auto& d : read_corpus_jsonl(corpus_path).docs) {
      if (d.label) truth_of[d.id] = *d.label;
    }
  }
  std::map<std::string, int> name_index;
  for (const auto& id : kept_ids) {
    const auto it = truth_of.find(id);
    if (it == truth_of.end()) throw ValidationError("evaluate: no true label for item `" + id + "`");
    name_index.emplace(it->second, 0);
  }
  std::vector<std::string> names;
  for (auto& [name, idx] : name_index) {
    idx = static_cast<int>(names.size());
    names.push_back(name);
  }
  std::vector<int> truth;
  for (const auto& id : kept_ids) truth.push_back(name_index[truth_of[id]]);
  int k = pred.contains("k") ? pred["k"].get<int>() : 0;
  for (int l : labels) k = std::max(k, l + 1);
  const Partition p(labels, k);
  const auto cm = confusion(truth, p, names);
  const auto score = match_and_score(cm);
  json report{{"score", to_json(score)}, {"confusion", to_json(cm)}, {"relative_error", score.relative_error}, {"f1", score.f1}};
  if (!sim_path.empty()) {
    const auto s = read_similarity_csv(sim_path);
    std::vector<Index> kept;
    if (pred.contains("kept")) kept = pred["kept"].get<std::vector<Index>>();
    else for (Index i = 0; i < static_cast<Index>(labels.size()); ++i) kept.push_back(i);
    const auto core = kept.size() == static_cast<std::size_t>(s.size()) ? s : s.submatrix(kept);
    if (core.size() != static_cast<Index>(labels.size())) throw ValidationError("evaluate: similarity size does not match the prediction");
    report["criteria"] = to_json(cut_criteria(core, p));
    report["equivalence"] = to_json(equivalence_diagnostic(core, p));
  }
  write_json(report, out);
  return 0;
}

// ---- explain ----

int cmd_explain(const std::string& corpus_path, const std::string& weighting, const std::string& result_path, int w,
                const std::string& out_json, const std::string& out_md) {
  const auto corpus = read_corpus_jsonl(corpus_path);
  TermWeighting tw = TermWeighting::TF;
  if (weighting == "tfidf") tw = TermWeighting::TFIDF;
  else if (weighting != "tf") throw ValidationError("--weighting must be tf or tfidf");
  const auto space = build_term_space(corpus, tw);
  const json res = read_json(result_path);
  std::vector<int> labels;
  std::vector<std::string> ids;
  try {
    labels = res.at("labels").get<std::vector<int>>();
    ids = res.at("kept_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(result_path + ": " + e.what());
  }
  if (ids.size() != labels.size()) throw ValidationError(result_path + ": labels and kept_ids differ in length");
  std::map<std::string, Index> row_of;
  for (std::size_t i = 0; i < space.doc_ids.size(); ++i) row_of[space.doc_ids[i]] = static_cast<Index>(i);
  TermVectorSpace sub;
  sub.vocabulary = space.vocabulary;
  sub.doc_vectors.resize(static_cast<Index>(ids.size()), space.doc_vectors.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto it = row_of.find(ids[r]);
    if (it == row_of.end()) throw ValidationError("explain: document `" + ids[r] + "` is not in the term space");
    sub.doc_ids.push_back(ids[r]);
    sub.labels.push_back(space.labels[static_cast<std::size_t>(it->second)]);
    sub.source_index.push_back(space.source_index[static_cast<std::size_t>(it->second)]);
    sub.doc_vectors.row(static_cast<Index>(r)) = space.doc_vectors.row(it->second);
  }
  int k = res.contains("k") ? res["k"].get<int>() : 0;
  for (int l : labels) k = std::max(k, l + 1);
  const auto ex = explain_clusters(sub, Partition(labels, k), w);
  if (out_json.empty() && out_md.empty()) {
    std::cout << to_markdown(ex);
  } else {
    write_explanations(ex, out_json, out_md);
  }
  return 0;
}

// ---- sweep ----

int cmd_sweep(const std::string& config, std::optional<int> threads, const std::string& out_dir) {
  auto cfg = read_pipeline_config(config);
  if (!out_dir.empty()) cfg.outputs = out_dir;
  const int workers = threads.value_or(worker_threads());
  if (workers < 1) throw ValidationError("--threads must be >= 1");
  const auto cells = run_sweep(cfg, workers);
  if (cfg.outputs) write_sweep_outputs(cells, *cfg.outputs);
  for (const auto& c : cells) {
    std::printf("%-12s %-16s t=%-4g kept=%-5lld error=%.4f f1=%.4f\n", c.dataset.c_str(), c.method.c_str(), c.threshold,
                static_cast<long long>(c.n_kept), c.relative_error, c.f1);
  }
  for (const auto& s : summarize_improvement(cells)) {
    std::printf("t=%g: %d of %d cells improved (%.0f%%), %d unchanged, %d worse\n", s.threshold, s.improved, s.total,
                s.total ? 100.0 * s.improved / s.total : 0.0, s.unchanged, s.worse);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough-set boundary filtering and graph spectral clustering"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Synthetic block-similarity matrix plus labels");
  g->add_option("--preset", gen.preset, "Dataset preset 1-4");
  g->add_option("--params", gen.params, "Generator parameters JSON");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--n", gen.n, "Item count");
  g->add_option("--noise", gen.noise, "Uniform-noise items to append");
  g->add_option("--noise-max", gen.noise_max, "Upper bound of noise similarities");
  g->add_option("--out", gen.out, "Similarity CSV")->required();
  g->add_option("--labels", gen.labels, "Labels JSON (default <out>.labels.json)");

  std::string sim, out, removed_out;
  double q = 0.05, t = 0.1;
  std::vector<double> thresholds{0.1, 0.2};
  auto* pr = app.add_subcommand("profile", "Per-document top/bottom similarity profile");
  pr->add_option("--similarity", sim, "Similarity CSV")->required();
  pr->add_option("--q", q, "Top/bottom fraction");
  pr->add_option("--thresholds", thresholds, "Thresholds for removed_at columns");
  pr->add_option("--out", out, "Profile CSV")->required();

  auto* fi = app.add_subcommand("filter", "Remove boundary documents");
  fi->add_option("--similarity", sim, "Similarity CSV")->required();
  fi->add_option("--q", q, "Top/bottom fraction");
  fi->add_option("--threshold", t, "Keep documents with avg_diff >= t");
  fi->add_option("--out", out, "Core similarity CSV")->required();
  fi->add_option("--removed", removed_out, "Removed-documents JSON (default <out>.removed.json)");

  ClusterFlags cf;
  auto* cl = app.add_subcommand("cluster", "Embed, optionally filter, and cluster");
  cl->add_option("--config", cf.config, "Pipeline config JSON");
  cl->add_option("--similarity", cf.similarity, "Similarity CSV input");
  cl->add_option("--labels", cf.labels, "True labels JSON for a similarity input");
  cl->add_option("--corpus", cf.corpus, "Corpus JSONL input");
  cl->add_option("--weighting", cf.weighting, "tf or tfidf");
  cl->add_option("--preset", cf.preset, "Generator preset input");
  cl->add_option("--n", cf.n, "Preset item count");
  cl->add_option("--data-seed", cf.data_seed, "Explicit data seed");
  cl->add_option("--seed", cf.seed, "Top-level seed");
  cl->add_option("--method", cf.method, "L, N, RW, Kamvar, K, M or B");
  cl->add_option("--variant", cf.variant, "Numbered GSC variant 0-8");
  cl->add_option("--k", cf.k, "Cluster count");
  cl->add_option("--unit-rows", cf.unit_rows, "Unit-length embedding rows");
  cl->add_option("--extra-dimension", cf.extra_dimension, "Use k+1 eigenvectors");
  cl->add_option("--svd", cf.svd, "Project the term space first");
  cl->add_option("--skip-trivial", cf.skip_trivial)->group("");
  cl->add_option("--threshold", cf.threshold, "Boundary threshold t");
  cl->add_option("--q", cf.q, "Top/bottom fraction");
  cl->add_option("--restarts", cf.restarts, "k-means restarts");
  cl->add_option("--kmeans-seed", cf.kmeans_seed, "k-means seed");
  cl->add_option("--out", cf.out, "Result JSON (stdout when omitted)");
  cl->add_option("--embedding", cf.embedding, "Embedding CSV dump");

  std::string truth, corpus, pred, weighting = "tf", out_md;
  int w = 10;
  auto* ev = app.add_subcommand("evaluate", "Cut criteria and matched relative error");
  ev->add_option("--truth", truth, "Labels JSON");
  ev->add_option("--corpus", corpus, "Corpus JSONL with labels");
  ev->add_option("--pred", pred, "Cluster result JSON")->required();
  ev->add_option("--similarity", sim, "Similarity CSV for cut criteria");
  ev->add_option("--out", out, "Score JSON (stdout when omitted)");

  auto* ex = app.add_subcommand("explain", "Top centroid terms per cluster");
  ex->add_option("--corpus", corpus, "Corpus JSONL")->required();
  ex->add_option("--weighting", weighting, "tf or tfidf");
  ex->add_option("--result", pred, "Cluster result JSON")->required();
  ex->add_option("--w", w, "Terms per cluster");
  ex->add_option("--out", out, "Explanation JSON");
  ex->add_option("--markdown", out_md, "Explanation Markdown");

  std::string config;
  std::optional<int> threads;
  auto* sw = app.add_subcommand("sweep", "Datasets x methods x thresholds");
  sw->add_option("--config", config, "Sweep config JSON")->required();
  sw->add_option("--threads", threads, "Worker count (default ROUGHSPEC_THREADS or cores)");
  sw->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*pr) return cmd_profile(sim, q, thresholds, out);
    if (*fi) return cmd_filter(sim, q, t, out, removed_out);
    if (*cl) return cmd_cluster(cf);
    if (*ev) return cmd_evaluate(truth, corpus, pred, sim, out);
    if (*ex) return cmd_explain(corpus, weighting, pred, w, out, out_md);
    if (*sw) return cmd_sweep(config, threads, out);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
