#pragma once

#include "roughspec/corpus.hpp"
#include "roughspec/evalx.hpp"
#include "roughspec/kmeans.hpp"
#include "roughspec/simcore.hpp"
#include "roughspec/spectral.hpp"
#include "roughspec/synthgen.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace roughspec {

enum class Method { L, N, RW, Kamvar, K, M, B };

std::string to_string(Method m);
/// Accepts L, N, RW, Kamvar, K, M, B. Throws ValidationError otherwise.
Method parse_method(const std::string& name);

struct MethodSpec {
  Method method = Method::N;
  SpectralOptions spectral;  // k lives here for every method
  bool svd = false;          // project the term space before building cosine similarities
  std::optional<int> table5_id;

  /// e.g. "N", "N+unit+extra+svd", or "T5.7" for the numbered variants.
  std::string label() const;
  void validate() const;
};

/// Plain method: k eigenvectors (trivial one included), no row scaling.
MethodSpec plain_method(Method m, int k);
/// The nine numbered GSC variants (0-8):
///   0 L unit, 1 L unit+extra, 2 Kamvar unit, 3 Kamvar unit+extra,
///   4 N, 5 N unit, 6 N unit+extra, 7 N unit+extra+svd, 8 N unit+svd.
MethodSpec table5_variant(int id, int k);

/// Embedding the method clusters on.
Embedding embed(const SimilarityMatrix& s, const MethodSpec& m);

/// Embed then k-means (weighted for M and B). cfg.k is replaced by m.spectral.k.
KMeansResult cluster_similarity(const SimilarityMatrix& s, const MethodSpec& m, KMeansConfig cfg);

/// Where the items come from. Exactly one of the source fields is set.
struct InputSpec {
  std::string name;
  std::optional<std::filesystem::path> similarity;
  std::optional<std::filesystem::path> labels;  // truth for a similarity CSV (labels JSON)
  std::optional<std::filesystem::path> corpus;
  TermWeighting weighting = TermWeighting::TF;
  std::optional<int> preset;
  std::optional<Index> n;  // preset size override
  std::optional<GeneratorParams> generator;
  std::optional<PlantedCorpusParams> planted;
  std::optional<std::uint64_t> seed;  // explicit data seed; otherwise derived
  Index noise_count = 0;              // generator inputs only
  double noise_max_sim = 0.08;

  void validate() const;
};

struct PreparedInput {
  std::string name;
  SimilarityMatrix similarity{Matrix(0, 0)};
  std::optional<TermVectorSpace> space;  // corpus inputs
  std::vector<int> truth;                // empty when unknown
  std::vector<std::string> label_names;
  std::vector<bool> noise;
  nlohmann::json provenance;
};

/// Loads or generates the input. `data_seed` is used when spec.seed is absent.
PreparedInput prepare_input(const InputSpec& spec, std::uint64_t data_seed);

struct PipelineRun {
  double threshold = 0.0;
  std::vector<Index> kept;     // indices into the prepared input
  std::vector<Index> removed;
  KMeansResult kmeans;
  Embedding embedding;
  std::optional<MatchScore> score;       // when truth is known
  std::optional<ConfusionMatrix> confusion;
  std::optional<CutCriteria> criteria;   // on the matrix the method clustered
};

/// Profile on the input similarity, drop documents with avg_diff < t, build
/// the method's similarity on the survivors, cluster, and score the kept
/// documents against the truth.
PipelineRun run_pipeline(const PreparedInput& in, const MethodSpec& m, const KMeansConfig& cfg, double q,
                         double t);

/// Similarity the method clusters for the kept documents (SVD variants rebuild
/// it from the projected term space).
SimilarityMatrix method_similarity(const PreparedInput& in, const MethodSpec& m,
                                   const std::vector<Index>& kept);

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::optional<InputSpec> input;
  std::vector<InputSpec> datasets;  // sweep
  std::optional<MethodSpec> method;
  std::vector<MethodSpec> methods;  // sweep
  double q = 0.05;
  std::vector<double> thresholds{0.0};
  KMeansConfig kmeans;
  std::optional<std::filesystem::path> outputs;
  bool k_explicit = false;

  /// Seed for k-means: kmeans.seed when given, otherwise derive(seed, kKMeansStage).
  std::uint64_t kmeans_seed() const;
  /// Seed for the data of dataset `index`: derive(seed, index).
  std::uint64_t data_seed(std::size_t index) const;
  bool kmeans_seed_explicit = false;
};

inline constexpr std::uint64_t kKMeansStage = 0x6b6d65616e73ULL;

/// Reads a config document. Unknown keys anywhere are rejected.
PipelineConfig parse_pipeline_config(const nlohmann::json& j);
PipelineConfig read_pipeline_config(const std::filesystem::path& path);
MethodSpec method_from_json(const nlohmann::json& j, std::optional<int> default_k);
InputSpec input_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MethodSpec& m);

struct SweepCell {
  std::string dataset;
  std::string method;
  double threshold = 0.0;
  Index n_total = 0;
  Index n_kept = 0;
  double relative_error = 0.0;
  double f1 = 0.0;
  double objective = 0.0;
};

struct ImprovementSummary {
  double threshold = 0.0;
  int improved = 0;   // strictly lower error than at t = 0
  int unchanged = 0;
  int worse = 0;
  int total = 0;
};

/// Cells in (dataset, method, threshold) order. Runs on up to `threads`
/// workers; every prepared dataset is shared read-only.
std::vector<SweepCell> run_sweep(const PipelineConfig& cfg, int threads);
std::vector<ImprovementSummary> summarize_improvement(const std::vector<SweepCell>& cells);

/// Worker count: ROUGHSPEC_THREADS when set (>= 1), else hardware concurrency.
int worker_threads();

/// Per-cell JSON files under dir/cells, then merged into sweep_cells.csv,
/// error_t<t>.csv / f1_t<t>.csv (rows = datasets, columns = methods) and
/// improvement.json.
void write_sweep_outputs(const std::vector<SweepCell>& cells, const std::filesystem::path& dir);

}  // namespace roughspec
