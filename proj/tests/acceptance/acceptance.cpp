// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 on any failure.

#include "../support/oracles.hpp"
#include "roughspec/evalx.hpp"
#include "roughspec/gower.hpp"
#include "roughspec/kmeans.hpp"
#include "roughspec/pipeline.hpp"
#include "roughspec/rng.hpp"
#include "roughspec/spectral.hpp"
#include "roughspec/synthgen.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <string>

using namespace roughspec;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void guarded(const char* id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

KMeansConfig kmeans_for(std::uint64_t seed) {
  KMeansConfig kc;
  kc.seed = rng::derive(seed, kKMeansStage);
  return kc;
}

void ac1() {
  const auto t0 = Clock::now();
  const double t1 = 100 * match_and_score(make_confusion({{35, 0, 0, 1}, {0, 108, 0, 0}, {0, 0, 348, 0}, {0, 0, 1008, 0}}))
                              .relative_error;
  const double t2 = 100 * match_and_score(make_confusion({{729, 3, 0}, {364, 4, 71}, {470, 361, 0}})).relative_error;
  const double t4 = 100 * match_and_score(make_confusion({{9, 0, 723}, {162, 270, 5}, {829, 1, 1}})).relative_error;
  const double secs = since(t0);
  const bool ok = std::abs(t1 - 23.2) <= 0.2 && std::abs(t2 - 42.0) <= 0.2 && std::abs(t4 - 8.9) <= 0.2 && secs < 1.0;
  report("AC1", ok, fmt("confusion tables: %.2f%% %.2f%% %.2f%% (want 23.2 42.0 8.9 +-0.2pp), %.3fs", t1, t2, t4, secs));
}

void ac2() {
  for (Index n : {Index{1500}, Index{500}}) {
    const double budget = n == 1500 ? 180.0 : 15.0;
    std::string detail = fmt("dataset 1, n=%ld:", long(n));
    bool ok = true;
    double slowest = 0.0;
    for (Method m : {Method::L, Method::K, Method::N, Method::B}) {
      int perfect = 0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        InputSpec in;
        in.name = "ds1";
        in.preset = 1;
        in.n = n;
        const auto t0 = Clock::now();
        const auto prepared = prepare_input(in, rng::derive(seed, 0));
        const auto run = run_pipeline(prepared, plain_method(m, 4), kmeans_for(seed), 0.05, 0.0);
        slowest = std::max(slowest, since(t0));
        perfect += run.score->relative_error == 0.0;
      }
      detail += fmt(" %s %d/5", to_string(m).c_str(), perfect);
      ok = ok && perfect >= 4;
    }
    ok = ok && slowest <= budget;
    report("AC2", ok, detail + fmt(", slowest pipeline %.1fs (budget %.0fs)", slowest, budget));
  }
}

void ac3() {
  int good = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    InputSpec in;
    in.name = "ds4";
    in.preset = 4;
    const auto prepared = prepare_input(in, rng::derive(seed, 0));
    const double l = run_pipeline(prepared, plain_method(Method::L, 4), kmeans_for(seed), 0.05, 0.0).score->relative_error;
    const double nn = run_pipeline(prepared, plain_method(Method::N, 4), kmeans_for(seed), 0.05, 0.0).score->relative_error;
    good += l >= 0.15 && nn <= 0.05;
    detail += fmt(" (L %.3f, N %.3f)", l, nn);
  }
  report("AC3", good >= 3, fmt("dataset 4: %d/5 seeds with L >= 0.15 and N <= 0.05;", good) + detail);
}

double worst_distance_error(const SimilarityMatrix& s, const Embedding& e, char kind) {
  const Index n = s.size();
  Vector d = Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    for (Index l = 0; l < n; ++l) d(i) += s(i, l);
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index l = i + 1; l < n; ++l) {
      double want = 0.0;
      if (kind == 'K') want = 1.0 - s(i, l);
      if (kind == 'M') want = (d(i) + d(l) - 2.0 * s(i, l)) / (d(i) * d(l));
      if (kind == 'B') {
        const double a = d(i) + 1.0, b = d(l) + 1.0;
        want = 1.0 / (a * a) + 1.0 / (b * b) - 2.0 * s(i, l) / (a * b);
      }
      worst = std::max(worst, std::abs((e.coords.row(i) - e.coords.row(l)).squaredNorm() - want));
    }
  }
  return worst;
}

void ac4() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(404);
  int within = 0, total = 0;
  double worst_ratio = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = oracle::random_similarity(g, 50);
    const std::pair<char, Embedding> runs[] = {{'K', k_embedding(s)}, {'M', m_embedding(s)}, {'B', b_embedding(s)}};
    for (const auto& [kind, e] : runs) {
      const double err = worst_distance_error(s, e, kind);
      const double bound = std::max(1e-6, e.dropped_mass);
      within += err <= bound;
      ++total;
      worst_ratio = std::max(worst_ratio, err / bound);
    }
  }
  const double secs = since(t0);
  report("AC4", within == total && secs < 10.0,
         fmt("distance identities: %d/%d embeddings within max(1e-6, dropped mass), worst error/bound %.3f, %.2fs", within,
             total, worst_ratio, secs));
}

int near_zero_eigenvalues(const SimilarityMatrix& s) {
  const auto eig = symmetric_eig(combinatorial_laplacian(s));
  int count = 0;
  for (Index i = 0; i < eig.values.size(); ++i) count += std::abs(eig.values(i)) < 1e-8;
  return count;
}

void ac5() {
  std::mt19937_64 g(505);
  bool ok = true;
  std::string detail;
  for (int k : {2, 3, 4}) {
    std::vector<Index> sizes;
    for (int b = 0; b < k; ++b) sizes.push_back(Index(5 + g() % 20));
    const auto s = oracle::block_matrix(g, sizes);
    Matrix ext = Matrix::Zero(s.size() + 1, s.size() + 1);
    ext.topLeftCorner(s.size(), s.size()) = s.entries();
    const int plain = near_zero_eigenvalues(s);
    const int with_zero = near_zero_eigenvalues(SimilarityMatrix(ext));
    ok = ok && plain == k && with_zero == k + 1;
    detail += fmt(" k=%d: %d then %d;", k, plain, with_zero);
  }
  report("AC5", ok, "block spectrum:" + detail);
}

void ac6() {
  InputSpec in;
  in.name = "ds1+noise";
  in.preset = 1;
  in.noise_count = 30;
  in.noise_max_sim = 0.08;
  const auto prepared = prepare_input(in, rng::derive(6, 0));
  std::set<Index> noise;
  for (std::size_t i = 0; i < prepared.noise.size(); ++i)
    if (prepared.noise[i]) noise.insert(Index(i));
  bool ok = noise.size() == 30;
  std::string detail;
  for (Method m : {Method::L, Method::K, Method::N, Method::B}) {
    const auto run = run_pipeline(prepared, plain_method(m, 4), kmeans_for(6), 0.05, 0.1);
    const std::set<Index> removed(run.removed.begin(), run.removed.end());
    ok = ok && removed == noise && run.score->relative_error == 0.0;
    detail += fmt(" %s removed %zu error %.3f;", to_string(m).c_str(), removed.size(), run.score->relative_error);
  }
  report("AC6", ok, fmt("dataset 1 + %zu noise docs at t=0.1:", noise.size()) + detail);
}

void ac7() {
  const auto t0 = Clock::now();
  nlohmann::json j = {{"seed", 7}, {"filter", {{"q", 0.05}, {"thresholds", {0.0, 0.2}}}}};
  for (int v = 0; v < 9; ++v) j["methods"].push_back(v);
  for (int i = 0; i < 20; ++i) j["datasets"].push_back({{"name", "planted" + std::to_string(i)}, {"planted", nlohmann::json::object()}});
  const auto cells = run_sweep(parse_pipeline_config(j), worker_threads());
  ImprovementSummary sum;
  for (const auto& s : summarize_improvement(cells))
    if (s.threshold == 0.2) sum = s;
  const double secs = since(t0);
  const double share = sum.total ? double(sum.improved) / sum.total : 0.0;
  report("AC7", sum.total == 180 && share >= 0.70 && secs <= 1200.0,
         fmt("t=0.2 vs t=0: %d/%d cells strictly better (%.1f%%), %d unchanged, %d worse, %.1fs", sum.improved, sum.total,
             100 * share, sum.unchanged, sum.worse, secs));
}

void ac8() {
  std::mt19937_64 g(808);
  double worst_formula = 0.0;
  int beaten = 0, checked = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + rep % 9;
    const auto s = oracle::random_similarity(g, n, 0.01, 1.0);
    double best = std::numeric_limits<double>::infinity();
    oracle::for_each_partition(n, 2, [&](const std::vector<int>& labels) {
      const double got = rcut(s, Partition(labels, 2));
      worst_formula = std::max(worst_formula, std::abs(got - oracle::rcut(s.entries(), labels, 2)));
      best = std::min(best, got);
    });
    for (Method m : {Method::L, Method::N, Method::RW, Method::Kamvar, Method::K, Method::M, Method::B}) {
      KMeansConfig kc;
      kc.seed = std::uint64_t(rep);
      const auto r = cluster_similarity(s, plain_method(m, 2), kc);
      if (r.partition.has_empty_cluster()) continue;
      ++checked;
      beaten += rcut(s, r.partition) < best - 1e-12;
    }
  }
  report("AC8", worst_formula <= 1e-12 && beaten == 0,
         fmt("rcut vs triple loop max diff %.2e; %d of %d pipeline partitions below the exhaustive minimum", worst_formula,
             beaten, checked));
}

void ac9() {
  std::mt19937_64 g(909);
  int hit_plain = 0, hit_weighted = 0, below = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 3 + rep % 6;
    const int k = 2 + rep % 2;
    Embedding e;
    e.coords = Matrix(n, 2);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < 2; ++c) e.coords(i, c) = oracle::unif(g, -1.0, 1.0);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w(i) = oracle::unif(g, 0.1, 3.0);
    KMeansConfig kc;
    kc.k = k;
    kc.seed = std::uint64_t(1000 + rep);

    const double opt_plain = oracle::best_sse(e.coords, Vector::Ones(n), k);
    const double got_plain = kmeans(e, kc).objective;
    hit_plain += std::abs(got_plain - opt_plain) <= 1e-9 * opt_plain;
    below += got_plain < opt_plain * (1.0 - 1e-12);

    e.weights = w;
    const double opt_w = oracle::best_sse(e.coords, w, k);
    const double got_w = weighted_kmeans(e, kc).objective;
    hit_weighted += std::abs(got_w - opt_w) <= 1e-9 * opt_w;
    below += got_w < opt_w * (1.0 - 1e-12);
  }
  report("AC9", hit_plain >= 48 && hit_weighted >= 48 && below == 0,
         fmt("toy k-means: plain %d/50, weighted %d/50 at the exhaustive optimum; %d below it", hit_plain, hit_weighted,
             below));
}

}  // namespace

int main() {
  guarded("AC1", ac1);
  guarded("AC2", ac2);
  guarded("AC3", ac3);
  guarded("AC4", ac4);
  guarded("AC5", ac5);
  guarded("AC6", ac6);
  guarded("AC7", ac7);
  guarded("AC8", ac8);
  guarded("AC9", ac9);
  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
