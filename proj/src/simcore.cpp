#include "roughspec/simcore.hpp"

#include "roughspec/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace roughspec {

namespace {

std::string cell(Index i, Index j) {
  return "(row " + std::to_string(i) + ", column " + std::to_string(j) + ")";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SimilarityMatrix::SimilarityMatrix(Matrix entries, std::vector<std::string> item_ids)
    : entries_(std::move(entries)), item_ids_(std::move(item_ids)) {
  const Index n = entries_.rows();
  if (entries_.cols() != n) {
    throw ValidationError("similarity matrix must be square, got " + std::to_string(n) + "x" +
                          std::to_string(entries_.cols()));
  }
  if (!item_ids_.empty() && static_cast<Index>(item_ids_.size()) != n) {
    throw ValidationError("item_ids has " + std::to_string(item_ids_.size()) +
                          " entries for a matrix of size " + std::to_string(n));
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw ValidationError("similarity " + format_double(v) + " outside [0,1] at " + cell(i, j));
      }
    }
    if (entries_(i, i) != 0.0) {
      throw ValidationError("nonzero diagonal entry " + format_double(entries_(i, i)) + " at " +
                            cell(i, i));
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double a = entries_(i, j);
      const double b = entries_(j, i);
      if (std::abs(a - b) > kSymmetryTolerance) {
        throw ValidationError("asymmetric similarity at " + cell(i, j) + ": " + format_double(a) +
                              " vs " + format_double(b));
      }
      if (a != b) {
        const double m = 0.5 * (a + b);
        entries_(i, j) = m;
        entries_(j, i) = m;
      }
    }
  }
}

std::string SimilarityMatrix::id_of(Index i) const {
  if (item_ids_.empty()) return std::to_string(i);
  return item_ids_[static_cast<std::size_t>(i)];
}

SimilarityMatrix SimilarityMatrix::submatrix(std::span<const Index> keep) const {
  const auto m = static_cast<Index>(keep.size());
  Matrix sub(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) sub(a, b) = entries_(keep[a], keep[b]);
  }
  std::vector<std::string> ids;
  if (!item_ids_.empty()) {
    ids.reserve(keep.size());
    for (Index i : keep) ids.push_back(item_ids_[static_cast<std::size_t>(i)]);
  }
  return SimilarityMatrix(std::move(sub), std::move(ids));
}

DegreeInfo degree_info(const SimilarityMatrix& s) {
  const Index n = s.size();
  DegreeInfo info{Vector(n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index l = 0; l < n; ++l) sum += s(i, l);
    info.degrees(i) = sum;
    info.augmented_degrees(i) = sum + 1.0;
  }
  return info;
}

Partition::Partition(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw ValidationError("partition needs k >= 1, got " + std::to_string(k_));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k_) {
      throw ValidationError("label " + std::to_string(labels_[i]) + " of item " +
                            std::to_string(i) + " outside [0, " + std::to_string(k_) + ")");
    }
  }
}

Partition Partition::from_labels(std::vector<int> labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return Partition(std::move(labels), std::max(k, 1));
}

std::vector<Index> Partition::cardinalities() const {
  std::vector<Index> counts(static_cast<std::size_t>(k_), 0);
  for (int l : labels_) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

bool Partition::has_empty_cluster() const {
  const auto counts = cardinalities();
  return std::find(counts.begin(), counts.end(), 0) != counts.end();
}

std::vector<Index> Partition::members(int cluster) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == cluster) out.push_back(static_cast<Index>(i));
  }
  return out;
}

void Embedding::validate() const {
  if (coords.rows() < 1 || coords.cols() < 1) {
    throw ValidationError("embedding needs at least one point and one dimension");
  }
  if (!coords.allFinite()) throw ValidationError("embedding contains non-finite coordinates");
  if (weights) {
    if (weights->size() != coords.rows()) {
      throw ValidationError("embedding weights have length " + std::to_string(weights->size()) +
                            ", expected " + std::to_string(coords.rows()));
    }
    for (Index i = 0; i < weights->size(); ++i) {
      if (!((*weights)(i) > 0.0) || !std::isfinite((*weights)(i))) {
        throw ValidationError("embedding weight of item " + std::to_string(i) +
                              " is not strictly positive");
      }
    }
  }
}

EigenDecomposition symmetric_eig(const Matrix& matrix) {
  const Index n = matrix.rows();
  if (matrix.cols() != n) throw ValidationError("symmetric_eig: matrix is not square");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (!std::isfinite(matrix(i, j))) {
        throw ValidationError("symmetric_eig: non-finite entry at " + cell(i, j));
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(matrix(i, j) - matrix(j, i)) > 1e-10) {
        throw ValidationError("symmetric_eig: asymmetric entry at " + cell(i, j));
      }
    }
  }
  if (n == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric_eig: eigensolver did not converge (n=" + std::to_string(n) + ")");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

std::filesystem::path ids_sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".ids.json";
  return p;
}

SimilarityMatrix read_similarity_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open similarity CSV " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("n=", 0) != 0) {
    throw ValidationError(path.string() + ": first line must be `n=<count>`");
  }
  long long n_decl = -1;
  {
    const char* b = line.data() + 2;
    const char* e = line.data() + line.size();
    auto [p, ec] = std::from_chars(b, e, n_decl);
    if (ec != std::errc() || p != e || n_decl < 0) {
      throw ValidationError(path.string() + ": malformed count line `" + line + "`");
    }
  }
  const auto n = static_cast<Index>(n_decl);
  Matrix m(n, n);
  Index row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) {
      throw ValidationError(path.string() + ": more than n=" + std::to_string(n) + " data rows");
    }
    Index col = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      std::string_view tok(line.data() + pos,
                           (comma == std::string::npos ? line.size() : comma) - pos);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      if (col >= n) {
        throw ValidationError(path.string() + ": row " + std::to_string(row) + " has more than " +
                              std::to_string(n) + " columns");
      }
      double v = 0.0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty()) {
        throw ValidationError(path.string() + ": unparsable value `" + std::string(tok) + "` at " +
                              cell(row, col));
      }
      m(row, col++) = v;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (col != n) {
      throw ValidationError(path.string() + ": row " + std::to_string(row) + " has " +
                            std::to_string(col) + " columns, expected " + std::to_string(n));
    }
    ++row;
  }
  if (row != n) {
    throw ValidationError(path.string() + ": found " + std::to_string(row) + " rows, expected " +
                          std::to_string(n));
  }

  std::vector<std::string> ids;
  const auto sidecar = ids_sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    std::ifstream js(sidecar);
    nlohmann::json doc;
    try {
      js >> doc;
      ids = doc.at("item_ids").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(sidecar.string() + ": " + e.what());
    }
  }
  try {
    return SimilarityMatrix(std::move(m), std::move(ids));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_similarity_csv(const SimilarityMatrix& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  const Index n = s.size();
  out << "n=" << n << '\n';
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(s(i, j));
    }
    out << '\n';
  }
  if (s.has_item_ids()) {
    std::ofstream js(ids_sidecar_path(path));
    js << nlohmann::json{{"item_ids", s.item_ids()}}.dump() << '\n';
  }
}

void write_embedding_csv(const Embedding& e, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "# kind=" << e.kind << '\n';
  for (Index c = 0; c < e.dimension(); ++c) {
    if (c) out << ',';
    out << "dim_" << (c + 1);
  }
  if (e.weights) out << ",weight";
  out << '\n';
  for (Index i = 0; i < e.size(); ++i) {
    for (Index c = 0; c < e.dimension(); ++c) {
      if (c) out << ',';
      out << format_double(e.coords(i, c));
    }
    if (e.weights) out << ',' << format_double((*e.weights)(i));
    out << '\n';
  }
}

}  // namespace roughspec
