#include "roughspec/spectral.hpp"

#include "roughspec/errors.hpp"

#include <cmath>

namespace roughspec {

namespace {

Vector checked_degrees(const SimilarityMatrix& s, const char* what) {
  Vector d = degree_info(s).degrees;
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      throw ValidationError(std::string(what) + ": node " + std::to_string(i) + " (" + s.id_of(i) +
                            ") has zero degree");
    }
  }
  return d;
}

}  // namespace

std::string to_string(LaplacianKind kind) {
  switch (kind) {
    case LaplacianKind::Combinatorial: return "L";
    case LaplacianKind::Normalized: return "N";
    case LaplacianKind::RandomWalk: return "RW";
    case LaplacianKind::KamvarAffinity: return "Kamvar";
  }
  return "?";
}

void SpectralOptions::validate() const {
  if (k < 2) throw ValidationError("spectral embedding needs k >= 2, got " + std::to_string(k));
  if (svd_rank && *svd_rank < 1) throw ValidationError("svd_rank must be >= 1");
}

Matrix combinatorial_laplacian(const SimilarityMatrix& s) {
  Matrix l = -s.entries();
  l.diagonal() = degree_info(s).degrees;
  return l;
}

Matrix normalized_laplacian(const SimilarityMatrix& s) {
  const Vector d = checked_degrees(s, "normalized_laplacian");
  const Vector inv_sqrt = d.array().rsqrt();
  Matrix l = combinatorial_laplacian(s);
  l = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
  // exact symmetry; the scaling above can leave 1-ulp differences
  Matrix sym = 0.5 * (l + l.transpose());
  return sym;
}

Matrix random_walk_laplacian(const SimilarityMatrix& s) {
  const Vector d = checked_degrees(s, "random_walk_laplacian");
  return combinatorial_laplacian(s) * d.cwiseInverse().asDiagonal();
}

Matrix kamvar_affinity(const SimilarityMatrix& s) {
  const Vector d = degree_info(s).degrees;
  const double d_max = s.size() > 0 ? d.maxCoeff() : 0.0;
  if (!(d_max > 0.0)) throw ValidationError("kamvar_affinity: all similarities are zero");
  Matrix a = s.entries();
  for (Index i = 0; i < a.rows(); ++i) a(i, i) = d_max - d(i);
  return a / d_max;
}

void normalize_rows(Matrix& coords) {
  for (Index i = 0; i < coords.rows(); ++i) {
    const double norm = coords.row(i).norm();
    if (norm > 0.0) coords.row(i) /= norm;
  }
}

Embedding spectral_embed(const SimilarityMatrix& s, LaplacianKind kind, const SpectralOptions& opts) {
  opts.validate();
  const Index n = s.size();
  const Index d = opts.dimension();
  const Index offset = opts.skip_trivial ? 1 : 0;
  if (d + offset > n) {
    throw ValidationError("spectral embedding dimension " + std::to_string(d + offset) +
                          " exceeds item count " + std::to_string(n));
  }

  Embedding e;
  e.kind = to_string(kind);
  switch (kind) {
    case LaplacianKind::Combinatorial: {
      const auto eig = symmetric_eig(combinatorial_laplacian(s));
      e.coords = eig.vectors.middleCols(offset, d);
      break;
    }
    case LaplacianKind::Normalized: {
      const auto eig = symmetric_eig(normalized_laplacian(s));
      e.coords = eig.vectors.middleCols(offset, d);
      break;
    }
    case LaplacianKind::RandomWalk: {
      const auto eig = symmetric_eig(normalized_laplacian(s));
      const Vector sqrt_deg = degree_info(s).degrees.array().sqrt();
      Matrix v = sqrt_deg.asDiagonal() * eig.vectors.middleCols(offset, d);
      for (Index c = 0; c < v.cols(); ++c) v.col(c).normalize();
      e.coords = std::move(v);
      break;
    }
    case LaplacianKind::KamvarAffinity: {
      const auto eig = symmetric_eig(kamvar_affinity(s));
      // largest eigenvalues sit at the right end of the ascending spectrum
      Matrix v(n, d);
      for (Index c = 0; c < d; ++c) v.col(c) = eig.vectors.col(n - 1 - offset - c);
      e.coords = std::move(v);
      break;
    }
  }
  if (opts.unit_rows) normalize_rows(e.coords);
  return e;
}

}  // namespace roughspec
