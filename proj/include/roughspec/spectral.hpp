#pragma once

#include "roughspec/simcore.hpp"

#include <optional>
#include <string>

namespace roughspec {

enum class LaplacianKind { Combinatorial, Normalized, RandomWalk, KamvarAffinity };

std::string to_string(LaplacianKind kind);

struct SpectralOptions {
  int k = 2;
  bool extra_dimension = false;  // use k + 1 eigenvectors
  bool unit_rows = false;        // rescale embedding rows to unit length
  std::optional<Index> svd_rank;  // applied upstream, on the term space
  /// Experimental: skip the eigenvector of the smallest (trivial) eigenvalue.
  bool skip_trivial = false;

  int dimension() const { return k + (extra_dimension ? 1 : 0); }
  void validate() const;
};

/// L = D - S.
Matrix combinatorial_laplacian(const SimilarityMatrix& s);

/// D^{-1/2} L D^{-1/2}. Throws ValidationError on a zero-degree node.
Matrix normalized_laplacian(const SimilarityMatrix& s);

/// L D^{-1} = I - S D^{-1} (not symmetric; column sums vanish).
Matrix random_walk_laplacian(const SimilarityMatrix& s);

/// (S + d_max I - D) / d_max: symmetric, nonnegative, rows sum to 1.
Matrix kamvar_affinity(const SimilarityMatrix& s);

/// Eigenvectors of the d smallest Laplacian eigenvalues (d largest for the
/// Kamvar affinity), d = opts.dimension(). Random-walk vectors are obtained
/// from the normalized Laplacian as D^{1/2} u, rescaled to unit length.
Embedding spectral_embed(const SimilarityMatrix& s, LaplacianKind kind, const SpectralOptions& opts);

/// Rows with nonzero norm rescaled to unit length; zero rows are left as is.
void normalize_rows(Matrix& coords);

}  // namespace roughspec
