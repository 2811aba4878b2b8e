#pragma once

#include "roughspec/simcore.hpp"

#include <vector>

namespace roughspec {

enum class GowerKind { K, M, B };

/// -1/2 J A J with J = I - 11^T/n, plus the eigen-dimensions kept for coordinates.
struct CenteredGram {
  Matrix matrix;
  std::vector<Index> kept_dims;  // filled by gram_embedding
};

/// Double centering of a symmetric matrix, computed from row/column means.
CenteredGram double_center(const Matrix& a);

/// Squared pseudo-distances whose Gower embedding yields the K, M or B coordinates:
///   K: 1 - s_il
///   M: 1/d_ii + 1/d_ll - 2 s_il/(d_ii d_ll)
///   B: 1/d'_ii^2 + 1/d'_ll^2 - 2 s_il/(d'_ii d'_ll), d' = d + 1
/// all with a zero diagonal. M throws ValidationError on a zero-degree node.
Matrix squared_distances(const SimilarityMatrix& s, GowerKind kind);

/// Coordinates V_kept * Lambda_kept^{1/2}. Eigenvalues <= 1e-9 * trace are
/// dropped; the |sum| of dropped negative eigenvalues is stored in
/// Embedding::dropped_mass. If nothing survives, a single zero column is returned.
Embedding gram_embedding(CenteredGram& gram, std::string kind);

Embedding k_embedding(const SimilarityMatrix& s);
/// Weighted by degrees d_ii.
Embedding m_embedding(const SimilarityMatrix& s);
/// Weighted by augmented degrees d'_ii.
Embedding b_embedding(const SimilarityMatrix& s);

Embedding gower_embed(const SimilarityMatrix& s, GowerKind kind);

}  // namespace roughspec
