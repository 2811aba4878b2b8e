#include "roughspec/gower.hpp"

#include "roughspec/errors.hpp"

#include <cmath>

namespace roughspec {

CenteredGram double_center(const Matrix& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw ValidationError("double_center: matrix is not square");
  if (n == 0) return {};
  const Vector row_mean = a.rowwise().mean();
  const Vector col_mean = a.colwise().mean().transpose();
  const double grand = row_mean.mean();
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      k(i, j) = -0.5 * (a(i, j) - row_mean(i) - col_mean(j) + grand);
    }
  }
  Matrix sym = 0.5 * (k + k.transpose());
  return {std::move(sym), {}};
}

Matrix squared_distances(const SimilarityMatrix& s, GowerKind kind) {
  const Index n = s.size();
  Matrix a(n, n);
  switch (kind) {
    case GowerKind::K:
      a = Matrix::Ones(n, n) - s.entries();
      break;
    case GowerKind::M: {
      const Vector d = degree_info(s).degrees;
      for (Index i = 0; i < n; ++i) {
        if (!(d(i) > 0.0)) {
          throw ValidationError("m_embedding: node " + std::to_string(i) + " (" + s.id_of(i) +
                                ") has zero degree");
        }
      }
      for (Index l = 0; l < n; ++l) {
        for (Index i = 0; i < n; ++i) {
          a(i, l) = (d(i) + d(l) - 2.0 * s(i, l)) / (d(i) * d(l));
        }
      }
      break;
    }
    case GowerKind::B: {
      const Vector dp = degree_info(s).augmented_degrees;
      for (Index l = 0; l < n; ++l) {
        for (Index i = 0; i < n; ++i) {
          a(i, l) = 1.0 / (dp(i) * dp(i)) + 1.0 / (dp(l) * dp(l)) - 2.0 * s(i, l) / (dp(i) * dp(l));
        }
      }
      break;
    }
  }
  a.diagonal().setZero();
  return a;
}

Embedding gram_embedding(CenteredGram& gram, std::string kind) {
  const Index n = gram.matrix.rows();
  const auto eig = symmetric_eig(gram.matrix);
  const double trace = gram.matrix.trace();
  const double tol = 1e-9 * std::abs(trace);

  Embedding e;
  e.kind = std::move(kind);
  e.trace = trace;
  gram.kept_dims.clear();
  // descending, so the leading coordinate carries the most variance
  for (Index c = n - 1; c >= 0; --c) {
    const double lambda = eig.values(c);
    if (lambda > tol) {
      gram.kept_dims.push_back(c);
    } else if (lambda < -tol) {
      e.dropped_mass += -lambda;
    }
  }
  if (gram.kept_dims.empty()) {
    e.coords = Matrix::Zero(n, 1);
    return e;
  }
  e.coords.resize(n, static_cast<Index>(gram.kept_dims.size()));
  for (std::size_t c = 0; c < gram.kept_dims.size(); ++c) {
    const Index src = gram.kept_dims[c];
    e.coords.col(static_cast<Index>(c)) = eig.vectors.col(src) * std::sqrt(eig.values(src));
  }
  return e;
}

Embedding k_embedding(const SimilarityMatrix& s) {
  auto gram = double_center(squared_distances(s, GowerKind::K));
  return gram_embedding(gram, "K");
}

Embedding m_embedding(const SimilarityMatrix& s) {
  auto gram = double_center(squared_distances(s, GowerKind::M));
  auto e = gram_embedding(gram, "M");
  e.weights = degree_info(s).degrees;
  return e;
}

Embedding b_embedding(const SimilarityMatrix& s) {
  auto gram = double_center(squared_distances(s, GowerKind::B));
  auto e = gram_embedding(gram, "B");
  e.weights = degree_info(s).augmented_degrees;
  return e;
}

Embedding gower_embed(const SimilarityMatrix& s, GowerKind kind) {
  switch (kind) {
    case GowerKind::K: return k_embedding(s);
    case GowerKind::M: return m_embedding(s);
    case GowerKind::B: return b_embedding(s);
  }
  throw ValidationError("unknown Gower embedding kind");
}

}  // namespace roughspec
