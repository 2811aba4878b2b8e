#include "doctest.h"

#include "../support/oracles.hpp"
#include "roughspec/errors.hpp"
#include "roughspec/kmeans.hpp"
#include "roughspec/spectral.hpp"
#include "roughspec/synthgen.hpp"

using namespace roughspec;

namespace {

SimilarityMatrix pair11() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return SimilarityMatrix(m);
}

int count_below(const Vector& v, double tol) {
  int c = 0;
  for (Index i = 0; i < v.size(); ++i) c += v(i) < tol;
  return c;
}

}  // namespace

TEST_CASE("laplacians on the 2x2 pair") {
  Matrix expect(2, 2);
  expect << 1, -1, -1, 1;
  CHECK(combinatorial_laplacian(pair11()) == expect);
  CHECK((normalized_laplacian(pair11()) - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((random_walk_laplacian(pair11()) - expect).cwiseAbs().maxCoeff() < 1e-15);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((kamvar_affinity(pair11()) - swap).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(combinatorial_laplacian(SimilarityMatrix(Matrix::Zero(3, 3))).isZero());
}

TEST_CASE("degenerate inputs are rejected") {
  SimilarityMatrix zero(Matrix::Zero(3, 3));
  CHECK_THROWS_AS(normalized_laplacian(zero), ValidationError);
  CHECK_THROWS_AS(random_walk_laplacian(zero), ValidationError);
  CHECK_THROWS_AS(kamvar_affinity(zero), ValidationError);
  SpectralOptions o;
  o.k = 1;
  CHECK_THROWS_AS(o.validate(), ValidationError);
  o.k = 3;
  o.extra_dimension = true;
  std::mt19937_64 g(1);
  CHECK_THROWS_AS(spectral_embed(oracle::random_similarity(g, 3), LaplacianKind::Combinatorial, o), ValidationError);
}

TEST_CASE("laplacian properties on random inputs (property)") {
  std::mt19937_64 g(21);
  for (int rep = 0; rep < 25; ++rep) {
    const Index n = 3 + Index(g() % 12);
    const auto s = oracle::random_similarity(g, n, 0.0, 1.0, rep % 2 ? 0.3 : 0.0);
    const Vector d = degree_info(s).degrees;
    const Matrix l = combinatorial_laplacian(s);
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    const auto el = symmetric_eig(l);
    CHECK(el.values(0) >= -1e-10);
    CHECK((l * Vector::Constant(n, 1.0 / std::sqrt(double(n)))).norm() < 1e-10);

    if (d.minCoeff() <= 0.0) continue;
    const Matrix nl = normalized_laplacian(s);
    const auto en = symmetric_eig(nl);
    CHECK(en.values(0) >= -1e-10);
    CHECK(en.values(n - 1) <= 2.0 + 1e-10);
    const Matrix half = d.cwiseSqrt().asDiagonal();
    CHECK((half * nl * half - l).cwiseAbs().maxCoeff() < 1e-10);

    const Matrix rw = random_walk_laplacian(s);
    CHECK(rw.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
    Eigen::EigenSolver<Matrix> es(rw);
    std::vector<double> re;
    for (Index i = 0; i < n; ++i) re.push_back(es.eigenvalues()(i).real());
    std::sort(re.begin(), re.end());
    for (Index i = 0; i < n; ++i) CHECK(std::abs(re[std::size_t(i)] - en.values(i)) < 1e-8);

    const Matrix ka = kamvar_affinity(s);
    CHECK(ka.rowwise().sum().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ka.rowwise().sum().minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ka.minCoeff() >= 0.0);
  }
}

TEST_CASE("block-spectrum property and the disturbing object") {
  std::mt19937_64 g(4);
  for (int k = 2; k <= 4; ++k) {
    std::vector<Index> sizes;
    for (int b = 0; b < k; ++b) sizes.push_back(5 + Index(g() % 6));
    const auto s = oracle::block_matrix(g, sizes);
    const auto e = symmetric_eig(combinatorial_laplacian(s));
    CHECK(count_below(e.values, 1e-8) == k);
    // indicator vectors lie in the null space (checked by projection)
    const Matrix null = e.vectors.leftCols(k);
    Index start = 0;
    for (Index sz : sizes) {
      Vector ind = Vector::Zero(s.size());
      ind.segment(start, sz).setConstant(1.0 / std::sqrt(double(sz)));
      CHECK((null * (null.transpose() * ind) - ind).norm() < 1e-8);
      start += sz;
    }
    Matrix bigger = Matrix::Zero(s.size() + 1, s.size() + 1);
    bigger.topLeftCorner(s.size(), s.size()) = s.entries();
    const auto e2 = symmetric_eig(combinatorial_laplacian(SimilarityMatrix(bigger)));
    CHECK(count_below(e2.values, 1e-8) == k + 1);

    if (k == 2) {
      const auto en = symmetric_eig(normalized_laplacian(s));
      CHECK(count_below(en.values, 1e-8) == 2);
    }
  }
}

TEST_CASE("embedding of an exact two-block matrix") {
  std::mt19937_64 g(9);
  const auto s = oracle::block_matrix(g, {6, 9});
  SpectralOptions o;
  o.k = 2;
  auto e = spectral_embed(s, LaplacianKind::Combinatorial, o);
  CHECK(e.dimension() == 2);
  CHECK(!e.weights);
  for (Index i = 1; i < 6; ++i) CHECK((e.coords.row(i) - e.coords.row(0)).norm() < 1e-6);
  for (Index i = 7; i < 15; ++i) CHECK((e.coords.row(i) - e.coords.row(6)).norm() < 1e-6);
  CHECK((e.coords.row(0) - e.coords.row(6)).norm() > 1e-3);

  o.unit_rows = true;
  for (auto kind : {LaplacianKind::Combinatorial, LaplacianKind::Normalized, LaplacianKind::RandomWalk,
                    LaplacianKind::KamvarAffinity}) {
    e = spectral_embed(s, kind, o);
    for (Index i = 0; i < 15; ++i) CHECK(std::abs(e.coords.row(i).norm() - 1.0) < 1e-12);
  }
  o.extra_dimension = true;
  CHECK(spectral_embed(s, LaplacianKind::Normalized, o).dimension() == 3);
}

TEST_CASE("random-walk vectors are right eigenvectors of L D^-1 after rescaling") {
  std::mt19937_64 g(31);
  const auto s = oracle::random_similarity(g, 9, 0.05, 1.0);
  SpectralOptions o;
  o.k = 3;
  const auto e = spectral_embed(s, LaplacianKind::RandomWalk, o);
  const Matrix rw = random_walk_laplacian(s);
  const auto en = symmetric_eig(normalized_laplacian(s));
  for (Index c = 0; c < 3; ++c) {
    const Vector v = e.coords.col(c);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    CHECK((rw * v - en.values(c) * v).norm() < 1e-9);
  }
}

TEST_CASE("normalize_rows leaves zero rows alone") {
  Matrix m(2, 2);
  m << 3, 4, 0, 0;
  normalize_rows(m);
  CHECK(m(0, 0) == doctest::Approx(0.6));
  CHECK(m(1, 0) == 0.0);
}

TEST_CASE("dataset-1 draw, normalized embedding recovers the planted clusters") {
  const auto data = generate(dataset_preset(1, 2024, 400));
  SpectralOptions o;
  o.k = 4;
  const auto e = spectral_embed(data.similarity, LaplacianKind::Normalized, o);
  KMeansConfig c;
  c.k = 4;
  c.seed = 1;
  const auto r = kmeans(e, c);
  CHECK(oracle::relative_error(data.truth.labels(), r.partition.labels()) == 0.0);
}
