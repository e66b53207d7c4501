#include <doctest.h>

#include <sstream>

#include "checks.hpp"
#include "cocoscan/classifiers.hpp"
#include "cocoscan/features.hpp"
#include "cocoscan/numerics.hpp"
#include "cocoscan/synth.hpp"
#include "oracles.hpp"

using namespace cocoscan;

namespace {

SpectralDataset make(const Matrix& x, std::vector<int> y, std::size_t classes) {
  std::vector<double> axis(x.cols());
  for (std::size_t j = 0; j < axis.size(); ++j) axis[j] = 100.0 + static_cast<double>(j);
  std::vector<ClassLabel> labels;
  for (std::size_t c = 0; c < classes; ++c) labels.push_back({static_cast<int>(c), "c" + std::to_string(c)});
  return SpectralDataset(x, std::move(y), WavelengthAxis(axis), labels);
}

// Between/within variance ratio of a single projected coordinate.
double fisher_ratio(const std::vector<double>& z, std::span<const int> y, std::size_t c) {
  std::vector<double> sum(c, 0), cnt(c, 0);
  double total = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    sum[y[i]] += z[i];
    cnt[y[i]] += 1;
    total += z[i];
  }
  const double mu = total / static_cast<double>(z.size());
  double between = 0, within = 0;
  for (std::size_t k = 0; k < c; ++k) between += cnt[k] * std::pow(sum[k] / cnt[k] - mu, 2);
  for (std::size_t i = 0; i < z.size(); ++i) within += std::pow(z[i] - sum[y[i]] / cnt[y[i]], 2);
  return between / within;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("class statistics fixtures") {
  const auto ds = make(Matrix{{0, 0}, {2, 2}, {4, 4}}, {0, 0, 1}, 2);
  const auto s = class_statistics(ds);
  CHECK(s.global_mean == std::vector<double>{2, 2});
  CHECK(s.class_means == Matrix{{1, 1}, {4, 4}});
  CHECK(s.priors[0] == doctest::Approx(2.0 / 3));
  CHECK(s.priors[1] == doctest::Approx(1.0 / 3));

  const auto one_each = make(Matrix{{1, 5}, {3, 7}}, {0, 1}, 2);
  const auto s1 = class_statistics(one_each);
  CHECK(s1.class_means == one_each.x());
  CHECK(s1.global_mean == std::vector<double>{2, 6});
  const auto sc = scatter_matrices(one_each, s1);
  CHECK(sc.s_w == Matrix(2, 2));

  const auto empty_class = make(Matrix{{1}, {2}}, {0, 0}, 2);
  CHECK_THROWS_AS(class_statistics(empty_class), InvalidInput);
}

TEST_CASE("42-sample 3x14 dataset has equal priors") {
  const auto s = class_statistics(generate(SynthSpec{}));
  for (double p : s.priors) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("scatter matrices hand-expanded") {
  const auto ds = make(Matrix{{0, 0}, {2, 0}, {4, 0}, {6, 0}}, {0, 0, 1, 1}, 2);
  const auto sc = scatter_matrices(ds, class_statistics(ds));
  CHECK(oracle::max_abs_diff(sc.s_b, Matrix{{4, 0}, {0, 0}}) < 1e-12);
  CHECK(oracle::max_abs_diff(sc.s_w, Matrix{{1, 0}, {0, 0}}) < 1e-12);

  const auto same_means = make(Matrix{{0, 1}, {2, 3}, {2, 1}, {0, 3}}, {0, 0, 1, 1}, 2);
  const auto sc2 = scatter_matrices(same_means, class_statistics(same_means));
  CHECK(oracle::frob(sc2.s_b) < 1e-12);
}

TEST_CASE("scatter invariants on random data") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t c = 2 + rng.index(3);
    const std::size_t d = 2 + rng.index(6);
    const auto ds = checks::random_classes(rng, c, 4, d);
    const auto s = class_statistics(ds);
    double psum = 0;
    for (double p : s.priors) psum += p;
    CHECK(std::abs(psum - 1) <= 1e-12);
    for (std::size_t j = 0; j < d; ++j) {
      double mix = 0;
      for (std::size_t k = 0; k < c; ++k) mix += s.priors[k] * s.class_means(k, j);
      CHECK(std::abs(mix - s.global_mean[j]) <= 1e-9);
    }
    const auto sc = scatter_matrices(ds, s);
    for (const Matrix* m : {&sc.s_w, &sc.s_b}) {
      CHECK(oracle::max_abs_diff(*m, m->transpose()) <= 1e-10 * (1 + oracle::frob(*m)));
      const auto e = sym_eig(*m);
      CHECK(e.values.back() >= -1e-9 * oracle::frob(*m));
    }
    const auto eb = sym_eig(sc.s_b);
    std::size_t rank = 0;
    for (double v : eb.values) rank += v > 1e-9 * oracle::frob(sc.s_b);
    CHECK(rank <= c - 1);
  }
}

TEST_CASE("LDA finds the separating axis") {
  oracle::Rng rng(42);
  Matrix x(200, 2);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = static_cast<int>(i % 2);
    x(i, 0) = (y[i] ? 5.0 : -5.0) + rng.normal(0, 0.5);
    x(i, 1) = rng.normal(0, 3.0);
  }
  const auto ds = make(x, y, 2);
  const auto m = fit_lda(ds);
  REQUIRE(m.output_dim() == 1);
  // closed form for 2x2: direction proportional to S_w^-1 (mu1 - mu0)
  const auto s = class_statistics(ds);
  const auto sc = scatter_matrices(ds, s);
  const Matrix sw = ridge_regularize(sc.s_w, 1e-6);
  const double a = sw(0, 0), b = sw(0, 1), d = sw(1, 1);
  const double det = a * d - b * b;
  const double dm0 = s.class_means(1, 0) - s.class_means(0, 0);
  const double dm1 = s.class_means(1, 1) - s.class_means(0, 1);
  const double v0 = (d * dm0 - b * dm1) / det, v1 = (-b * dm0 + a * dm1) / det;
  const double t0 = m.projection(0, 0), t1 = m.projection(1, 0);
  const double cosang = std::abs(v0 * t0 + v1 * t1) / (std::hypot(v0, v1) * std::hypot(t0, t1));
  CHECK(cosang >= std::cos(1e-6));
  const double axis_angle = std::acos(std::min(1.0, std::abs(t0) / std::hypot(t0, t1)));
  CHECK(axis_angle <= 1e-1);  // within noise of the true axis
}

TEST_CASE("LDA component count and preconditions") {
  oracle::Rng rng(43);
  const auto two = checks::random_classes(rng, 2, 5, 4);
  CHECK(fit_lda(two).output_dim() == 1);
  LdaConfig too_many;
  too_many.components = 2;
  CHECK_THROWS_AS(fit_lda(two, too_many), InvalidInput);
  const auto three = checks::random_classes(rng, 3, 5, 4);
  const auto m3 = fit_lda(three);
  CHECK(m3.output_dim() == 2);
  CHECK(m3.eigenvalues.size() == 2);
  CHECK(m3.eigenvalues[0] >= m3.eigenvalues[1]);
  CHECK(m3.eigenvalues[1] >= 0);
  const auto tiny = make(Matrix{{0}, {1}}, {0, 1}, 2);
  CHECK_THROWS_AS(fit_lda(tiny), InvalidInput);
  const auto one_class = make(Matrix{{0}, {1}, {2}}, {0, 0, 0}, 1);
  CHECK_THROWS_AS(fit_lda(one_class), InvalidInput);
}

TEST_CASE("LDA eigenvalues equal those of explicit S_w^-1 S_B") {
  oracle::Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = 2 + rng.index(3);
    const std::size_t d = 1 + rng.index(6);
    const auto ds = checks::random_classes(rng, c, 4 + rng.index(4), d);
    LdaConfig cfg;
    cfg.components = std::min(c - 1, d);
    const auto m = fit_lda(ds, cfg);
    const auto eq = checks::lda_equivalence(ds, m);
    CHECK(eq.power_sum_error <= 1e-8);
    CHECK(eq.eigvec_residual <= 1e-8);
  }
}

TEST_CASE("LDA transform is X*T and separates at least as well as any band") {
  oracle::Rng rng(45);
  const auto ds = checks::random_classes(rng, 3, 10, 5, 1.0);
  const auto m = fit_lda(ds);
  const Matrix z = transform_lda(m, ds.x());
  CHECK(oracle::max_abs_diff(z, oracle::naive_mul(ds.x(), m.projection)) < 1e-9);
  const double lda_ratio = fisher_ratio(z.column(0), ds.y(), 3);
  for (std::size_t j = 0; j < ds.d(); ++j)
    CHECK(lda_ratio >= fisher_ratio(ds.x().column(j), ds.y(), 3) * (1 - 1e-6));
  CHECK_THROWS_AS(transform_lda(m, Matrix(2, 4)), InvalidInput);
}

TEST_CASE("LDA then KNN is invariant to absorbance scaling") {
  oracle::Rng rng(46);
  const auto ds = checks::random_classes(rng, 3, 8, 4, 1.0);
  const auto queries = oracle::random_matrix(rng, 20, 4, -3, 3);
  auto predict_all = [&](double scale) {
    const auto scaled = ds.with_features(scale * ds.x());
    const auto m = fit_lda(make(scale * ds.x(), std::vector<int>(ds.y().begin(), ds.y().end()), 3));
    const auto knn = fit_knn(transform_lda(m, scaled.x()), ds.y(), 3);
    const Matrix zq = transform_lda(m, scale * queries);
    std::vector<int> out;
    for (std::size_t i = 0; i < zq.rows(); ++i) out.push_back(predict_knn(knn, zq.row(i)));
    return out;
  };
  CHECK(predict_all(1.0) == predict_all(7.5));
}

TEST_CASE("class-dependent variant and PCA-first option") {
  oracle::Rng rng(47);
  const auto ds = checks::random_classes(rng, 3, 8, 5);
  LdaConfig dep;
  dep.variant = LdaVariant::ClassDependent;
  const auto m = fit_lda(ds, dep);
  CHECK(m.output_dim() == 3 * m.components);
  CHECK(transform_lda(m, ds.x()).cols() == m.output_dim());

  LdaConfig pf;
  pf.pca_first = true;
  const auto mp = fit_lda(ds, pf);
  CHECK(mp.input_dim() == 5);
  CHECK(mp.output_dim() == 2);
  CHECK(parse_lda_variant(to_string(LdaVariant::ClassDependent)) == LdaVariant::ClassDependent);
  CHECK_THROWS_AS(parse_lda_variant("nope"), InvalidInput);
}

TEST_CASE("LDA on 729 synthetic bands stays fast and finite") {
  const auto ds = generate(SynthSpec{});
  const auto m = fit_lda(ds);
  CHECK(m.output_dim() == 2);
  CHECK(m.projection.all_finite());
}

TEST_CASE("PCA fixtures") {
  // points on the line y = 2x
  Matrix line(6, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    line(i, 0) = static_cast<double>(i);
    line(i, 1) = 2.0 * static_cast<double>(i);
  }
  const auto p = fit_pca(line, 2);
  CHECK(std::abs(p.components(1, 0) / p.components(0, 0) - 2.0) < 1e-9);
  CHECK(std::abs(p.explained_variance[1]) < 1e-9);

  const auto z = transform_pca(p, Matrix{{p.mean[0], p.mean[1]}});
  CHECK(std::abs(z(0, 0)) < 1e-12);
  CHECK(std::abs(z(0, 1)) < 1e-12);

  CHECK_THROWS_AS(fit_pca(line, 3), InvalidInput);
  CHECK_THROWS_AS(fit_pca(Matrix(1, 3), 1), InvalidInput);
  CHECK_THROWS_AS(transform_pca(p, Matrix(1, 3)), InvalidInput);
}

TEST_CASE("PCA isotropic data has near-equal variances") {
  // the 4 vertices of a square: covariance is a multiple of I
  const auto p = fit_pca(Matrix{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}, 2);
  CHECK(p.explained_variance[0] == doctest::Approx(p.explained_variance[1]));
  const Matrix proj = oracle::naive_mul(p.components, p.components.transpose());
  CHECK(oracle::max_abs_diff(proj, Matrix::identity(2)) < 1e-12);
}

TEST_CASE("PCA full-rank reconstruction and invariants") {
  oracle::Rng rng(48);
  const Matrix x = oracle::random_matrix(rng, 20, 5);
  const auto p = fit_pca(x, 5);
  const Matrix y = transform_pca(p, x);
  Matrix back = oracle::naive_mul(y, p.components.transpose());
  double total_var = 0;
  for (std::size_t j = 0; j < 5; ++j) {
    double m = 0, s = 0;
    for (std::size_t i = 0; i < 20; ++i) m += x(i, j) / 20.0;
    for (std::size_t i = 0; i < 20; ++i) s += (x(i, j) - m) * (x(i, j) - m) / 19.0;
    total_var += s;
    for (std::size_t i = 0; i < 20; ++i) back(i, j) += p.mean[j];
  }
  CHECK(oracle::max_abs_diff(back, x) <= 1e-8);
  const Matrix ctc = oracle::naive_mul(p.components.transpose(), p.components);
  CHECK(oracle::max_abs_diff(ctc, Matrix::identity(5)) <= 1e-8);
  double ev = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    ev += p.explained_variance[i];
    if (i) CHECK(p.explained_variance[i - 1] >= p.explained_variance[i]);
  }
  CHECK(std::abs(ev - total_var) <= 1e-8);
  const auto p2 = fit_pca(x, 2);
  const Matrix y2 = transform_pca(p2, x);
  for (std::size_t i = 0; i < 20; ++i) {
    double zn = 0, xn = 0;
    for (std::size_t j = 0; j < 2; ++j) zn += y2(i, j) * y2(i, j);
    for (std::size_t j = 0; j < 5; ++j) xn += std::pow(x(i, j) - p2.mean[j], 2);
    CHECK(std::sqrt(zn) <= std::sqrt(xn) + 1e-9);
  }
}

TEST_CASE("PCA wide data uses the sample-space path") {
  oracle::Rng rng(49);
  const Matrix x = oracle::random_matrix(rng, 6, 50);
  const auto p = fit_pca(x, 5);
  const Matrix ctc = oracle::naive_mul(p.components.transpose(), p.components);
  CHECK(oracle::max_abs_diff(ctc, Matrix::identity(5)) <= 1e-8);
  // each component is an eigenvector of the covariance
  Matrix centered = x;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 50; ++j) centered(i, j) -= p.mean[j];
  const Matrix cov = (1.0 / 5.0) * oracle::naive_mul(centered.transpose(), centered);
  for (std::size_t k = 0; k < 5; ++k) {
    double res = 0;
    for (std::size_t r = 0; r < 50; ++r) {
      double cv = 0;
      for (std::size_t c = 0; c < 50; ++c) cv += cov(r, c) * p.components(c, k);
      res += std::pow(cv - p.explained_variance[k] * p.components(r, k), 2);
    }
    CHECK(std::sqrt(res) <= 1e-8 * oracle::frob(cov));
  }
}

TEST_CASE("feature models round-trip through text") {
  oracle::Rng rng(50);
  const auto ds = checks::random_classes(rng, 3, 6, 4);
  const auto lda = fit_lda(ds);
  std::stringstream s1;
  write_model(s1, lda);
  const auto lda2 = read_lda_model(s1);
  CHECK(lda2.projection == lda.projection);
  CHECK(lda2.eigenvalues == lda.eigenvalues);
  CHECK(transform_lda(lda2, ds.x()) == transform_lda(lda, ds.x()));

  const auto pca = fit_pca(ds.x(), 3);
  std::stringstream s2;
  write_model(s2, pca);
  const auto pca2 = read_pca_model(s2);
  CHECK(transform_pca(pca2, ds.x()) == transform_pca(pca, ds.x()));

  std::stringstream bad("lda 3 x");
  CHECK_THROWS_AS(read_lda_model(bad), InvalidInput);
}

}  // TEST_SUITE
