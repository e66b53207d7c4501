#include "cocoscan/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "cocoscan/error.hpp"
#include "cocoscan/numerics.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

std::string_view to_string(LdaVariant v) {
  return v == LdaVariant::ClassIndependent ? "class-independent" : "class-dependent";
}

LdaVariant parse_lda_variant(std::string_view s) {
  if (s == "class-independent") return LdaVariant::ClassIndependent;
  if (s == "class-dependent") return LdaVariant::ClassDependent;
  throw InvalidInput("unknown LDA variant '" + std::string(s) +
                     "' (expected class-independent or class-dependent)");
}

ClassStatistics class_statistics(const SpectralDataset& ds) {
  const std::size_t n = ds.n();
  const std::size_t d = ds.d();
  const std::size_t c = ds.num_classes();
  ClassStatistics st;
  st.class_counts = ds.class_counts();
  for (std::size_t j = 0; j < c; ++j)
    if (st.class_counts[j] == 0)
      throw InvalidInput("empty class '" + ds.class_name(static_cast<int>(j)) + "'");

  st.global_mean.assign(d, 0.0);
  st.class_means = Matrix(c, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ds.x().row(i);
    auto cm = st.class_means.row(static_cast<std::size_t>(ds.y()[i]));
    for (std::size_t k = 0; k < d; ++k) {
      st.global_mean[k] += row[k];
      cm[k] += row[k];
    }
  }
  for (double& v : st.global_mean) v /= static_cast<double>(n);
  st.priors.resize(c);
  for (std::size_t j = 0; j < c; ++j) {
    const double nj = static_cast<double>(st.class_counts[j]);
    for (double& v : st.class_means.row(j)) v /= nj;
    st.priors[j] = nj / static_cast<double>(n);
  }
  return st;
}

namespace {

// Rows of x minus their class mean.
Matrix class_centered(const SpectralDataset& ds, const ClassStatistics& stats) {
  Matrix z = ds.x();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    auto mu = stats.class_means.row(static_cast<std::size_t>(ds.y()[i]));
    auto row = z.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] -= mu[k];
  }
  return z;
}

// d x c factor F with s_b = F F^T; column j is sqrt(p_j) (mu_j - mu).
Matrix between_factor(const ClassStatistics& stats) {
  const std::size_t c = stats.class_means.rows();
  const std::size_t d = stats.class_means.cols();
  Matrix f(d, c);
  for (std::size_t j = 0; j < c; ++j) {
    const double w = std::sqrt(stats.priors[j]);
    for (std::size_t k = 0; k < d; ++k)
      f(k, j) = w * (stats.class_means(j, k) - stats.global_mean[k]);
  }
  return f;
}

void symmetrize(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
}

struct Discriminants {
  Matrix directions;  // d x r
  std::vector<double> values;
};

// Generalized problem (F F^T) v = lambda s_w_reg v. With s_w_reg = L L^T the
// whitened matrix is H H^T where H = L^{-1} F; its nonzero eigenpairs come from
// the small c x c Gram matrix H^T H.
Discriminants solve_discriminants(const Matrix& s_w, const Matrix& factor, double eps_rel,
                                  std::size_t r) {
  const Matrix sw_reg = ridge_regularize(s_w, eps_rel);
  Matrix l;
  try {
    l = cholesky(sw_reg);
  } catch (const FactorizationError& e) {
    throw NumericFailure(
        "LDA: within-class scatter is not positive definite after ridge regularization "
        "(pivot " + std::to_string(e.pivot()) + "); raise ridge_eps_rel above " +
        textio::format_double(eps_rel));
  }
  const Matrix h = solve_lower(l, factor);
  Matrix gram = transpose_times(h, h);
  symmetrize(gram);
  const auto eig = sym_eig(gram);

  const std::size_t d = s_w.rows();
  const double lead = std::max(eig.values.empty() ? 0.0 : eig.values[0], 0.0);
  Matrix whitened(d, 0);
  std::vector<double> values;
  std::size_t found = 0;
  for (; found < r && found < eig.values.size(); ++found) {
    const double lam = eig.values[found];
    if (!(lam > 1e-12 * lead) || lam <= 0.0) break;
    values.push_back(lam);
  }
  whitened = Matrix(d, found);
  for (std::size_t k = 0; k < found; ++k) {
    const double scale = 1.0 / std::sqrt(values[k]);
    for (std::size_t row = 0; row < d; ++row) {
      double s = 0.0;
      for (std::size_t j = 0; j < h.cols(); ++j) s += h(row, j) * eig.vectors(j, k);
      whitened(row, k) = s * scale;
    }
  }
  if (found < r) {
    // Rank-deficient s_b: remaining directions carry eigenvalue 0.
    whitened = complete_orthonormal(whitened, r);
    values.resize(r, 0.0);
  }
  Discriminants out{solve_lower_transposed(l, whitened), std::move(values)};
  normalize_column_signs(out.directions);
  return out;
}

LdaModel fit_lda_direct(const SpectralDataset& ds, const LdaConfig& config, std::size_t r) {
  LdaModel model;
  model.stats = class_statistics(ds);
  model.components = r;
  model.variant = config.variant;
  model.ridge_eps_rel = config.ridge_eps_rel;
  const Matrix factor = between_factor(model.stats);
  const std::size_t d = ds.d();

  if (config.variant == LdaVariant::ClassIndependent) {
    const auto scatter = scatter_matrices(ds, model.stats);
    auto disc = solve_discriminants(scatter.s_w, factor, config.ridge_eps_rel, r);
    model.projection = std::move(disc.directions);
    model.eigenvalues = std::move(disc.values);
    return model;
  }

  // Class-dependent: one within-class covariance and projection per class.
  const std::size_t c = ds.num_classes();
  const Matrix centered = class_centered(ds, model.stats);
  model.projection = Matrix(d, c * r);
  for (std::size_t j = 0; j < c; ++j) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (static_cast<std::size_t>(ds.y()[i]) == j) rows.push_back(i);
    const Matrix zj = centered.select_rows(rows);
    Matrix s_wj = (1.0 / static_cast<double>(rows.size())) * transpose_times(zj, zj);
    symmetrize(s_wj);
    auto disc = solve_discriminants(s_wj, factor, config.ridge_eps_rel, r);
    for (std::size_t row = 0; row < d; ++row)
      for (std::size_t k = 0; k < r; ++k) model.projection(row, j * r + k) = disc.directions(row, k);
    model.eigenvalues.insert(model.eigenvalues.end(), disc.values.begin(), disc.values.end());
  }
  return model;
}

}  // namespace

ScatterPair scatter_matrices(const SpectralDataset& ds, const ClassStatistics& stats) {
  if (stats.class_means.rows() != ds.num_classes() || stats.global_mean.size() != ds.d())
    throw InvalidInput("scatter_matrices: statistics do not match the dataset");
  // p_j * (1/n_j) * sum over class j reduces to (1/N) * sum over all samples.
  const Matrix z = class_centered(ds, stats);
  ScatterPair sp;
  sp.s_w = (1.0 / static_cast<double>(ds.n())) * transpose_times(z, z);
  symmetrize(sp.s_w);
  const Matrix f = between_factor(stats);
  sp.s_b = f * f.transpose();
  symmetrize(sp.s_b);
  return sp;
}

LdaModel fit_lda(const SpectralDataset& ds, const LdaConfig& config) {
  const std::size_t c = ds.num_classes();
  if (c < 2) throw InvalidInput("LDA needs at least 2 classes");
  if (ds.n() < c + 1)
    throw InvalidInput("LDA needs at least " + std::to_string(c + 1) + " samples, got " +
                       std::to_string(ds.n()));
  if (!(config.ridge_eps_rel > 0.0)) throw InvalidInput("ridge_eps_rel must be > 0");
  const std::size_t max_r = std::min(c - 1, ds.d());
  const std::size_t r = config.components == 0 ? max_r : config.components;
  if (r > max_r)
    throw InvalidInput("LDA components " + std::to_string(r) + " exceed min(c-1, d) = " +
                       std::to_string(max_r));

  if (!config.pca_first) return fit_lda_direct(ds, config, r);

  if (ds.n() <= c) throw InvalidInput("PCA-first LDA needs more samples than classes");
  const std::size_t pcs = std::min({ds.n() - c, std::size_t{40}, ds.d()});
  if (r > pcs)
    throw InvalidInput("PCA-first LDA: " + std::to_string(r) +
                       " components exceed the reduced dimension " + std::to_string(pcs));
  const PcaModel pca = fit_pca(ds.x(), pcs);
  const SpectralDataset reduced = ds.with_features(transform_pca(pca, ds.x()));
  LdaConfig inner = config;
  inner.pca_first = false;
  LdaModel small = fit_lda_direct(reduced, inner, r);

  LdaModel model;
  model.stats = class_statistics(ds);
  model.projection = pca.components * small.projection;
  model.eigenvalues = std::move(small.eigenvalues);
  model.components = r;
  model.variant = config.variant;
  model.ridge_eps_rel = config.ridge_eps_rel;
  model.pca_first = true;
  return model;
}

Matrix transform_lda(const LdaModel& model, const Matrix& x) {
  if (x.cols() != model.input_dim())
    throw InvalidInput("LDA transform: input has " + std::to_string(x.cols()) +
                       " columns, model expects " + std::to_string(model.input_dim()));
  return x * model.projection;
}

Matrix complete_orthonormal(const Matrix& q, std::size_t target) {
  const std::size_t d = q.rows();
  if (target > d) throw InvalidInput("cannot build more than d orthonormal columns");
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < q.cols(); ++c) cols.push_back(q.column(c));
  for (std::size_t e = 0; e < d && cols.size() < target; ++e) {
    std::vector<double> v(d, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : cols) {
        const double proj = dot(u, v);
        for (std::size_t k = 0; k < d; ++k) v[k] -= proj * u[k];
      }
    double norm = std::sqrt(dot(v, v));
    if (norm < 1e-8) continue;
    for (double& x : v) x /= norm;
    cols.push_back(std::move(v));
  }
  Matrix out(d, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t k = 0; k < d; ++k) out(k, c) = cols[c][k];
  return out;
}

PcaModel fit_pca(const Matrix& x, std::size_t components) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw InvalidInput("PCA needs at least 2 samples");
  if (components < 1 || components > std::min(n - 1, d))
    throw InvalidInput("PCA components " + std::to_string(components) +
                       " outside 1..min(n-1, d) = " + std::to_string(std::min(n - 1, d)));

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) model.mean[k] += x(i, k);
  for (double& v : model.mean) v /= static_cast<double>(n);
  Matrix centered = x;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) centered(i, k) -= model.mean[k];
  const double denom = static_cast<double>(n - 1);

  if (d <= n) {
    Matrix cov = (1.0 / denom) * transpose_times(centered, centered);
    symmetrize(cov);
    auto eig = sym_eig(cov);
    model.components = eig.vectors.first_columns(components);
    model.explained_variance.assign(eig.values.begin(), eig.values.begin() + components);
  } else {
    // Fewer samples than bands: eigenvectors of the n x n Gram matrix map to
    // covariance eigenvectors through X_c^T.
    Matrix gram = (1.0 / denom) * (centered * centered.transpose());
    symmetrize(gram);
    auto eig = sym_eig(gram);
    const double lead = std::max(eig.values[0], 0.0);
    std::size_t found = 0;
    while (found < components && eig.values[found] > 1e-12 * lead && eig.values[found] > 0.0)
      ++found;
    Matrix comps(d, found);
    for (std::size_t k = 0; k < found; ++k) {
      const double scale = 1.0 / std::sqrt(denom * eig.values[k]);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = eig.vectors(i, k) * scale;
        if (u == 0.0) continue;
        auto row = centered.row(i);
        for (std::size_t j = 0; j < d; ++j) comps(j, k) += u * row[j];
      }
    }
    model.components = complete_orthonormal(comps, components);
    model.explained_variance.assign(eig.values.begin(), eig.values.begin() + found);
    model.explained_variance.resize(components, 0.0);
    normalize_column_signs(model.components);
  }
  for (double& v : model.explained_variance) v = std::max(v, 0.0);
  return model;
}

Matrix transform_pca(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.input_dim())
    throw InvalidInput("PCA transform: input has " + std::to_string(x.cols()) +
                       " columns, model expects " + std::to_string(model.input_dim()));
  Matrix centered = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) centered(i, k) -= model.mean[k];
  return centered * model.components;
}

// ---------------------------------------------------------------------------
// Flat text serialization

namespace {
void write_matrix_rows(std::ostream& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) textio::write_values(out, m.row(r).data(), m.cols());
}
Matrix read_matrix(textio::TokenReader& in, std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, in.next_doubles(rows * cols));
}
}  // namespace

void write_model(std::ostream& out, const LdaModel& m) {
  const std::size_t c = m.stats.class_means.rows();
  out << "lda " << m.input_dim() << ' ' << c << ' ' << m.components << ' ' << m.output_dim()
      << ' ' << to_string(m.variant) << ' ' << textio::format_double(m.ridge_eps_rel) << ' '
      << (m.pca_first ? 1 : 0) << '\n';
  textio::write_values(out, m.stats.global_mean.data(), m.stats.global_mean.size());
  for (std::size_t j = 0; j < c; ++j) {
    out << m.stats.class_counts[j] << ' ';
    textio::write_values(out, m.stats.class_means.row(j).data(), m.input_dim());
  }
  textio::write_values(out, m.eigenvalues.data(), m.eigenvalues.size());
  write_matrix_rows(out, m.projection);
}

LdaModel read_lda_model(std::istream& in) {
  textio::TokenReader tr(in);
  tr.expect("lda");
  LdaModel m;
  const std::size_t d = tr.next_size();
  const std::size_t c = tr.next_size();
  m.components = tr.next_size();
  const std::size_t out_dim = tr.next_size();
  m.variant = parse_lda_variant(tr.next());
  m.ridge_eps_rel = tr.next_double();
  m.pca_first = tr.next_int() != 0;
  m.stats.global_mean = tr.next_doubles(d);
  m.stats.class_means = Matrix(c, d);
  std::size_t total = 0;
  for (std::size_t j = 0; j < c; ++j) {
    m.stats.class_counts.push_back(tr.next_size());
    total += m.stats.class_counts.back();
    auto row = tr.next_doubles(d);
    std::copy(row.begin(), row.end(), m.stats.class_means.row(j).begin());
  }
  for (auto cnt : m.stats.class_counts)
    m.stats.priors.push_back(total ? static_cast<double>(cnt) / static_cast<double>(total) : 0.0);
  m.eigenvalues = tr.next_doubles(out_dim);
  m.projection = read_matrix(tr, d, out_dim);
  return m;
}

void write_model(std::ostream& out, const PcaModel& m) {
  out << "pca " << m.input_dim() << ' ' << m.output_dim() << '\n';
  textio::write_values(out, m.mean.data(), m.mean.size());
  textio::write_values(out, m.explained_variance.data(), m.explained_variance.size());
  write_matrix_rows(out, m.components);
}

PcaModel read_pca_model(std::istream& in) {
  textio::TokenReader tr(in);
  tr.expect("pca");
  PcaModel m;
  const std::size_t d = tr.next_size();
  const std::size_t r = tr.next_size();
  m.mean = tr.next_doubles(d);
  m.explained_variance = tr.next_doubles(r);
  m.components = read_matrix(tr, d, r);
  return m;
}

}  // namespace cocoscan
