#include "seqcrt/covariates.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace seqcrt {

namespace {

void require_row_stochastic(const Matrix& m, const char* name) {
  for (Index r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (Index c = 0; c < m.cols(); ++c) {
      if (!(m(r, c) >= 0.0)) throw DomainError(std::string(name) + " has a negative entry");
      sum += m(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw DomainError(std::string(name) + " row " + std::to_string(r + 1) +
                        " does not sum to 1");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianModel

GaussianModel::GaussianModel(Vector mean, Matrix covariance, GaussianStructure structure)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), structure_(structure) {
  const Index p = mean_.size();
  if (p < 1) throw DomainError("Gaussian model needs at least one coordinate");
  if (covariance_.rows() != p || covariance_.cols() != p)
    throw DomainError("covariance dimension does not match mean");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("covariance is not symmetric");

  Eigen::LLT<Matrix> llt(covariance_);
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  chol_lower_ = llt.matrixL();

  Matrix precision;
  if (const auto* ar = std::get_if<Ar1Structure>(&structure_)) {
    const double rho = ar->rho;
    const double scale = 1.0 / (1.0 - rho * rho);
    precision = Matrix::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
      bool interior = j > 0 && j + 1 < p;
      precision(j, j) = (p == 1) ? 1.0 : scale * (interior ? 1.0 + rho * rho : 1.0);
      if (j + 1 < p) precision(j, j + 1) = precision(j + 1, j) = -rho * scale;
    }
  } else if (const auto* blk = std::get_if<BlockStructure>(&structure_)) {
    precision = Matrix::Zero(p, p);
    for (Index start = 0; start < p; start += blk->block_size) {
      Index len = std::min<Index>(blk->block_size, p - start);
      Matrix sub = covariance_.block(start, start, len, len);
      Eigen::LLT<Matrix> sub_llt(sub);
      if (sub_llt.info() != Eigen::Success)
        throw DomainError("block covariance is not positive definite");
      precision.block(start, start, len, len) = sub_llt.solve(Matrix::Identity(len, len));
    }
  } else {
    precision = llt.solve(Matrix::Identity(p, p));
  }
  if (!std::holds_alternative<GeneralStructure>(structure_) &&
      (covariance_ * precision - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-8)
    throw DomainError("covariance does not match its structure tag");
  build_regression(precision);
}

void GaussianModel::build_regression(const Matrix& precision) {
  const Index p = dim();
  regression_.assign(p, {});
  conditional_variance_.resize(p);
  const bool sparse = !std::holds_alternative<GeneralStructure>(structure_);
  for (Index j = 0; j < p; ++j) {
    const double qjj = precision(j, j);
    if (!(qjj > 0.0)) throw DomainError("singular conditional variance");
    conditional_variance_[j] = 1.0 / qjj;
    for (Index k = 0; k < p; ++k) {
      if (k == j) continue;
      if (sparse && precision(j, k) == 0.0) continue;
      regression_[j].push_back({k, -precision(j, k) / qjj});
    }
  }
}

GaussianModel GaussianModel::ar1(Index p, double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("AR(1) correlation must satisfy |rho| < 1");
  Matrix cov(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index k = 0; k < p; ++k) cov(i, k) = std::pow(rho, static_cast<double>(std::abs(i - k)));
  return GaussianModel(Vector::Zero(p), std::move(cov), Ar1Structure{rho});
}

GaussianModel GaussianModel::block(Index p, int block_size, double off_diag) {
  if (block_size < 1) throw DomainError("block size must be positive");
  Matrix cov = Matrix::Identity(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index k = 0; k < p; ++k)
      if (i != k && i / block_size == k / block_size) cov(i, k) = off_diag;
  return GaussianModel(Vector::Zero(p), std::move(cov), BlockStructure{block_size, off_diag});
}

GaussianModel GaussianModel::identity(Index p) {
  return GaussianModel(Vector::Zero(p), Matrix::Identity(p, p), BlockStructure{1, 0.0});
}

GaussianLaw GaussianModel::conditional(Index j, std::span<const double> x_rest) const {
  const Index p = dim();
  if (j < 0 || j >= p) throw DomainError("variable index out of range");
  if (static_cast<Index>(x_rest.size()) != p - 1)
    throw DomainError("conditioning vector must have p-1 entries");
  double mu = mean_[j];
  for (const Term& t : regression_[j]) {
    double xk = x_rest[t.column < j ? t.column : t.column - 1];
    mu += t.coef * (xk - mean_[t.column]);
  }
  return {mu, conditional_variance_[j]};
}

Vector GaussianModel::conditional_means(const Matrix& x, Index j) const {
  Vector mu = Vector::Constant(x.rows(), mean_[j]);
  for (const Term& t : regression_[j])
    mu.array() += t.coef * (x.col(t.column).array() - mean_[t.column]);
  return mu;
}

Matrix GaussianModel::sample_rows(Index n, RngStream& rng) const {
  const Index p = dim();
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < p; ++k) z(i, k) = rng.normal();
  Matrix x = z * chol_lower_.transpose();
  x.rowwise() += mean_.transpose();
  return x;
}

Vector GaussianModel::sample_given_response(const Vector& beta, double noise_var, double y,
                                            RngStream& rng) const {
  if (!(noise_var > 0.0)) throw DomainError("noise variance must be positive");
  if (beta.size() != dim()) throw DomainError("coefficient vector has the wrong length");
  // Draw (X, Y') jointly, then shift X by Cov(X,Y')/Var(Y') * (y - Y').
  Vector z(dim());
  for (Index k = 0; k < dim(); ++k) z[k] = rng.normal();
  Vector x = mean_ + chol_lower_ * z;
  double y_draw = x.dot(beta) + std::sqrt(noise_var) * rng.normal();
  Vector sigma_beta = covariance_ * beta;
  double var_y = beta.dot(sigma_beta) + noise_var;
  return x + sigma_beta * ((y - y_draw) / var_y);
}

Matrix GaussianModel::sample_given_response(const Vector& beta, double noise_var, const Vector& y,
                                            RngStream& rng) const {
  if (!(noise_var > 0.0)) throw DomainError("noise variance must be positive");
  if (beta.size() != dim()) throw DomainError("coefficient vector has the wrong length");
  const Vector sigma_beta = covariance_ * beta;
  const double var_y = beta.dot(sigma_beta) + noise_var;
  const double noise_sd = std::sqrt(noise_var);
  Matrix x(y.size(), dim());
  Vector z(dim());
  for (Index i = 0; i < y.size(); ++i) {
    for (Index k = 0; k < dim(); ++k) z[k] = rng.normal();
    Vector row = mean_ + chol_lower_ * z;
    const double y_draw = row.dot(beta) + noise_sd * rng.normal();
    x.row(i) = (row + sigma_beta * ((y[i] - y_draw) / var_y)).transpose();
  }
  return x;
}

// ---------------------------------------------------------------------------
// HmmModel

HmmModel::HmmModel(Index length, Matrix transition, Matrix emission, Vector initial,
                   std::vector<double> alphabet)
    : length_(length),
      transition_(std::move(transition)),
      emission_(std::move(emission)),
      initial_(std::move(initial)),
      alphabet_(std::move(alphabet)) {
  if (length_ < 1) throw DomainError("HMM length must be positive");
  const Index k = transition_.rows();
  if (transition_.cols() != k || emission_.rows() != k || initial_.size() != k)
    throw DomainError("HMM matrix dimensions disagree");
  if (static_cast<Index>(alphabet_.size()) != emission_.cols())
    throw DomainError("alphabet size must equal the number of emission columns");
  require_row_stochastic(transition_, "transition");
  require_row_stochastic(emission_, "emission");
  require_row_stochastic(initial_.transpose(), "initial");
}

HmmModel HmmModel::sticky_five_state(Index length) {
  Matrix transition = Matrix::Constant(5, 5, 0.1);
  transition.diagonal().setConstant(0.6);
  Matrix emission(5, 3);
  emission << 2.0 / 3, 1.0 / 6, 1.0 / 6,
              5.0 / 12, 5.0 / 12, 1.0 / 6,
              1.0 / 6, 2.0 / 3, 1.0 / 6,
              1.0 / 6, 5.0 / 12, 5.0 / 12,
              1.0 / 6, 1.0 / 6, 2.0 / 3;
  // Rows like 2/3 + 1/6 + 1/6 round to 1 within a few ulps; renormalize exactly.
  for (Index r = 0; r < 5; ++r) emission.row(r) /= emission.row(r).sum();
  return HmmModel(length, std::move(transition), std::move(emission), Vector::Constant(5, 0.2));
}

int HmmModel::symbol_of(double value) const {
  for (std::size_t a = 0; a < alphabet_.size(); ++a)
    if (alphabet_[a] == value) return static_cast<int>(a);
  throw DomainError("value " + std::to_string(value) + " is not in the HMM output alphabet");
}

Matrix HmmModel::sample_rows(Index n, RngStream& rng) const {
  const int k = hidden_states();
  const int s = symbols();
  Matrix x(n, length_);
  std::vector<double> weights(std::max(k, s));
  for (Index i = 0; i < n; ++i) {
    for (int h = 0; h < k; ++h) weights[h] = initial_[h];
    int state = rng.categorical(weights.data(), k);
    for (Index t = 0; t < length_; ++t) {
      if (t > 0) {
        for (int h = 0; h < k; ++h) weights[h] = transition_(state, h);
        state = rng.categorical(weights.data(), k);
      }
      for (int a = 0; a < s; ++a) weights[a] = emission_(state, a);
      x(i, t) = alphabet_[rng.categorical(weights.data(), s)];
    }
  }
  return x;
}

namespace {

// Normalized forward predictions pred[t](h) ∝ P(H_t = h | x_0..x_{t-1}) and
// backward messages back[t](h) ∝ P(x_{t+1}..x_{p-1} | H_t = h).
struct Messages {
  Matrix pred;  // hidden x length
  Matrix back;  // hidden x length
};

[[noreturn]] void impossible(Index position) {
  throw DomainError("conditioning event has probability zero at position " +
                    std::to_string(position + 1));
}

Messages run_messages(const HmmModel& m, const std::vector<int>& sym, Index skip) {
  const Index p = m.dim();
  const int k = m.hidden_states();
  const Matrix& tr = m.transition();
  const Matrix& em = m.emission();
  Messages out{Matrix(k, p), Matrix(k, p)};

  Vector filt(k);
  out.pred.col(0) = m.initial();
  for (Index t = 0; t < p; ++t) {
    if (t > 0) out.pred.col(t) = tr.transpose() * filt;
    if (t == skip) {
      filt = out.pred.col(t);
    } else {
      filt = out.pred.col(t).cwiseProduct(em.col(sym[t]));
      double total = filt.sum();
      if (!(total > 0.0)) impossible(t);
      filt /= total;
    }
  }

  out.back.col(p - 1).setOnes();
  for (Index t = p - 1; t > 0; --t) {
    Vector next = out.back.col(t);
    if (t != skip) next = next.cwiseProduct(em.col(sym[t]));
    Vector b = tr * next;
    double total = b.sum();
    if (!(total > 0.0)) impossible(t);
    out.back.col(t - 1) = b / total;
  }
  return out;
}

}  // namespace

DiscreteLaw HmmModel::conditional(Index j, std::span<const double> x_rest) const {
  if (j < 0 || j >= length_) throw DomainError("variable index out of range");
  if (static_cast<Index>(x_rest.size()) != length_ - 1)
    throw DomainError("conditioning vector must have p-1 entries");
  std::vector<int> sym(length_, 0);
  for (Index t = 0; t < length_; ++t)
    if (t != j) sym[t] = symbol_of(x_rest[t < j ? t : t - 1]);

  Messages msg = run_messages(*this, sym, j);
  Vector weight = msg.pred.col(j).cwiseProduct(msg.back.col(j));
  DiscreteLaw law;
  law.values = alphabet_;
  law.probs.resize(symbols());
  double total = 0.0;
  for (int a = 0; a < symbols(); ++a) total += law.probs[a] = weight.dot(emission_.col(a));
  if (!(total > 0.0)) impossible(j);
  for (double& v : law.probs) v /= total;
  return law;
}

Matrix HmmModel::row_conditionals(std::span<const double> row) const {
  if (static_cast<Index>(row.size()) != length_) throw DomainError("row has the wrong length");
  const int k = hidden_states();
  std::vector<int> sym(length_);
  for (Index t = 0; t < length_; ++t) sym[t] = symbol_of(row[t]);

  // Full-row messages; the conditional at t uses pred[t] (depends on x_<t) and
  // back[t] (depends on x_>t), neither of which involves x_t.
  Messages msg = run_messages(*this, sym, -1);
  Matrix table(length_, symbols());
  Vector weight(k);
  for (Index t = 0; t < length_; ++t) {
    weight = msg.pred.col(t).cwiseProduct(msg.back.col(t));
    double total = 0.0;
    for (int a = 0; a < symbols(); ++a) total += table(t, a) = weight.dot(emission_.col(a));
    if (!(total > 0.0)) impossible(t);
    table.row(t) /= total;
  }
  return table;
}

// ---------------------------------------------------------------------------

Index model_dim(const CovariateModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

Matrix sample_rows(const CovariateModel& model, Index n, RngStream& rng) {
  return std::visit([&](const auto& m) { return m.sample_rows(n, rng); }, model);
}

ConditionalLaw conditional_law(const CovariateModel& model, Index j,
                               std::span<const double> x_rest) {
  return std::visit([&](const auto& m) -> ConditionalLaw { return m.conditional(j, x_rest); },
                    model);
}

ColumnResampler::ColumnResampler(const CovariateModel& model, const Matrix& x)
    : model_(&model), x_(&x) {
  if (x.cols() != model_dim(model))
    throw DomainError("covariate model dimension " + std::to_string(model_dim(model)) +
                      " does not match " + std::to_string(x.cols()) + " columns");
  if (const auto* hmm = std::get_if<HmmModel>(&model)) {
    hmm_tables_.reserve(x.rows());
    std::vector<double> row(x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
      for (Index t = 0; t < x.cols(); ++t) row[t] = x(i, t);
      hmm_tables_.push_back(hmm->row_conditionals(row));
    }
  }
}

Matrix ColumnResampler::resample(Index j, int copies, RngStream& rng) const {
  const Index n = x_->rows();
  if (j < 0 || j >= x_->cols()) throw DomainError("variable index out of range");
  Matrix out(n, copies);
  if (const auto* g = std::get_if<GaussianModel>(model_)) {
    Vector mu = g->conditional_means(*x_, j);
    const double sd = std::sqrt(g->conditional_variance(j));
    for (int b = 0; b < copies; ++b)
      for (Index i = 0; i < n; ++i) out(i, b) = mu[i] + sd * rng.normal();
  } else {
    const auto& hmm = std::get<HmmModel>(*model_);
    const int s = hmm.symbols();
    std::vector<double> probs(s);
    for (int b = 0; b < copies; ++b)
      for (Index i = 0; i < n; ++i) {
        for (int a = 0; a < s; ++a) probs[a] = hmm_tables_[i](j, a);
        out(i, b) = hmm.alphabet()[rng.categorical(probs.data(), s)];
      }
  }
  return out;
}

}  // namespace seqcrt
