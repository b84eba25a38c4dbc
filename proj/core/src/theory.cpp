#include "seqcrt/theory.hpp"

#include "seqcrt/parallel.hpp"
#include "seqcrt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seqcrt {

namespace {

void check_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string(name) + " must lie in (0,1)");
}

// Draws on (0, c] and (c, 1] so the threshold comparison is never ambiguous.
double low_draw(double c, RngStream& rng) { return c * (1.0 - rng.uniform()); }
double high_draw(double c, RngStream& rng) { return c + (1.0 - c) * (1.0 - rng.uniform()); }

void fill_branch(std::vector<double>& pvals, Index offset, Index count, Index n_low, double c,
                 RngStream& rng) {
  std::vector<int> low =
      rng.sample_without_replacement(static_cast<int>(count), static_cast<int>(n_low));
  for (Index k = 0; k < count; ++k) pvals[offset + k] = high_draw(c, rng);
  for (int k : low) pvals[offset + k] = low_draw(c, rng);
}

}  // namespace

BoundReport bound_almost_independent(double c, double q, double delta, double epsilon) {
  check_unit(c, "c");
  check_unit(q, "q");
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  if (!(c + delta < 1.0)) throw DomainError("c + delta must be below 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0,1]");
  BoundReport r;
  r.kind = BoundKind::almost_independent;
  r.c = c;
  r.q = q;
  r.delta = delta;
  r.epsilon = epsilon;
  r.value = q * (c + delta) / c * (1.0 - c) / (1.0 - c - delta) + epsilon;
  return r;
}

double exchangeable_epsilon(double c, double q, double rho) {
  check_unit(c, "c");
  check_unit(q, "q");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0,1]");
  const double cap = c * (1.0 - q);
  const double beta = (c + (1.0 - c) * q) / ((1.0 - c) * (1.0 - q));
  const double delta = rho * (c * (1.0 - q) + q) / (c * (1.0 - q));
  const double shifted = c - c * delta;
  const double term =
      delta / (1.0 + beta * delta) * (c / (1.0 - c) - q * shifted / (1.0 - shifted));
  return std::min(term, cap);
}

BoundReport bound_exchangeable(double c, double q, std::optional<double> rho) {
  check_unit(c, "c");
  check_unit(q, "q");
  BoundReport r;
  r.c = c;
  r.q = q;
  if (!rho) {
    r.kind = BoundKind::exchangeable_simple;
    r.value = q + c * (1.0 - q);
    return r;
  }
  r.kind = BoundKind::exchangeable_rho;
  r.rho = rho;
  r.epsilon = exchangeable_epsilon(c, q, *rho);
  r.value = q + *r.epsilon;
  return r;
}

BoundReport bound_arbitrary(double c, double q, const std::vector<int>& null_positions, Index p) {
  check_unit(c, "c");
  check_unit(q, "q");
  if (!((1.0 - c) * q < c))
    throw DomainError("arbitrary-dependence bound requires (1-c) q < c");
  if (p < 1) throw DomainError("p must be positive");
  std::vector<int> positions = null_positions;
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
    throw DomainError("null positions must be distinct");
  const double level = q + c * (1.0 - q);
  double sum = 0.0;
  for (int j : positions) {
    if (j < 1 || j > p) throw DomainError("null position " + std::to_string(j) + " outside [1, p]");
    sum += 1.0 / (j + 1.0);
  }
  BoundReport r;
  r.kind = BoundKind::arbitrary;
  r.c = c;
  r.q = q;
  r.p = p;
  r.null_positions = std::move(positions);
  r.value = level * sum;
  r.log_p_cap = level * std::log(static_cast<double>(p));
  return r;
}

Matrix epsilon_surface(double c, const std::vector<double>& q_grid,
                       const std::vector<double>& rho_grid) {
  Matrix out(static_cast<Index>(q_grid.size()), static_cast<Index>(rho_grid.size()));
  for (std::size_t i = 0; i < q_grid.size(); ++i)
    for (std::size_t k = 0; k < rho_grid.size(); ++k)
      out(i, k) = exchangeable_epsilon(c, q_grid[i], rho_grid[k]);
  return out;
}

double lemma_opt_value(double alpha, double c, double sigma2) {
  if (!(c > 0.0 && c < alpha && alpha < 1.0)) throw DomainError("need 0 < c < alpha < 1");
  if (!(sigma2 >= 0.0)) throw DomainError("sigma2 must be nonnegative");
  const double gap = alpha - c;
  return alpha / (1.0 - alpha) - gap * gap / ((1.0 - alpha) * (sigma2 + (1.0 - c) * gap));
}

LemmaGridResult lemma_grid_oracle(double alpha, double c, double sigma2, int grid_points,
                                  int refinements) {
  if (!(c > 0.0 && c < alpha && alpha < 1.0)) throw DomainError("need 0 < c < alpha < 1");
  if (!(sigma2 >= 0.0)) throw DomainError("sigma2 must be nonnegative");
  if (grid_points < 3) throw DomainError("grid needs at least 3 points");

  LemmaGridResult best;
  best.value = -std::numeric_limits<double>::infinity();

  // With d = x - c the moment constraints are a 3x3 Vandermonde system whose
  // solution is pi_i = (sigma2 + d_j d_k) / ((d_i - d_j)(d_i - d_k)).
  auto consider = [&](double x1, double x2, double x3) {
    const double d1 = x1 - c, d2 = x2 - c, d3 = x3 - c;
    const double den1 = (d1 - d2) * (d1 - d3);
    const double den2 = (d2 - d1) * (d2 - d3);
    const double den3 = (d3 - d1) * (d3 - d2);
    if (den1 == 0.0 || den2 == 0.0 || den3 == 0.0) return;
    const double p1 = (sigma2 + d2 * d3) / den1;
    const double p2 = (sigma2 + d1 * d3) / den2;
    const double p3 = (sigma2 + d1 * d2) / den3;
    if (p1 < 0.0 || p2 < 0.0 || p3 < 0.0) return;
    const double v = p1 * x1 / (1.0 - x1) + p2 * x2 / (1.0 - x2) + p3 * x3 / (1.0 - x3);
    if (v > best.value) best = {v, {x1, x2, x3}, {p1, p2, p3}};
  };

  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i) grid[i] = alpha * i / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i)
    for (int j = i + 1; j < grid_points; ++j)
      for (int k = j + 1; k < grid_points; ++k) consider(grid[i], grid[j], grid[k]);
  if (!std::isfinite(best.value)) throw DomainError("no feasible grid point for these moments");

  constexpr int kHalfWidth = 10;
  double step = alpha / (grid_points - 1);
  for (int round = 0; round < refinements; ++round) {
    const std::array<double, 3> centre = best.x;
    auto local = [&](double x0) {
      std::vector<double> pts;
      for (int t = -kHalfWidth; t <= kHalfWidth; ++t) {
        double x = x0 + step * t;
        if (x >= 0.0 && x <= alpha) pts.push_back(x);
      }
      return pts;
    };
    const auto g1 = local(centre[0]), g2 = local(centre[1]), g3 = local(centre[2]);
    for (double a : g1)
      for (double b : g2)
        for (double d : g3) consider(a, b, d);
    step /= 4.0;
  }
  return best;
}

void AdversarialSpec::validate() const {
  check_unit(c, "c");
  check_unit(q, "q");
  if (p < 1) throw DomainError("p must be positive");
  if (kind == AdversarialKind::global_null_sharp) {
    global_null_m0(p, c, q);
  } else {
    exchangeable_design(p, c, q, rho);
  }
}

Index global_null_m0(Index p, double c, double q) {
  check_unit(c, "c");
  check_unit(q, "q");
  const double level = q + c * (1.0 - q);
  const Index m0 = 1 + static_cast<Index>(std::ceil(c * static_cast<double>(p) / level - 1e-12));
  if (m0 > p)
    throw DomainError("global-null construction infeasible: m0 = " + std::to_string(m0) +
                      " exceeds p = " + std::to_string(p));
  return m0;
}

std::vector<double> adversarial_global_null(Index p, double c, double q, RngStream& rng) {
  const Index m0 = global_null_m0(p, c, q);
  const double branch = c * static_cast<double>(p) / static_cast<double>(m0);
  std::vector<double> pvals(p);
  fill_branch(pvals, 0, p, rng.uniform() < branch ? m0 : 0, c, rng);
  return pvals;
}

ExchangeableDesign exchangeable_design(Index p, double c, double q, double rho) {
  check_unit(c, "c");
  check_unit(q, "q");
  if (p < 4) throw DomainError("exchangeable construction needs p >= 4");
  const double limit = c * (1.0 - q) / (q + c * (1.0 - q));
  if (!(rho >= 0.0 && rho <= limit * (1.0 + 1e-12)))
    throw DomainError("exchangeable construction needs 0 <= rho <= c(1-q)/(q + c(1-q)) = " +
                      std::to_string(limit));
  ExchangeableDesign d;
  const double m = static_cast<double>(p);
  d.n_nonnull = static_cast<Index>(std::floor(std::sqrt(m)));
  d.n_null = p - d.n_nonnull;
  d.alpha = c / (c + q - c * q);
  const double rho_tilde = ((m - 1.0) * rho + 1.0) / m;
  d.sigma2 = rho_tilde * c * (1.0 - c);
  const double gap = d.alpha - c;
  d.x1 = std::max(0.0, c - d.sigma2 / gap);
  d.x2 = d.alpha;
  d.pi1 = gap * gap / (gap * gap + d.sigma2);
  d.pi2 = d.sigma2 / (gap * gap + d.sigma2);
  const double n0 = static_cast<double>(d.n_null);
  d.m1 = static_cast<Index>(std::floor(n0 * d.x1)) + 1;
  d.m2 = static_cast<Index>(std::floor(n0 * d.x2)) - 2;
  if (d.m2 < 0 || d.m1 > d.n_null || d.m2 > d.n_null)
    throw DomainError("exchangeable construction infeasible at p = " + std::to_string(p));
  return d;
}

AdversarialDraw adversarial_exchangeable_rho(Index p, double c, double q, double rho,
                                             RngStream& rng) {
  const ExchangeableDesign d = exchangeable_design(p, c, q, rho);
  AdversarialDraw draw;
  draw.n_nonnull = d.n_nonnull;
  draw.pvals.assign(p, 0.0);
  const Index n_low = rng.uniform() < d.pi1 ? d.m1 : d.m2;
  fill_branch(draw.pvals, d.n_nonnull, d.n_null, n_low, c, rng);
  return draw;
}

AdversarialDraw adversarial_draw(const AdversarialSpec& spec, RngStream& rng) {
  if (spec.kind == AdversarialKind::global_null_sharp)
    return {adversarial_global_null(spec.p, spec.c, spec.q, rng), 0};
  return adversarial_exchangeable_rho(spec.p, spec.c, spec.q, spec.rho, rng);
}

MonteCarloFdr adversarial_fdr(const AdversarialSpec& spec, int reps, const RngStream& rng,
                              int workers) {
  spec.validate();
  if (reps < 1) throw DomainError("need at least one replicate");
  const SeqStepParams params{spec.c, spec.q};
  const Ordering order = Ordering::identity(spec.p);
  std::vector<double> fdp(reps), power(reps);
  parallel_for(
      static_cast<std::size_t>(reps),
      [&](std::size_t r) {
        RngStream stream = rng.derive(r);
        AdversarialDraw draw = adversarial_draw(spec, stream);
        // Nonnull p-values of the exchangeable construction are exactly 0, so pass
        // the indicators rather than the p-values themselves.
        std::vector<bool> below(draw.pvals.size());
        for (std::size_t j = 0; j < below.size(); ++j) below[j] = draw.pvals[j] <= spec.c;
        Selection sel = seqstep_select(below, order, params);
        Index false_hits = 0;
        for (int v : sel.selected)
          if (v > draw.n_nonnull) ++false_hits;
        fdp[r] = static_cast<double>(false_hits) /
                 static_cast<double>(std::max<std::size_t>(sel.selected.size(), 1));
        power[r] = draw.n_nonnull
                       ? static_cast<double>(sel.selected.size() - false_hits) / draw.n_nonnull
                       : 0.0;
      },
      workers);
  MonteCarloFdr out;
  out.replicates = reps;
  out.fdr = std::accumulate(fdp.begin(), fdp.end(), 0.0) / reps;
  out.power = std::accumulate(power.begin(), power.end(), 0.0) / reps;
  double ss = 0.0;
  for (double v : fdp) ss += (v - out.fdr) * (v - out.fdr);
  out.std_error = reps > 1 ? std::sqrt(ss / (reps - 1) / reps) : 0.0;
  return out;
}

AjEstimate estimate_aj(const GaussianModel& model, const Vector& beta, double noise_var,
                       const Vector& y_fixed, Index n, const CrtConfig& cfg,
                       const AjEstimateConfig& settings, const RngStream& rng, int workers) {
  const auto* blocks = std::get_if<BlockStructure>(&model.structure());
  if (blocks == nullptr) throw DomainError("a_j estimation needs a block-structured covariance");
  check_unit(settings.c, "c");
  if (settings.m_inner < 1 || settings.m_outer < 1)
    throw DomainError("m_inner and m_outer must be positive");
  if (!(settings.tail > 0.0 && settings.tail < 1.0)) throw DomainError("tail must lie in (0,1)");
  if (!(noise_var > 0.0)) throw DomainError("noise variance must be positive");
  const Index p = model.dim();
  if (beta.size() != p) throw DomainError("coefficient vector has the wrong length");
  if (y_fixed.size() > 0) n = y_fixed.size();
  if (n < 2) throw DomainError("need at least 2 observations");
  cfg.validate();

  std::vector<Index> nulls;
  for (Index j = 0; j < p; ++j)
    if (beta[j] == 0.0) nulls.push_back(j);
  if (nulls.empty()) throw DomainError("no null variables to estimate a_j for");

  const Index size = blocks->block_size;
  std::vector<std::vector<Index>> neighbors(p);
  for (Index j = 0; j < p; ++j) {
    const Index start = (j / size) * size;
    for (Index k = start; k < std::min(start + size, p); ++k)
      if (k != j) neighbors[j].push_back(k);
  }
  auto cell_of = [&](Index j, const std::vector<char>& below) {
    std::size_t key = 0;
    for (std::size_t t = 0; t < neighbors[j].size(); ++t)
      if (below[neighbors[j][t]]) key |= std::size_t{1} << t;
    return key;
  };
  const std::size_t n_cells = std::size_t{1} << (size - 1);
  const CovariateModel covariates = model;
  const double sd = std::sqrt(noise_var);

  std::vector<double> max_aj(settings.m_outer);
  std::vector<std::vector<double>> all_aj(settings.m_outer);
  std::vector<long long> empty(settings.m_outer, 0);

  parallel_for(
      static_cast<std::size_t>(settings.m_outer),
      [&](std::size_t r) {
        RngStream outer = rng.derive(r);
        Vector y = y_fixed;
        if (y.size() == 0) {
          RngStream y_rng = outer.derive(0xA0);
          Matrix x0 = model.sample_rows(n, y_rng);
          y = x0 * beta;
          for (Index i = 0; i < n; ++i) y[i] += sd * y_rng.normal();
        }

        auto draw_indicators = [&](std::uint64_t index) {
          RngStream draw_rng = outer.derive(0xA1, index);
          Dataset data;
          if (settings.condition_on_y) {
            data.x = model.sample_given_response(beta, noise_var, y, draw_rng);
            data.y = y;
          } else {
            data.x = model.sample_rows(n, draw_rng);
            data.y = data.x * beta;
            for (Index i = 0; i < n; ++i) data.y[i] += sd * draw_rng.normal();
          }
          std::vector<PValueRecord> records =
              crt_all_variables(data, covariates, cfg, draw_rng.derive(0xA2), 1);
          std::vector<char> below(p);
          for (Index j = 0; j < p; ++j) below[j] = records[j].at_most(settings.c);
          return below;
        };

        std::vector<std::vector<long long>> hits(p, std::vector<long long>(n_cells, 0));
        std::vector<std::vector<long long>> totals(p, std::vector<long long>(n_cells, 0));
        for (int i = 0; i < settings.m_inner; ++i) {
          std::vector<char> below = draw_indicators(static_cast<std::uint64_t>(i));
          for (Index j : nulls) {
            const std::size_t cell = cell_of(j, below);
            ++totals[j][cell];
            hits[j][cell] += below[j];
          }
        }

        const std::vector<char> realized = draw_indicators(static_cast<std::uint64_t>(settings.m_inner));
        double best = -1.0;
        for (Index j : nulls) {
          const std::size_t cell = cell_of(j, realized);
          if (totals[j][cell] == 0) {
            ++empty[r];
            continue;
          }
          const double a = static_cast<double>(hits[j][cell]) / static_cast<double>(totals[j][cell]);
          all_aj[r].push_back(a);
          best = std::max(best, a);
        }
        max_aj[r] = best;
      },
      workers);

  AjEstimate out;
  for (int r = 0; r < settings.m_outer; ++r) {
    out.empty_cells += empty[r];
    if (max_aj[r] >= 0.0) out.max_aj.push_back(max_aj[r]);
    out.all_aj.insert(out.all_aj.end(), all_aj[r].begin(), all_aj[r].end());
  }
  if (out.max_aj.empty()) throw Error("every conditioning cell was empty");

  std::vector<double> sorted = out.max_aj;
  std::sort(sorted.begin(), sorted.end());
  const double level = 1.0 - settings.tail;
  const std::size_t idx = static_cast<std::size_t>(
      std::max(0.0, std::ceil(level * static_cast<double>(sorted.size())) - 1.0));
  out.delta = std::max(0.0, sorted[std::min(idx, sorted.size() - 1)] - settings.c);
  const double cut = settings.c + out.delta;
  out.epsilon = static_cast<double>(std::count_if(sorted.begin(), sorted.end(),
                                                  [&](double v) { return v > cut; })) /
                static_cast<double>(sorted.size());
  return out;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::almost_independent: return "almost_independent";
    case BoundKind::exchangeable_simple: return "exchangeable_simple";
    case BoundKind::exchangeable_rho: return "exchangeable_rho";
    case BoundKind::arbitrary: return "arbitrary";
  }
  return "unknown";
}

std::string to_string(AdversarialKind kind) {
  return kind == AdversarialKind::global_null_sharp ? "global_null_sharp" : "exchangeable_rho_sharp";
}

AdversarialKind adversarial_kind_from_string(const std::string& name) {
  if (name == "global_null_sharp" || name == "global-null") return AdversarialKind::global_null_sharp;
  if (name == "exchangeable_rho_sharp" || name == "exchangeable-rho")
    return AdversarialKind::exchangeable_rho_sharp;
  throw ParseError("unknown adversarial construction '" + name + "'");
}

}  // namespace seqcrt
