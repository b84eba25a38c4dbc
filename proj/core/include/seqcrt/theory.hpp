#pragma once

#include "seqcrt/covariates.hpp"
#include "seqcrt/crt.hpp"
#include "seqcrt/rng.hpp"
#include "seqcrt/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace seqcrt {

enum class BoundKind { almost_independent, exchangeable_simple, exchangeable_rho, arbitrary };

struct BoundReport {
  BoundKind kind = BoundKind::exchangeable_simple;
  double value = 0.0;
  double c = 0.0;
  double q = 0.0;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> rho;
  std::optional<Index> p;
  std::vector<int> null_positions;  // 1-based positions in the ordering
  std::optional<double> log_p_cap;  // (q + c(1-q)) log p, arbitrary dependence only
};

/// q (c+delta)/c * (1-c)/(1-c-delta) + epsilon.
BoundReport bound_almost_independent(double c, double q, double delta, double epsilon);

/// q + c(1-q) without rho; q + epsilon(c, q, rho) with it.
BoundReport bound_exchangeable(double c, double q, std::optional<double> rho = std::nullopt);

/// Inflation epsilon(c, q, rho) of the exchangeable bound, capped at c(1-q).
double exchangeable_epsilon(double c, double q, double rho);

/// (q + c(1-q)) * sum over null positions j of 1/(j+1), together with the
/// (q + c(1-q)) log p cap. Requires (1-c) q < c.
BoundReport bound_arbitrary(double c, double q, const std::vector<int>& null_positions, Index p);

/// epsilon(c, q_i, rho_k) for every grid pair: rows follow q_grid, columns rho_grid.
Matrix epsilon_surface(double c, const std::vector<double>& q_grid,
                       const std::vector<double>& rho_grid);

/// Closed-form optimum of max sum pi_i x_i/(1-x_i) subject to three support points
/// x_i <= alpha with mean c and variance sigma2.
double lemma_opt_value(double alpha, double c, double sigma2);

struct LemmaGridResult {
  double value = 0.0;
  std::array<double, 3> x{};
  std::array<double, 3> pi{};
};

/// Brute force for the same program over support points in [0, alpha]: a uniform
/// grid of `grid_points` values, then `refinements` rounds of local zooming around
/// the best triple. Every evaluated point is feasible.
LemmaGridResult lemma_grid_oracle(double alpha, double c, double sigma2, int grid_points = 400,
                                  int refinements = 6);

/// Worst-case joint p-value laws that attain the bounds as p grows.
enum class AdversarialKind { global_null_sharp, exchangeable_rho_sharp };

struct AdversarialSpec {
  AdversarialKind kind = AdversarialKind::global_null_sharp;
  Index p = 1000;
  double c = 0.1;
  double q = 0.1;
  double rho = 0.0;  // exchangeable_rho_sharp only

  void validate() const;
};

/// m0 = 1 + ceil(c p / (q + c(1-q))).
Index global_null_m0(Index p, double c, double q);

/// All-null p-values: with probability c p / m0, m0 random coordinates are
/// Unif[0,c] and the rest Unif[c,1]; otherwise all are Unif[c,1].
std::vector<double> adversarial_global_null(Index p, double c, double q, RngStream& rng);

/// Parameters of the exchangeable construction for m = p hypotheses.
struct ExchangeableDesign {
  Index n_nonnull = 0;  // n1 = floor(sqrt(p)), placed first with p-value 0
  Index n_null = 0;     // n0 = p - n1
  double alpha = 0.0;
  double sigma2 = 0.0;
  double x1 = 0.0, x2 = 0.0;
  double pi1 = 0.0, pi2 = 0.0;
  Index m1 = 0, m2 = 0;  // number of sub-c nulls in each branch
};

ExchangeableDesign exchangeable_design(Index p, double c, double q, double rho);

struct AdversarialDraw {
  std::vector<double> pvals;
  Index n_nonnull = 0;  // nonnulls occupy positions 0..n_nonnull-1
};

AdversarialDraw adversarial_exchangeable_rho(Index p, double c, double q, double rho,
                                             RngStream& rng);

/// One draw of the construction named by spec.
AdversarialDraw adversarial_draw(const AdversarialSpec& spec, RngStream& rng);

struct MonteCarloFdr {
  double fdr = 0.0;
  double std_error = 0.0;
  double power = 0.0;
  int replicates = 0;
};

/// FDP of Selective SeqStep+ (identity ordering, threshold spec.c, level spec.q)
/// averaged over `reps` draws; replicate r uses rng.derive(r).
MonteCarloFdr adversarial_fdr(const AdversarialSpec& spec, int reps, const RngStream& rng,
                              int workers = 0);

struct AjEstimateConfig {
  double c = 0.3;
  int m_inner = 2000;
  int m_outer = 50;
  /// When false, every inner draw samples a fresh (X, Y); otherwise Y is held fixed.
  bool condition_on_y = true;
  /// Tail probability used to read delta off the histogram.
  double tail = 0.005;
};

struct AjEstimate {
  std::vector<double> max_aj;  // one value per outer replicate
  std::vector<double> all_aj;  // every estimated null a_j, replicate-major
  long long empty_cells = 0;   // (replicate, null variable) pairs whose cell had no draws
  double delta = 0.0;          // empirical (1 - tail) quantile of max_aj minus c, floored at 0
  double epsilon = 0.0;        // fraction of max_aj above c + delta
};

/// Monte Carlo a_j = P(p_j <= c | Y, 1{p_N(j) <= c}) for the null variables of a
/// block-structured Gaussian design with y = x beta + N(0, noise_var). Each outer
/// replicate fixes Y (y_fixed when non-empty, otherwise a fresh draw), tallies
/// cell frequencies over m_inner draws of X | Y, and evaluates a_j at the
/// neighbor configuration of one further draw.
AjEstimate estimate_aj(const GaussianModel& model, const Vector& beta, double noise_var,
                       const Vector& y_fixed, Index n, const CrtConfig& cfg,
                       const AjEstimateConfig& settings, const RngStream& rng, int workers = 0);

std::string to_string(BoundKind kind);
std::string to_string(AdversarialKind kind);
AdversarialKind adversarial_kind_from_string(const std::string& name);

}  // namespace seqcrt
