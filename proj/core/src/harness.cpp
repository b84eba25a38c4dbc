#include "seqcrt/harness.hpp"

#include "seqcrt/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace seqcrt {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kDataTag = 0xD0;
constexpr std::uint64_t kMethodTag = 0xE0;

std::uint64_t method_tag(Method m) { return kMethodTag + static_cast<std::uint64_t>(m); }

CrtConfig config_for(const ExperimentConfig& config, Method method) {
  CrtConfig cfg = config.crt;
  cfg.mode = method == Method::symmetric_original ? CrtMode::original : CrtMode::one_shot;
  return cfg;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json crt_to_json(const CrtConfig& cfg) {
  json j;
  j["B"] = cfg.randomizations;
  j["mode"] = to_string(cfg.mode);
  j["statistic"] = statistic_name(cfg.statistic);
  j["score"] = to_string(cfg.score);
  if (const auto* lasso = std::get_if<LassoCoefficient>(&cfg.statistic)) {
    j["cv_folds"] = lasso->cv_folds;
    j["n_lambda"] = lasso->n_lambda;
    j["lambda_min_ratio"] = lasso->lambda_min_ratio;
    j["cv_patience"] = lasso->cv_patience;
    if (!lasso->lambda_grid.empty()) j["lambda_grid"] = lasso->lambda_grid;
  }
  if (const auto* ols = std::get_if<NeighborhoodOls>(&cfg.statistic)) {
    j["radius"] = ols->radius;
    if (!ols->neighbors.empty()) {
      json lists = json::array();
      for (const auto& list : ols->neighbors) {
        json one = json::array();
        for (int k : list) one.push_back(k + 1);
        lists.push_back(one);
      }
      j["neighbors"] = lists;
    }
  }
  return j;
}

CrtConfig crt_from_json(const json& j) {
  CrtConfig cfg;
  cfg.randomizations = get_or(j, "B", cfg.randomizations);
  if (j.contains("mode")) cfg.mode = crt_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("score")) cfg.score = score_kind_from_string(j.at("score").get<std::string>());
  const std::string stat = get_or<std::string>(j, "statistic", "lasso");
  if (stat == "lasso") {
    LassoCoefficient lasso;
    lasso.cv_folds = get_or(j, "cv_folds", lasso.cv_folds);
    lasso.n_lambda = get_or(j, "n_lambda", lasso.n_lambda);
    lasso.lambda_min_ratio = get_or(j, "lambda_min_ratio", lasso.lambda_min_ratio);
    lasso.cv_patience = get_or(j, "cv_patience", lasso.cv_patience);
    if (j.contains("lambda_grid")) lasso.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    cfg.statistic = lasso;
  } else if (stat == "abs_correlation" || stat == "correlation") {
    cfg.statistic = AbsCorrelation{};
  } else if (stat == "neighborhood_ols" || stat == "ols") {
    NeighborhoodOls ols;
    ols.radius = get_or(j, "radius", ols.radius);
    if (j.contains("neighbors")) {
      for (const auto& list : j.at("neighbors")) {
        std::vector<int> one;
        for (int k : list.get<std::vector<int>>()) one.push_back(k - 1);
        ols.neighbors.push_back(one);
      }
    }
    cfg.statistic = ols;
  } else {
    throw ParseError("unknown statistic '" + stat + "'");
  }
  cfg.validate();
  return cfg;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* what) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw ParseError(std::string(what) + " is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ParseError(std::string(what) + " is ragged");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (setting < 'a' || setting > 'd') throw DomainError("response setting must be one of a-d");
  if (n < 2) throw DomainError("n must be at least 2");
  if (p < 1) throw DomainError("p must be at least 1");
  if (k < 0 || k > p) throw DomainError("k must lie in [0, p]");
  if (setting == 'c' && k % 2 != 0) throw DomainError("nonlinear pairs need an even k");
  if (amplitudes.empty()) throw DomainError("amplitude grid is empty");
  for (double a : amplitudes)
    if (!(a >= 0.0)) throw DomainError("amplitudes must be nonnegative");
  if (methods.empty()) throw DomainError("method list is empty");
  if (n_reps < 1) throw DomainError("n_reps must be at least 1");
  if (family == CovariateFamily::ar1 && !(std::abs(ar_rho) < 1.0))
    throw DomainError("AR(1) correlation must lie in (-1, 1)");
  if (!(split_frac > 0.0 && split_frac < 1.0)) throw DomainError("split_frac must lie in (0,1)");
  seqstep.validate();
  for (Method m : methods) config_for(*this, m).validate();
}

CovariateModel make_covariate_model(const ExperimentConfig& config) {
  if (config.family == CovariateFamily::ar1) return GaussianModel::ar1(config.p, config.ar_rho);
  return HmmModel::sticky_five_state(config.p);
}

SyntheticDraw draw_synthetic(const ExperimentConfig& config, const CovariateModel& model,
                             std::size_t amplitude_index, int rep) {
  // Covariates, support and noise depend on the rep only, so the amplitude sweep
  // reuses the same draws.
  const RngStream stream = RngStream(config.seed, 0).derive(kDataTag, static_cast<std::uint64_t>(rep));
  RngStream x_rng = stream.derive(1);
  RngStream y_rng = stream.derive(2);
  SyntheticDraw draw;
  draw.data.x = sample_rows(model, config.n, x_rng);
  const ResponseSpec spec = ResponseSpec::standard(config.setting, config.family,
                                                   config.amplitudes.at(amplitude_index), config.k);
  GeneratedResponse gen = generate_response(draw.data.x, spec, y_rng);
  draw.data.y = std::move(gen.y);
  draw.data.response_kind = gen.kind;
  draw.truth = std::move(gen.truth);
  if (spec.amplitude == 0.0) {
    // Y does not depend on X, so every variable is null.
    for (int j : draw.truth.nonnull) draw.truth.null.push_back(j);
    std::sort(draw.truth.null.begin(), draw.truth.null.end());
    draw.truth.nonnull.clear();
  }
  return draw;
}

void score_selection(const Selection& selection, const GroundTruth& truth, ReplicationResult& row) {
  std::vector<char> is_nonnull;
  int p = 0;
  for (int v : truth.nonnull) p = std::max(p, v + 1);
  for (int v : truth.null) p = std::max(p, v + 1);
  is_nonnull.assign(p, 0);
  for (int v : truth.nonnull) is_nonnull[v] = 1;
  int true_hits = 0;
  for (int v : selection.selected)
    if (v >= 1 && v <= p && is_nonnull[v - 1]) ++true_hits;
  const int n_sel = static_cast<int>(selection.selected.size());
  row.n_selected = n_sel;
  row.fdp = static_cast<double>(n_sel - true_hits) / std::max(n_sel, 1);
  row.power = static_cast<double>(true_hits) / std::max<std::size_t>(truth.nonnull.size(), 1);
}

ReplicationResult run_method(const ExperimentConfig& config, const CovariateModel& model,
                             const SyntheticDraw& draw, Method method, std::size_t amplitude_index,
                             int rep) {
  ReplicationResult row;
  row.setting = std::string(1, config.setting);
  row.family = to_string(config.family);
  row.n = config.n;
  row.p = config.p;
  row.k = config.k;
  row.amplitude = config.amplitudes.at(amplitude_index);
  row.method = method;
  row.rep = rep;
  row.seed = config.seed;

  const RngStream stream = RngStream(config.seed, 0)
                               .derive(method_tag(method), static_cast<std::uint64_t>(rep))
                               .derive(amplitude_index);
  const CrtConfig cfg = config_for(config, method);
  const auto start = std::chrono::steady_clock::now();
  try {
    Selection sel = method == Method::split
                        ? pipeline_split(draw.data, model, cfg, config.seqstep, config.split_frac, stream)
                        : pipeline_symmetric(draw.data, model, cfg, config.seqstep, stream);
    score_selection(sel, draw.truth, row);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.fdp = row.power = std::numeric_limits<double>::quiet_NaN();
    row.n_selected = -1;
  }
  if (config.record_runtime)
    row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const CovariateModel model = make_covariate_model(config);
  const std::size_t n_amp = config.amplitudes.size();
  const std::size_t n_methods = config.methods.size();
  const std::size_t tasks = n_amp * static_cast<std::size_t>(config.n_reps);

  ExperimentResult result;
  result.rows.resize(tasks * n_methods);
  parallel_for(
      tasks,
      [&](std::size_t t) {
        const std::size_t a = t / config.n_reps;
        const int rep = static_cast<int>(t % config.n_reps);
        SyntheticDraw draw;
        std::string draw_error;
        try {
          draw = draw_synthetic(config, model, a, rep);
        } catch (const std::exception& e) {
          draw_error = e.what();
        }
        for (std::size_t m = 0; m < n_methods; ++m) {
          ReplicationResult& row = result.rows[t * n_methods + m];
          if (draw_error.empty()) {
            row = run_method(config, model, draw, config.methods[m], a, rep);
          } else {
            row.setting = std::string(1, config.setting);
            row.family = to_string(config.family);
            row.n = config.n;
            row.p = config.p;
            row.k = config.k;
            row.amplitude = config.amplitudes[a];
            row.method = config.methods[m];
            row.rep = rep;
            row.seed = config.seed;
            row.fdp = row.power = std::numeric_limits<double>::quiet_NaN();
            row.n_selected = -1;
            row.error = draw_error;
          }
        }
      },
      config.workers);
  for (const auto& row : result.rows)
    if (!row.error.empty()) ++result.failures;
  return result;
}

TimingReport timing_comparison(const ExperimentConfig& config) {
  config.validate();
  const CovariateModel model = make_covariate_model(config);
  TimingReport report;
  for (Method method : {Method::symmetric_original, Method::symmetric_oneshot}) {
    TimingRow row;
    row.method = method;
    double total = 0.0;
    for (int rep = 0; rep < config.n_reps; ++rep) {
      SyntheticDraw draw = draw_synthetic(config, model, 0, rep);
      const RngStream stream =
          RngStream(config.seed, 0).derive(method_tag(method), static_cast<std::uint64_t>(rep));
      const auto start = std::chrono::steady_clock::now();
      pipeline_symmetric(draw.data, model, config_for(config, method), config.seqstep, stream);
      total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    row.reps = config.n_reps;
    row.mean_seconds = total / config.n_reps;
    report.rows.push_back(row);
  }
  report.ratio = report.rows[1].mean_seconds / report.rows[0].mean_seconds;
  return report;
}

std::string results_csv_header() {
  return "setting,family,n,p,k,amplitude,method,rep,fdp,power,n_selected,runtime_ms,seed";
}

void write_results_csv(std::ostream& out, const std::vector<ReplicationResult>& rows) {
  out << results_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.setting << ',' << r.family << ',' << r.n << ',' << r.p << ',' << r.k << ','
        << format_double(r.amplitude) << ',' << to_string(r.method) << ',' << r.rep << ','
        << format_double(r.fdp) << ',' << format_double(r.power) << ',' << r.n_selected << ','
        << r.runtime_ms << ',' << r.seed << '\n';
  }
}

// ---------------------------------------------------------------------------
// Datasets

Dataset parse_dataset_csv(std::istream& in, ResponseKind kind) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset file", 1);
  ++line_no;
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 2) throw ParseError("header needs a y column and at least one x column", 1);
  if (header[0] != "y") throw ParseError("first column must be 'y', found '" + header[0] + "'", 1);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string expected = "x" + std::to_string(c);
    if (header[c] != expected)
      throw ParseError("column " + std::to_string(c + 1) + " must be '" + expected + "', found '" +
                           header[c] + "'",
                       1);
  }
  const std::size_t width = header.size();
  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
        throw ParseError("column '" + header[c] + "' is not a finite number: '" + f + "'", line_no);
      values.push_back(v);
    }
    ++rows;
  }
  Dataset data;
  data.response_kind = kind;
  data.x.resize(rows, static_cast<Index>(width - 1));
  data.y.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    data.y[i] = values[i * width];
    for (std::size_t c = 1; c < width; ++c) data.x(i, static_cast<Index>(c - 1)) = values[i * width + c];
  }
  data.validate();
  return data;
}

Dataset load_dataset_csv(const std::string& path, ResponseKind kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file '" + path + "'");
  return parse_dataset_csv(in, kind);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << 'y';
  for (Index c = 0; c < data.p(); ++c) out << ",x" << c + 1;
  out << '\n' << std::setprecision(17);
  for (Index i = 0; i < data.n(); ++i) {
    out << data.y[i];
    for (Index c = 0; c < data.p(); ++c) out << ',' << data.x(i, c);
    out << '\n';
  }
}

GaussianModel fit_gaussian(const Matrix& x, double shrink) {
  if (x.rows() < 2) throw DomainError("need at least 2 rows to fit a Gaussian");
  if (!(shrink >= 0.0)) throw DomainError("shrinkage must be nonnegative");
  const Vector mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  cov.diagonal().array() += shrink;
  try {
    return GaussianModel(mean, cov);
  } catch (const DomainError& e) {
    throw DomainError(std::string("fitted covariance is not positive definite after shrinkage: ") +
                      e.what());
  }
}

Selection select_on_data(const Dataset& data, const CovariateModel& model, const CrtConfig& cfg,
                         const SeqStepParams& params, std::uint64_t seed) {
  if (model_dim(model) != data.p())
    throw DomainError("model dimension " + std::to_string(model_dim(model)) +
                      " does not match dataset with " + std::to_string(data.p()) + " variables");
  return pipeline_symmetric(data, model, cfg, params, RngStream(seed, 0));
}

// ---------------------------------------------------------------------------
// JSON

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    ExperimentConfig c;
    if (j.contains("family")) c.family = covariate_family_from_string(j.at("family").get<std::string>());
    c.ar_rho = get_or(j, "rho", c.ar_rho);
    if (j.contains("setting")) {
      const std::string s = j.at("setting").get<std::string>();
      if (s.size() != 1) throw ParseError("setting must be one of a-d");
      c.setting = s[0];
    }
    c.n = get_or<Index>(j, "n", c.n);
    c.p = get_or<Index>(j, "p", c.p);
    c.k = get_or(j, "k", c.k);
    if (j.contains("amplitudes")) c.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (j.contains("crt")) c.crt = crt_from_json(j.at("crt"));
    if (j.contains("seqstep")) {
      c.seqstep.c = get_or(j.at("seqstep"), "c", c.seqstep.c);
      c.seqstep.q = get_or(j.at("seqstep"), "q", c.seqstep.q);
    }
    c.split_frac = get_or(j, "split_frac", c.split_frac);
    c.n_reps = get_or(j, "n_reps", c.n_reps);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.output = get_or<std::string>(j, "output", c.output);
    c.record_runtime = get_or(j, "record_runtime", c.record_runtime);
    c.workers = get_or(j, "workers", c.workers);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid experiment config: ") + e.what());
  }
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["family"] = to_string(c.family);
  j["rho"] = c.ar_rho;
  j["setting"] = std::string(1, c.setting);
  j["n"] = c.n;
  j["p"] = c.p;
  j["k"] = c.k;
  j["amplitudes"] = c.amplitudes;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["crt"] = crt_to_json(c.crt);
  j["seqstep"] = {{"c", c.seqstep.c}, {"q", c.seqstep.q}};
  j["split_frac"] = c.split_frac;
  j["n_reps"] = c.n_reps;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["record_runtime"] = c.record_runtime;
  j["workers"] = c.workers;
  return j.dump(2);
}

CrtConfig crt_config_from_json(const std::string& text) {
  try {
    return crt_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid CRT config: ") + e.what());
  }
}

CovariateModel covariate_model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const std::string type = j.at("type").get<std::string>();
    if (type == "ar1") return GaussianModel::ar1(j.at("p").get<Index>(), j.at("rho").get<double>());
    if (type == "block")
      return GaussianModel::block(j.at("p").get<Index>(), j.at("block_size").get<int>(),
                                  j.at("off_diag").get<double>());
    if (type == "gaussian") {
      Vector mean = vector_from_json(j.at("mean"));
      Matrix cov = matrix_from_json(j.at("covariance"), "covariance");
      GaussianStructure structure = GeneralStructure{};
      if (j.contains("structure")) {
        const json& s = j.at("structure");
        const std::string kind = s.at("kind").get<std::string>();
        if (kind == "ar1") structure = Ar1Structure{s.at("rho").get<double>()};
        else if (kind == "block")
          structure = BlockStructure{s.at("block_size").get<int>(), s.at("off_diag").get<double>()};
        else if (kind != "general") throw ParseError("unknown Gaussian structure '" + kind + "'");
      }
      return GaussianModel(std::move(mean), std::move(cov), structure);
    }
    if (type == "hmm") {
      const Index length = j.at("length").get<Index>();
      if (!j.contains("transition")) return HmmModel::sticky_five_state(length);
      std::vector<double> alphabet = get_or<std::vector<double>>(j, "alphabet", {1.0, 2.0, 3.0});
      return HmmModel(length, matrix_from_json(j.at("transition"), "transition"),
                      matrix_from_json(j.at("emission"), "emission"), vector_from_json(j.at("initial")),
                      std::move(alphabet));
    }
    throw ParseError("unknown model type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model JSON: ") + e.what());
  }
}

std::string to_json(const CovariateModel& model) {
  json j;
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    j["type"] = "gaussian";
    j["mean"] = std::vector<double>(g->mean().data(), g->mean().data() + g->mean().size());
    j["covariance"] = matrix_to_json(g->covariance());
    if (const auto* ar = std::get_if<Ar1Structure>(&g->structure()))
      j["structure"] = {{"kind", "ar1"}, {"rho", ar->rho}};
    else if (const auto* b = std::get_if<BlockStructure>(&g->structure()))
      j["structure"] = {{"kind", "block"}, {"block_size", b->block_size}, {"off_diag", b->off_diag}};
    else
      j["structure"] = {{"kind", "general"}};
  } else {
    const auto& h = std::get<HmmModel>(model);
    j["type"] = "hmm";
    j["length"] = h.dim();
    j["transition"] = matrix_to_json(h.transition());
    j["emission"] = matrix_to_json(h.emission());
    j["initial"] = std::vector<double>(h.initial().data(), h.initial().data() + h.initial().size());
    j["alphabet"] = h.alphabet();
  }
  return j.dump(2);
}

std::string to_json(const Selection& s) {
  json j;
  j["k_hat"] = s.k_hat;
  j["selected"] = s.selected;
  j["ratio_trace"] = s.ratio_trace;
  return j.dump();
}

Selection selection_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Selection s;
    s.k_hat = j.at("k_hat").get<int>();
    s.selected = j.at("selected").get<std::vector<int>>();
    s.ratio_trace = j.at("ratio_trace").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid selection JSON: ") + e.what());
  }
}

std::string to_json(const BoundReport& r) {
  json j;
  j["kind"] = to_string(r.kind);
  j["bound"] = r.value;
  j["c"] = r.c;
  j["q"] = r.q;
  if (r.delta) j["delta"] = *r.delta;
  if (r.epsilon) j["epsilon"] = *r.epsilon;
  if (r.rho) j["rho"] = *r.rho;
  if (r.p) j["p"] = *r.p;
  if (r.kind == BoundKind::arbitrary) j["null_positions"] = r.null_positions;
  if (r.log_p_cap) j["log_p_cap"] = *r.log_p_cap;
  return j.dump();
}

std::string to_json(const MonteCarloFdr& f) {
  json j;
  j["fdr"] = f.fdr;
  j["std_error"] = f.std_error;
  j["power"] = f.power;
  j["replicates"] = f.replicates;
  return j.dump();
}

std::string to_string(Method method) {
  switch (method) {
    case Method::split: return "split";
    case Method::symmetric_original: return "symmetric_original";
    case Method::symmetric_oneshot: return "symmetric_oneshot";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "split") return Method::split;
  if (name == "symmetric_original") return Method::symmetric_original;
  if (name == "symmetric_oneshot") return Method::symmetric_oneshot;
  throw ParseError("unknown method '" + name + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace seqcrt
