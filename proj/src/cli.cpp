#include "hlsm/analysis.hpp"
#include "hlsm/errors.hpp"
#include "hlsm/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace hlsm {

namespace {

using nlohmann::json;

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw DataError(std::string("bad ") + what + " list '" + s + "'");
    v.push_back(x);
  }
  if (v.size() != expected) {
    throw DataError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated values");
  }
  return v;
}

Dims parse_ranks(const std::string& s) {
  const auto v = parse_list(s, 3, "ranks");
  Dims d{};
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(v[k] >= 1.0) || v[k] != std::floor(v[k])) throw DataError("ranks must be positive integers");
    d[k] = static_cast<std::size_t>(v[k]);
  }
  return d;
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

// ---- option bundles ----------------------------------------------------------

struct SimulateOpts {
  std::string model = "general";
  std::size_t n = 50, r = 3, layers = 150, q = 2, t_len = 20;
  int m = 3;
  double sigma = 1.0;
  std::string link = "logit";
  double core_sign = 1.0;
  bool distinct_frames = false;
  std::uint64_t seed = 0;
  std::string out = "tensor.coo";
  std::string truth = "truth.json";
};

struct FitOpts {
  std::string ranks = "3,3,3";
  std::string link = "logit";
  double sigma = 1.0;
  double eta = 0.0;
  double eta_scale = 1.0;
  std::string delta;
  double xi = 0.0;
  int max_iter = 100;
  double tol = 1e-8;
  std::string init = "hosvd";
  int hooi_iters = 10;
  double subsample = 0.0;
  int full_final_iters = 2;
  int core_max_it = 50;
  double grad_tol = 1e-8;
  bool no_safeguard = false;
  std::string tie = "none";
  std::string mask = "all";
  std::uint64_t seed = 0;
};

void add_fit_options(CLI::App* sub, FitOpts& o) {
  sub->add_option("--ranks", o.ranks, "Tucker ranks r1,r2,r3")->capture_default_str();
  sub->add_option("--link", o.link, "logit or probit")->capture_default_str();
  sub->add_option("--sigma", o.sigma, "logit scale")->capture_default_str();
  sub->add_option("--eta", o.eta, "step size (0: default tuning)")->capture_default_str();
  sub->add_option("--eta-scale", o.eta_scale, "multiplier on the default step size")->capture_default_str();
  sub->add_option("--delta", o.delta, "row-norm caps d1,d2,d3 (empty: default tuning)");
  sub->add_option("--xi", o.xi, "core norm cap (0: default tuning)")->capture_default_str();
  sub->add_option("--max-iter", o.max_iter, "iteration limit")->capture_default_str();
  sub->add_option("--tol", o.tol, "relative loss change that stops the fit")->capture_default_str();
  sub->add_option("--init", o.init, "hosvd, hooi or random")->capture_default_str();
  sub->add_option("--hooi-iters", o.hooi_iters, "HOOI sweeps for --init hooi")->capture_default_str();
  sub->add_option("--subsample", o.subsample, "core-solve sampling fraction (0: full data)")->capture_default_str();
  sub->add_option("--full-final-iters", o.full_final_iters, "closing iterations on full data")->capture_default_str();
  sub->add_option("--core-max-it", o.core_max_it, "Newton iterations per core solve")->capture_default_str();
  sub->add_option("--grad-tol", o.grad_tol, "core-solve gradient tolerance")->capture_default_str();
  sub->add_flag("--no-safeguard", o.no_safeguard, "do not halve the step when the loss rises");
  sub->add_option("--tie", o.tie, "none, modes12 or all")->capture_default_str();
  sub->add_option("--mask", o.mask, "all, sym12_upper, sym_full_upper or canonical")->capture_default_str();
  sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

FitConfig make_config(const FitOpts& o, Symmetry sym) {
  FitConfig c;
  c.ranks = parse_ranks(o.ranks);
  c.link = LinkSpec::parse(o.link, o.sigma);
  if (o.eta > 0.0) c.eta = o.eta;
  c.eta_scale = o.eta_scale;
  if (!o.delta.empty()) {
    const auto d = parse_list(o.delta, 3, "delta");
    c.delta = std::array<double, 3>{d[0], d[1], d[2]};
  }
  if (o.xi > 0.0) c.xi = o.xi;
  c.max_iter = o.max_iter;
  c.tol = o.tol;
  c.init.kind = parse_init_kind(o.init);
  if (c.init.kind == InitKind::provided) throw DataError("--init provided is only available through the library");
  c.init.hooi_iters = o.hooi_iters;
  c.init.seed = o.seed;
  c.core_solver.max_it = o.core_max_it;
  c.core_solver.grad_tol = o.grad_tol;
  if (o.subsample > 0.0) {
    c.core_solver.kind = CoreSolverKind::subsampled;
    c.core_solver.frac = o.subsample;
    c.core_solver.full_final_iters = o.full_final_iters;
    c.core_solver.seed = o.seed;
  }
  c.step_safeguard = !o.no_safeguard;
  if (o.tie == "none") c.tie = TieMode::none;
  else if (o.tie == "modes12") c.tie = TieMode::modes12;
  else if (o.tie == "all") c.tie = TieMode::all;
  else throw DataError("unknown tie mode '" + o.tie + "'");
  c.mask.mode = o.mask == "canonical" ? canonical_mask_mode(sym) : parse_mask_mode(o.mask);
  c.seed = o.seed;
  return c;
}

// ---- subcommands ---------------------------------------------------------------

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  const LinkSpec link = LinkSpec::parse(o.link, o.sigma);
  Simulated s;
  if (o.model == "general") {
    s = simulate_general(o.n, o.r, o.sigma, o.seed);
  } else if (o.model == "mmlsm") {
    s = simulate_mmlsm(o.n, o.layers, o.m, o.r, o.seed, link, {o.distinct_frames, o.core_sign});
  } else if (o.model == "hypergraph") {
    s = simulate_hypergraph(o.n, o.r, o.seed, link);
  } else if (o.model == "dynamic") {
    s = simulate_dynamic(o.n, o.t_len, o.m, o.q, o.seed, link);
  } else {
    throw DataError("unknown model '" + o.model + "' (expected general, mmlsm, hypergraph or dynamic)");
  }
  write_coo(o.out, s.adjacency, s.truth.symmetry);
  write_truth(o.truth, s.truth);
  const double ones = std::count(s.adjacency.values().begin(), s.adjacency.values().end(), 1.0);
  out << "model=" << o.model << " dims=" << s.adjacency.dim(1) << "x" << s.adjacency.dim(2) << "x"
      << s.adjacency.dim(3) << " density=" << fmt(ones / static_cast<double>(s.adjacency.size())) << "\n";
  out << "wrote " << o.out << " and " << o.truth << "\n";
  return 0;
}

/// The options of one subcommand in config-file syntax; `hlsm --config FILE NAME` replays them.
std::string subcommand_config(const CLI::App& app, const std::string& name) {
  std::istringstream all(app.config_to_str(true, false));
  std::string kept, line;
  while (std::getline(all, line)) {
    if (line.rfind(name + ".", 0) == 0) kept += line + "\n";
  }
  return kept;
}

struct FitCmd {
  std::string input;
  std::string truth;
  std::string out = "result.json";
  std::string manifest;
};

int cmd_fit(const FitCmd& f, const FitOpts& o, const std::string& config_echo, std::ostream& out) {
  RunManifest man;
  man.command = "fit";
  man.config = config_echo;
  man.seed = o.seed;
  man.started = now_utc();
  const CooFile data = read_coo(f.input);
  man.inputs = {f.input};
  std::optional<TuckerFactors> truth;
  if (!f.truth.empty()) {
    truth = read_truth(f.truth).factors_star;
    man.inputs.push_back(f.truth);
  }
  man.input_digest = file_digest(man.inputs);

  const FitConfig cfg = make_config(o, data.symmetry);
  const FitResult r = fit(data.tensor, cfg, truth);
  write_result(f.out, r, cfg.link, cfg.mask.mode);

  const std::string manifest_path = f.manifest.empty() ? f.out + ".manifest.json" : f.manifest;
  man.outputs = {f.out, manifest_path};
  man.finished = now_utc();
  write_text_file(manifest_path, manifest_to_json(man));

  out << "iterations=" << r.iterations << " stop=" << r.stop_reason << " loss=" << fmt(r.loss_trajectory.back());
  if (!r.projection_trajectory.empty()) out << " projection_error=" << fmt(r.projection_trajectory.back());
  out << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  out << "wrote " << f.out << " and " << manifest_path << "\n";
  return 0;
}

struct ClusterCmd {
  std::string result;
  std::string truth;
  int k = 0;
  int restarts = 20;
  std::uint64_t seed = 0;
  std::string out = "labels.csv";
};

int cmd_cluster(const ClusterCmd& c, std::ostream& out) {
  const StoredResult s = read_result(c.result);
  const Matrix& w = s.result.factors.factors[2];
  const int k = c.k > 0 ? c.k : static_cast<int>(w.cols());
  const ClusterResult cl = kmeans_cluster(w, k, c.restarts, c.seed);
  std::ostringstream csv;
  csv << "layer,label\n";
  for (std::size_t l = 0; l < cl.labels.size(); ++l) csv << l + 1 << "," << cl.labels[l] + 1 << "\n";
  write_text_file(c.out, csv.str());
  out << "k=" << k << " wcss=" << fmt(cl.wcss) << "\n";
  if (!c.truth.empty()) {
    const SyntheticTruth t = read_truth(c.truth);
    if (!t.labels) throw DataError("truth file has no layer labels");
    out << "hamming_error=" << fmt(clustering_error(cl.labels, t.labels->labels, std::max(k, t.labels->m))) << "\n";
  }
  out << "wrote " << c.out << "\n";
  return 0;
}

struct ChangeCmd {
  std::string result;
  std::string epsilon = "auto";
  std::string truth;
  std::string out = "changepoints.json";
};

int cmd_changepoints(const ChangeCmd& c, std::ostream& out) {
  const StoredResult s = read_result(c.result);
  std::optional<double> eps;
  if (c.epsilon != "auto") eps = parse_list(c.epsilon, 1, "epsilon")[0];
  const ChangePointResult cp = detect_change_points(s.result.factors.factors[2], eps);
  json j = {{"detected_times", cp.detected_times},
            {"epsilon_used", std::isfinite(cp.epsilon_used) ? json(cp.epsilon_used) : json(nullptr)},
            {"auto_threshold", cp.auto_threshold},
            {"degenerate", cp.degenerate},
            {"gap_profile", cp.gap_profile}};
  out << "detected=";
  for (std::size_t q = 0; q < cp.detected_times.size(); ++q) out << (q ? "," : "") << cp.detected_times[q];
  out << "\n";
  if (!c.truth.empty()) {
    const SyntheticTruth t = read_truth(c.truth);
    const bool exact = t.change_points == cp.detected_times;
    j["true_change_points"] = t.change_points;
    j["exact_detection"] = exact;
    out << "exact_detection=" << (exact ? "true" : "false") << "\n";
  }
  if (cp.degenerate) out << "warning: gaps show no separation; no interior change points declared\n";
  write_text_file(c.out, j.dump(1) + "\n");
  out << "wrote " << c.out << "\n";
  return 0;
}

struct PredictCmd {
  std::string input;
  std::string truth;
  std::string holdout = "fraction:0.1,0.1";
  int reps = 1;
  std::string out = "roc.csv";
  std::string bands = "roc_bands.csv";
  std::string summary = "predict_summary.json";
  std::string manifest;
};

double tpr_at(const RocCurve& roc, double f) {
  double best = 0.0;
  for (std::size_t q = 1; q < roc.points.size(); ++q) {
    const auto& a = roc.points[q - 1];
    const auto& b = roc.points[q];
    if (f < a.fpr || f > b.fpr) continue;
    const double t = b.fpr > a.fpr ? a.tpr + (b.tpr - a.tpr) * (f - a.fpr) / (b.fpr - a.fpr) : b.tpr;
    best = std::max(best, t);
  }
  return best;
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_predict(const PredictCmd& p, const FitOpts& o, const std::string& config_echo, std::ostream& out) {
  if (p.reps < 1) throw DataError("--reps must be at least 1");
  RunManifest man;
  man.command = "predict-links";
  man.config = config_echo;
  man.seed = o.seed;
  man.started = now_utc();
  const CooFile data = read_coo(p.input);
  man.inputs = {p.input};
  std::optional<SyntheticTruth> truth;
  if (!p.truth.empty()) {
    truth = read_truth(p.truth);
    man.inputs.push_back(p.truth);
  }
  man.input_digest = file_digest(man.inputs);
  const HoldoutSpec spec = HoldoutSpec::parse(p.holdout);
  const FitConfig base = make_config(o, data.symmetry);

  const auto reps = static_cast<std::size_t>(p.reps);
  std::vector<RocCurve> curves(reps);
  std::vector<double> oracle(reps, std::nan(""));
  // Replicates are independent; results land in replicate order.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(reps); ++rr) {
    const auto rep = static_cast<std::size_t>(rr);
    const std::uint64_t seed = o.seed + rep;
    const Holdout h = holdout_protocol(data.tensor, spec, data.symmetry, seed);
    FitConfig cfg = base;
    cfg.seed = seed;
    cfg.init.seed = seed;
    cfg.core_solver.seed = seed;
    const FitResult r = fit(h.a_test, cfg);
    std::vector<double> scores, oracle_scores;
    std::vector<int> labels;
    for (const auto& e : h.eval_set) {
      scores.push_back(link_derivatives(cfg.link, r.theta_hat(e.index.i, e.index.j, e.index.k)).g);
      labels.push_back(static_cast<int>(e.label));
      if (truth) {
        oracle_scores.push_back(link_derivatives(truth->link, truth->theta_star(e.index.i, e.index.j, e.index.k)).g);
      }
    }
    curves[rep] = auc_roc(scores, labels);
    if (truth) oracle[rep] = auc_roc(oracle_scores, labels).auc;
  }

  std::ostringstream csv;
  csv << "threshold,fpr,tpr\n";
  for (const auto& pt : curves[0].points) csv << fmt(pt.threshold) << "," << fmt(pt.fpr) << "," << fmt(pt.tpr) << "\n";
  write_text_file(p.out, csv.str());
  man.outputs = {p.out};

  if (reps > 1) {
    std::ostringstream b;
    b << "# pointwise empirical quantile band over " << reps << " replicates\n";
    b << "fpr,tpr_q0005,tpr_median,tpr_q9995\n";
    for (int g = 0; g <= 100; ++g) {
      const double f = g / 100.0;
      std::vector<double> t;
      for (const auto& c : curves) t.push_back(tpr_at(c, f));
      b << fmt(f) << "," << fmt(quantile(t, 0.0005)) << "," << fmt(quantile(t, 0.5)) << "," << fmt(quantile(t, 0.9995)) << "\n";
    }
    write_text_file(p.bands, b.str());
    man.outputs.push_back(p.bands);
  }

  std::vector<double> aucs;
  for (const auto& c : curves) aucs.push_back(c.auc);
  double mean = 0.0;
  for (double a : aucs) mean += a;
  mean /= static_cast<double>(aucs.size());
  json j = {{"holdout", spec.to_string()}, {"reps", reps}, {"auc", aucs}, {"mean_auc", mean}};
  if (truth) j["oracle_auc"] = oracle;
  write_text_file(p.summary, j.dump(1) + "\n");
  man.outputs.push_back(p.summary);

  const std::string manifest_path = p.manifest.empty() ? p.summary + ".manifest.json" : p.manifest;
  man.outputs.push_back(manifest_path);
  man.finished = now_utc();
  write_text_file(manifest_path, manifest_to_json(man));

  out << "mean_auc=" << fmt(mean) << " reps=" << reps << "\n";
  out << "auc_rep0=" << fmt(curves[0].auc) << " trapezoid_rep0=" << fmt(trapezoid_area(curves[0])) << "\n";
  out << "wrote " << p.out << " and " << p.summary << "\n";
  return 0;
}

struct EmbedCmd {
  std::string result;
  int mode = 1;
  int dims = 2;
  std::string nodes;
  std::string out = "embedding.csv";
};

int cmd_embed(const EmbedCmd& e, std::ostream& out) {
  if (e.mode < 1 || e.mode > 3) throw DataError("--mode must be 1, 2 or 3");
  const StoredResult s = read_result(e.result);
  const Matrix& u = s.result.factors.factors[static_cast<std::size_t>(e.mode - 1)];
  std::vector<std::string> names;
  if (!e.nodes.empty()) {
    names = json::parse(read_text_file(e.nodes)).at("nodes").get<std::vector<std::string>>();
    if (names.size() != static_cast<std::size_t>(u.rows())) throw DataError("node map size does not match the factor rows");
  }
  const MdsResult m = classical_mds(u, e.dims);
  std::ostringstream csv;
  csv << "node";
  if (e.dims == 2) {
    csv << ",x,y";
  } else {
    for (int c = 1; c <= e.dims; ++c) csv << ",x" << c;
  }
  csv << "\n";
  for (Eigen::Index i = 0; i < m.coords.rows(); ++i) {
    csv << (names.empty() ? std::to_string(i + 1) : names[static_cast<std::size_t>(i)]);
    for (Eigen::Index c = 0; c < m.coords.cols(); ++c) csv << "," << fmt(m.coords(i, c));
    csv << "\n";
  }
  write_text_file(e.out, csv.str());
  if (m.clipped) out << "warning: negative eigenvalues were clipped to zero\n";
  out << "wrote " << e.out << "\n";
  return 0;
}

struct DiagnoseCmd {
  std::string result;
  std::string out;
};

int cmd_diagnose(const DiagnoseCmd& d, std::ostream& out) {
  const StoredResult s = read_result(d.result);
  const Diagnostics g = model_diagnostics(s.result.factors, s.link);
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  const json j = {{"incoherence", {g.incoherence[0], g.incoherence[1], g.incoherence[2]}},
                  {"condition_number", num(g.condition_number)},
                  {"theta_inf_norm", num(g.theta_inf_norm)},
                  {"gamma_alpha", num(g.gamma_alpha)},
                  {"beta_alpha", num(g.beta_alpha)},
                  {"zeta_alpha", num(g.zeta_alpha)},
                  {"err_r_bound", num(g.err_r_bound)},
                  {"thm1_rate_expr", num(g.thm1_rate_expr)}};
  if (d.out.empty()) {
    out << j.dump(1) << "\n";
  } else {
    write_text_file(d.out, j.dump(1) + "\n");
    out << "wrote " << d.out << "\n";
  }
  return 0;
}

struct IngestCmd {
  std::string multilayer;
  std::string hypergraph;
  std::string binarize = "as_is";
  bool pad2 = false;
  int min_degree = 0;
  std::string out = "tensor.coo";
  std::string map = "nodes.json";
};

int cmd_ingest(const IngestCmd& c, std::ostream& out) {
  json map;
  if (!c.multilayer.empty()) {
    const MultilayerData d = ingest_multilayer_csv(c.multilayer, parse_binarize(c.binarize));
    write_coo(c.out, d.tensor, Symmetry::none);
    map = {{"nodes", d.nodes}, {"layers", d.layers}, {"dropped_layers", d.dropped_layers}};
    out << "nodes=" << d.nodes.size() << " layers=" << d.layers.size() << " dropped_layers=" << d.dropped_layers.size() << "\n";
  } else {
    const HypergraphData d = ingest_hypergraph_list(c.hypergraph, c.pad2, c.min_degree);
    write_coo(c.out, d.tensor, Symmetry::symfull);
    map = {{"nodes", d.nodes},
           {"has_dummy", d.has_dummy},
           {"edges_kept", d.edges_kept},
           {"edges_dropped_size", d.edges_dropped_size},
           {"edges_dropped_degree", d.edges_dropped_degree}};
    out << "nodes=" << d.nodes.size() << " hyperedges=" << d.edges_kept << "\n";
  }
  write_text_file(c.map, map.dump(1) + "\n");
  out << "wrote " << c.out << " and " << c.map << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent space models for third-order binary networks", "hlsm"};
  app.set_config("--config", "", "read options from a TOML/INI file (flags override it)");
  app.require_subcommand(1);

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic network and its truth");
  sim->add_option("--model", so.model, "general, mmlsm, hypergraph or dynamic")->capture_default_str();
  sim->add_option("--n", so.n, "nodes")->capture_default_str();
  sim->add_option("--r", so.r, "latent dimension")->capture_default_str();
  sim->add_option("--sigma", so.sigma, "logit scale")->capture_default_str();
  sim->add_option("--L", so.layers, "layers (mmlsm)")->capture_default_str();
  sim->add_option("--m", so.m, "classes (mmlsm) or segments (dynamic)")->capture_default_str();
  sim->add_option("--q", so.q, "latent dimension per segment (dynamic)")->capture_default_str();
  sim->add_option("--T", so.t_len, "time points (dynamic)")->capture_default_str();
  sim->add_option("--link", so.link, "logit or probit")->capture_default_str();
  sim->add_option("--core-sign", so.core_sign, "sign of the interaction matrices (mmlsm)")->capture_default_str();
  sim->add_flag("--distinct-frames", so.distinct_frames, "one latent frame per class (mmlsm)");
  sim->add_option("--seed", so.seed, "random seed")->capture_default_str();
  sim->add_option("--out", so.out, "tensor file")->capture_default_str();
  sim->add_option("--truth", so.truth, "truth file")->capture_default_str();

  FitCmd fc;
  FitOpts fo;
  auto* fit_cmd = app.add_subcommand("fit", "fit the Tucker latent space model");
  fit_cmd->add_option("--input", fc.input, "tensor file")->required();
  fit_cmd->add_option("--truth", fc.truth, "truth file for error trajectories");
  fit_cmd->add_option("--out", fc.out, "result file")->capture_default_str();
  fit_cmd->add_option("--manifest", fc.manifest, "manifest file (default: <out>.manifest.json)");
  add_fit_options(fit_cmd, fo);

  ClusterCmd cc;
  auto* cl = app.add_subcommand("cluster-layers", "k-means on the rows of the layer factor");
  cl->add_option("--result", cc.result, "result file")->required();
  cl->add_option("--truth", cc.truth, "truth file with layer labels");
  cl->add_option("--k", cc.k, "clusters (0: third rank)")->capture_default_str();
  cl->add_option("--restarts", cc.restarts, "k-means restarts")->capture_default_str();
  cl->add_option("--seed", cc.seed, "random seed")->capture_default_str();
  cl->add_option("--out", cc.out, "labels CSV")->capture_default_str();

  ChangeCmd ch;
  auto* cp = app.add_subcommand("changepoints", "row screening of the time factor");
  cp->add_option("--result", ch.result, "result file")->required();
  cp->add_option("--epsilon", ch.epsilon, "threshold or 'auto'")->capture_default_str();
  cp->add_option("--truth", ch.truth, "truth file with change points");
  cp->add_option("--out", ch.out, "output JSON")->capture_default_str();

  PredictCmd pc;
  FitOpts po;
  auto* pl = app.add_subcommand("predict-links", "hold out entries, refit, score by AUC");
  pl->add_option("--input", pc.input, "tensor file")->required();
  pl->add_option("--truth", pc.truth, "truth file; adds the AUC of the true probabilities");
  pl->add_option("--holdout", pc.holdout, "fraction:P1,P0 or balanced_half")->capture_default_str();
  pl->add_option("--reps", pc.reps, "replicates")->capture_default_str();
  pl->add_option("--out", pc.out, "ROC CSV of the first replicate")->capture_default_str();
  pl->add_option("--bands", pc.bands, "quantile band CSV (reps > 1)")->capture_default_str();
  pl->add_option("--summary", pc.summary, "summary JSON")->capture_default_str();
  pl->add_option("--manifest", pc.manifest, "manifest file (default: <summary>.manifest.json)");
  add_fit_options(pl, po);

  EmbedCmd ec;
  auto* em = app.add_subcommand("embed", "classical MDS of factor rows");
  em->add_option("--result", ec.result, "result file")->required();
  em->add_option("--mode", ec.mode, "which factor (1, 2 or 3)")->capture_default_str();
  em->add_option("--dims", ec.dims, "embedding dimension")->capture_default_str();
  em->add_option("--nodes", ec.nodes, "node map JSON from ingest");
  em->add_option("--out", ec.out, "embedding CSV")->capture_default_str();

  DiagnoseCmd dc;
  auto* dg = app.add_subcommand("diagnose", "incoherence, conditioning and error-bound diagnostics");
  dg->add_option("--result", dc.result, "result file")->required();
  dg->add_option("--out", dc.out, "output JSON (default: stdout)");

  IngestCmd ic;
  auto* in = app.add_subcommand("ingest", "convert an edge list or hyperedge list to a tensor file");
  auto* source = in->add_option_group("source", "exactly one input");
  source->add_option("--multilayer", ic.multilayer, "CSV with src,dst,layer,weight");
  source->add_option("--hypergraph", ic.hypergraph, "one hyperedge per line");
  source->require_option(1);
  in->add_option("--binarize", ic.binarize, "as_is or trade_surplus")->capture_default_str();
  in->add_flag("--pad2", ic.pad2, "pad 2-node hyperedges with a dummy node");
  in->add_option("--min-degree", ic.min_degree, "drop nodes below this degree")->capture_default_str();
  in->add_option("--out", ic.out, "tensor file")->capture_default_str();
  in->add_option("--map", ic.map, "node map JSON")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(so, out);
    if (fit_cmd->parsed()) return cmd_fit(fc, fo, subcommand_config(app, "fit"), out);
    if (cl->parsed()) return cmd_cluster(cc, out);
    if (cp->parsed()) return cmd_changepoints(ch, out);
    if (pl->parsed()) return cmd_predict(pc, po, subcommand_config(app, "predict-links"), out);
    if (em->parsed()) return cmd_embed(ec, out);
    if (dg->parsed()) return cmd_diagnose(dc, out);
    if (in->parsed()) return cmd_ingest(ic, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  err << "no subcommand given\n";
  return 1;
}

}  // namespace hlsm
