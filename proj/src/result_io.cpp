#include "hlsm/errors.hpp"
#include "hlsm/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hlsm {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

// Non-finite values are stored as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(i, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw DataError("matrix data has the wrong length");
  Matrix m(rows, cols);
  std::size_t e = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[e++].get<double>();
  return m;
}

json dims_json(const Dims& d) { return json::array({d[0], d[1], d[2]}); }

Dims dims_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-element dims array");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
}

json factors_json(const TuckerFactors& f) {
  json frames = json::array();
  for (const auto& m : f.factors) frames.push_back(matrix_json(m));
  return {{"ranks", dims_json(f.ranks())},
          {"core", std::vector<double>(f.core.values().begin(), f.core.values().end())},
          {"factors", frames}};
}

TuckerFactors factors_from(const json& j) {
  TuckerFactors f;
  f.core = Tensor3(dims_from(j.at("ranks")), j.at("core").get<std::vector<double>>());
  const auto& frames = j.at("factors");
  if (frames.size() != 3) throw DataError("expected three factor frames");
  for (std::size_t k = 0; k < 3; ++k) f.factors[k] = matrix_from(frames[k]);
  f.validate();
  return f;
}

json link_json(const LinkSpec& l) { return {{"kind", l.name()}, {"sigma", l.sigma}}; }

LinkSpec link_from(const json& j) {
  LinkSpec l = LinkSpec::parse(j.at("kind").get<std::string>(), j.at("sigma").get<double>());
  l.sigma = j.at("sigma").get<double>();
  return l;
}

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
}

void expect_format(const json& j, const char* name) {
  if (!j.is_object() || j.value("format", "") != name) {
    throw DataError(std::string("not a ") + name + " document");
  }
  if (j.value("version", 0) != kFormatVersion) throw DataError("unsupported format version");
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string result_to_json(const FitResult& r, const LinkSpec& link, MaskMode mask) {
  const Diagnostics& d = r.diagnostics;
  json j = {
      {"format", "hlsm-result"},
      {"version", kFormatVersion},
      {"dims", dims_json(r.factors.dims())},
      {"link", link_json(link)},
      {"mask", mask_mode_name(mask)},
      {"fit", factors_json(r.factors)},
      {"loss_trajectory", nums(r.loss_trajectory)},
      {"error_trajectory", nums(r.error_trajectory)},
      {"projection_trajectory", nums(r.projection_trajectory)},
      {"orthonormality_trajectory", nums(r.orthonormality_trajectory)},
      {"diagnostics",
       {{"incoherence", nums({d.incoherence.begin(), d.incoherence.end()})},
        {"condition_number", num(d.condition_number)},
        {"theta_inf_norm", num(d.theta_inf_norm)},
        {"gamma_alpha", num(d.gamma_alpha)},
        {"beta_alpha", num(d.beta_alpha)},
        {"zeta_alpha", num(d.zeta_alpha)},
        {"err_r_bound", num(d.err_r_bound)},
        {"thm1_rate_expr", num(d.thm1_rate_expr)}}},
      {"tuning",
       {{"eta", num(r.tuning.eta)},
        {"delta", nums({r.tuning.delta.begin(), r.tuning.delta.end()})},
        {"xi", num(r.tuning.xi)}}},
      {"final_eta", num(r.final_eta)},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"stop_reason", r.stop_reason},
      {"warnings", r.warnings},
  };
  return j.dump(1) + "\n";
}

StoredResult result_from_json(const std::string& text) {
  const json j = parse_or_throw(text);
  expect_format(j, "hlsm-result");
  return guarded([&] {
    StoredResult s;
    s.link = link_from(j.at("link"));
    s.mask_mode = parse_mask_mode(j.at("mask").get<std::string>());
    FitResult& r = s.result;
    r.factors = factors_from(j.at("fit"));
    if (r.factors.dims() != dims_from(j.at("dims"))) throw DataError("result dims disagree with its factors");
    r.theta_hat = tucker_compose(r.factors);
    r.loss_trajectory = get_nums(j.at("loss_trajectory"));
    r.error_trajectory = get_nums(j.at("error_trajectory"));
    r.projection_trajectory = get_nums(j.at("projection_trajectory"));
    r.orthonormality_trajectory = get_nums(j.at("orthonormality_trajectory"));
    const auto& d = j.at("diagnostics");
    const auto inc = get_nums(d.at("incoherence"));
    if (inc.size() != 3) throw DataError("expected three incoherence values");
    std::copy(inc.begin(), inc.end(), r.diagnostics.incoherence.begin());
    r.diagnostics.condition_number = get_num(d.at("condition_number"));
    r.diagnostics.theta_inf_norm = get_num(d.at("theta_inf_norm"));
    r.diagnostics.gamma_alpha = get_num(d.at("gamma_alpha"));
    r.diagnostics.beta_alpha = get_num(d.at("beta_alpha"));
    r.diagnostics.zeta_alpha = get_num(d.at("zeta_alpha"));
    r.diagnostics.err_r_bound = get_num(d.at("err_r_bound"));
    r.diagnostics.thm1_rate_expr = get_num(d.at("thm1_rate_expr"));
    const auto& t = j.at("tuning");
    r.tuning.eta = get_num(t.at("eta"));
    const auto delta = get_nums(t.at("delta"));
    if (delta.size() != 3) throw DataError("expected three delta values");
    std::copy(delta.begin(), delta.end(), r.tuning.delta.begin());
    r.tuning.xi = get_num(t.at("xi"));
    r.final_eta = get_num(j.at("final_eta"));
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
  });
}

void write_result(const std::string& path, const FitResult& r, const LinkSpec& link, MaskMode mask) {
  write_text_file(path, result_to_json(r, link, mask));
}

StoredResult read_result(const std::string& path) { return result_from_json(read_text_file(path)); }

std::string truth_to_json(const SyntheticTruth& t) {
  json j = {{"format", "hlsm-truth"},
            {"version", kFormatVersion},
            {"model", t.model},
            {"dims", dims_json(t.factors_star.dims())},
            {"link", link_json(t.link)},
            {"symmetry", symmetry_name(t.symmetry)},
            {"truth", factors_json(t.factors_star)},
            {"change_points", t.change_points}};
  if (t.labels) j["labels"] = {{"m", t.labels->m}, {"labels", t.labels->labels}};
  return j.dump(1) + "\n";
}

SyntheticTruth truth_from_json(const std::string& text) {
  const json j = parse_or_throw(text);
  expect_format(j, "hlsm-truth");
  return guarded([&] {
    SyntheticTruth t;
    t.model = j.at("model").get<std::string>();
    t.link = link_from(j.at("link"));
    t.symmetry = parse_symmetry(j.at("symmetry").get<std::string>());
    t.factors_star = factors_from(j.at("truth"));
    if (t.factors_star.dims() != dims_from(j.at("dims"))) throw DataError("truth dims disagree with its factors");
    t.theta_star = tucker_compose(t.factors_star);
    t.change_points = j.at("change_points").get<std::vector<std::size_t>>();
    if (j.contains("labels")) {
      LayerLabels l;
      l.m = j["labels"].at("m").get<int>();
      l.labels = j["labels"].at("labels").get<std::vector<int>>();
      l.validate();
      t.labels = std::move(l);
    }
    return t;
  });
}

void write_truth(const std::string& path, const SyntheticTruth& t) { write_text_file(path, truth_to_json(t)); }

SyntheticTruth read_truth(const std::string& path) { return truth_from_json(read_text_file(path)); }

std::string manifest_to_json(const RunManifest& m) {
  json j = {{"format", "hlsm-manifest"}, {"version", kFormatVersion}, {"command", m.command},
            {"config", m.config},        {"seed", m.seed},              {"started", m.started},
            {"finished", m.finished},    {"inputs", m.inputs},          {"input_digest", m.input_digest},
            {"outputs", m.outputs}};
  return j.dump(1) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = parse_or_throw(text);
  expect_format(j, "hlsm-manifest");
  return guarded([&] {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.input_digest = j.at("input_digest").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
  });
}

std::string file_digest(const std::vector<std::string>& paths) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : paths) {
    for (unsigned char c : read_text_file(p)) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace hlsm
