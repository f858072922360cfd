#include "hlsm/errors.hpp"
#include "hlsm/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hlsm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Label → index in order of first appearance.
class Interner {
 public:
  std::size_t operator()(const std::string& label) {
    auto [it, fresh] = index_.try_emplace(label, labels_.size());
    if (fresh) labels_.push_back(label);
    return it->second;
  }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> labels_;
};

}  // namespace

Binarize parse_binarize(const std::string& s) {
  if (s == "as_is") return Binarize::as_is;
  if (s == "trade_surplus") return Binarize::trade_surplus;
  throw DataError("unknown binarization '" + s + "' (expected as_is or trade_surplus)");
}

MultilayerData ingest_multilayer_csv(std::istream& in, Binarize mode) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  Interner nodes, layers;
  std::map<std::array<std::size_t, 3>, double> weight;  // (src, dst, layer)
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (!header) {
      if (f != std::vector<std::string>{"src", "dst", "layer", "weight"}) {
        throw DataError("line " + std::to_string(line_no) + ": expected header 'src,dst,layer,weight'");
      }
      header = true;
      continue;
    }
    if (f.size() != 4 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": expected 4 fields");
    }
    double w = 0.0;
    std::size_t used = 0;
    try {
      w = std::stod(f[3], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != f[3].size() || !std::isfinite(w)) {
      throw DataError("line " + std::to_string(line_no) + ": unparseable weight '" + f[3] + "'");
    }
    if (w < 0.0) throw DataError("line " + std::to_string(line_no) + ": negative weight");
    const std::size_t s = nodes(f[0]), d = nodes(f[1]), l = layers(f[2]);
    weight[{s, d, l}] += w;
  }
  if (!header) throw DataError("multilayer CSV is empty");

  const std::size_t n = nodes.labels().size(), big_l = layers.labels().size();
  Tensor3 full({n, n, big_l});
  auto w_of = [&](std::size_t s, std::size_t d, std::size_t l) {
    const auto it = weight.find({s, d, l});
    return it == weight.end() ? 0.0 : it->second;
  };
  for (const auto& [key, w] : weight) {
    const auto [s, d, l] = key;
    if (mode == Binarize::as_is) {
      if (w > 0.0) full(s, d, l) = 1.0;
    } else if (w > w_of(d, s, l)) {
      full(s, d, l) = 1.0;
    }
  }

  MultilayerData out;
  out.nodes = nodes.labels();
  std::vector<std::size_t> keep;
  for (std::size_t l = 0; l < big_l; ++l) {
    bool any = false;
    for (std::size_t s = 0; s < n && !any; ++s)
      for (std::size_t d = 0; d < n && !any; ++d) any = full(s, d, l) != 0.0;
    if (any) {
      keep.push_back(l);
      out.layers.push_back(layers.labels()[l]);
    } else {
      out.dropped_layers.push_back(layers.labels()[l]);
    }
  }
  if (keep.empty()) throw DataError("multilayer CSV has no edges after binarization");
  out.tensor = Tensor3({n, n, keep.size()});
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t d = 0; d < n; ++d)
      for (std::size_t q = 0; q < keep.size(); ++q) out.tensor(s, d, q) = full(s, d, keep[q]);
  return out;
}

MultilayerData ingest_multilayer_csv(const std::string& path, Binarize mode) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ingest_multilayer_csv(in, mode);
}

HypergraphData ingest_hypergraph_list(std::istream& in, bool pad2_with_dummy, int min_degree) {
  Interner labels;
  std::set<std::array<std::size_t, 3>> edges;  // sorted node ids; the dummy is SIZE_MAX
  constexpr std::size_t kDummy = static_cast<std::size_t>(-1);
  HypergraphData out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    std::istringstream fields(hash == std::string::npos ? line : line.substr(0, hash));
    std::vector<std::size_t> ids;
    std::string tok;
    while (fields >> tok) {
      const std::size_t id = labels(tok);
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    if (ids.empty()) continue;
    if (ids.size() == 2 && pad2_with_dummy) ids.push_back(kDummy);
    if (ids.size() != 3) {
      ++out.edges_dropped_size;
      continue;
    }
    std::sort(ids.begin(), ids.end());
    edges.insert({ids[0], ids[1], ids[2]});
  }

  // Drop low-degree nodes, and their edges, until every survivor qualifies.
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::size_t, int> degree;
    for (const auto& e : edges)
      for (std::size_t v : e) ++degree[v];
    std::set<std::size_t> weak;
    for (const auto& [v, deg] : degree)
      if (v != kDummy && deg < min_degree) weak.insert(v);
    if (weak.empty()) break;
    for (auto it = edges.begin(); it != edges.end();) {
      if (weak.count((*it)[0]) || weak.count((*it)[1]) || weak.count((*it)[2])) {
        it = edges.erase(it);
        ++out.edges_dropped_degree;
        changed = true;
      } else {
        ++it;
      }
    }
  }

  std::set<std::size_t> alive;
  for (const auto& e : edges)
    for (std::size_t v : e) alive.insert(v);
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t v = 0; v < labels.labels().size(); ++v) {
    if (alive.count(v)) {
      slot[v] = out.nodes.size();
      out.nodes.push_back(labels.labels()[v]);
    }
  }
  if (alive.count(kDummy)) {
    out.has_dummy = true;
    slot[kDummy] = out.nodes.size();
    out.nodes.push_back(kDummyNode);
  }
  if (out.nodes.empty()) throw DataError("hypergraph list has no 3-node hyperedges left");

  const std::size_t n = out.nodes.size();
  out.tensor = Tensor3({n, n, n});
  for (const auto& e : edges) {
    const Index3 x{slot[e[0]], slot[e[1]], slot[e[2]]};
    for (const auto& y : symmetry_orbit(x, Symmetry::symfull)) out.tensor(y.i, y.j, y.k) = 1.0;
  }
  out.edges_kept = edges.size();
  return out;
}

HypergraphData ingest_hypergraph_list(const std::string& path, bool pad2_with_dummy, int min_degree) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ingest_hypergraph_list(in, pad2_with_dummy, min_degree);
}

}  // namespace hlsm
