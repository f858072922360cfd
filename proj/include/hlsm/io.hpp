#pragma once

#include "hlsm/fit.hpp"
#include "hlsm/models.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hlsm {

// ---- COO tensor files --------------------------------------------------------
//
//   TENSOR3 n1 n2 n3 <none|sym12|symfull>
//   i j k v        (1-based, v ∈ {0, 1}; unlisted entries are 0; '#' starts a comment)
//
// Symmetric files list one representative per orbit (i < j, or i < j < k);
// reading mirrors it across the orbit.

struct CooFile {
  Tensor3 tensor;
  Symmetry symmetry = Symmetry::none;
};

CooFile read_coo(std::istream& in);
CooFile read_coo(const std::string& path);
/// Throws DataError if `t` is not binary or not invariant under `sym`.
void write_coo(std::ostream& out, const Tensor3& t, Symmetry sym);
void write_coo(const std::string& path, const Tensor3& t, Symmetry sym);

// ---- ingestion -----------------------------------------------------------------

enum class Binarize { as_is, trade_surplus };
Binarize parse_binarize(const std::string& s);

struct MultilayerData {
  Tensor3 tensor;                          // n × n × L
  std::vector<std::string> nodes;          // index → label, first appearance order
  std::vector<std::string> layers;         // kept layers, first appearance order
  std::vector<std::string> dropped_layers;  // layers left without any edge
};

/// CSV with header "src,dst,layer,weight". Repeated (src, dst, layer) rows are
/// summed. as_is sets A = 1 wherever the summed weight is positive;
/// trade_surplus keeps only the strictly heavier direction of each pair.
MultilayerData ingest_multilayer_csv(std::istream& in, Binarize mode);
MultilayerData ingest_multilayer_csv(const std::string& path, Binarize mode);

struct HypergraphData {
  Tensor3 tensor;                  // fully symmetric
  std::vector<std::string> nodes;  // the dummy node, if any, comes last
  bool has_dummy = false;
  std::size_t edges_kept = 0;
  std::size_t edges_dropped_size = 0;    // size 1 or larger than 3
  std::size_t edges_dropped_degree = 0;  // lost to degree filtering
};

inline constexpr const char* kDummyNode = "__dummy__";

/// One hyperedge per line, whitespace-separated labels. Repeated labels in
/// a line count once. Nodes of degree below `min_degree` are removed together
/// with their hyperedges until no such node remains; the dummy is exempt.
HypergraphData ingest_hypergraph_list(std::istream& in, bool pad2_with_dummy, int min_degree);
HypergraphData ingest_hypergraph_list(const std::string& path, bool pad2_with_dummy, int min_degree);

// ---- structured results ------------------------------------------------------

/// Fit output plus the settings needed to interpret it.
struct StoredResult {
  FitResult result;
  LinkSpec link;
  MaskMode mask_mode = MaskMode::all;
};

std::string result_to_json(const FitResult& r, const LinkSpec& link, MaskMode mask);
StoredResult result_from_json(const std::string& text);
void write_result(const std::string& path, const FitResult& r, const LinkSpec& link, MaskMode mask);
StoredResult read_result(const std::string& path);

std::string truth_to_json(const SyntheticTruth& t);
SyntheticTruth truth_from_json(const std::string& text);
void write_truth(const std::string& path, const SyntheticTruth& t);
SyntheticTruth read_truth(const std::string& path);

struct RunManifest {
  std::string command;
  std::string config;  // every option with its value, in config-file syntax
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::vector<std::string> inputs;
  std::string input_digest;  // FNV-1a 64 over the input files, in order
  std::vector<std::string> outputs;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

/// 64-bit FNV-1a over the bytes of the listed files, as 16 hex digits.
std::string file_digest(const std::vector<std::string>& paths);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// ---- command line --------------------------------------------------------------

/// Exit codes: 0 success, 1 usage, 2 data or shape error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hlsm
