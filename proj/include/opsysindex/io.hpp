#pragma once

#include "opsysindex/cb.hpp"
#include "opsysindex/system.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace opsys {

// ---- graph ingestion -------------------------------------------------------

enum class GraphFormat { dimacs, edgelist };

// DIMACS: optional 'c' comment lines, one "p edge <n> <m>" header, then
// "e <i> <j>" lines with 1-indexed endpoints.  Edge list: first line "<n>",
// then one "<i> <j>" pair per line, 0-indexed.  Duplicate and reversed edges
// merge; self-loops and out-of-range endpoints are errors.
Graph parse_graph(const std::string& path, GraphFormat format);
Graph parse_graph_text(const std::string& text, GraphFormat format, const std::string& where);

// A file whose first meaningful line starts with 'p', 'c', or 'e' is DIMACS;
// anything else is treated as an edge list.
GraphFormat detect_graph_format(const std::string& path);

// ---- JSON value formats ----------------------------------------------------
// Complex matrices serialize as arrays of rows, each entry an [re, im] pair.
// Systems:    { "ambient_dim": n, "basis": [matrix, ...] }
// Subspaces:  { "ambient_in": n, "basis": [matrix, ...] }
// Maps:       { "ambient_in": n, "out_dim": m, "basis": [...], "images": [...] }

// Default precision matches printed results (12 significant digits); pass 17
// when the emitted file must reparse to the exact same doubles.
std::string matrix_to_json(const CMat& m, int significant_digits = 12);

// Raw parse results: the spanning set exactly as listed in the file, before
// any orthonormalization (canonical digests are computed on these).
struct ParsedSystem {
  int ambient_dim = 0;
  std::vector<CMat> basis;
};

ParsedSystem parse_system_json(const std::string& text, const std::string& where);
ParsedSystem load_system_file(const std::string& path);

OperatorSubspace parse_subspace_json(const std::string& text, const std::string& where);
OperatorSubspace load_subspace_file(const std::string& path);

SubspaceMap parse_map_json(const std::string& text, const std::string& where);
SubspaceMap load_map_file(const std::string& path);

// ---- run records -----------------------------------------------------------
// The wire schema is fixed: {"command", "inputs", "value", "dual_value",
// "gap", "status", "solver": {"iterations", "tol"}}, keys in that order,
// reals printed with 12 significant digits.  Parsing an emitted record and
// re-emitting it reproduces the bytes exactly.

struct RunRecord {
  std::string command;
  std::string inputs;  // canonical digest of command, inputs, and parameters
  double value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  std::string status;
  int iterations = 0;
  double tol = 0.0;
};

std::string emit_record(const RunRecord& r);  // canonical bytes, newline-terminated
RunRecord parse_record(const std::string& json, const std::string& where);

// ---- canonical digests -----------------------------------------------------
// 64-bit FNV-1a over a canonical text rendering: graph edges are sorted and
// deduplicated; basis elements (with their attached images, for maps) are
// sorted by their serialized form, so permutations do not change the digest.

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(std::uint64_t h);

std::string canonical_graph_key(const Graph& g);
std::string canonical_basis_key(int ambient, const std::vector<CMat>& basis);
std::string canonical_map_key(const SubspaceMap& u);

// ---- result cache ----------------------------------------------------------
// Append-only file-per-digest store.  Writers stage to a temporary file and
// rename into place; corrupted entries are reported on stderr and ignored.

std::optional<std::string> cache_lookup(const std::string& dir, const std::string& digest);
void cache_store(const std::string& dir, const std::string& digest, const std::string& bytes);

}  // namespace opsys
