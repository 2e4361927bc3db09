#include "opsysindex/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace opsys {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error(where + ": " + what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fixed-width float rendering used in all emitted records.
std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Exact round-trip rendering used in canonical digest keys.
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Graph parse_dimacs(const std::string& text, const std::string& where) {
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  const std::vector<std::string> lines = split_lines(text);
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    std::istringstream is(lines[ln]);
    std::string tag;
    if (!(is >> tag)) continue;  // blank line
    const std::string at = where + ", line " + std::to_string(ln + 1);
    if (tag == "c") continue;
    if (tag == "p") {
      std::string kind;
      int m = -1;
      if (!(is >> kind >> n >> m) || kind != "edge" || n < 1 || m < 0)
        fail(at, "malformed header (expected \"p edge <n> <m>\")");
      continue;
    }
    if (tag == "e") {
      if (n < 0) fail(at, "edge line before the \"p edge\" header");
      int i = 0, j = 0;
      if (!(is >> i >> j)) fail(at, "malformed edge line (expected \"e <i> <j>\")");
      if (i == j) fail(at, "self-loop " + std::to_string(i) + "-" + std::to_string(j));
      if (i < 1 || j < 1 || i > n || j > n)
        fail(at, "vertex out of range (vertices are 1.." + std::to_string(n) + ")");
      edges.emplace_back(i - 1, j - 1);
      continue;
    }
    fail(at, "unrecognized line type \"" + tag + "\"");
  }
  if (n < 0) fail(where, "missing \"p edge\" header");
  return Graph(n, edges);
}

Graph parse_edgelist(const std::string& text, const std::string& where) {
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  const std::vector<std::string> lines = split_lines(text);
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    std::istringstream is(lines[ln]);
    const std::string at = where + ", line " + std::to_string(ln + 1);
    if (lines[ln].find_first_not_of(" \t") == std::string::npos) continue;
    if (n < 0) {
      std::string extra;
      if (!(is >> n) || n < 1 || (is >> extra))
        fail(at, "malformed header (expected the vertex count alone)");
      continue;
    }
    int i = 0, j = 0;
    if (!(is >> i >> j)) fail(at, "malformed edge line (expected \"<i> <j>\")");
    if (i == j) fail(at, "self-loop " + std::to_string(i) + "-" + std::to_string(j));
    if (i < 0 || j < 0 || i >= n || j >= n)
      fail(at, "vertex out of range (vertices are 0.." + std::to_string(n - 1) + ")");
    edges.emplace_back(i, j);
  }
  if (n < 0) fail(where, "empty edge-list file");
  return Graph(n, edges);
}

json parsed(const std::string& text, const std::string& where) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(where, "invalid JSON");
  return j;
}

CMat matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "matrix must be a non-empty array of rows");
  const size_t rows = j.size();
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(where, "matrix rows must be non-empty arrays");
  CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(where, "ragged matrix rows");
    for (size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(where, "matrix entries must be [re, im] pairs");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::vector<CMat> matrices_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of matrices");
  std::vector<CMat> out;
  out.reserve(j.size());
  for (const json& e : j) out.push_back(matrix_from_json(e, where));
  return out;
}

int int_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    fail(where, std::string("missing or non-integer \"") + key + "\" field");
  return j[key].get<int>();
}

std::string canonical_matrix_text(const CMat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols() << ":";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << fmt17(m(r, c).real()) << "," << fmt17(m(r, c).imag()) << ";";
  return os.str();
}

}  // namespace

Graph parse_graph_text(const std::string& text, GraphFormat format, const std::string& where) {
  return format == GraphFormat::dimacs ? parse_dimacs(text, where) : parse_edgelist(text, where);
}

Graph parse_graph(const std::string& path, GraphFormat format) {
  return parse_graph_text(read_file(path), format, path);
}

GraphFormat detect_graph_format(const std::string& path) {
  const std::string text = read_file(path);
  for (const std::string& line : split_lines(text)) {
    const size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) continue;
    const char c = line[pos];
    return (c == 'p' || c == 'c' || c == 'e') ? GraphFormat::dimacs : GraphFormat::edgelist;
  }
  return GraphFormat::edgelist;
}

std::string matrix_to_json(const CMat& m, int significant_digits) {
  const auto fmt = [significant_digits](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << ",";
    os << "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ",";
      os << "[" << fmt(m(r, c).real()) << "," << fmt(m(r, c).imag()) << "]";
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

ParsedSystem parse_system_json(const std::string& text, const std::string& where) {
  const json j = parsed(text, where);
  if (!j.is_object()) fail(where, "expected a JSON object");
  ParsedSystem s;
  s.ambient_dim = int_field(j, "ambient_dim", where);
  if (!j.contains("basis")) fail(where, "missing \"basis\" field");
  s.basis = matrices_from_json(j["basis"], where);
  for (const CMat& b : s.basis)
    if (b.rows() != s.ambient_dim || b.cols() != s.ambient_dim)
      fail(where, "basis element does not match ambient_dim");
  return s;
}

ParsedSystem load_system_file(const std::string& path) {
  return parse_system_json(read_file(path), path);
}

OperatorSubspace parse_subspace_json(const std::string& text, const std::string& where) {
  const json j = parsed(text, where);
  if (!j.is_object()) fail(where, "expected a JSON object");
  const int n = int_field(j, "ambient_in", where);
  if (!j.contains("basis")) fail(where, "missing \"basis\" field");
  std::vector<CMat> basis = matrices_from_json(j["basis"], where);
  try {
    return operator_subspace(n, std::move(basis));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

OperatorSubspace load_subspace_file(const std::string& path) {
  return parse_subspace_json(read_file(path), path);
}

SubspaceMap parse_map_json(const std::string& text, const std::string& where) {
  const json j = parsed(text, where);
  if (!j.is_object()) fail(where, "expected a JSON object");
  const int n = int_field(j, "ambient_in", where);
  const int m = int_field(j, "out_dim", where);
  if (!j.contains("basis") || !j.contains("images"))
    fail(where, "missing \"basis\" or \"images\" field");
  SubspaceMap u;
  u.out_dim = m;
  std::vector<CMat> basis = matrices_from_json(j["basis"], where);
  u.images = matrices_from_json(j["images"], where);
  try {
    u.domain = operator_subspace(n, std::move(basis));
    u.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return u;
}

SubspaceMap load_map_file(const std::string& path) {
  return parse_map_json(read_file(path), path);
}

std::string emit_record(const RunRecord& r) {
  std::ostringstream os;
  os << "{\"command\":\"" << r.command << "\",\"inputs\":\"" << r.inputs
     << "\",\"value\":" << fmt12(r.value) << ",\"dual_value\":" << fmt12(r.dual_value)
     << ",\"gap\":" << fmt12(r.gap) << ",\"status\":\"" << r.status
     << "\",\"solver\":{\"iterations\":" << r.iterations << ",\"tol\":" << fmt12(r.tol)
     << "}}\n";
  return os.str();
}

RunRecord parse_record(const std::string& text, const std::string& where) {
  const json j = parsed(text, where);
  if (!j.is_object()) fail(where, "expected a JSON object");
  RunRecord r;
  try {
    r.command = j.at("command").get<std::string>();
    r.inputs = j.at("inputs").get<std::string>();
    r.value = j.at("value").get<double>();
    r.dual_value = j.at("dual_value").get<double>();
    r.gap = j.at("gap").get<double>();
    r.status = j.at("status").get<std::string>();
    r.iterations = j.at("solver").at("iterations").get<int>();
    r.tol = j.at("solver").at("tol").get<double>();
  } catch (const json::exception& e) {
    fail(where, std::string("malformed run record: ") + e.what());
  }
  return r;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string canonical_graph_key(const Graph& g) {
  std::ostringstream os;
  os << "graph|" << g.n << "|";
  for (auto [i, j] : g.edges) os << i << "-" << j << ",";  // already sorted, deduplicated
  return os.str();
}

std::string canonical_basis_key(int ambient, const std::vector<CMat>& basis) {
  std::vector<std::string> keys;
  keys.reserve(basis.size());
  for (const CMat& b : basis) keys.push_back(canonical_matrix_text(b));
  std::sort(keys.begin(), keys.end());
  std::ostringstream os;
  os << "basis|" << ambient << "|";
  for (const std::string& k : keys) os << k << "|";
  return os.str();
}

std::string canonical_map_key(const SubspaceMap& u) {
  std::vector<std::string> keys;
  keys.reserve(u.images.size());
  for (size_t k = 0; k < u.images.size(); ++k)
    keys.push_back(canonical_matrix_text(u.domain.basis[k]) + "->" +
                   canonical_matrix_text(u.images[k]));
  std::sort(keys.begin(), keys.end());
  std::ostringstream os;
  os << "map|" << u.domain.ambient_in << "|" << u.out_dim << "|";
  for (const std::string& k : keys) os << k << "|";
  return os.str();
}

std::optional<std::string> cache_lookup(const std::string& dir, const std::string& digest) {
  namespace fs = std::filesystem;
  const fs::path p = fs::path(dir) / (digest + ".json");
  std::error_code ec;
  if (!fs::exists(p, ec)) return std::nullopt;
  std::string bytes;
  try {
    bytes = read_file(p.string());
    parse_record(bytes, p.string());  // structural validation only
  } catch (const std::exception& e) {
    std::cerr << "warning: ignoring corrupted cache entry " << p.string() << " (" << e.what()
              << ")\n";
    return std::nullopt;
  }
  return bytes;
}

void cache_store(const std::string& dir, const std::string& digest, const std::string& bytes) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  static std::mt19937_64 stamp(std::random_device{}());
  const fs::path tmp = fs::path(dir) / (digest + ".tmp" + std::to_string(stamp()));
  const fs::path dst = fs::path(dir) / (digest + ".json");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "warning: cannot write cache entry " << dst.string() << "\n";
      return;
    }
    out << bytes;
  }
  fs::rename(tmp, dst, ec);
  if (ec) {
    std::cerr << "warning: cannot publish cache entry " << dst.string() << " (" << ec.message()
              << ")\n";
    fs::remove(tmp, ec);
  }
}

}  // namespace opsys
