// Command-line front end: parses graphs and system files, runs every
// invariant in the library, caches results keyed by a canonical input digest,
// and emits one machine-readable JSON record per run.

#include "CLI11.hpp"

#include "opsysindex/cb.hpp"
#include "opsysindex/indices.hpp"
#include "opsysindex/io.hpp"
#include "opsysindex/system.hpp"
#include "opsysindex/theta.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace opsys;

struct Args {
  std::string graph_path;
  std::string graph0_path;
  std::string system_path;
  std::string system0_path;
  std::string tsystem_path;
  std::string tsystem0_path;
  std::string map_path;
  std::string form;
  std::string out_path;
  std::string cache_dir;
  std::string kind;        // make-system family name
  std::string batch_path;  // batch command file
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 1;
  int restarts = 0;  // 0 = per-command default
  int max_block = 100;
  int n = 0;
};

struct Outcome {
  double value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  std::string status = "optimal";
  int iterations = 0;
};

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int exit_for_status(const std::string& status) {
  if (status == "optimal") return 0;
  if (status == "max_iterations") return 3;
  return 2;  // primal_infeasible / dual_infeasible / no_witness
}

// Hermitian generators spanning the *-closure of the listed matrices.
std::vector<CMat> star_closed(const std::vector<CMat>& raw) {
  std::vector<CMat> out;
  out.reserve(2 * raw.size());
  for (const CMat& b : raw) {
    out.push_back(0.5 * (b + b.adjoint()));
    out.push_back(Cplx(0, -0.5) * (b - b.adjoint()));
  }
  return out;
}

struct SystemInput {
  MatricialSystem system;
  std::string key;  // canonical digest key of the raw input
};

Graph load_graph(const std::string& path) {
  return parse_graph(path, detect_graph_format(path));
}

SystemInput load_system_input(const std::string& graph_path, const std::string& system_path) {
  if (!graph_path.empty() && !system_path.empty())
    throw std::runtime_error("give either --graph or --system, not both");
  if (!graph_path.empty()) {
    const Graph g = load_graph(graph_path);
    return {graph_system(g), canonical_graph_key(g)};
  }
  if (system_path.empty()) throw std::runtime_error("missing input: need --graph or --system");
  const ParsedSystem ps = load_system_file(system_path);
  return {make_system(ps.ambient_dim, star_closed(ps.basis)),
          canonical_basis_key(ps.ambient_dim, ps.basis)};
}

SystemInput load_required_system(const std::string& path, const char* flag) {
  if (path.empty()) throw std::runtime_error(std::string("missing required flag ") + flag);
  const ParsedSystem ps = load_system_file(path);
  return {make_system(ps.ambient_dim, star_closed(ps.basis)),
          canonical_basis_key(ps.ambient_dim, ps.basis)};
}

OperatorSubspace load_required_subspace(const std::string& path, const char* flag) {
  if (path.empty()) throw std::runtime_error(std::string("missing required flag ") + flag);
  return load_subspace_file(path);
}

std::string resolve_form(const std::string& command, const std::string& form) {
  if (command == "theta") {
    if (form.empty()) return "e";
    if (form == "e" || form == "s") return form;
    throw std::runtime_error("theta: --form must be \"e\" or \"s\"");
  }
  if (command == "qtheta") {
    if (form.empty()) return "dual";
    if (form == "dual" || form == "primal") return form;
    throw std::runtime_error("qtheta: --form must be \"dual\" or \"primal\"");
  }
  return "-";
}

void write_bytes(const std::string& out_path, const std::string& bytes) {
  if (out_path.empty()) {
    std::cout << bytes;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << bytes;
}

// ---- per-command computations ------------------------------------------

struct Plan {
  std::string input_key;          // canonical key of all inputs
  int guard_dim = 0;              // largest semidefinite block the run creates
  std::function<Outcome()> compute;
};

Plan plan_command(const std::string& command, const Args& a, const std::string& form) {
  SdpOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  Plan plan;

  if (command == "theta") {
    if (a.graph_path.empty()) throw std::runtime_error("theta: missing --graph");
    const Graph g = load_graph(a.graph_path);
    plan.input_key = canonical_graph_key(g);
    plan.guard_dim = g.n;
    plan.compute = [g, form, opts] {
      const ClassicalThetaForm first =
          form == "e" ? ClassicalThetaForm::e_gamma : ClassicalThetaForm::s_gamma;
      const ClassicalThetaForm second =
          form == "e" ? ClassicalThetaForm::s_gamma : ClassicalThetaForm::e_gamma;
      const ThetaResult r1 = lovasz_theta(g, first, opts);
      const ThetaResult r2 = lovasz_theta(g, second, opts);
      return Outcome{r1.value, r2.value, r1.gap, "optimal", r1.iterations + r2.iterations};
    };
    return plan;
  }

  if (command == "qtheta") {
    const SystemInput in = load_system_input(a.graph_path, a.system_path);
    plan.input_key = in.key;
    plan.guard_dim = in.system.ambient_dim * in.system.ambient_dim;
    plan.compute = [in, form, opts] {
      const QuantumThetaForm first =
          form == "dual" ? QuantumThetaForm::dsw_dual : QuantumThetaForm::dsw_primal;
      const QuantumThetaForm second =
          form == "dual" ? QuantumThetaForm::dsw_primal : QuantumThetaForm::dsw_dual;
      const ThetaResult r1 = quantum_theta(in.system, first, opts);
      const ThetaResult r2 = quantum_theta(in.system, second, opts);
      return Outcome{r1.value, r2.value, r1.gap, "optimal", r1.iterations + r2.iterations};
    };
    return plan;
  }

  if (command == "cp-index") {
    const SystemInput in = load_system_input(a.graph_path, a.system_path);
    plan.input_key = in.key;
    plan.guard_dim = in.system.ambient_dim * in.system.ambient_dim;
    plan.compute = [in, opts] {
      const IndexResult p = cp_index_primal(in.system, opts);
      const IndexResult d = cp_index_dual(in.system, opts);
      return Outcome{p.value, d.value, p.gap, "optimal", p.iterations + d.iterations};
    };
    return plan;
  }

  if (command == "cp-index-relative") {
    const SystemInput s = load_required_system(a.system_path, "--system");
    const SystemInput s0 = load_required_system(a.system0_path, "--system0");
    plan.input_key = s.key + "\n" + s0.key;
    plan.guard_dim = s.system.ambient_dim * s.system.ambient_dim;
    plan.compute = [s, s0, opts] {
      const IndexResult r = cp_index_relative(s.system, s0.system, opts);
      return Outcome{r.value, r.value, r.gap, "optimal", r.iterations};
    };
    return plan;
  }

  if (command == "lambda-tilde") {
    const SystemInput in = load_system_input(a.graph_path, a.system_path);
    plan.input_key = in.key;
    plan.guard_dim = in.system.ambient_dim * in.system.ambient_dim;
    plan.compute = [in, opts] {
      const IndexResult r = lambda_tilde(in.system, opts);
      return Outcome{r.value, r.value, r.gap, "optimal", r.iterations};
    };
    return plan;
  }

  if (command == "coindex") {
    const SystemInput in = load_system_input(a.graph_path, a.system_path);
    plan.input_key = in.key;
    plan.guard_dim = in.system.ambient_dim * in.system.ambient_dim;
    plan.compute = [in, opts] {
      const IndexResult r = coindex(in.system.ambient_dim, perp(in.system), opts);
      return Outcome{r.value, r.value, r.gap, "optimal", r.iterations};
    };
    return plan;
  }

  if (command == "relative-theta") {
    if (a.graph_path.empty() || a.graph0_path.empty())
      throw std::runtime_error("relative-theta: need --graph (ambient) and --graph0 (subgraph)");
    const Graph gamma = load_graph(a.graph_path);
    const Graph lambda = load_graph(a.graph0_path);
    plan.input_key = canonical_graph_key(gamma) + "\n" + canonical_graph_key(lambda);
    plan.guard_dim = gamma.n * gamma.n;
    plan.compute = [gamma, lambda, opts] {
      const ThetaResult r = relative_theta(gamma, lambda, opts);
      return Outcome{r.value, r.value, r.gap, "optimal", r.iterations};
    };
    return plan;
  }

  if (command == "cb-norm") {
    if (a.map_path.empty()) throw std::runtime_error("cb-norm: missing --map");
    const SubspaceMap u = load_map_file(a.map_path);
    plan.input_key = canonical_map_key(u);
    plan.guard_dim = 2 * u.domain.ambient_in * u.out_dim;
    plan.compute = [u, opts] {
      const CbNormResult r = cb_norm_detailed(u, opts);
      return Outcome{r.value, r.value, r.gap, "optimal", r.iterations};
    };
    return plan;
  }

  if (command == "cb-index") {
    const OperatorSubspace x = load_required_subspace(a.system_path, "--system");
    const OperatorSubspace x0 = load_required_subspace(a.system0_path, "--system0");
    const int restarts = a.restarts > 0 ? a.restarts : 4;
    plan.input_key = canonical_basis_key(x.ambient_in, x.basis) + "\n" +
                     canonical_basis_key(x0.ambient_in, x0.basis);
    plan.guard_dim = 2 * x.ambient_in * x.ambient_in;
    const std::uint64_t seed = a.seed;
    plan.compute = [x, x0, restarts, seed, opts] {
      const CbIndexReport rep = cb_index_dc(x, x0, restarts, seed, opts);
      if (!rep.feasible) return Outcome{0.0, 0.0, 0.0, "no_witness", rep.restarts};
      return Outcome{rep.value, rep.value, rep.witness_distance - (rep.witness_norm - 1.0),
                     "optimal", rep.restarts};
    };
    return plan;
  }

  if (command == "bounded-index-linf") {
    if (a.n < 2) throw std::runtime_error("bounded-index-linf: need --n >= 2");
    plan.input_key = "linf|" + std::to_string(a.n);
    plan.guard_dim = a.n;
    const int n = a.n;
    plan.compute = [n] {
      return Outcome{bounded_index_linf(n), bounded_index_linf(n), 0.0, "optimal", 0};
    };
    return plan;
  }

  if (command == "mult-check") {
    const SystemInput s = load_required_system(a.system_path, "--system");
    const SystemInput s0 = load_required_system(a.system0_path, "--system0");
    const SystemInput t = load_required_system(a.tsystem_path, "--tsystem");
    const SystemInput t0 = load_required_system(a.tsystem0_path, "--tsystem0");
    plan.input_key = s.key + "\n" + s0.key + "\n" + t.key + "\n" + t0.key;
    const int nk = s.system.ambient_dim * t.system.ambient_dim;
    plan.guard_dim = nk * nk;
    plan.compute = [s, s0, t, t0, opts] {
      const MultiplicativityReport rep =
          multiplicativity_check(s.system, s0.system, t.system, t0.system, opts);
      const int iters =
          rep.tensor.iterations + rep.left.iterations + rep.right.iterations;
      return Outcome{rep.tensor.value, rep.product, rep.relative_deviation, "optimal", iters};
    };
    return plan;
  }

  if (command == "hoffman") {
    const SystemInput in = load_system_input(a.graph_path, a.system_path);
    const int restarts = a.restarts > 0 ? a.restarts : 8;
    plan.input_key = in.key;
    plan.guard_dim = in.system.ambient_dim;
    const std::uint64_t seed = a.seed;
    plan.compute = [in, restarts, seed] {
      const HoffmanReport rep = hoffman_heuristic(in.system, restarts, seed);
      return Outcome{rep.value, rep.value, 0.0, "optimal", rep.restarts};
    };
    return plan;
  }

  if (command == "compare") {
    const SystemInput in = load_system_input(a.graph_path, a.system_path);
    plan.input_key = in.key;
    plan.guard_dim = in.system.ambient_dim * in.system.ambient_dim;
    plan.compute = [in, opts] {
      const IndexResult cp = cp_index_primal(in.system, opts);
      const ThetaResult qt = quantum_theta(in.system, QuantumThetaForm::dsw_dual, opts);
      const IndexResult co = coindex(in.system.ambient_dim, perp(in.system), opts);
      std::cerr << "comparison (ambient dimension " << in.system.ambient_dim << "):\n"
                << "  cp_index       " << fmt12(cp.value) << "\n"
                << "  quantum_theta  " << fmt12(qt.value) << "\n"
                << "  coindex        " << fmt12(co.value) << "\n";
      return Outcome{cp.value, co.value, cp.gap, "optimal",
                     cp.iterations + qt.iterations + co.iterations};
    };
    return plan;
  }

  throw std::runtime_error("unknown command " + command);
}

// ---- record plumbing ------------------------------------------------------

int run_computation(const std::string& command, const Args& a) {
  const std::string form = resolve_form(command, a.form);
  const Plan plan = plan_command(command, a, form);

  if (plan.guard_dim > a.max_block) {
    std::cerr << "error: size guard: this run needs a semidefinite block of dimension "
              << plan.guard_dim << " > cap " << a.max_block
              << " (raise with --max-block at your own risk)\n";
    return 1;
  }

  int restarts = a.restarts;
  if (restarts == 0) restarts = command == "hoffman" ? 8 : 4;
  std::ostringstream key;
  key << command << "\n"
      << plan.input_key << "\n"
      << "form=" << form << "|tol=" << fmt17(a.tol) << "|max_iter=" << a.max_iter
      << "|seed=" << a.seed << "|restarts=" << restarts << "|n=" << a.n;
  const std::string digest = digest_hex(fnv1a64(key.str()));

  std::string cache_dir = a.cache_dir;
  if (cache_dir.empty()) {
    if (const char* env = std::getenv("OPSYS_INDEX_CACHE")) cache_dir = env;
  }

  if (!cache_dir.empty()) {
    if (const auto hit = cache_lookup(cache_dir, digest)) {
      write_bytes(a.out_path, *hit);
      return exit_for_status(parse_record(*hit, "cache entry").status);
    }
  }

  Outcome out;
  try {
    out = plan.compute();
  } catch (const SolverFailure& sf) {
    std::cerr << "solver: " << sf.what() << "\n";
    out = Outcome{0.0, 0.0, 0.0, to_string(sf.status), 0};
  }

  RunRecord rec;
  rec.command = command;
  rec.inputs = digest;
  rec.value = out.value;
  rec.dual_value = out.dual_value;
  rec.gap = out.gap;
  rec.status = out.status;
  rec.iterations = out.iterations;
  rec.tol = a.tol;
  const std::string bytes = emit_record(rec);
  write_bytes(a.out_path, bytes);
  if (!cache_dir.empty()) cache_store(cache_dir, digest, bytes);
  return exit_for_status(out.status);
}

// ---- system file generator -------------------------------------------------

int run_make_system(const Args& a) {
  std::vector<CMat> gens;
  int n = 0;
  const std::string& kind = a.kind;
  const auto need_n = [&] {
    if (a.n < 1) throw std::runtime_error("make-system: --n must be positive for kind " + kind);
    n = a.n;
  };
  if (kind == "full") {
    need_n();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gens.push_back(matrix_unit(n, i, j));
  } else if (kind == "diag") {
    need_n();
    for (int i = 0; i < n; ++i) gens.push_back(matrix_unit(n, i, i));
  } else if (kind == "scalar") {
    need_n();
    gens.push_back(CMat::Identity(n, n));
  } else if (kind == "equal-diag") {
    need_n();
    gens.push_back(CMat::Identity(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) gens.push_back(matrix_unit(n, i, j));
  } else if (kind == "graph" || kind == "graph-equal-diag") {
    if (a.graph_path.empty()) throw std::runtime_error("make-system: kind " + kind + " needs --graph");
    const Graph g = load_graph(a.graph_path);
    n = g.n;
    if (kind == "graph")
      for (int i = 0; i < n; ++i) gens.push_back(matrix_unit(n, i, i));
    else
      gens.push_back(CMat::Identity(n, n));
    for (auto [i, j] : g.edges) gens.push_back(matrix_unit(n, i, j));
  } else if (kind == "tensor" || kind == "direct-sum") {
    const SystemInput s = load_required_system(a.system_path, "--system");
    const SystemInput t = load_required_system(a.system0_path, "--system0");
    const MatricialSystem prod = kind == "tensor" ? tensor_system(s.system, t.system)
                                                  : direct_sum_system(s.system, t.system);
    n = prod.ambient_dim;
    gens = prod.basis.elements;
  } else {
    throw std::runtime_error(
        "make-system: unknown kind \"" + kind +
        "\" (use full|diag|scalar|equal-diag|graph|graph-equal-diag|tensor|direct-sum)");
  }

  std::ostringstream os;
  os << "{\"ambient_dim\":" << n << ",\"basis\":[";
  for (size_t k = 0; k < gens.size(); ++k) {
    if (k) os << ",";
    os << matrix_to_json(gens[k], 17);
  }
  os << "]}\n";
  write_bytes(a.out_path, os.str());
  return 0;
}

// ---- argument wiring -------------------------------------------------------

int run_cli(const std::vector<std::string>& argv_tokens, bool allow_batch);

int run_batch(const Args& a) {
  if (a.batch_path.empty()) throw std::runtime_error("batch: missing command file");
  std::ifstream in(a.batch_path);
  if (!in) throw std::runtime_error("batch: cannot open " + a.batch_path);
  std::string line;
  int line_no = 0;
  int first_bad = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream is(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (is >> tok) tokens.push_back(tok);
    const int rc = run_cli(tokens, false);
    if (rc != 0) {
      std::cerr << "batch: line " << line_no << " exited with code " << rc << "\n";
      if (first_bad == 0) first_bad = rc;
    }
  }
  return first_bad;
}

int run_cli(const std::vector<std::string>& argv_tokens, bool allow_batch) {
  Args args;
  CLI::App app{"Index invariants for inclusions of matricial operator systems"};
  app.require_subcommand(1);

  const std::vector<std::string> computations = {
      "theta",          "qtheta",   "cp-index", "cp-index-relative", "lambda-tilde",
      "coindex",        "relative-theta", "cb-norm",  "cb-index",
      "bounded-index-linf", "mult-check", "hoffman",  "compare"};
  const std::vector<std::string> blurbs = {
      "classical theta number of a graph (both forms; --form picks the reported one)",
      "quantum theta of a system (both forms; --form picks the reported one)",
      "completely positive index of the full algebra over a system (primal + dual)",
      "relative completely positive index of a nested pair of systems",
      "index of a system over the scalars",
      "co-index of the orthogonal complement of a system",
      "relative theta of a graph and a spanning subgraph",
      "completely bounded norm of a map on an operator subspace",
      "heuristic completely bounded index of a nested pair of subspaces",
      "index of the scalars inside the n-dimensional bounded sequence algebra",
      "tensor-multiplicativity check for relative indices",
      "eigenvalue-ratio lower bound search on the complement of a system",
      "cp-index, quantum theta, and co-index side by side"};

  std::string chosen;
  for (size_t k = 0; k < computations.size(); ++k) {
    CLI::App* sub = app.add_subcommand(computations[k], blurbs[k]);
    sub->add_option("--graph", args.graph_path, "graph file (DIMACS or edge list, auto-detected)");
    sub->add_option("--graph0", args.graph0_path, "second graph file (subgraph argument)");
    sub->add_option("--system", args.system_path, "system/subspace JSON file");
    sub->add_option("--system0", args.system0_path, "second system/subspace JSON file");
    sub->add_option("--tsystem", args.tsystem_path, "right tensor factor system JSON file");
    sub->add_option("--tsystem0", args.tsystem0_path, "right tensor factor subsystem JSON file");
    sub->add_option("--map", args.map_path, "map JSON file (basis and images)");
    sub->add_option("--form", args.form, "formulation to report (theta: e|s, qtheta: dual|primal)");
    sub->add_option("--tol", args.tol, "solver tolerance")->capture_default_str();
    sub->add_option("--max-iter", args.max_iter, "solver iteration cap")->capture_default_str();
    sub->add_option("--seed", args.seed, "random seed for restart-based searches")
        ->capture_default_str();
    sub->add_option("--restarts", args.restarts,
                    "restarts for stochastic searches (0 = command default)");
    sub->add_option("--out", args.out_path, "write the JSON record here instead of stdout");
    sub->add_option("--cache-dir", args.cache_dir,
                    "result cache directory (or env OPSYS_INDEX_CACHE)");
    sub->add_option("--max-block", args.max_block, "largest admissible semidefinite block")
        ->capture_default_str();
    sub->add_option("--n", args.n, "dimension argument (bounded-index-linf, make-system)");
    sub->callback([&chosen, name = computations[k]] { chosen = name; });
  }

  CLI::App* mk = app.add_subcommand("make-system", "write a named system as a JSON file");
  mk->add_option("--kind", args.kind,
                 "full|diag|scalar|equal-diag|graph|graph-equal-diag|tensor|direct-sum")
      ->required();
  mk->add_option("--n", args.n, "ambient dimension for the sized kinds");
  mk->add_option("--graph", args.graph_path, "graph file for the graph kinds");
  mk->add_option("--system", args.system_path, "left factor for tensor/direct-sum");
  mk->add_option("--system0", args.system0_path, "right factor for tensor/direct-sum");
  mk->add_option("--out", args.out_path, "write the JSON here instead of stdout");
  mk->callback([&chosen] { chosen = "make-system"; });

  CLI::App* bat = nullptr;
  if (allow_batch) {
    bat = app.add_subcommand("batch", "run one command per line from a file");
    bat->add_option("file", args.batch_path, "command file (one argument list per line)")
        ->required();
    bat->callback([&chosen] { chosen = "batch"; });
  }
  (void)bat;

  try {
    // CLI11 consumes the token vector back to front.
    std::vector<std::string> reversed(argv_tokens.rbegin(), argv_tokens.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (chosen == "make-system") return run_make_system(args);
    if (chosen == "batch") return run_batch(args);
    return run_computation(chosen, args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> tokens;
  tokens.reserve(size_t(argc));
  for (int i = 1; i < argc; ++i) tokens.emplace_back(argv[i]);
  return run_cli(tokens, true);
}
