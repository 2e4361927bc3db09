// Acceptance gate: thirteen end-to-end checks, each printing exactly one
// line "ACCEPTANCE nn PASS|FAIL <what it checks> (<observations>)".
// Run with no arguments for the full gate, or pass criterion numbers.
//
// Three checks pin target values that are mathematically unattainable; they
// are implemented exactly as specified and fail honestly rather than being
// loosened (the comments on each explain the true value):
//   01  scalar index of the full algebra (target n; true value n^2)
//   06  2x3 scalar tensor target 6 (true value 36 = 4 * 9)
//   09  trace-map positivity threshold (target c = n; true threshold n^2)

#include "opsysindex/cb.hpp"
#include "opsysindex/choi.hpp"
#include "opsysindex/indices.hpp"
#include "opsysindex/system.hpp"
#include "opsysindex/theta.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace opsys;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof(b), "%.10g", v);
  return b;
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CMat random_complex(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat out(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) out(i, j) = Cplx(g(rng), g(rng));
  return out;
}

CMat random_hermitian(int n, std::mt19937_64& rng) {
  return hermitize(random_complex(n, n, rng));
}

MatricialSystem random_unital_system(int n, int extra, std::mt19937_64& rng) {
  std::vector<CMat> gens;
  gens.push_back(CMat::Identity(n, n));
  for (int i = 0; i < extra; ++i) gens.push_back(random_hermitian(n, rng));
  return make_system(n, gens);
}

std::vector<std::pair<std::string, Graph>> graph_corpus() {
  std::vector<std::pair<std::string, Graph>> out;
  out.emplace_back("K3", Graph::complete(3));
  out.emplace_back("P3", Graph::path(3));
  out.emplace_back("C4", Graph::cycle(4));
  out.emplace_back("C5", Graph::cycle(5));
  for (int k = 1; k <= 6; ++k)
    out.emplace_back("Pet" + std::to_string(k), Graph::petersen_induced(k));
  return out;
}

// 01: scalar index of the full algebra M_n, target n, tolerance 1e-5, each
// run within 10 s. The optimal map is x -> tr(x) I with ||phi(1)|| = n^2:
// the difference c (tr/n)(.) I - id has Choi (c/n) I(x)I - Delta, and
// ||Delta|| = n forces c >= n^2, so the computed value is n^2 and the
// target n below cannot be met for n >= 2. Kept as stated; fails honestly.
Verdict criterion_01() {
  Verdict v;
  std::ostringstream os;
  for (int n = 2; n <= 5; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const IndexResult r = lambda_tilde(full_system(n));
    const double secs = elapsed_seconds(t0);
    const bool ok = std::abs(r.value - n) <= 1e-5 && secs <= 10.0;
    v.pass = v.pass && ok;
    os << "n=" << n << ": got " << fmt(r.value) << " want " << n << " in " << fmt(secs)
       << "s; ";
  }
  v.detail = os.str();
  return v;
}

// 02: scalar index of the diagonal algebra D_n, target n, tolerance 1e-5.
Verdict criterion_02() {
  Verdict v;
  std::ostringstream os;
  for (int n = 2; n <= 5; ++n) {
    const IndexResult r = lambda_tilde(diagonal_system(n));
    const bool ok = std::abs(r.value - n) <= 1e-5;
    v.pass = v.pass && ok;
    os << "n=" << n << ": " << fmt(r.value) << "; ";
  }
  v.detail = os.str();
  return v;
}

// 03: ambient index of the graph system vs both classical theta forms,
// pairwise deviation <= 1e-5 on the corpus; theta(C5) hits sqrt(5).
Verdict criterion_03() {
  Verdict v;
  std::ostringstream os;
  double worst = 0.0;
  for (const auto& [name, g] : graph_corpus()) {
    const double idx = cp_index_primal(graph_system(g)).value;
    const double te = lovasz_theta(g, ClassicalThetaForm::e_gamma).value;
    const double ts = lovasz_theta(g, ClassicalThetaForm::s_gamma).value;
    const double dev =
        std::max({std::abs(idx - te), std::abs(idx - ts), std::abs(te - ts)});
    worst = std::max(worst, dev);
    if (dev > 1e-5) {
      v.pass = false;
      os << name << " deviates " << fmt(dev) << "; ";
    }
    if (name == "C5" && std::abs(te - std::sqrt(5.0)) > 1e-5) {
      v.pass = false;
      os << "theta(C5)=" << fmt(te) << " != sqrt(5); ";
    }
  }
  os << "max pairwise deviation " << fmt(worst);
  v.detail = os.str();
  return v;
}

// 04: scalar index of the constant-diagonal edge system equals the theta
// number of the complement graph, deviation <= 1e-5 on the corpus.
Verdict criterion_04() {
  Verdict v;
  std::ostringstream os;
  double worst = 0.0;
  for (const auto& [name, g] : graph_corpus()) {
    const double lt = lambda_tilde(graph_system_equal_diag(g)).value;
    const double tc = lovasz_theta(g.complement()).value;
    const double dev = std::abs(lt - tc);
    worst = std::max(worst, dev);
    if (dev > 1e-5) {
      v.pass = false;
      os << name << ": " << fmt(lt) << " vs " << fmt(tc) << "; ";
    }
  }
  os << "max deviation " << fmt(worst);
  v.detail = os.str();
  return v;
}

// 05: the maximization and minimization index forms agree within 1e-6 on
// 10 random unital systems in M_3 and on every corpus graph system.
Verdict criterion_05() {
  Verdict v;
  std::ostringstream os;
  std::mt19937_64 rng(20260815);
  double worst = 0.0;
  const auto check = [&](const std::string& name, const MatricialSystem& s) {
    const double a = cp_index_primal(s).value;
    const double b = cp_index_dual(s).value;
    const double dev = std::abs(a - b);
    worst = std::max(worst, dev);
    if (dev > 1e-6) {
      v.pass = false;
      os << name << " deviates " << fmt(dev) << "; ";
    }
  };
  for (int t = 0; t < 10; ++t)
    check("random" + std::to_string(t), random_unital_system(3, 1 + (t % 3), rng));
  for (const auto& [name, g] : graph_corpus()) check(name, graph_system(g));
  os << "max |primal-dual| " << fmt(worst);
  v.detail = os.str();
  return v;
}

// 06: tensor multiplicativity. Clause 1: the index of M_4 over S(x)T equals
// the product of the factor indices for S, T in {CI_2, D_2, M_2}, relative
// error <= 1e-4 (true, passes). Clause 2: the 2x3 scalar tensor target of 6.
// The tensor system CI_2 (x) CI_3 is CI_6 and the scalar index of M_6 is
// 6^2 = 36 = 4 * 9 (the factor values multiply), so the target 6 cannot be
// met. Kept as stated; fails honestly.
Verdict criterion_06() {
  Verdict v;
  std::ostringstream os;
  const std::vector<std::pair<std::string, MatricialSystem>> fams = {
      {"CI2", scalar_system(2)}, {"D2", diagonal_system(2)}, {"M2", full_system(2)}};
  double worst = 0.0;
  for (const auto& [sn, s] : fams)
    for (const auto& [tn, t] : fams) {
      const MultiplicativityReport rep =
          multiplicativity_check(full_system(2), s, full_system(2), t);
      worst = std::max(worst, rep.relative_deviation);
      if (rep.relative_deviation > 1e-4) {
        v.pass = false;
        os << sn << "x" << tn << " deviates " << fmt(rep.relative_deviation) << "; ";
      }
    }
  os << "max relative deviation " << fmt(worst) << "; ";
  const MultiplicativityReport mixed =
      multiplicativity_check(full_system(2), scalar_system(2), full_system(3), scalar_system(3));
  os << "2x3 scalar tensor: got " << fmt(mixed.tensor.value) << " want 6 (factor product "
     << fmt(mixed.product) << ")";
  if (std::abs(mixed.tensor.value - 6.0) > 1e-4) v.pass = false;
  v.detail = os.str();
  return v;
}

// 07: the co-index of the complement kernel never exceeds theta + 1e-6 on
// the corpus; the side-by-side table is printed above the verdict line.
Verdict criterion_07() {
  Verdict v;
  std::ostringstream os;
  std::printf("    %-6s %-16s %-16s\n", "graph", "coindex", "theta");
  double worst = -1e300;
  for (const auto& [name, g] : graph_corpus()) {
    const double co = coindex(g.n, perp(graph_system(g))).value;
    const double th = lovasz_theta(g).value;
    std::printf("    %-6s %-16.12g %-16.12g\n", name.c_str(), co, th);
    worst = std::max(worst, co - th);
    if (co > th + 1e-6) {
      v.pass = false;
      os << name << " exceeds by " << fmt(co - th) << "; ";
    }
  }
  os << "max coindex-theta " << fmt(worst);
  v.detail = os.str();
  return v;
}

// 08: both quantum theta forms agree within 1e-6 on 10 random unital
// systems in M_3; graph systems are tabulated against theta and the index
// with no equality asserted.
Verdict criterion_08() {
  Verdict v;
  std::ostringstream os;
  std::mt19937_64 rng(77000);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const MatricialSystem s = random_unital_system(3, 1 + (t % 4), rng);
    const double a = quantum_theta(s, QuantumThetaForm::dsw_dual).value;
    const double b = quantum_theta(s, QuantumThetaForm::dsw_primal).value;
    const double dev = std::abs(a - b);
    worst = std::max(worst, dev);
    if (dev > 1e-6) {
      v.pass = false;
      os << "random" << t << " deviates " << fmt(dev) << "; ";
    }
  }
  std::printf("    %-6s %-16s %-16s %-16s\n", "graph", "quantum_theta", "theta", "cp_index");
  for (const auto& [name, g] : graph_corpus()) {
    const double qt = quantum_theta(graph_system(g)).value;
    const double th = lovasz_theta(g).value;
    const double ix = cp_index_primal(graph_system(g)).value;
    std::printf("    %-6s %-16.12g %-16.12g %-16.12g\n", name.c_str(), qt, th, ix);
  }
  os << "max form deviation " << fmt(worst);
  v.detail = os.str();
  return v;
}

// 09: Choi calculus. Clause 1: the map c (tr/n)(.) I - id becomes completely
// positive exactly at c = n (threshold located to 1e-6 by bisection on the
// least Choi eigenvalue). The Choi matrix is (c/n) I(x)I - Delta and Delta
// has norm n, so the true threshold is c = n^2; the target n cannot be met.
// Kept as stated; fails honestly. Clause 2: the entrywise expectation matrix
// of a completely positive map is positive semidefinite (50 random maps,
// least eigenvalue >= -1e-8); true, passes.
Verdict criterion_09() {
  Verdict v;
  std::ostringstream os;
  for (int n = 2; n <= 3; ++n) {
    const auto cp_at = [n](double c) {
      const MatrixMap t = map_from_function(n, n, [n, c](const CMat& x) {
        const CMat out = (c / n) * x.trace() * CMat::Identity(n, n) - x;
        return out;
      });
      return lambda_min(t.choi) >= -1e-10;
    };
    double lo = 0.0, hi = 2.0 * n * n + 4.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cp_at(mid) ? hi : lo) = mid;
    }
    os << "n=" << n << ": threshold " << fmt(hi) << " want " << n << "; ";
    if (std::abs(hi - n) > 1e-6) v.pass = false;
  }
  std::mt19937_64 rng(90909);
  double least = 1e300;
  for (int t = 0; t < 50; ++t) {
    const CMat g = random_complex(9, 9, rng);
    MatrixMap phi;
    phi.in_dim = phi.out_dim = 3;
    phi.choi = g * g.adjoint() / 9.0;
    least = std::min(least, lambda_min(choi_expectation(phi)));
  }
  os << "least expectation eigenvalue " << fmt(least);
  if (least < -1e-8) v.pass = false;
  v.detail = os.str();
  return v;
}

// 10: completely bounded norms: transpose on M_2 has norm 2 (tol 1e-5);
// entrywise multiplication by a random PSD A in M_3 has norm max_i A_ii
// (tol 1e-6, 5 draws).
Verdict criterion_10() {
  Verdict v;
  std::ostringstream os;
  SubspaceMap tr2;
  tr2.domain = full_matrix_space(2);
  tr2.out_dim = 2;
  for (const CMat& b : tr2.domain.basis) tr2.images.push_back(b.transpose());
  const double tn = cb_norm(tr2);
  os << "transpose: " << fmt(tn) << "; ";
  if (std::abs(tn - 2.0) > 1e-5) v.pass = false;
  std::mt19937_64 rng(1010);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const CMat g = random_complex(3, 3, rng);
    const CMat a = g * g.adjoint();
    SubspaceMap mult;
    mult.domain = full_matrix_space(3);
    mult.out_dim = 3;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        mult.images.push_back(a(i, j) * matrix_unit(3, i, j));
    const double want = a.diagonal().real().maxCoeff();
    const double got = cb_norm(mult);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) > 1e-6) {
      v.pass = false;
      os << "draw" << t << ": " << fmt(got) << " vs " << fmt(want) << "; ";
    }
  }
  os << "max multiplier deviation " << fmt(worst);
  v.detail = os.str();
  return v;
}

// 11: the scalar index of the n-point bounded sequence algebra is exactly n
// (error <= 1e-9, each run within 1 s).
Verdict criterion_11() {
  Verdict v;
  std::ostringstream os;
  for (int n = 2; n <= 6; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const double got = bounded_index_linf(n);
    const double secs = elapsed_seconds(t0);
    if (std::abs(got - n) > 1e-9 || secs > 1.0) {
      v.pass = false;
      os << "n=" << n << ": " << fmt(got) << " in " << fmt(secs) << "s; ";
    }
  }
  if (v.pass) os << "all exact within 1e-9 and 1s";
  v.detail = os.str();
  return v;
}

// 12: every proper unital subsystem of M_3 has index strictly above 1
// (margin 1e-6, 10 random draws).
Verdict criterion_12() {
  Verdict v;
  std::ostringstream os;
  std::mt19937_64 rng(31337);
  double least = 1e300;
  for (int t = 0; t < 10; ++t) {
    MatricialSystem s = random_unital_system(3, 1 + (t % 3), rng);
    if (s.dim() >= 9) {
      --t;
      continue;
    }
    const double idx = cp_index_primal(s).value;
    least = std::min(least, idx);
    if (idx <= 1.0 + 1e-6) {
      v.pass = false;
      os << "draw" << t << ": " << fmt(idx) << "; ";
    }
  }
  os << "least index " << fmt(least);
  v.detail = os.str();
  return v;
}

// 13: indices over infinite-dimensional ambient algebras (type II_1 von
// Neumann factors, group C*-algebras, asymptotic zero-error capacities) have
// no representation in this library; their finite-dimensional stand-ins are
// the graph-system identities, re-verified here on the self-complementary
// five-cycle.
Verdict criterion_13() {
  Verdict v;
  std::ostringstream os;
  const Graph c5 = Graph::cycle(5);
  const double th = lovasz_theta(c5).value;
  const double idx = cp_index_primal(graph_system(c5)).value;
  const double lt = lambda_tilde(graph_system_equal_diag(c5)).value;
  if (std::abs(idx - th) > 1e-5 || std::abs(lt - th) > 1e-5) v.pass = false;
  os << "stand-ins on C5: index " << fmt(idx) << ", complement-system scalar index "
     << fmt(lt) << ", theta " << fmt(th)
     << "; infinite-dimensional ambients intentionally unrepresentable";
  v.detail = os.str();
  return v;
}

const char* kDescriptions[] = {
    "scalar index of the full matrix algebra equals the ambient dimension",
    "scalar index of the diagonal algebra equals the ambient dimension",
    "ambient index of graph systems equals both classical theta forms",
    "constant-diagonal graph systems match the complement theta",
    "maximization and minimization index forms agree",
    "index is multiplicative across tensor products",
    "co-index of the complement kernel is bounded by theta",
    "both quantum theta forms agree",
    "trace-map positivity threshold and expectation-matrix positivity",
    "completely bounded norms of transpose and entrywise multipliers",
    "scalar index of the bounded sequence algebra equals its dimension",
    "proper subsystems have index strictly above one",
    "infinite-dimensional variants excluded; stand-ins verified",
};

Verdict run_criterion(int id) {
  switch (id) {
    case 1: return criterion_01();
    case 2: return criterion_02();
    case 3: return criterion_03();
    case 4: return criterion_04();
    case 5: return criterion_05();
    case 6: return criterion_06();
    case 7: return criterion_07();
    case 8: return criterion_08();
    case 9: return criterion_09();
    case 10: return criterion_10();
    case 11: return criterion_11();
    case 12: return criterion_12();
    case 13: return criterion_13();
    default: return Verdict{false, "unknown criterion"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 13; ++i) which.push_back(i);

  bool all = true;
  for (int id : which) {
    if (id < 1 || id > 13) {
      std::fprintf(stderr, "no criterion %d\n", id);
      return 2;
    }
    Verdict v;
    try {
      v = run_criterion(id);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("ACCEPTANCE %02d %s %s (%s)\n", id, v.pass ? "PASS" : "FAIL",
                kDescriptions[id - 1], v.detail.c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
