// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <blab/harness/commands.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

using namespace blab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool check_passed(const ExperimentResult& r, const std::string& prefix) {
  bool any = false;
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    any = true;
    if (!c.passed) return false;
  }
  return any;
}

std::string check_details(const ExperimentResult& r, const std::string& prefix) {
  std::string out;
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0 && !c.detail.empty()) out += (out.empty() ? "" : "; ") + c.detail;
  return out;
}

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.passed) ++failures;
  char time[32];
  std::snprintf(time, sizeof time, "%.1fs", seconds_since(t0));
  std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " (" << time << ")"
            << (o.detail.empty() ? "" : " -- " + o.detail) << std::endl;
}

ExperimentConfig config(const std::string& text) { return ExperimentConfig::parse_string(text); }

}  // namespace

int main() {
  ExperimentResult counterexample;
  double counterexample_seconds = 0.0;

  report(1, "counterexample product increases and grows >= 2x (n=1, k = 8..20)", [&] {
    const auto t0 = Clock::now();
    counterexample = cmd_counterexample(config("dim = 1\nk_list = 8, 12, 16, 20\nbudget = 1000000\n"));
    counterexample_seconds = seconds_since(t0);
    const bool ok = check_passed(counterexample, "product strictly increasing") &&
                    check_passed(counterexample, "product(k_max) / product(k_min) >= 2") && counterexample_seconds <= 300.0;
    return Outcome{ok, check_details(counterexample, "product(k_max)")};
  });

  report(2, "|U_m| within factor 4 of 2^{(n+1)(m-k)}", [&] {
    std::string ratios;
    for (std::size_t i = 0; i < counterexample.table.size(); ++i)
      ratios += (ratios.empty() ? "" : ", ") + counterexample.table.cell(i, "um_ratio");
    return Outcome{check_passed(counterexample, "|U_m| within factor 4"), "ratios " + ratios};
  });

  report(3, "H-infinity dichotomy (log grows, z1 bounded)", [] {
    const auto r = cmd_hinfty(config("dim = 1\n"));
    return Outcome{r.passed(), check_details(r, "log: lambda_k") + "; " + check_details(r, "z1: weak-type")};
  });

  report(4, "L log L characterization: stable sup-ratio and restricted constant", [] {
    const auto r = cmd_llogl_verify(config("dim = 1\nsymbols = log\n"));
    return Outcome{r.passed(), check_details(r, "log:")};
  });

  report(5, "geometry containments: zero violations in 1e5 samples each", [] {
    const auto t0 = Clock::now();
    std::uint64_t violations = 0;
    std::string detail;
    for (int n : {1, 2}) {
      for (const auto& rep : {check_polydisk_chain(n, 100000, 1), check_koranyi_chain(n, 100000, 1),
                              check_mobius_invariance(n, 100000, 1)}) {
        violations += rep.violations;
        detail += (detail.empty() ? "" : ", ") + rep.name + "(n=" + std::to_string(n) + ")=" +
                  std::to_string(rep.violations);
      }
    }
    const double secs = seconds_since(t0);
    return Outcome{violations == 0 && secs <= 120.0, detail};
  });

  report(6, "closed forms agree with quadrature in >= 95 of 100 configurations", [] {
    const auto row = oracle_equivalence(100, 40000, 1);
    return Outcome{row.passed, row.detail};
  });

  report(7, "Orlicz suite: submultiplicativity, comparability, Holder, M_Psi bound", [] {
    std::vector<PropertyRow> rows;
    for (double eps : {0.25, 0.5, 1.0}) rows.push_back(submultiplicativity(eps, 100000, 1));
    rows.push_back(young_comparability(100000, 1));
    for (double eps : {0.5, 1.0}) rows.push_back(generalized_holder(eps, 1000, 1));
    rows.push_back(young_maximal_bound(disk_grid(1), 20000, 1));
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
      ok = ok && r.passed;
      detail += (detail.empty() ? "" : ", ") + r.property + "=" + (r.passed ? "ok" : "FAIL");
    }
    return Outcome{ok, detail};
  });

  report(8, "John-Nirenberg exponential tail on 20 tents (c2 > 0, R^2 >= 0.9)", [] {
    const DyadicGrid g = disk_grid(1);
    const Symbol lg = Symbol::log_branch();
    const auto jn = john_nirenberg_fit(g, lg, bloch_norm(lg, 1).value, 20, 1u << 18, 1);
    char buf[128];
    std::snprintf(buf, sizeof buf, "c2 = %.4g, R^2 = %.4g, %zu points", -jn.fit.slope, jn.fit.r2, jn.fit.points);
    return Outcome{jn.fit.points >= 3 && -jn.fit.slope > 0.0 && jn.fit.r2 >= 0.9, buf};
  });

  report(9, "layer decomposition: overlap <= 4 and deep-layer decay for k = 1, 2, 3", [] {
    const DyadicGrid g = disk_grid(1);
    std::vector<PropertyRow> rows{layer_overlap(g, 10000, 1)};
    for (int k : {1, 2, 3}) rows.push_back(layer_decay(g, k, 8192));
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
      ok = ok && r.passed;
      detail += (detail.empty() ? "" : ", ") + r.property + "=" + (r.passed ? "ok" : "FAIL");
    }
    return Outcome{ok, detail + "; " + rows.front().detail};
  });

  report(10, "identical config reproduces byte-identical CSV", [] {
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"counterexample", "k_list = 8, 12\nbudget = 100000\n"},
        {"llogl-verify", "budget = 8192\ncenters = 0, 0.9\n"},
        {"hinfty", "budget = 16384\nk_list = 6, 8\n"},
        {"necessity", "budget = 2048\nshells = 2, 4\n"},
        {"weaktype-mod", "budget = 256\nquadrature = 128\ncenters = 0.5\n"},
        {"exp-osc", "budget = 4096\ncenters = 0.5\neps = 1\n"},
        {"geometry-check", "dim = 1\ncontainment_samples = 2000\nholder_trials = 20\ntents = 4\nbudget = 4096\nquadrature = 2000\ntail_budget = 256\n"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [name, text] : runs) {
      const auto a = run_command(name, config(text)).table.str();
      const auto b = run_command(name, config(text)).table.str();
      const bool same = a == b;
      ok = ok && same;
      detail += (detail.empty() ? "" : ", ") + name + (same ? "=same" : "=DIFFERS");
    }
    return Outcome{ok, detail};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
