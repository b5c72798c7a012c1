// Acceptance suite: one PASS/FAIL line per criterion, 1 to 12.
//
// usage: acceptance CLI_PATH [--expect-fail 5,9,10]
// Exit status is nonzero when a criterion outside the expect-fail list fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cninner/analysis.hpp"
#include "cninner/constructions.hpp"
#include "cninner/cover.hpp"
#include "cninner/pipelines.hpp"

using namespace cninner;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Complex random_disc(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(rmax * std::sqrt(u(rng)), kTwoPi * u(rng));
}

// (z - a) / (1 - conj(a) z), multiplied out directly
Complex blaschke_direct(const std::vector<Complex>& zeros, Complex z) {
  Complex p(1.0, 0.0);
  for (const Complex a : zeros) p *= (z - a) / (1.0 - std::conj(a) * z);
  return p;
}

// ---------------------------------------------------------------------------

Outcome metric_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double sym = 0.0, inv = 0.0;
  bool range = true;
  for (int i = 0; i < 100000; ++i) {
    const DiscPoint a(random_disc(rng, 0.999)), b(random_disc(rng, 0.999)), c(random_disc(rng, 0.999));
    const double r = rho(a, b);
    range = range && r >= 0.0 && r < 1.0;
    sym = std::max(sym, std::abs(r - rho(b, a)));
    inv = std::max(inv, std::abs(rho(mobius(c, a), mobius(c, b)) - r));
  }
  const double t = seconds_since(t0);
  return {range && sym <= 1e-12 && inv <= 1e-12 && t < 5.0,
          "symmetry " + fmt(sym) + ", invariance " + fmt(inv) + ", range " + (range ? "ok" : "violated") + ", " +
              fmt(t) + " s"};
}

Outcome product_identity() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> deg(1, 50);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Complex> zeros(static_cast<std::size_t>(deg(rng)));
    ZeroSequence zs;
    for (auto& a : zeros) {
      a = random_disc(rng, 0.99);
      zs.add(a);
    }
    const InnerExpr f = InnerExpr::blaschke(zs);
    for (int i = 0; i < 1000; ++i) {
      const Complex z = random_disc(rng, 0.999);
      const double direct = std::log(std::abs(blaschke_direct(zeros, z)));
      worst = std::max(worst, std::abs(eval_log_modulus(f, DiscPoint(z)).log_modulus - direct));
    }
  }
  return {worst <= 1e-10, "max |difference| " + fmt(worst)};
}

Outcome singular_oracle() {
  AtomicMeasure mu;
  mu.add(0.0, 1.0);
  const InnerExpr s = InnerExpr::singular(mu);
  double worst = 0.0;
  for (double r : {0.0, 0.25, 0.5, 0.9}) {
    const double expect = std::exp(-(1.0 + r) / (1.0 - r));
    worst = std::max(worst, std::abs(std::exp(eval_log_modulus(s, DiscPoint(r, 0.0)).log_modulus) - expect) / expect);
  }
  return {worst <= 1e-12, "max relative error " + fmt(worst)};
}

Outcome wep_exact() {
  const std::vector<double> eps = {0.1, 0.3, 0.5};
  double shell_gap = 0.0;
  bool envelope = true;
  std::string raw;
  for (int p = 1; p <= 2; ++p) {
    ZeroSequence zs;
    zs.add(0.0, p);
    const InnerExpr f = InnerExpr::blaschke(zs);
    const ZeroIndex idx(zs);
    for (int ref = 0; ref <= 3; ++ref) {
      GridSpec g;
      g.refinement = ref;
      const SampleGrid grid = make_grid(g);
      if (ref <= 1) {
        const WepProfile with = wep_indicator(f, idx, eps, grid);
        for (const auto& e : with.entries) shell_gap = std::max(shell_gap, std::abs(e.eta - std::pow(e.eps, p)));
      }
      WepOptions bare;
      bare.shells = false;
      const WepProfile lattice = wep_indicator(f, idx, eps, grid, bare);
      raw += (ref ? " " : (p == 1 ? "grid-only gaps z: " : "; z^2: "));
      for (const auto& e : lattice.entries) {
        const double gap = e.eta - std::pow(e.eps, p);
        // at most one grid step outside the eps-circle
        envelope = envelope && gap >= -1e-12 && gap <= std::pow(e.eps + grid.resolution, p) - std::pow(e.eps, p);
        raw += fmt(gap) + (&e == &lattice.entries.back() ? "" : "/");
      }
    }
  }
  return {shell_gap <= 1e-9 && envelope,
          "shells: max gap " + fmt(shell_gap) + "; grid-only gap within one grid step (halving): " +
              (envelope ? "yes" : "no") + "; " + raw};
}

Outcome exponent_fits() {
  GridSpec g;
  g.levels = 12;
  auto fit_of = [&](const ZeroSequence& zs) {
    return cn_exponent_fit(InnerExpr::blaschke(zs), std::make_shared<const ZeroIndex>(zs), g, 6);
  };
  ZeroSequence z1, z2;
  z1.add(0.0);
  z2.add(0.0, 2);
  const CnFit f1 = fit_of(z1), f2 = fit_of(z2);
  const CnFit fi = fit_of(fixtures::interleaved_radii());
  auto n_of = [](const CnFit& f) { return f.exponent ? std::to_string(*f.exponent) : std::string("none"); };
  bool a2_stable = false;
  if (fi.A.size() >= 3 && fi.A.back().size() >= 2) {
    const double a = fi.A[fi.A.size() - 3][1], b = fi.A.back()[1];
    a2_stable = b > 0.0 && std::abs(a - b) <= 0.1 * b;
  }
  const bool pass = f1.exponent == 1 && f2.exponent == 2 && fi.exponent == 2 && a2_stable;
  return {pass, "z: n=" + n_of(f1) + ", z^2: n=" + n_of(f2) + ", interleaved: n=" + n_of(fi) + " (" + fi.verdict + ")"};
}

Outcome prop1_algorithm() {
  const DecompositionResult d = decompose_interpolating(fixtures::interleaved_radii(), 2);
  bool positive = d.subsets.size() == 2;
  double worst = 0.0;
  for (const auto& s : d.subsets) {
    std::vector<Complex> zeros;
    for (const auto& e : s.entries()) zeros.push_back(e.z);
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      const double delta_k = [&] {
        double p = 1.0;
        for (std::size_t j = 0; j < zeros.size(); ++j) {
          if (j != k) p *= raw::rho(zeros[j], zeros[k]);
        }
        return p;
      }();
      // five-point central difference along the real axis
      const Complex zk = zeros[k];
      const double h = 1e-3 * (1.0 - std::abs(zk));
      const auto B = [&](double t) { return blaschke_direct(zeros, zk + t); };
      const Complex d1 = (B(-2 * h) - 8.0 * B(-h) + 8.0 * B(h) - B(2 * h)) / (12.0 * h);
      const double fd = std::abs(d1) * (1.0 - std::norm(zk));
      worst = std::max(worst, std::abs(fd - delta_k));
    }
    positive = positive && carleson_condition(s).delta > 0.0;
  }

  bool witness = false;
  std::string wdetail = "not rejected";
  try {
    decompose_interpolating(fixtures::triple_cluster(), 2);
  } catch (const MultiplicityError& e) {
    const Complex c(fixtures::kClusterCenterRe, fixtures::kClusterCenterIm);
    const ZeroSequence tc = fixtures::triple_cluster();
    int inside = 0;
    for (std::size_t i = 0; i < 3; ++i) inside += raw::rho(e.center(), tc[i].z) <= e.radius() ? 1 : 0;
    witness = e.count() >= 3 && inside == 3 && raw::rho(e.center(), c) <= e.radius();
    wdetail = "witness rho(center, 0.3+0.2i) = " + fmt(raw::rho(e.center(), c)) + ", radius " + fmt(e.radius()) +
              ", count " + std::to_string(e.count());
  }
  return {positive && worst <= 1e-8 && witness,
          std::to_string(d.subsets.size()) + " subsets, delta > 0: " + (positive ? "yes" : "no") +
              ", max |finite difference - delta_k| " + fmt(worst) + "; " + wdetail};
}

Outcome level_solver() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> deg(1, 8);
  int count_ok = 0, quad_cases = 0;
  double resid = 0.0, quad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = deg(rng);
    std::vector<Complex> a(static_cast<std::size_t>(n));
    ZeroSequence zs;
    for (auto& z : a) {
      z = random_disc(rng, 0.95);
      zs.add(z);
    }
    const Complex gamma = random_disc(rng, 0.9);
    const LevelSolveResult r = level_solve(InnerExpr::blaschke(zs), gamma);
    int found = 0;
    for (const auto& root : r.roots) {
      found += root.multiplicity;
      resid = std::max(resid, std::abs(blaschke_direct(a, root.z) - gamma));
    }
    count_ok += found == n ? 1 : 0;
    if (n == 2) {
      // (1 - g conj(a b)) z^2 - (a + b - g conj(a + b)) z + (a b - g) = 0
      const Complex A = 1.0 - gamma * std::conj(a[0] * a[1]);
      const Complex Bc = -(a[0] + a[1] - gamma * std::conj(a[0] + a[1]));
      const Complex C = a[0] * a[1] - gamma;
      const Complex s = std::sqrt(Bc * Bc - 4.0 * A * C);
      const Complex q = -0.5 * (Bc + (std::real(std::conj(Bc) * s) >= 0 ? s : -s));
      std::vector<Complex> oracle = {q / A, C / q};
      for (const auto& root : r.roots) {
        double best = INFINITY;
        for (const auto& o : oracle) best = std::min(best, std::abs(root.z - o));
        quad = std::max(quad, best);
      }
      ++quad_cases;
    }
  }
  return {count_ok == 100 && resid < 1e-9 && quad <= 1e-9,
          std::to_string(count_ok) + "/100 root counts, max residual " + fmt(resid) + ", quadratic oracle (" +
              std::to_string(quad_cases) + " cases) " + fmt(quad)};
}

Outcome weighted_areas() {
  const double sector = weighted_area(PolarBox{1.0 - 64.0 / 1536.0, 1.0 - 1.0 / 1536.0, 0.0, kTwoPi * 64.0 / 1536.0});
  const double disk = weighted_area(HyperbolicDisk(DiscPoint(0.9, 0.0), 0.5)).value;
  return {sector >= 1.043 && sector <= 1.089 && disk >= 0.1 / 4 && disk <= 0.1 * 4,
          "sector " + fmt(sector) + ", D(0.9, 1/2) " + fmt(disk)};
}

// Pairs with different x must be ordered alike; tied x asks for values within 10%.
bool monotone_in(const std::vector<std::pair<double, double>>& xy) {
  for (std::size_t i = 0; i < xy.size(); ++i) {
    for (std::size_t j = i + 1; j < xy.size(); ++j) {
      const auto [x1, c1] = xy[i];
      const auto [x2, c2] = xy[j];
      if (std::abs(x1 - x2) <= 1e-12 * std::max(x1, x2)) {
        if (std::abs(c1 - c2) > 0.1 * std::max(c1, c2)) return false;
      } else if ((x1 < x2) != (c1 < c2)) {
        return false;
      }
    }
  }
  return true;
}

Outcome thm1_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_command("reproduce", {{"target", "thm1"}, {"kmax", 3}});
  const double t = seconds_since(t0);
  const json& masses = r.report["results"]["blocks"];
  bool mass_ok = masses.size() == 3;
  for (std::size_t k = 0; k < masses.size(); ++k) mass_ok = mass_ok && masses[k]["mass"] == std::ldexp(1.0, -int(k) - 1);
  const json& e = r.report["results"]["condition_A"][0];
  std::vector<std::pair<double, double>> xy;
  std::string per;
  for (const auto& b : e["per_block"]) {
    xy.emplace_back(b["n_log_n_over_N"].get<double>(), b["contribution"].get<double>());
    per += " k=" + std::to_string(b["k"].get<int>()) + ": x=" + fmt(xy.back().first) + " c=" + fmt(xy.back().second);
  }
  const std::string trend = e["trend"];
  const bool mono = monotone_in(xy);
  return {mass_ok && trend == "growing" && mono && t < 120.0,
          "trend " + trend + " (area " + fmt(e["area"]["value"]) + " to depth " + std::to_string(e["depth"].get<int>()) +
              "), per-block monotone: " + (mono ? "yes" : "no") + ";" + per + "; " + fmt(t) + " s"};
}

Outcome prop3_behaviour() {
  const RunResult r = run_command("reproduce", {{"target", "prop3"}, {"kmax", 3}, {"eps", {0.1, 0.3, 0.5, 0.7}}});
  const json& res = r.report["results"];
  const json& profiles = res["wep_profiles"];
  const auto eps = r.report["config"]["eps"].get<std::vector<double>>();
  const json& top = profiles.back()["profile"];
  bool wep_ok = true;
  std::string wep;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] != 0.3 && eps[i] != 0.5) continue;
    const double a = top[0]["eta"][i], b = top[1]["eta"][i];
    wep_ok = wep_ok && a > 0.0 && b > 0.0 && std::abs(a - b) <= 0.1 * std::max(a, b);
    wep += " eta(" + fmt(eps[i]) + ") " + fmt(a) + " -> " + fmt(b);
  }
  bool mono = true;
  for (std::size_t k = 1; k < profiles.size(); ++k) {
    for (std::size_t i = 0; i < eps.size(); ++i) {
      mono = mono && profiles[k]["profile"][1]["eta"][i].get<double>() <= profiles[k - 1]["profile"][1]["eta"][i].get<double>();
    }
  }
  const json& dec = res["cn_fit"]["decaying"];
  const bool all_decay = !dec.empty() && std::all_of(dec.begin(), dec.end(), [](const json& d) { return d.get<bool>(); });
  const auto& A = res["cn_fit"]["stages"];
  std::string a1;
  for (const auto& s : A) a1 += " " + fmt(s["A"][0]);
  return {wep_ok && mono && all_decay,
          "WEP:" + wep + " (" + (wep_ok ? "stable" : "unstable") + "), non-increasing in kmax: " + (mono ? "yes" : "no") +
              "; A_n all decaying: " + (all_decay ? "yes" : "no") + " (A_1 by stage" + a1 + ")"};
}

Outcome e8_checks() {
  const RunResult r = run_command("reproduce", {{"target", "e8"}, {"jmax", 2}});
  const json& res = r.report["results"];
  bool exact = true, stable = true;
  std::string per;
  for (const auto& b : res["blocks"]) {
    const double a = b["area_E"], c = b["area_E_closed"];
    const double n = b["n"], N = b["N"];
    const double closed = std::pow(n, 5.0 / 3.0) * std::pow(4.0, n) / N * std::log(2.0);
    exact = exact && std::abs(a - closed) <= 1e-12 * closed && std::abs(c - closed) <= 1e-12 * closed;
    const double u = b["min_u_ratio"], uf = b["min_u_ratio_fine"];
    stable = stable && u > 0.0 && std::abs(u - uf) <= 0.1 * u;
    per += " j=" + std::to_string(b["j"].get<int>()) + ": area_E " + fmt(a) + " min u/n^(1/3) " + fmt(u) + "/" + fmt(uf);
  }
  const json& lv = res["level_set_union"];
  const std::string trend = lv.is_null() ? "absent" : lv["trend"].get<std::string>();
  return {exact && stable && trend == "bounded",
          std::string("area_E exact: ") + (exact ? "yes" : "no") + ";" + per + "; level-set area for j<=2 " +
              (lv.is_null() ? "n/a" : fmt(lv["area"]["value"])) + " trend " + trend};
}

Outcome cli_determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / ("cninner_accept_" + std::to_string(::getpid()));
  std::string bytes[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / std::to_string(i);
    const std::string cmd = "\"" + cli + "\" reproduce thm1 --kmax 2 --seed 7 --out \"" + out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      fs::remove_all(dir);
      return {false, "CLI run failed: " + cmd};
    }
    std::ifstream in(out / "report.json", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes[i] = ss.str();
  }
  fs::remove_all(dir);
  return {!bytes[0].empty() && bytes[0] == bytes[1], std::to_string(bytes[0].size()) + " bytes, identical: " +
                                                         (bytes[0] == bytes[1] ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance CLI_PATH [--expect-fail LIST]\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> expect_fail;
  for (int i = 2; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--expect-fail") {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) expect_fail.insert(std::stoi(item));
    }
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric suite", metric_suite},
      {"product identity", product_identity},
      {"singular-factor oracle", singular_oracle},
      {"WEP exact cases", wep_exact},
      {"CN exponent fit", exponent_fits},
      {"interpolating decomposition", prop1_algorithm},
      {"level solver", level_solver},
      {"weighted area closed forms", weighted_areas},
      {"dyadic singular measure trend", thm1_trend},
      {"precomposed product behaviour", prop3_behaviour},
      {"half-plane block checks", e8_checks},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !expect_fail.count(id)) ++unexpected;
  }
  if (!expect_fail.empty()) {
    std::printf("known unattainable (documented):");
    for (int id : expect_fail) std::printf(" %d", id);
    std::printf("\n");
  }
  return unexpected == 0 ? 0 : 1;
}
