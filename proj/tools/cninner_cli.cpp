// Command-line front end. Talks to the library only through cninner.h.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cninner/cninner.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kBudget = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string expr_file, zeros_file, config_file;
  std::string eps;
  std::optional<int> grid_quota, depth, kmax, jmax, N, n, threads, refinements, n_max, samples;
  int seed = 0;
  std::string out = "out";
  std::string gamma;
  std::vector<std::string> sector;
  std::string target;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

// "n=64 N=1536" or "64,1536"
json parse_sector(const std::vector<std::string>& parts) {
  json s = json::object();
  std::vector<double> bare;
  for (const auto& p : parts) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) {
      for (double v : parse_list(p, "--sector")) bare.push_back(v);
      continue;
    }
    const std::string key = p.substr(0, eq);
    if (key != "n" && key != "N") throw ConfigError("--sector takes n=... and N=...");
    s[key] = parse_list(p.substr(eq + 1), "--sector").at(0);
  }
  if (bare.size() == 2) s = {{"n", bare[0]}, {"N", bare[1]}};
  if (!s.contains("n") || !s.contains("N")) throw ConfigError("--sector needs both n and N");
  return s;
}

json build_config(const Options& o) {
  json c = o.config_file.empty() ? json::object() : read_json_file(o.config_file);
  if (!c.is_object()) throw ConfigError("--config must hold a JSON object");
  if (!o.target.empty()) c["target"] = o.target;
  if (!o.expr_file.empty()) c["expr"] = read_json_file(o.expr_file);
  if (!o.zeros_file.empty()) c["zeros"] = read_json_file(o.zeros_file);
  if (!o.eps.empty()) c["eps"] = parse_list(o.eps, "--eps");
  if (!o.gamma.empty()) {
    const auto g = parse_list(o.gamma, "--gamma");
    if (g.empty() || g.size() > 2) throw ConfigError("--gamma takes re or re,im");
    c["gamma"] = json::array({g[0], g.size() > 1 ? g[1] : 0.0});
  }
  if (!o.sector.empty()) c["sector"] = parse_sector(o.sector);
  const std::pair<const char*, const std::optional<int>*> ints[] = {
      {"grid_quota", &o.grid_quota}, {"depth", &o.depth},     {"kmax", &o.kmax},
      {"jmax", &o.jmax},             {"n", &o.n},             {"threads", &o.threads},
      {"refinements", &o.refinements}, {"n_max", &o.n_max}, {"samples", &o.samples}};
  for (const auto& [key, v] : ints) {
    if (*v) c[key] = **v;
  }
  if (o.N) {
    if (!c.contains("sector") && c.contains("n")) c["sector"] = {{"n", c["n"]}, {"N", *o.N}};
    else c["N"] = *o.N;
  }
  c["seed"] = o.seed;
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int status_exit(cn_status s) {
  switch (s) {
    case CN_OK: return kOk;
    case CN_ERR_BUDGET: return kBudget;
    case CN_ERR_INVARIANT:
    case CN_ERR_INTERNAL: return kInvariant;
    default: return kConfig;
  }
}

int run(const std::string& command, const Options& o) {
  json config;
  try {
    config = build_config(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  cn_result* result = nullptr;
  const cn_status s = cn_run(command.c_str(), config.dump().c_str(), &result);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::path out(o.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out << ": " << ec.message() << "\n";
    cn_result_free(result);
    return kConfig;
  }
  json meta = {{"command", command}, {"version", cn_version()}, {"timestamp", utc_now()}, {"elapsed_seconds", elapsed}};

  if (s != CN_OK) {
    const json err = {{"command", command},
                      {"version", cn_version()},
                      {"config", config},
                      {"error", {{"code", static_cast<int>(s)}, {"message", cn_last_error()}}},
                      {"status", "error"}};
    write_file(out / "report.json", err.dump(2) + "\n");
    write_file(out / "metadata.json", meta.dump(2) + "\n");
    std::cerr << "error: " << cn_last_error() << "\n";
    return status_exit(s);
  }

  write_file(out / "report.json", cn_result_report(result));
  for (std::size_t i = 0; i < cn_result_table_count(result); ++i) {
    write_file(out / (std::string(cn_result_table_name(result, i)) + ".csv"), cn_result_table_csv(result, i));
  }
  write_file(out / "metadata.json", meta.dump(2) + "\n");

  int code = kOk;
  for (std::size_t i = 0; i < cn_result_check_count(result); ++i) {
    const bool pass = cn_result_check_passed(result, i);
    std::cout << (pass ? "ok    " : "FAIL  ") << cn_result_check_name(result, i);
    const std::string detail = cn_result_check_detail(result, i);
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
  }
  if (!cn_result_ok(result)) code = kInvariant;
  else if (cn_result_budget_exhausted(result)) code = kBudget;
  std::cout << "report: " << (out / "report.json").string() << "\n";
  cn_result_free(result);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner functions in the disc and half-plane: constructions, indicators and reports"};
  app.set_version_flag("--version", std::string(cn_version()));
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output directory")->capture_default_str();
    c->add_option("--seed", o.seed, "Seed, recorded in the report (all runs are deterministic)")->capture_default_str();
    c->add_option("--threads", o.threads, "Worker threads for parallel sweeps")->check(CLI::Range(1, 256));
    c->add_option("--config", o.config_file, "JSON object with extra config keys");
  };
  auto expr = [&](CLI::App* c) {
    c->add_option("--expr", o.expr_file, "Inner expression (JSON file)")->check(CLI::ExistingFile);
    c->add_option("--zeros", o.zeros_file, "Zero set (JSON file)")->check(CLI::ExistingFile);
  };
  auto grid = [&](CLI::App* c) {
    c->add_option("--grid-quota", o.grid_quota, "Points per Whitney cell (default 16)");
    c->add_option("--depth", o.depth, "Whitney levels sampled (default 8)");
  };

  auto* rep = app.add_subcommand("reproduce", "Run a construction pipeline");
  rep->add_option("target", o.target, "prop1-demo | prop3 | thm1 | e8")
      ->required()
      ->check(CLI::IsMember({"prop1-demo", "prop3", "thm1", "e8"}));
  rep->add_option("--kmax", o.kmax, "Blocks or factors (prop3, thm1)");
  rep->add_option("--jmax", o.jmax, "Half-plane blocks (e8)");
  rep->add_option("--n", o.n, "Subsets (prop1-demo)");
  rep->add_option("--eps", o.eps, "Comma-separated eps list");
  rep->add_option("--n-max", o.n_max, "Largest exponent tried (prop3)");
  rep->add_option("--samples", o.samples, "Sampling per axis (thm1 sectors, e8 boxes)");
  grid(rep);
  common(rep);
  rep->footer(
      "Tables:\n"
      "  prop1-demo  subsets.csv      subset,re,im,multiplicity\n"
      "  prop3       factors.csv      k,N,w,r,zero_count,worst_bound,halvings\n"
      "              wep.csv          kmax,refinement,eps,eta,vacuous\n"
      "              cn_fit.csv       stage,n,A\n"
      "              psi.csv          x,min_abs_b,fit\n"
      "  thm1        blocks.csv       k,eps,n,N,mass,sector_area,lower,upper,c_hat,c_hat_fine\n"
      "              area_levels.csv  eps,level,contribution,partial_sum\n"
      "  e8          blocks.csv       j,n,N,atoms,mass,min_u_ratio,min_u_ratio_fine,area_E,area_E_closed,\n"
      "                               level_area,level_area_error,level_ratio\n"
      "              area_levels.csv  level,contribution,partial_sum");

  auto* eval = app.add_subcommand("eval-grid", "Sample log|f| and rho(z, Z) on a Whitney grid");
  expr(eval);
  grid(eval);
  common(eval);
  eval->footer("Table: samples.csv  re,im,log_abs_f,rho");

  auto* wep = app.add_subcommand("wep", "Grid estimate of eta(eps) = inf{|f(z)| : rho(z, Z) >= eps}");
  expr(wep);
  wep->add_option("--eps", o.eps, "Comma-separated eps list (default 0.1,0.3,0.5)");
  wep->add_option("--refinements", o.refinements, "Refinement budget (default 3)");
  grid(wep);
  common(wep);
  wep->footer("Table: wep.csv  refinement,eps,eta,vacuous,certified,certified_lower,witness_re,witness_im");

  auto* cn = app.add_subcommand("cn-fit", "Fit the least n with |f| >= A rho^n on the grid");
  expr(cn);
  cn->add_option("--n-max", o.n_max, "Largest exponent tried (default 6)");
  cn->add_option("--refinements", o.refinements, "Refinement stages (default 3)");
  grid(cn);
  common(cn);
  cn->footer("Table: cn_fit.csv  stage,n,A");

  auto* car = app.add_subcommand("carleson", "Carleson constant of a zero set");
  expr(car);
  common(car);
  car->footer("Table: carleson.csv  index,re,im,multiplicity,delta_k");

  auto* area = app.add_subcommand("area", "Weighted area of a sector, a disk, or a level set {|f| < eps}");
  expr(area);
  area->add_option("--sector", o.sector, "n=INT N=INT")->expected(1, 2);
  area->add_option("--n", o.n, "Sector n (with --N)");
  area->add_option("--N", o.N, "Sector N (with --n)");
  area->add_option("--eps", o.eps, "Comma-separated eps list (level sets)");
  area->add_option("--depth", o.depth, "Cover depth (default 10)");
  common(area);
  area->footer("Table (level sets): area_levels.csv  eps,level,contribution,partial_sum");

  auto* lvl = app.add_subcommand("level-solve", "All solutions of f(z) = gamma for a finite product");
  expr(lvl);
  lvl->add_option("--gamma", o.gamma, "re[,im], |gamma| < 1 (default 0)");
  common(lvl);
  lvl->footer("Table: roots.csv  re,im,multiplicity,residual");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  }
}
