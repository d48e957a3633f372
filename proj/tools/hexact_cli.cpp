// Command-line front end: pricing runs, the conditional-integral moment study,
// table audits and a quick self test.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hexact/cdf_oracle.hpp"
#include "hexact/config.hpp"
#include "hexact/errors.hpp"
#include "hexact/heston.hpp"

using namespace hexact;

namespace {

// Keys that can be given as --key value on the price subcommand.
const std::vector<std::string> kKeys = {"case",    "kappa",  "theta",  "sigma",      "rho",    "t",      "v0",
                                        "s0",      "r",      "scheme", "K",          "n_paths", "steps",  "seed",
                                        "threads", "strike", "lower",  "upper",      "fixings", "tables_dir", "output"};

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string resolve_tables_dir(const std::string& dir) { return dir.empty() ? std::string(HEXACT_DATA_DIR) : dir; }

void print_report(const std::string& what, const RunConfig& cfg, const PricingReport& r) {
  std::cout << what << " (" << cfg.case_name << ", " << to_string(r.scheme) << ", K=" << r.K << ")\n"
            << "  estimate       " << fmt(r.estimate, 8) << "\n"
            << "  standard error " << fmt(r.standard_error, 4) << "\n"
            << "  paths          " << r.n_paths << "\n"
            << "  proposals/draw " << fmt(r.proposals_mean, 6) << "\n"
            << "  seconds        " << fmt(r.seconds, 4) << "\n";
}

int run_price(const std::string& product, const std::string& config_path,
              const std::map<std::string, std::string>& flags) {
  RunConfig cfg;
  cfg.params = named_case("case1");
  cfg.case_name = "case1";
  if (product == "asian") {
    cfg.params = named_case("asian");
    cfg.case_name = "asian";
  } else if (product == "barrier") {
    cfg.params = named_case("barrier");
    cfg.case_name = "barrier";
  }
  std::vector<std::pair<std::string, std::string>> entries;
  if (!config_path.empty()) entries = read_config_file(config_path);
  // The command line overrides the file; a case on either applies first.
  for (const auto& [k, v] : flags) {
    std::erase_if(entries, [&](const auto& e) { return e.first == k; });
    entries.emplace_back(k, v);
  }
  apply_config(cfg, entries);
  if (cfg.sim.scheme == Scheme::EulerFullTruncation && product != "barrier")
    cfg.sim.euler_steps = cfg.euler_steps_to_horizon();

  const auto tables = is_exact(cfg.sim.scheme) ? TableSet::load(resolve_tables_dir(cfg.tables_dir)) : TableSet{};
  PricingReport r;
  std::string strike = fmt(cfg.strike, 10);
  if (product == "european") {
    r = price_european_call(cfg.params, cfg.strike, cfg.sim, tables);
  } else if (product == "asian") {
    r = price_asian_call(cfg.params, cfg.strike, cfg.resolved_fixings(), cfg.sim, tables);
  } else {
    const double per_year = cfg.steps > 0 ? cfg.steps : 1.0;
    r = price_double_no_touch(cfg.params, cfg.lower, cfg.upper, per_year, cfg.sim, tables);
    strike = fmt(cfg.lower, 10) + ":" + fmt(cfg.upper, 10);
  }
  print_report(product == "barrier" ? "double no-touch" : product + " call", cfg, r);
  if (!cfg.output.empty()) append_csv(cfg.output, cfg.case_name, strike, r);
  return 0;
}

int run_moments(const std::string& case_name, double t, const std::vector<double>& vts, const std::vector<int>& Ks,
                std::uint64_t n, std::uint64_t seed, const std::string& scheme, const std::string& tables_dir,
                bool x2_bias) {
  const auto params = named_case(case_name);
  const auto tables = TableSet::load(resolve_tables_dir(tables_dir));
  if (x2_bias) {
    const auto r = x2_rounding_bias(params, n, 20, seed, tables);
    std::cout << "X2 first-moment bias, " << case_name << ": h=" << fmt(r.h, 10) << " h~=" << r.h_rounded
              << "\n  predicted (h~ - h)/h = " << fmt(r.predicted) << "\n  measured             = "
              << fmt(r.measured) << " +- " << fmt(r.standard_error, 3) << " (" << r.draws << " stratified draws)\n";
    return 0;
  }
  const X2Mode mode = parse_scheme(scheme) == Scheme::ExactGammaBaseline ? X2Mode::TruncationBaseline
                                                                         : X2Mode::DirectInversion;
  const double horizon = t > 0 ? t : params.t;
  const auto rows = moment_error_report(params, horizon, vts, Ks, n, seed, tables, mode);
  std::printf("%-10s %3s %5s %14s %14s %12s %12s %s\n", "v_t", "K", "order", "exact", "sample", "abs_error",
              "3*SE", "significant");
  for (const auto& r : rows)
    std::printf("%-10g %3d %5d %14.8g %14.8g %12.4g %12.4g %s\n", r.v_t, r.K, r.order, r.exact, r.sample,
                r.abs_error, r.three_se, r.significant() ? "yes" : "no");
  return 0;
}

int run_tables_validate(const std::string& dir, int grid) {
  const auto tables = TableSet::load(resolve_tables_dir(dir));
  int worst = 0;
  for (const auto& id : tables.ids()) {
    const auto& t = tables.get(id);
    const auto audit = audit_table(t);
    std::cout << id << ": " << t.regimes.size() << " regimes, max |z|-1 = " << fmt(audit.max_z_overshoot, 3)
              << ", max seam jump = " << fmt(audit.max_seam_jump, 3) << "\n";
    const bool checkable = !t.standardized && t.parameter <= 2 && oracle_supports(t.parameter);
    std::vector<double> per_regime;
    if (checkable) per_regime = validate_against_oracle(t, grid).per_regime_max;
    for (std::size_t i = 0; i < t.regimes.size(); ++i) {
      const auto& r = t.regimes[i];
      std::cout << "  regime " << i << " [" << fmt(r.u_left, 10) << ", " << fmt(r.u_right, 10) << ") "
                << to_string(r.kind) << " nodes=" << r.degree() + 1;
      if (checkable) {
        std::cout << " max_error=" << fmt(per_regime[i], 3);
        if (per_regime[i] > 1e-9) worst = 1;
      }
      std::cout << "\n";
    }
    if (!checkable) std::cout << "  (no oracle comparison for this table)\n";
  }
  return worst;
}

int run_tables_regen(const std::string& dir, const std::string& id, const std::string& out, int grid) {
  const auto tables = TableSet::load(resolve_tables_dir(dir));
  const auto& shipped = tables.get(id);
  const auto regen = regenerate_table(shipped);
  audit_table(regen);
  const auto rep = validate_table(regen, [&](double u) { return quantile(shipped, u); }, grid);
  std::cout << id << " regenerated: " << regen.regimes.size() << " regimes\n";
  for (std::size_t i = 0; i < regen.regimes.size(); ++i)
    std::cout << "  regime " << i << " nodes=" << regen.regimes[i].degree() + 1
              << " max |regen - shipped| = " << fmt(rep.per_regime_max[i], 3) << "\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write '" + out + "'");
    f << serialize_table(regen);
    std::cout << "written to " << out << "\n";
  }
  return 0;
}

int run_selftest(const std::string& dir) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    if (!ok) ++failures;
  };
  const auto tables = TableSet::load(resolve_tables_dir(dir));
  report("tables load and audit", tables.ids().size() == 17, std::to_string(tables.ids().size()) + " tables");

  const auto c = BridgeConfig::make(2.5, 0.04, 0.04, 0.08, 1.0, 3);
  bool ratios = true;
  for (int K = 0; K < 10; ++K) {
    const auto a = remainder_moments(c, K), b = remainder_moments(c, K + 1);
    ratios = ratios && a.mean1 / b.mean1 == 2 && a.var1 / b.var1 == 8 && a.mean2 / b.mean2 == 4 &&
             a.var2 / b.var2 == 16;
  }
  report("remainder moment ratios", ratios, "2, 8, 4, 16");

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  double min_L = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const auto b = BridgeConfig::make(U(gen), U(gen) / 10, U(gen) / 10, U(gen), U(gen), 1);
    min_L = std::min(min_L, acceptance_factor(b));
  }
  report("acceptance factor L >= 1", min_L >= 1 - 1e-12, "min L = " + fmt(min_L, 10));

  const auto p3 = named_case("case3");
  SimulationOptions o;
  o.n_paths = 100000;
  o.seed = 5;
  const auto mart = price_european_call(p3, 0.0, o, tables);
  report("martingale (case3, 1e5 paths)", std::fabs(mart.estimate - p3.s0) <= 3 * mart.standard_error,
         fmt(mart.estimate, 7) + " +- " + fmt(mart.standard_error, 3));

  const auto open = price_double_no_touch(p3, 0.0, INFINITY, 2, o, tables);
  report("no-touch with open barriers", std::fabs(open.estimate - std::exp(-p3.mu * p3.t)) < 1e-14,
         fmt(open.estimate, 12));

  const auto bias = x2_rounding_bias(named_case("case4"), 20000, 10, 3, tables);
  report("X2 rounding bias (case4)", std::fabs(bias.measured - bias.predicted) <= 3 * bias.standard_error,
         fmt(bias.measured) + " vs " + fmt(bias.predicted));
  std::cout << (failures ? "selftest FAILED" : "selftest passed") << "\n";
  return failures ? 1 : 0;
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(static_cast<T>(std::stod(item)));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Euler simulation of the Heston model"};
  app.require_subcommand(1);

  auto* price = app.add_subcommand("price", "Price an option: european, asian or barrier");
  std::string product, config_path;
  price->add_option("product", product, "european | asian | barrier")
      ->required()
      ->check(CLI::IsMember({"european", "asian", "barrier"}));
  price->add_option("-c,--config", config_path, "key = value configuration file");
  std::map<std::string, std::string> flag_values;
  for (const auto& k : kKeys) price->add_option("--" + k, flag_values[k], "config key " + k);

  auto* moments = app.add_subcommand("moments", "Moment errors of the conditional integral");
  std::string m_case = "case1", m_vt = "0.04,4,0.000004", m_K = "1,2,3,4,5", m_scheme = "exact-direct", m_dir;
  double m_t = 0;
  std::uint64_t m_n = 100000, m_seed = 1;
  bool m_x2 = false;
  moments->add_option("--case", m_case, "named parameter set");
  moments->add_option("--t", m_t, "horizon (default: the case's)");
  moments->add_option("--vt", m_vt, "comma-separated end variances");
  moments->add_option("--K", m_K, "comma-separated truncation levels");
  moments->add_option("--n_paths", m_n, "draws per (v_t, K)");
  moments->add_option("--seed", m_seed, "seed");
  moments->add_option("--scheme", m_scheme, "exact-direct | exact-gamma-baseline");
  moments->add_option("--tables_dir", m_dir, "table directory");
  moments->add_flag("--x2-bias", m_x2, "measure the X2 rounding bias instead (n_paths = strata)");

  auto* tables = app.add_subcommand("tables", "Audit or regenerate the inverse-CDF tables");
  tables->require_subcommand(1);
  std::string t_dir, t_id = "Y5", t_out;
  int t_grid = 200;
  auto* validate = tables->add_subcommand("validate", "Audit every table and compare with the series oracle");
  validate->add_option("--tables_dir", t_dir, "table directory");
  validate->add_option("--grid", t_grid, "oracle points per table");
  auto* regen = tables->add_subcommand("regen", "Refit one table from the series oracle");
  regen->add_option("--tables_dir", t_dir, "table directory");
  regen->add_option("--id", t_id, "table id (S1, Y5 .. Y2000, Zprime)");
  regen->add_option("--out", t_out, "write the refitted table here");
  regen->add_option("--grid", t_grid, "comparison points");

  auto* selftest = app.add_subcommand("selftest", "Quick consistency checks");
  std::string s_dir;
  selftest->add_option("--tables_dir", s_dir, "table directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (price->parsed()) {
      std::map<std::string, std::string> given;
      for (const auto& k : kKeys)
        if (price->count("--" + k)) given[k] = flag_values[k];
      return run_price(product, config_path, given);
    }
    if (moments->parsed())
      return run_moments(m_case, m_t, parse_list<double>(m_vt), parse_list<int>(m_K), m_n, m_seed, m_scheme, m_dir,
                         m_x2);
    if (validate->parsed()) return run_tables_validate(t_dir, t_grid);
    if (regen->parsed()) return run_tables_regen(t_dir, t_id, t_out, t_grid);
    if (selftest->parsed()) return run_selftest(s_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
