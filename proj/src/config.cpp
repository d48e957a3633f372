#include "hexact/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hexact/errors.hpp"

namespace hexact {

namespace {

struct NamedCase {
  const char* name;
  HestonParams params;
};

// kappa, theta, sigma, rho, r, v0, s0, t
const NamedCase kCases[] = {
    {"case1", {0.5, 0.04, 1.0, -0.9, 0.0, 0.04, 100.0, 10.0}},
    {"case2", {0.3, 0.04, 0.9, -0.5, 0.0, 0.04, 100.0, 15.0}},
    {"case3", {1.0, 0.09, 1.0, -0.3, 0.05, 0.09, 100.0, 5.0}},
    {"case4", {6.21, 0.019, 0.61, -0.7, 0.0319, 0.010201, 100.0, 1.0}},
    {"asian", {1.0407, 0.0586, 0.5196, -0.6747, 0.0, 0.0194, 100.0, 4.0}},
    {"barrier", {0.5, 0.04, 1.0, 0.0, 0.0, 0.04, 100.0, 1.0}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("config: key '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  // Accept integral values written in floating form (1e6).
  const double x = to_double(key, v);
  if (x != std::floor(x) || x < 0 || x > 9.0e15)
    throw ConfigError("config: key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  return static_cast<Int>(x);
}

}  // namespace

std::vector<std::string> named_cases() {
  std::vector<std::string> out;
  for (const auto& c : kCases) out.emplace_back(c.name);
  return out;
}

HestonParams named_case(std::string_view name) {
  for (const auto& c : kCases)
    if (name == c.name) return c.params;
  throw ConfigError("unknown case '" + std::string(name) + "' (expected case1..case4, asian or barrier)");
}

int RunConfig::euler_steps_to_horizon() const {
  if (steps <= 0) return 0;
  return std::max(1, static_cast<int>(std::lround(steps * params.t)));
}

int RunConfig::resolved_fixings() const {
  if (fixings > 0) return fixings;
  return std::max(1, static_cast<int>(std::lround(params.t)));
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto& p = cfg.params;
  if (key == "case") {
    p = named_case(v);
    cfg.case_name = v;
  } else if (key == "kappa") {
    p.kappa = to_double(key, v);
  } else if (key == "theta") {
    p.theta = to_double(key, v);
  } else if (key == "sigma") {
    p.sigma = to_double(key, v);
  } else if (key == "rho") {
    p.rho = to_double(key, v);
  } else if (key == "t") {
    p.t = to_double(key, v);
  } else if (key == "v0") {
    p.v0 = to_double(key, v);
  } else if (key == "s0") {
    p.s0 = to_double(key, v);
  } else if (key == "r") {
    p.mu = to_double(key, v);
  } else if (key == "scheme") {
    try {
      cfg.sim.scheme = parse_scheme(v);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (key == "K") {
    cfg.sim.K = to_int<int>(key, v);
  } else if (key == "n_paths") {
    cfg.sim.n_paths = to_int<std::uint64_t>(key, v);
  } else if (key == "steps") {
    cfg.steps = to_int<int>(key, v);
  } else if (key == "seed") {
    // Full 64-bit range, so parse as an integer rather than through double.
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw ConfigError("config: key 'seed' expects an unsigned 64-bit integer, got '" + v + "'");
    cfg.sim.seed = s;
  } else if (key == "threads") {
    cfg.sim.threads = to_int<unsigned>(key, v);
  } else if (key == "tables_dir") {
    cfg.tables_dir = v;
  } else if (key == "output") {
    cfg.output = v;
  } else if (key == "strike") {
    cfg.strike = to_double(key, v);
  } else if (key == "lower") {
    cfg.lower = to_double(key, v);
  } else if (key == "upper") {
    cfg.upper = v == "inf" ? INFINITY : to_double(key, v);
  } else if (key == "fixings") {
    cfg.fixings = to_int<int>(key, v);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_config(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [k, v] : entries)
    if (k == "case") apply_config_value(cfg, k, v);
  for (const auto& [k, v] : entries)
    if (k != "case") apply_config_value(cfg, k, v);
}

std::string csv_header() { return "scheme,case,strike,estimate,std_error,n_paths,K,proposals_mean,seconds"; }

std::string csv_row(const std::string& case_name, const std::string& strike, const PricingReport& r) {
  std::ostringstream out;
  out << to_string(r.scheme) << ',' << case_name << ',' << strike << ',' << std::setprecision(10) << r.estimate << ','
      << r.standard_error << ',' << r.n_paths << ',' << r.K << ',' << r.proposals_mean << ',' << std::setprecision(4)
      << r.seconds;
  return out.str();
}

void append_csv(const std::string& path, const std::string& case_name, const std::string& strike,
                const PricingReport& r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const bool fresh = !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw ConfigError("cannot open output '" + path + "'");
  if (fresh) f << csv_header() << '\n';
  f << csv_row(case_name, strike, r) << '\n';
}

}  // namespace hexact
