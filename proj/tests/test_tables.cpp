#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hexact/cheb_table.hpp"
#include "hexact/errors.hpp"
#include "hexact/rng.hpp"
#include "stats.hpp"

using namespace hexact;

namespace {

const char* const kAllTables[] = {"S1",  "S10",  "S50",  "S5000", "S10000", "S100000", "S1000000", "Zprime", "Y5",
                                  "Y10", "Y20",  "Y50",  "Y100",  "Y200",   "Y500",    "Y1000",    "Y2000"};

std::string table_path(const std::string& id) { return std::string(HEXACT_DATA_DIR) + "/" + id + ".tbl"; }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tables: P=1 left regime loaded verbatim") {
  const auto t = load_table(table_path("S1"));
  REQUIRE(t.regimes.size() == 5);
  const auto& r = t.regimes[0];
  CHECK(r.coeffs[0] == 1.870164486816790e-01);
  CHECK(r.u_right == 0.2);
  CHECK(r.k1 == 1.059586512649680e+01);
  CHECK(r.k2 == -1.186186343393790e+00);
  CHECK(r.coeff_text[0] == "1.870164486816790e-01");
  CHECK(r.kind == ScalingKind::ReciprocalLogLeft);
  CHECK_FALSE(t.standardized);
}

TEST_CASE("tables: every shipped file round-trips byte for byte") {
  for (const char* id : kAllTables) {
    const std::string text = slurp(table_path(id));
    const auto t = parse_table(text, id);
    CHECK_MESSAGE(serialize_table(t) == text, id);
  }
}

TEST_CASE("tables: h = 1/100 regime layout") {
  const auto t = load_table(table_path("Y100"));
  REQUIRE(t.regimes.size() == 5);
  const double bounds[] = {0.3364, 0.7854, 0.9936, 0.9997};
  const int ncoef[] = {24, 19, 18, 19, 31};
  for (int i = 0; i < 5; ++i) {
    if (i < 4) CHECK(std::fabs(t.regimes[i].u_right - bounds[i]) < 5e-5);  // quoted to 4 decimals
    CHECK(static_cast<int>(t.regimes[i].coeffs.size()) == ncoef[i]);
  }
}

TEST_CASE("tables: monotone on the audit grid, seams continuous, z within range") {
  for (const char* id : kAllTables) {
    const auto t = load_table(table_path(id));
    const auto rep = audit_table(t, 10000);
    CHECK_MESSAGE(rep.max_z_overshoot <= kZRangeTol, id);
    CHECK_MESSAGE(rep.max_seam_jump <= 1e-9, id << " seam " << rep.max_seam_jump);
    // Spot check: u and u + 1e-6 give a nondecreasing pair.
    for (double u : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999})
      CHECK_MESSAGE(quantile(t, u) <= quantile(t, u + 1e-6), id << " u=" << u);
  }
}

TEST_CASE("tables: scaling examples and inverse maps") {
  auto t = load_table(table_path("S1"));
  RegimeSpec r;
  r.u_right = 0.5;
  r.kind = ScalingKind::LogLogTail;
  CHECK(scale_u(t, r, 1 - std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-15));
  r.kind = ScalingKind::GammaLogRight;
  CHECK(scale_u(t, r, 1 - std::exp(-7.5) / std::tgamma(2.5)) == doctest::Approx(1.0).epsilon(1e-12));
  const auto t10 = load_table(table_path("S10"));
  r.kind = ScalingKind::CentralProduct;
  CHECK(scale_u(t10, r, *t10.anchor) == 0.0);

  for (auto kind : {ScalingKind::LogLogTail, ScalingKind::LogLogLeft, ScalingKind::CentralProduct,
                    ScalingKind::CentralProductLeft, ScalingKind::LinearCentral, ScalingKind::ReciprocalLogLeft,
                    ScalingKind::GammaLogRight, ScalingKind::GammaRateRight}) {
    r.kind = kind;
    for (double u : {0.05, 0.3, 0.6, 0.95}) {
      const double back = unscale_u(t10, r, scale_u(t10, r, u));
      CHECK_MESSAGE(back == doctest::Approx(u).epsilon(1e-12), to_string(kind) << " u=" << u);
    }
  }
}

TEST_CASE("tables: clipping is counted") {
  const auto t = load_table(table_path("S1"));
  reset_clip_count();
  CHECK(quantile(t, 0.0) == quantile(t, kTableUMin));
  CHECK(quantile(t, 1.0) == quantile(t, kTableUMax));
  CHECK(clip_count() == 2);
  (void)quantile(t, 0.5);
  CHECK(clip_count() == 2);
}

TEST_CASE("tables: parser rejects malformed input") {
  const std::string good = slurp(table_path("S1"));
  auto mutate = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  CHECK_THROWS_AS((void)parse_table(mutate("RECIPROCAL_LOG_LEFT", "SQUARE_ROOT_LEFT")), TableError);
  CHECK_THROWS_AS((void)parse_table(mutate("c 1.870164486816790e-01", "c 1.87016448681679x-01")), TableError);
  CHECK_THROWS_AS((void)parse_table(mutate("degree 24", "degree 23")), TableError);
  CHECK_THROWS_AS((void)parse_table(mutate("regimes 5", "regimes 4")), TableError);
  // Overlapping regimes: second boundary moved below the first.
  const auto second = good.find("u_right", good.find("regime 2"));
  std::string overlap = good;
  overlap.replace(second, overlap.find('\n', second) - second, "u_right 1.000000000000000e-01");
  try {
    (void)parse_table(overlap, "overlap");
    FAIL("overlap accepted");
  } catch (const TableError& e) {
    CHECK(std::string(e.what()).find("regime 2") != std::string::npos);
  }
}

TEST_CASE("tables: destandardized large-P draws have mean P/3") {
  constexpr int n = 1'000'000;
  for (const char* id : {"S10", "S50"}) {
    const auto t = load_table(table_path(id));
    REQUIRE(t.standardized);
    RngStream rng(11);
    teststats::Moments m;
    for (int i = 0; i < n; ++i) m.add(quantile(t, rng.next_uniform()));
    const double P = t.parameter;
    CHECK_MESSAGE(std::fabs(m.mean - P / 3) < 3 * std::sqrt(2 * P / 45) / std::sqrt(n), id << " mean " << m.mean);
  }
}
