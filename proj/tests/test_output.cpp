#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lwfr/lwfr.hpp"

using namespace lwfr;

namespace {

Solver1D<2, Euler1D> small_sod() {
  const auto c = cases::sod({});
  Solver1D<2, Euler1D> s(c.eq, c.mesh(4), c.left, c.right);
  s.set_initial([&](double x, int e) { return c.initial(x, e, s.mesh()); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(tok);
  return out;
}

}  // namespace

TEST(SnapshotCsv, HeaderAndColumns) {
  auto s = small_sod();
  std::ostringstream os;
  write_snapshot_csv(os, s, "sod");
  std::istringstream is(os.str());
  std::string l1, l2, l3;
  std::getline(is, l1);
  std::getline(is, l2);
  std::getline(is, l3);
  EXPECT_EQ(l1, "# lwfr-snapshot schema_version=1");
  EXPECT_EQ(l2.rfind("# case=sod degree=2 t=0", 0), 0u);
  EXPECT_EQ(l3, "x,element,rho,rho_v,E,v,p,alpha");
  int rows = 0;
  for (std::string line; std::getline(is, line); ++rows) EXPECT_EQ(split(line).size(), 8u);
  EXPECT_EQ(rows, 4 * 3);
}

TEST(SnapshotCsv, TwoDimensionalColumns) {
  EXPECT_EQ(snapshot_columns(Euler2D{}),
            (std::vector<std::string>{"x", "y", "ex", "ey", "rho", "rho_u", "rho_v", "E", "u", "v", "p", "alpha"}));
  EXPECT_EQ(snapshot_columns(Advection2D{}), (std::vector<std::string>{"x", "y", "ex", "ey", "u", "alpha"}));
}

TEST(SnapshotJson, CarriesRowsAndSchema) {
  auto s = small_sod();
  const auto j = snapshot_json(s, "sod");
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["kind"], "lwfr-snapshot");
  EXPECT_EQ(j["rows"].size(), 12u);
  EXPECT_EQ(j["rows"][0].size(), j["columns"].size());
  // primitive columns agree with the conserved ones
  const auto& r = j["rows"][0];
  EXPECT_NEAR(r[5].get<double>(), r[3].get<double>() / r[2].get<double>(), 1e-15);
}

TEST(SnapshotName, EncodesIndexAndTime) {
  EXPECT_EQ(snapshot_name("sod", 3, 0.2, "csv"), "sod_0003_t2.000000e-01.csv");
}

TEST(Manifest, RoundTripAndValidation) {
  auto s = small_sod();
  const auto m0 = s.totals();
  s.advance_to(0.01);
  RunConfig rc;
  rc.case_name = "sod";
  const auto m = run_manifest(s, nlohmann::json(rc), m0, 0.5, {"a.csv"});
  EXPECT_NO_THROW(validate_manifest(m));
  EXPECT_EQ(m["steps"], s.stats().steps);
  EXPECT_EQ(m["alpha"]["history"].size(), static_cast<std::size_t>(s.stats().steps));
  for (double r : m["conservation"]["relative_residual"]) EXPECT_LT(r, 1e-13);
  auto bad = m;
  bad["schema_version"] = 2;
  EXPECT_THROW(validate_manifest(bad), ConfigError);
  auto missing = m;
  missing.erase("alpha");
  EXPECT_THROW(validate_manifest(missing), ConfigError);
  EXPECT_THROW(validate_manifest(nlohmann::json::array()), ConfigError);
}

TEST(AlphaHistory, ThinnedKeepsLast) {
  std::vector<AlphaSample> h;
  for (int k = 0; k < 2501; ++k) h.push_back({k * 1.0, 0.1, 0.2});
  const auto j = alpha_history_json(h, 1000);
  EXPECT_LE(j.size(), 1001u);
  EXPECT_EQ(j.back()["t"], 2500.0);
  EXPECT_TRUE(alpha_history_json({}).empty());
}

TEST(Conservation, ResidualAccountsForInflow) {
  const auto j = conservation_json(Vec<1>{1.0}, Vec<1>{1.5}, Vec<1>{0.5});
  EXPECT_EQ(j["residual"][0], 0.0);
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.case_name = "shu_osher";
  c.degree = 3;
  c.cells = {200};
  c.limiter = "blend-fo";
  c.gamma = 1.3;
  c.indicator.alpha_max = 0.8;
  c.flux_correction = false;
  const nlohmann::json j = c;
  const auto back = j.get<RunConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(*back.gamma, 1.3);
  EXPECT_EQ(back.indicator.alpha_max, 0.8);
}

TEST(RunConfig, UnknownKeyAndBadValuesRejected) {
  EXPECT_THROW(nlohmann::json({{"case", "sod"}, {"cels", 4}}).get<RunConfig>(), ConfigError);
  RunConfig c;
  EXPECT_THROW(c.validate(), ConfigError);
  c.case_name = "sod";
  EXPECT_NO_THROW(c.validate());
  c.format = "xml";
  EXPECT_THROW(c.validate(), ConfigError);
  c.format = "csv";
  c.limiter = "weno";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, LoadFromFileAndApply) {
  const auto path = (std::filesystem::temp_directory_path() / "lwfr_cfg_test.json").string();
  {
    std::ofstream os(path);
    os << R"({"case": "sod", "cells": 64, "nodes": "gll", "mean_audit": true, "limiter": "tvb"})";
  }
  const auto c = load_config(path);
  EXPECT_EQ(c.cells, std::vector<int>{64});
  SolverOptions o;
  c.apply(o);
  EXPECT_EQ(o.family, NodeFamily::GaussLobatto);
  EXPECT_TRUE(o.mean_audit);
  EXPECT_EQ(o.limiter, LimiterKind::TVB);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), ConfigError);
}
