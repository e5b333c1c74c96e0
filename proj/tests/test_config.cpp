#include "specwave/config.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "specwave/errors.hpp"
#include "specwave/io.hpp"

using specwave::GridSpec;
using specwave::ModelParams;
using specwave::RunConfig;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("default config carries the documented values", "[config]") {
  const RunConfig config;
  REQUIRE(config.params == ModelParams{1.0, 1.0, 1.0, 2});
  REQUIRE(config.L == 30.0);
  REQUIRE(config.N == 1024);
  REQUIRE(config.ic.kind == specwave::IcKind::gaussian);
  REQUIRE(config.ic.amplitude == 1.0);
  REQUIRE(config.ic.width == 1.0);
  REQUIRE(config.psi_t0.kind == specwave::VelocityKind::zero);
  REQUIRE_FALSE(config.control.dt.has_value());
  REQUIRE(config.control.t_max == 2.0);
  REQUIRE(config.control.snapshot_stride == 10);
  REQUIRE(config.control.blowup_threshold == 1e6);
  REQUIRE(config.dealias);
  REQUIRE_FALSE(config.perturbation.has_value());
  REQUIRE(config.outputs.diagnostics == "diagnostics.csv");
  REQUIRE(config.outputs.snapshots == "snapshots.csv");
  REQUIRE(config.outputs.plots == "plots");
  REQUIRE_NOTHROW(specwave::validate_config(config));
}

TEST_CASE("minimal document fills every default", "[config]") {
  const RunConfig parsed = specwave::parse_config(R"({"params": {}})");
  REQUIRE(parsed == RunConfig{});
}

TEST_CASE("config serialization round trips exactly", "[config]") {
  RunConfig config;
  config.params = ModelParams{1.5, -0.25, 3.0, 3};
  config.L = 12.5;
  config.N = 256;
  config.ic.kind = specwave::IcKind::sech2;
  config.ic.amplitude = 0.75;
  config.ic.width = 2.0;
  config.ic.center = -1.5;
  config.control.dt = 1.25e-4;
  config.control.t_max = 0.5;
  config.control.snapshot_stride = 7;
  config.perturbation = specwave::PerturbationConfig{2e-3, 0.25};
  config.outputs.snapshot_times = std::vector<double>{0.0, 0.25, 0.5};

  const std::string text = specwave::serialize_config(config);
  const RunConfig back = specwave::parse_config(text);
  REQUIRE(back == config);
  REQUIRE(specwave::serialize_config(back) == text);
}

TEST_CASE("auto dt survives the round trip as the string form", "[config]") {
  RunConfig config;
  config.control.dt.reset();
  const std::string text = specwave::serialize_config(config);
  REQUIRE(text.find("\"auto\"") != std::string::npos);
  const RunConfig back = specwave::parse_config(text);
  REQUIRE_FALSE(back.control.dt.has_value());
  const RunConfig explicit_dt = specwave::parse_config(R"({"params": {}, "control": {"dt": 0.001}})");
  REQUIRE(explicit_dt.control.dt.has_value());
  REQUIRE(*explicit_dt.control.dt == 0.001);
}

TEST_CASE("unknown keys are rejected with their dotted path", "[config]") {
  try {
    specwave::parse_config(R"({"params": {}, "control": {"dtt": 0.001}})");
    FAIL("expected ConfigError");
  } catch (const specwave::ConfigError& e) {
    REQUIRE(e.path() == "control.dtt");
  }
  try {
    specwave::parse_config(R"({"params": {"alpha4": 1.0}})");
    FAIL("expected ConfigError");
  } catch (const specwave::ConfigError& e) {
    REQUIRE(e.path() == "params.alpha4");
  }
  try {
    specwave::parse_config(R"({"params": {}, "extra": 1})");
    FAIL("expected ConfigError");
  } catch (const specwave::ConfigError& e) {
    REQUIRE(e.path() == "extra");
  }
}

TEST_CASE("malformed documents name the offending field", "[config]") {
  REQUIRE_THROWS_AS(specwave::parse_config("not json"), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::parse_config(R"([1, 2, 3])"), specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::parse_config(R"({"grid": {"L": 30}})"), specwave::ConfigError);
  try {
    specwave::parse_config(R"({"params": {"sigma": 0}})");
    FAIL("expected ConfigError");
  } catch (const specwave::ConfigError& e) {
    REQUIRE(e.path() == "sigma");
    REQUIRE(std::string(e.what()).find("sigma") != std::string::npos);
  }
  try {
    specwave::parse_config(R"({"params": {"sigma": 2.5}})");
    FAIL("expected ConfigError");
  } catch (const specwave::ConfigError& e) {
    REQUIRE(e.path() == "params.sigma");
  }
  REQUIRE_THROWS_AS(specwave::parse_config(R"({"params": {}, "grid": {"N": 100.5}})"),
                    specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::parse_config(R"({"params": {}, "dealias": "yes"})"),
                    specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::parse_config(R"({"params": {}, "ic": {"kind": "square"}})"),
                    specwave::ConfigError);
  REQUIRE_THROWS_AS(specwave::parse_config(R"({"params": {}, "control": {"dt": "fast"}})"),
                    specwave::ConfigError);
}

TEST_CASE("validation rejects inconsistent combinations", "[config]") {
  RunConfig config;
  config.control.dt = 3.0;  // exceeds t_max = 2
  REQUIRE_THROWS_AS(specwave::validate_config(config), specwave::ConfigError);

  RunConfig clash;
  clash.outputs.snapshots = clash.outputs.diagnostics;
  REQUIRE_THROWS_AS(specwave::validate_config(clash), specwave::ConfigError);

  RunConfig late;
  late.outputs.snapshot_times = std::vector<double>{0.0, 5.0};  // beyond t_max = 2
  REQUIRE_THROWS_AS(specwave::validate_config(late), specwave::ConfigError);

  RunConfig missing_path;
  missing_path.ic.kind = specwave::IcKind::file;
  REQUIRE_THROWS_AS(specwave::validate_config(missing_path), specwave::ConfigError);

  RunConfig bad_eps;
  bad_eps.perturbation = specwave::PerturbationConfig{0.0, 2.0};
  REQUIRE_THROWS_AS(specwave::validate_config(bad_eps), specwave::ConfigError);
}

TEST_CASE("presets pin the experiment families", "[config]") {
  const RunConfig fig1 = specwave::preset("fig1");
  REQUIRE(fig1.params == ModelParams{1.0, 1.0, 1.0, 2});
  REQUIRE(fig1.L == 30.0);
  REQUIRE(fig1.N == 1024);
  REQUIRE(fig1.ic.kind == specwave::IcKind::gaussian);
  REQUIRE(fig1.control.dt.has_value());
  REQUIRE(*fig1.control.dt == 5e-4);
  REQUIRE(fig1.control.t_max == 2.0);

  const RunConfig fig2 = specwave::preset("fig2");
  REQUIRE(fig2.params == ModelParams{1.0, 1.0, -1.0, 2});

  const RunConfig fig5 = specwave::preset("fig5");
  REQUIRE(fig5.ic.kind == specwave::IcKind::sech2);
  REQUIRE(fig5.perturbation.has_value());
  REQUIRE(fig5.perturbation->eps == 1e-3);
  REQUIRE(fig5.perturbation->k_p == 2.0);

  const RunConfig blowup = specwave::preset("blowup");
  REQUIRE(blowup.params == ModelParams{-1.0, -1.0, -1.0, 2});

  REQUIRE_THROWS_AS(specwave::preset("fig9"), specwave::ConfigError);
}

TEST_CASE("stability based default step follows the Nyquist frequency cap", "[config]") {
  const RunConfig config;  // L = 30, N = 1024, alphas 1
  const GridSpec grid = specwave::grid_of(config);
  const double k = pi / 30.0 * 512.0;
  const double expected_cap = std::sqrt(k * k + 3.0 * k * k * k * k);
  REQUIRE(std::abs(specwave::omega_cap(config.params, grid) - expected_cap) /
              expected_cap < 1e-15);
  REQUIRE(specwave::default_dt(config.params, grid) == 0.25 / specwave::omega_cap(config.params, grid));
  REQUIRE(specwave::resolved_dt(config, grid) == specwave::default_dt(config.params, grid));

  RunConfig pinned = config;
  pinned.control.dt = 1e-3;
  REQUIRE(specwave::resolved_dt(pinned, grid) == 1e-3);

  // The sign of the coefficients must not matter for the cap.
  ModelParams focusing{-1.0, -1.0, -1.0, 2};
  REQUIRE(specwave::omega_cap(focusing, grid) == specwave::omega_cap(config.params, grid));

  ModelParams dispersionless{0.0, 0.0, 1.0, 2};
  REQUIRE(specwave::default_dt(dispersionless, grid) == 0.25);
}

TEST_CASE("auto dt is capped by a short horizon", "[config]") {
  RunConfig config;
  config.control.t_max = 1e-6;
  const GridSpec grid = specwave::grid_of(config);
  REQUIRE(specwave::resolved_dt(config, grid) == 1e-6);
}

TEST_CASE("snapshot times default to the quarter points", "[config]") {
  RunConfig config;
  config.control.t_max = 2.0;
  const std::vector<double> times = specwave::snapshot_times_of(config);
  REQUIRE(times == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  config.outputs.snapshot_times = std::vector<double>{0.0, 0.1};
  REQUIRE(specwave::snapshot_times_of(config) == std::vector<double>{0.0, 0.1});
  RunConfig frozen;
  frozen.control.t_max = 0.0;
  REQUIRE(specwave::snapshot_times_of(frozen) == std::vector<double>{0.0});
}

TEST_CASE("initial condition builders evaluate their profiles", "[config]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  specwave::IcSpec gauss;
  gauss.kind = specwave::IcKind::gaussian;
  gauss.amplitude = 2.0;
  gauss.width = 3.0;
  gauss.center = 1.0;
  const std::vector<double> g = specwave::build_ic(gauss, grid);
  for (int j = 0; j < 64; ++j) {
    const double u = (grid.node(j) - 1.0) / 3.0;
    CAPTURE(j);
    REQUIRE(std::abs(g[static_cast<std::size_t>(j)] - 2.0 * std::exp(-u * u)) < 1e-15);
  }

  specwave::IcSpec sech;
  sech.kind = specwave::IcKind::sech2;
  const std::vector<double> s = specwave::build_ic(sech, grid);
  for (int j = 0; j < 64; ++j) {
    const double c = std::cosh(grid.node(j));
    CAPTURE(j);
    REQUIRE(std::abs(s[static_cast<std::size_t>(j)] - 1.0 / (c * c)) < 1e-15);
  }
}

TEST_CASE("field files round trip through the reader", "[config]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const std::vector<double> values = oracles::random_real_field(64, 44u);
  const std::string path = "config_field_64.txt";
  {
    std::ofstream out(path);
    for (double v : values) out << specwave::format_double(v) << "\n";
  }
  specwave::IcSpec spec;
  spec.kind = specwave::IcKind::file;
  spec.path = path;
  const std::vector<double> loaded = specwave::build_ic(spec, grid);
  REQUIRE(loaded.size() == values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    CAPTURE(j);
    REQUIRE(loaded[j] == values[j]);
  }
}

TEST_CASE("field files with the wrong shape are rejected", "[config]") {
  const GridSpec grid = specwave::make_grid(30.0, 64);
  const std::string path = "config_field_short.txt";
  {
    std::ofstream out(path);
    out << "1.0 2.0 3.0\n";
  }
  specwave::IcSpec spec;
  spec.kind = specwave::IcKind::file;
  spec.path = path;
  try {
    specwave::build_ic(spec, grid);
    FAIL("expected ConfigError");
  } catch (const specwave::ConfigError& e) {
    REQUIRE(e.path() == "ic.path");
  }
  spec.path = "does_not_exist.txt";
  REQUIRE_THROWS_AS(specwave::build_ic(spec, grid), specwave::IoError);
  const std::string garbled = "config_field_garbled.txt";
  {
    std::ofstream out(garbled);
    out << "1.0 two 3.0\n";
  }
  spec.path = garbled;
  REQUIRE_THROWS_AS(specwave::build_ic(spec, grid), specwave::ConfigError);
}

TEST_CASE("initial state applies the zero velocity default", "[config]") {
  RunConfig config;
  config.N = 64;
  const GridSpec grid = specwave::grid_of(config);
  const specwave::FieldPair state = specwave::initial_state(config, grid);
  REQUIRE(state.psi.size() == 64);
  REQUIRE(state.psi_t.size() == 64);
  for (double v : state.psi_t) REQUIRE(v == 0.0);
  REQUIRE(state.psi[32] == 1.0);  // node at x = 0
}
