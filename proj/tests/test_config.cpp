#include <doctest.h>

#include "spinprop/config.hpp"

using namespace spinprop;

namespace {

const char* kValid = R"({
  "hamiltonian": [
    {"coeff_re": 1.0, "m": 1, "n": 1},
    {"coeff_re": 0.9, "q": 1},
    {"coeff_re": 0.3, "m": 1, "r": 1},
    {"coeff_re": 0.3, "n": 1, "p": 1}
  ],
  "j": 1.0,
  "hbar": 0.5,
  "boundary": {
    "zp": {"re": 0.2, "im": 0.1},
    "sp": {"re": 0.3, "im": -0.1},
    "zpp": {"re": 0.3, "im": 0.0},
    "spp": {"re": 0.2, "im": 0.25}
  },
  "time": 1.5,
  "tolerances": {"ode": 1e-9, "newton": 1e-9},
  "reference": {"n_max": 32},
  "oracle": {"N_list": [100, 200]},
  "output": {"format": "json"}
})";

std::string patched(const std::string& from, const std::string& to) {
    std::string text = kValid;
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    return text;
}

}  // namespace

TEST_CASE("valid configuration parses with conjugated final labels") {
    RunConfig cfg = RunConfig::from_json_text(kValid);
    CHECK(cfg.hamiltonian.size() == 4);
    CHECK(cfg.size.twoj == 2);
    CHECK(cfg.hbar == 0.5);
    CHECK(!cfg.has_scan);
    CHECK(cfg.T == 1.5);
    CHECK(cfg.tol_ode == 1e-9);
    CHECK(cfg.n_max == 32);
    CHECK(cfg.N_list == std::vector<int>{100, 200});
    CHECK(cfg.format == RunConfig::Format::json);
    BoundaryData bd = cfg.boundary(cfg.T);
    CHECK(bd.zp == cplx(0.2, 0.1));
    CHECK(bd.zpp_conj == std::conj(cplx(0.3, 0.0)));
    CHECK(bd.spp_conj == std::conj(cplx(0.2, 0.25)));
    CHECK(bd.hbar == 0.5);
}

TEST_CASE("time grids produce scan configurations") {
    RunConfig cfg = RunConfig::from_json_text(
        patched("\"time\": 1.5", "\"time\": {\"t_min\": 0.0, \"t_max\": 1.0, \"steps\": 5}"));
    CHECK(cfg.has_scan);
    std::vector<double> t = cfg.scan_times();
    REQUIRE(t.size() == 5);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 1.0);
    CHECK(t[1] == doctest::Approx(0.25));
}

TEST_CASE("unknown keys are rejected at every level") {
    CHECK_THROWS_AS(RunConfig::from_json_text(patched("\"hbar\": 0.5", "\"hbarr\": 0.5")),
                    config_error);
    CHECK_THROWS_AS(
        RunConfig::from_json_text(patched("\"zp\": {\"re\": 0.2, \"im\": 0.1}",
                                          "\"zp\": {\"re\": 0.2, \"imag\": 0.1}")),
        config_error);
    CHECK_THROWS_AS(RunConfig::from_json_text(patched("\"coeff_re\": 1.0, \"m\": 1, \"n\": 1",
                                                      "\"coeff_re\": 1.0, \"mm\": 1")),
                    config_error);
    CHECK_THROWS_AS(RunConfig::from_json_text(patched("\"ode\": 1e-9", "\"odetol\": 1e-9")),
                    config_error);
}

TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(RunConfig::from_json_text(patched("\"j\": 1.0", "\"j\": 0.7")), config_error);
    CHECK_THROWS_AS(RunConfig::from_json_text(patched("\"j\": 1.0", "\"j\": -1.0")), config_error);
    CHECK_THROWS_AS(RunConfig::from_json_text(patched("\"format\": \"json\"",
                                                      "\"format\": \"xml\"")),
                    config_error);
    CHECK_THROWS_AS(RunConfig::from_json_text("not json"), config_error);
}

TEST_CASE("missing required sections are rejected") {
    std::string text = kValid;
    auto pos = text.find("\"boundary\"");
    text.replace(pos, text.find("},\n  \"time\"") + 2 - pos, "");
    CHECK_THROWS_AS(RunConfig::from_json_text(text), config_error);
}
