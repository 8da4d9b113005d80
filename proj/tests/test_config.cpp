#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nlsrep/config.hpp"
#include "nlsrep/error.hpp"

using namespace nlsrep;

namespace {

const char* kBasic = R"(
[equation]
d = 3
c = 1
sigma = 1
alpha = 2
nonlinearity = defocusing

[grid]
mode = radial
n = 1024
extent = 128

[initial]
type = gaussian
amplitude = 0.01
width = 1.4142135623730951

[evolve]
dt0 = 5e-3
t_end = 20
record_interval = 0.1
checkpoint_stride = 10

[observables]
R = 8, 16, 32

[output]
dir = out/run1
)";

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::resource;
}

}  // namespace

TEST_CASE("SHA-256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parse fills every section") {
  const auto cfg = parse_config(kBasic, "/base");
  CHECK(cfg.equation.d == 3);
  CHECK(cfg.equation.sign == Nonlinearity::defocusing);
  CHECK(cfg.grid.mode == GridMode::radial);
  CHECK(cfg.grid.n == 1024);
  CHECK(cfg.initial.amplitude == 0.01);
  CHECK(cfg.evolve.dt0 == 5e-3);
  CHECK(cfg.evolve.checkpoint_stride == 10);
  REQUIRE(cfg.evolve.R_list.size() == 3);
  CHECK(cfg.evolve.R_list[2] == 32.0);
  CHECK(cfg.output_dir == std::filesystem::path("/base/out/run1"));
  CHECK(cfg.evolve.adaptivity == Adaptivity::fixed);
  CHECK(cfg.reference.grid.n == 4096);
}

TEST_CASE("canonical form round trips and fixes the hash") {
  const auto cfg = parse_config(kBasic);
  const auto again = parse_config(cfg.canonical());
  CHECK(again.canonical() == cfg.canonical());
  CHECK(again.hash() == cfg.hash());
  CHECK(cfg.hash().size() == 64);
  // Formatting of the source does not matter.
  std::string spaced = kBasic;
  spaced.replace(spaced.find("dt0 = 5e-3"), 10, "dt0=0.005");
  CHECK(parse_config(spaced).hash() == cfg.hash());
}

TEST_CASE("hash ignores the output section only") {
  const auto a = parse_config(kBasic);
  std::string t = kBasic;
  t.replace(t.find("out/run1"), 8, "elsewhere");
  CHECK(parse_config(t).hash() == a.hash());
  t = kBasic;
  t.replace(t.find("t_end = 20"), 10, "t_end = 21");
  CHECK(parse_config(t).hash() != a.hash());
}

TEST_CASE("rejections") {
  CHECK(code_of("[nonsense]\nx = 1\n") == ErrorCode::config_invalid);
  CHECK(code_of("[grid]\nbogus = 1\n") == ErrorCode::config_invalid);
  CHECK(code_of("[grid]\nn = 1000\n") == ErrorCode::config_invalid);
  CHECK(code_of("[grid]\nn = abc\n") == ErrorCode::config_invalid);
  CHECK(code_of("[equation]\nd = 4\n") == ErrorCode::config_invalid);
  CHECK(code_of("[evolve]\ndt0 = -1\n") == ErrorCode::config_invalid);
  CHECK(code_of("[observables]\nR = 4\n") == ErrorCode::config_invalid);
  CHECK(code_of("[grid]\nmode = radial\n[initial]\ncenter = 1\n") == ErrorCode::config_invalid);
  CHECK(code_of("[sweep]\nworkers = 0\n") == ErrorCode::config_invalid);
  CHECK(code_of("[equation\n") == ErrorCode::config_invalid);
}

TEST_CASE("defaults parse from an empty file") {
  const auto cfg = parse_config("");
  CHECK(cfg.equation.d >= 1);
  CHECK(cfg.grid.n == 512);
  CHECK(cfg.seed == 0);
  CHECK(cfg.random_fields == 100);
}

TEST_CASE("load_config resolves paths next to the file") {
  const auto dir = std::filesystem::temp_directory_path() / "nlsrep_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "exp.ini";
  std::ofstream(path) << kBasic;
  const auto cfg = load_config(path);
  CHECK(cfg.output_dir == dir / "out/run1");
  try {
    load_config(dir / "missing.ini");
    FAIL("expected resource error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resource);
  }
  std::filesystem::remove_all(dir);
}
