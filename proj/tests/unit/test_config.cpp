#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "eefluct/commands.hpp"
#include "eefluct/config.hpp"
#include "eefluct/error.hpp"
#include "eefluct/output.hpp"

using namespace eefluct;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("eefluct-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += !line.empty() && line[0] != '#';
  return n - 1;  // header
}

std::string error_message(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("paper defaults") {
  const RunConfig c = resolve_config({});
  CHECK(c.fermi_energy == 1.0);
  CHECK(c.n_realizations == 2000);
  CHECK(c.n_sites == 5000);
  CHECK(c.block_len == 2500);
  CHECK(c.command == Command::EntropyScan);
  const auto j = to_json(c);
  CHECK(j["chain"]["fermi_energy"] == 1.0);
  CHECK(j["run"]["n_realizations"] == 2000);

  const RunConfig q = resolve_config({{"run.profile", "quick"}});
  CHECK(q.n_sites == 1000);
  CHECK(q.n_realizations == 200);
}

TEST_CASE("ini parsing and precedence") {
  const auto file = parse_config_text(R"(
; comment
[run]
command = density
seed = 77
alpha = inf
[disorder]
family = half-cauchy   # trailing comment
delta = 0.7
[chain]
n_sites = 400
block_len = 41
)");
  const RunConfig c = resolve_config(file, {{"disorder.delta", "0.4"}});
  CHECK(c.command == Command::Density);
  CHECK(c.master_seed == 77);
  CHECK(std::isinf(c.alpha));
  CHECK(c.disorder == DisorderSpec(Family::HalfCauchy, 0.4));
  CHECK(c.n_sites == 400);
  CHECK(c.chain().block == Block{179, 41});
}

TEST_CASE("validation errors name the key") {
  CHECK(error_message([] { resolve_config({{"disorder.dleta", "1"}}); }).find("dleta") != std::string::npos);
  CHECK(error_message([] { resolve_config({{"dleta", "1"}}); }).find("dleta") != std::string::npos);
  CHECK(error_message([] {
          resolve_config({{"chain.n_sites", "100"}, {"chain.block_len", "101"}});
        }).find("block_len") != std::string::npos);
  CHECK(error_message([] { resolve_config({{"disorder.delta", "-1"}}); }).find("disorder.delta") != std::string::npos);
  CHECK(error_message([] { resolve_config({{"run.alpha", "0"}}); }).find("run.alpha") != std::string::npos);
  CHECK(error_message([] { resolve_config({{"run.n_realizations", "12x"}}); }).find("n_realizations") != std::string::npos);
  CHECK_THROWS_AS(parse_config_text("key = 1\n"), Error);
}

TEST_CASE("json round trip") {
  const RunConfig c = resolve_config({{"run.command", "bound-curve"},
                                      {"run.alpha", "inf"},
                                      {"chain.shift_site", "3"},
                                      {"grid.t", "0.5,1,2"}});
  const RunConfig back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(back == c);
}

TEST_CASE("number formatting and csv") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e300) == "1e+300");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(NAN) == "nan");
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
  CHECK(t.render(nlohmann::json{{"k", 1}}) == "#{\"k\":1}\na,b\n1,2\n");
}

TEST_CASE("atomic writes") {
  TempDir dir;
  const auto p = dir.path / "out.csv";
  write_file_atomic(p, "first\n");
  write_file_atomic(p, "second\n");
  CHECK(slurp(p) == "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_file_atomic(dir.path / "missing" / "x.csv", "x"), Error);
}

TEST_CASE("commands") {
  TempDir dir;
  std::ostringstream log;
  auto cfg_for = [&](KeyValues kv) {
    kv.emplace_back("run.output", (dir.path / "out.csv").string());
    return resolve_config({}, kv);
  };

  SUBCASE("lyapunov table grid gives 15 rows") {
    const auto cfg = cfg_for({{"run.command", "lyapunov"}, {"lyapunov.n_steps", "100000"}});
    CHECK(run(cfg, log) == 0);
    CHECK(data_rows(cfg.output_path) == 15);
    const auto header = slurp(cfg.output_path);
    CHECK(header.find("family,delta,energy,gamma,gamma_stderr,radius,n_steps,seed") != std::string::npos);
  }

  SUBCASE("density sample-count boundary") {
    const KeyValues base{{"run.command", "density"},
                         {"chain.n_sites", "200"},
                         {"chain.block_len", "21"}};
    auto ok = base;
    ok.emplace_back("run.n_realizations", "60");
    const auto cfg = cfg_for(ok);
    CHECK(run(cfg, log) == 0);
    CHECK(data_rows(samples_path(cfg.output_path)) == 60);
    auto few = base;
    few.emplace_back("run.n_realizations", "40");
    std::ostringstream err;
    CHECK(run(cfg_for(few), err) != 0);
    CHECK(err.str().find("TooFewSamples") != std::string::npos);
  }

  SUBCASE("bound curve rejects the uniform family without writing") {
    const auto cfg = cfg_for({{"run.command", "bound-curve"}, {"disorder.family", "uniform"}});
    std::ostringstream err;
    CHECK(run(cfg, err) != 0);
    CHECK(err.str().find("UnsupportedFamily") != std::string::npos);
    CHECK_FALSE(fs::exists(cfg.output_path));
  }

  SUBCASE("metadata reruns the identical job") {
    const auto cfg = cfg_for({{"run.command", "entropy-scan"},
                              {"chain.n_sites", "150"},
                              {"run.n_realizations", "12"},
                              {"grid.L", "11,31,75"},
                              {"run.seed", "1234"}});
    CHECK(run(cfg, log) == 0);
    const auto first = slurp(cfg.output_path);
    const RunConfig again = config_from_output(cfg.output_path);
    CHECK(again == cfg);
    CHECK(run(again, log) == 0);
    CHECK(slurp(cfg.output_path) == first);
  }

  SUBCASE("hcr self-test") {
    const auto cfg = cfg_for({{"run.command", "hcr-selftest"}, {"hcr.draws", "200000"}});
    CHECK(run(cfg, log) == 0);
    CHECK(data_rows(cfg.output_path) == 1);
  }
}
