#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "hz/cli.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace hz;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kReference = fs::path(HZ_SOURCE_DIR) / "config" / "reference_schottky.json";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json reference_json() { return json::parse(slurp(kReference)); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hz_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the hzeta binary; returns the exit status and leaves stderr in `log`.
int hzeta(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + HZ_CLI_PATH + "\" " + args + " > /dev/null 2> \"" + log.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string schema_path(const json& j) {
  try {
    cli::parse_config(j.dump(), ".");
  } catch (const SchemaError& e) {
    return e.path;
  }
  return "";
}

json matrix_json(const MoebiusMap& m) {
  json out = json::array();
  for (cplx v : {m.a(), m.b(), m.c(), m.d()}) out.push_back({v.real(), v.imag()});
  return out;
}

json generators_json() {
  const auto& g = testing::reference_group();
  return json::array({{{"label", "a"}, {"inverse_label", "A"}, {"matrix", matrix_json(g.matrix(g.index_of("a")))}},
                      {{"label", "b"}, {"inverse_label", "B"}, {"matrix", matrix_json(g.matrix(g.index_of("b")))}}});
}

}  // namespace

TEST_CASE("reference config") {
  const auto c = cli::load_config(kReference);
  CHECK(c.partition.size() == 4);
  CHECK(c.discretization.nodes == 24);
  CHECK(c.L_max == 18.0);
  CHECK(c.s_grid.size() == 9);
  CHECK(c.observables.size() == 4);
  CHECK(!c.word_cutoff);
  CHECK(c.hash.rfind("sha256:", 0) == 0);
  CHECK(c.hash.size() == 7 + 64);
  CHECK(c.hash == cli::load_config(kReference).hash);
  // the generators agree with the symmetric construction
  const auto& ref = testing::reference_group();
  for (int i = 0; i < 4; ++i) CHECK(c.partition.group().matrix(i) == ref.matrix(i));
  // canonical text has sorted keys
  const json canon = json::parse(c.canonical);
  CHECK(canon.dump() == c.canonical);
  CHECK(c.canonical.find("\"L_max\"") < c.canonical.find("\"group\""));
}

TEST_CASE("overrides enter the hash") {
  const auto base = cli::load_config(kReference);
  const auto n = cli::load_config(kReference, {32, std::nullopt, 1.0});
  CHECK(n.discretization.nodes == 32);
  CHECK(n.hash != base.hash);
  const auto l = cli::load_config(kReference, {std::nullopt, 12.0, 1.0});
  CHECK(l.L_max == 12.0);
  CHECK(l.hash != base.hash);
  const auto t = cli::load_config(kReference, {std::nullopt, std::nullopt, 10.0});
  CHECK(t.tolerances.residue == doctest::Approx(1e-4));
  CHECK(t.hash != base.hash);
}

TEST_CASE("schema violations name the field") {
  json j = reference_json();
  j["group"]["schottky"][1].erase("inverse_label");
  CHECK(schema_path(j) == "group.schottky[1].inverse_label");

  j = reference_json();
  j["group"]["schottky"][1]["inverse_label"] = "a";
  CHECK(schema_path(j) == "group.schottky[1].inverse_label");

  j = reference_json();
  j["group"]["schottky"][0]["inverse_label"] = "a";
  CHECK(schema_path(j) == "group.schottky[0].inverse_label");

  j = reference_json();
  j["tolerances"]["residue"] = -1e-5;
  CHECK(schema_path(j) == "tolerances.residue");
  j["tolerances"] = {{"residu", 1e-5}};
  CHECK(schema_path(j) == "tolerances.residu");

  j = reference_json();
  j["schema_version"] = 2;
  CHECK(schema_path(j) == "schema_version");
  j.erase("schema_version");
  CHECK(schema_path(j) == "schema_version");

  j = reference_json();
  j["observables"][2] = "nope";
  CHECK(schema_path(j) == "observables[2]");
  j["observables"] = json::array();
  CHECK(schema_path(j) == "observables");

  j = reference_json();
  j["resonance_window"]["re_min"] = 0.01;
  CHECK(schema_path(j) == "resonance_window.re_min");

  j = reference_json();
  j["N"] = 2.5;
  CHECK(schema_path(j) == "N");
  j = reference_json();
  j["s_grid"]["im"] = {0.0, "x"};
  CHECK(schema_path(j) == "s_grid.im[1]");
  j = reference_json();
  j["extra"] = 1;
  CHECK(schema_path(j) == "extra");
  j = reference_json();
  j["group"]["schottky"][0]["disc"]["radius_angle"] = 1.2;  // overlaps the disc of b
  CHECK(schema_path(j) == "group.schottky");
  CHECK(schema_path(json::parse("[1, 2]")) == "$");
  CHECK_THROWS_AS(cli::parse_config("{not json", "."), SchemaError);
  CHECK_THROWS_AS(cli::load_config(kReference, {std::nullopt, std::nullopt, -1.0}), SchemaError);
}

TEST_CASE("generator matrices and coding tables describe the same group") {
  const auto& ref = testing::reference_group();
  for (int i = 0; i < 4; ++i) {
    const SchottkyDisc d = cli::isometric_disc(ref.matrix(i));
    CHECK(std::abs(std::remainder(d.center - ref.discs()[i].center, kTwoPi)) < 1e-12);
    CHECK(d.radius == doctest::Approx(ref.discs()[i].radius).epsilon(1e-12));
  }
  const auto base = cli::load_config(kReference);
  const auto spectrum_of = [](const cli::RunConfig& c) {
    return length_spectrum(c.partition.group(), 10.0, c.word_cutoff);
  };
  const auto expect = spectrum_of(base);

  json j = reference_json();
  j["group"] = {{"generators", generators_json()}};
  const auto gen = cli::parse_config(j.dump(), ".");
  CHECK(gen.partition.group().kind() == GroupKind::schottky);
  CHECK(gen.hash != base.hash);

  const fs::path dir = scratch("coding");
  json table = json::parse(coding_table_json(base.partition));
  table["generators"] = generators_json();
  std::ofstream(dir / "table.json") << table.dump(2);
  j["group"] = {{"coding_table", "table.json"}};
  const auto coded = cli::parse_config(j.dump(), dir);
  CHECK(coded.partition.size() == 4);

  for (const auto* c : {&gen, &coded}) {
    const auto got = spectrum_of(*c);
    REQUIRE(got.size() == expect.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].length == doctest::Approx(expect[k].length).epsilon(1e-12));
      CHECK(got[k].count == expect[k].count);
    }
  }

  j["group"] = {{"coding_table", "missing.json"}};
  CHECK(schema_path(j) == "group.coding_table");
  table["generators"][0].erase("inverse_label");
  std::ofstream(dir / "table.json", std::ios::trunc) << table.dump(2);
  j["group"] = {{"coding_table", "table.json"}};
  try {
    cli::parse_config(j.dump(), dir);
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.path == "group.coding_table:generators[0].inverse_label");
  }
  j["group"] = {{"generators", generators_json()}, {"coding_table", "table.json"}};
  CHECK(schema_path(j) == "group");
}

TEST_CASE("malformed config exits with status 2") {
  const fs::path dir = scratch("malformed");
  json j = reference_json();
  j["group"]["schottky"][0].erase("inverse_label");
  std::ofstream(dir / "bad.json") << j.dump(2);
  CHECK(hzeta("spectrum --config " + (dir / "bad.json").string() + " --out " + (dir / "out").string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("group.schottky[0].inverse_label") != std::string::npos);
  CHECK(!fs::exists(dir / "out"));
  CHECK(hzeta("spectrum --config " + (dir / "absent.json").string(), dir / "log") == 2);
  CHECK(hzeta("spectrum --config " + kReference.string() + " --threads 0", dir / "log") == 2);
}

TEST_CASE("spectrum and zeta files carry the metadata header") {
  const fs::path dir = scratch("files");
  const std::string cfg = "--config " + kReference.string();
  REQUIRE(hzeta("spectrum " + cfg + " --l-max 8 --out " + (dir / "a").string(), dir / "log") == 0);
  const std::string csv = slurp(dir / "a" / "length_spectrum.csv");
  const std::string hash = cli::load_config(kReference, {std::nullopt, 8.0, 1.0}).hash;
  CHECK(csv.rfind("# tool_version: " + std::string(cli::kToolVersion) + "\n# config_hash: " + hash + "\n", 0) == 0);
  CHECK(csv.find("length,count,words\n2.63391579384963") != std::string::npos);

  REQUIRE(hzeta("zeta " + cfg + " --out " + (dir / "a").string(), dir / "log") == 0);
  REQUIRE(hzeta("zeta " + cfg + " --threads 3 --out " + (dir / "b").string(), dir / "log") == 0);
  const std::string z = slurp(dir / "a" / "zeta_grid.csv");
  CHECK(z == slurp(dir / "b" / "zeta_grid.csv"));
  CHECK(z.find("e+00,") != std::string::npos);
  // 4 observables x 9 grid points, two metadata lines and a header
  CHECK(std::count(z.begin(), z.end(), '\n') == 36 + 3);
}

TEST_CASE("resonances are byte-identical across runs and thread counts") {
  const fs::path dir = scratch("resonances");
  const std::string cfg = "resonances --config " + kReference.string();
  REQUIRE(hzeta(cfg + " --out " + (dir / "a").string(), dir / "log") == 0);
  REQUIRE(hzeta(cfg + " --out " + (dir / "b").string(), dir / "log") == 0);
  REQUIRE(hzeta(cfg + " --threads 4 --out " + (dir / "c").string(), dir / "log") == 0);
  const std::string a = slurp(dir / "a" / "resonances.json");
  CHECK(a == slurp(dir / "b" / "resonances.json"));
  CHECK(a == slurp(dir / "c" / "resonances.json"));
  const json j = json::parse(a);
  CHECK(j.dump(2) + "\n" == a);  // keys already sorted
  CHECK(j["metadata"]["config_hash"] == cli::load_config(kReference).hash);
  CHECK(j["resonances"][0]["re_s"].get<double>() == doctest::Approx(0.5134852705558478).epsilon(1e-12));
}

TEST_CASE("a failed numerical check exits with status 1 and names the check") {
  const fs::path dir = scratch("failing");
  CHECK(hzeta("ps-residue --config " + kReference.string() + " --n-nodes 12 --tolerance-scale 1e-40 --out " +
                  (dir / "o").string(),
              dir / "log") == 1);
  CHECK(slurp(dir / "log").find("check failed: ps-residue: pairing vs determinant for cos_4theta") != std::string::npos);
  const json report = json::parse(slurp(dir / "o" / "ps_residue.json"));
  CHECK(report["checks"].size() == 7);
}

TEST_CASE("verify passes on the reference config") {
  const fs::path dir = scratch("verify");
  CHECK(hzeta("verify --config " + kReference.string() + " --out " + (dir / "o").string(), dir / "log") == 0);
  const json report = json::parse(slurp(dir / "o" / "verify.json"));
  CHECK(report["passed"] == true);
  std::set<int> criteria;
  for (const auto& c : report["checks"]) criteria.insert(c["criterion"].get<int>());
  CHECK(criteria.size() == 10);
  CHECK(slurp(dir / "log").find("FAIL") == std::string::npos);
}
