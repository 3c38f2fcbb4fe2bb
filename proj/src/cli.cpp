#include "hz/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "hz/observable.hpp"
#include "hz/parallel.hpp"
#include "hz/patterson_sullivan.hpp"
#include "hz/zeta_functions.hpp"
#include "json.hpp"

namespace hz::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string sha256(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

// ---- schema helpers; every failure names the field path ----

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
}

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw SchemaError(path.empty() ? k : path + "." + k, "unknown field");
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError(path.empty() ? key : path + "." + key, "missing required field");
  return j.at(key);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw SchemaError(path, "must be positive");
  return v;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string() || j.get<std::string>().empty()) throw SchemaError(path, "expected a non-empty string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array");
  return j;
}

// ---- group specifications ----

struct Letters {
  std::vector<std::string> labels;
  std::vector<MoebiusMap> matrices;
  std::vector<int> inverse;

  void add_pair(const std::string& path, const std::string& label, const std::string& inv) {
    for (const auto& [name, key] : {std::pair{label, "label"}, std::pair{inv, "inverse_label"}})
      if (std::find(labels.begin(), labels.end(), name) != labels.end())
        throw SchemaError(join(path, key), "duplicate label '" + name + "'");
    if (label == inv) throw SchemaError(join(path, "inverse_label"), "a letter cannot be its own inverse");
    const int i = static_cast<int>(labels.size());
    labels.insert(labels.end(), {label, inv});
    inverse.insert(inverse.end(), {i + 1, i});
  }
};

std::pair<std::string, std::string> pair_labels(const json& e, const std::string& path) {
  require_object(e, path);
  return {text(member(e, "label", path), join(path, "label")),
          text(member(e, "inverse_label", path), join(path, "inverse_label"))};
}

GroupPresentation schottky_group(const json& list, const std::string& path) {
  array(list, path);
  std::vector<SchottkyPairing> pairs;
  Letters seen;
  const auto disc = [](const json& d, const std::string& p) {
    require_object(d, p);
    only_keys(d, p, {"center_angle", "radius_angle"});
    return SchottkyDisc{number(member(d, "center_angle", p), join(p, "center_angle")),
                        positive(member(d, "radius_angle", p), join(p, "radius_angle"))};
  };
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = index(path, i);
    const auto [label, inv] = pair_labels(list[i], p);
    only_keys(list[i], p, {"label", "inverse_label", "disc", "inverse_disc"});
    seen.add_pair(p, label, inv);
    pairs.push_back({label, inv, disc(member(list[i], "disc", p), join(p, "disc")),
                     disc(member(list[i], "inverse_disc", p), join(p, "inverse_disc"))});
  }
  try {
    return GroupPresentation::schottky(pairs);
  } catch (const DomainError& e) {
    throw SchemaError(path, e.what());
  }
}

Letters generator_letters(const json& list, const std::string& path) {
  array(list, path);
  Letters out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = index(path, i);
    const auto [label, inv] = pair_labels(list[i], p);
    only_keys(list[i], p, {"label", "inverse_label", "matrix", "model"});
    out.add_pair(p, label, inv);
    Model model = Model::disc;
    if (list[i].contains("model")) {
      const std::string m = text(list[i]["model"], join(p, "model"));
      if (m == "half_plane") model = Model::half_plane;
      else if (m != "disc") throw SchemaError(join(p, "model"), "expected \"disc\" or \"half_plane\"");
    }
    const std::string mp = join(p, "matrix");
    const json& m = member(list[i], "matrix", p);
    if (!m.is_array() || m.size() != 4) throw SchemaError(mp, "expected four [re, im] entries a, b, c, d");
    cplx e[4];
    for (std::size_t k = 0; k < 4; ++k) {
      if (!m[k].is_array() || m[k].size() != 2) throw SchemaError(index(mp, k), "expected [re, im]");
      e[k] = {number(m[k][0], index(index(mp, k), 0)), number(m[k][1], index(index(mp, k), 1))};
    }
    try {
      const MoebiusMap g = MoebiusMap(e[0], e[1], e[2], e[3], model).to_disc();
      out.matrices.insert(out.matrices.end(), {g, g.inverse()});
    } catch (const DomainError& err) {
      throw SchemaError(mp, err.what());
    }
  }
  return out;
}

// Schottky when the isometric circles play ping-pong, otherwise a bare presentation for a coding table.
GroupPresentation generator_group(const Letters& l, const std::string& path, bool allow_plain) {
  std::vector<SchottkyDisc> discs;
  try {
    for (const auto& m : l.matrices) discs.push_back(isometric_disc(m));
    return GroupPresentation(l.labels, l.matrices, l.inverse, GroupKind::schottky, discs);
  } catch (const DomainError& e) {
    if (!allow_plain) throw SchemaError(path, e.what());
  }
  try {
    return GroupPresentation(l.labels, l.matrices, l.inverse, GroupKind::cocompact_with_coding);
  } catch (const DomainError& e) {
    throw SchemaError(path, e.what());
  }
}

struct GroupResult {
  MarkovPartition partition;
  bool needs_word_cutoff = false;  // no disc data: the length cutoff comes from the partition
  json canonical;
};

GroupResult parse_group(const json& g, const fs::path& base_dir) {
  const std::string path = "group";
  require_object(g, path);
  only_keys(g, path, {"schottky", "generators", "coding_table"});
  if (g.size() != 1) throw SchemaError(path, "expected exactly one of schottky, generators, coding_table");
  if (g.contains("schottky")) {
    GroupPresentation grp = schottky_group(g["schottky"], "group.schottky");
    return {schottky_partition(grp), false, g};
  }
  if (g.contains("generators")) {
    GroupPresentation grp = generator_group(generator_letters(g["generators"], "group.generators"), "group.generators", false);
    return {schottky_partition(grp), false, g};
  }
  const std::string cp = "group.coding_table";
  fs::path file = text(g["coding_table"], cp);
  if (file.is_relative()) file = base_dir / file;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SchemaError(cp, "cannot read '" + file.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json table;
  try {
    table = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SchemaError(cp, std::string("not valid JSON: ") + e.what());
  }
  require_object(table, cp);
  only_keys(table, cp, {"generators", "intervals", "transition"});
  const std::string gp = cp + ":generators";
  GroupPresentation grp = generator_group(generator_letters(member(table, "generators", cp + ":"), gp), gp, true);
  try {
    MarkovPartition p = load_coding_table(buf.str(), grp);
    const bool bounded = grp.letter_displacement_bound().has_value();
    return {std::move(p), !bounded, json{{"coding_table", table}}};
  } catch (const SchemaError& e) {
    throw SchemaError(cp + ":" + e.path, e.what());
  } catch (const CodingError& e) {
    throw SchemaError(cp, e.what());
  } catch (const DomainError& e) {
    throw SchemaError(cp, e.what());
  }
}

// Per-letter displacement from the contraction of the inverse branches.
int partition_word_cutoff(const MarkovPartition& p, double L_max) {
  const double q = p.contraction_bound();
  if (!(q < 1.0)) throw SchemaError("group.coding_table", "the boundary map is not expanding");
  const int k = p.contraction_iterate();
  const double per_letter = -std::log(q) / k;
  return static_cast<int>(std::ceil(L_max / per_letter)) + k + 2;
}

double& tolerance_slot(Tolerances& t, const std::string& key) {
  static const std::map<std::string, double Tolerances::*> slots{
      {"geometry", &Tolerances::geometry},       {"special", &Tolerances::special},
      {"gamma_asymptotic", &Tolerances::gamma_asymptotic}, {"trace", &Tolerances::trace},
      {"determinant", &Tolerances::determinant}, {"resonance", &Tolerances::resonance},
      {"residue", &Tolerances::residue},         {"ps_structure", &Tolerances::ps_structure},
      {"stationary_slope", &Tolerances::stationary_slope}, {"spectrum", &Tolerances::spectrum},
      {"recoupling", &Tolerances::recoupling}};
  const auto it = slots.find(key);
  if (it == slots.end()) throw SchemaError("tolerances." + key, "unknown tolerance");
  return t.*(it->second);
}

}  // namespace

SchottkyDisc isometric_disc(const MoebiusMap& g) {
  const MoebiusMap m = g.to_disc();
  if (std::abs(m.c()) < 1e-12) throw DomainError("generator fixes the origin: no isometric circle");
  return {reduce_angle(std::arg(m.a() / m.c())), std::atan(1.0 / std::abs(m.c()))};
}

RunConfig parse_config(const std::string& config_text, const fs::path& base_dir, const Overrides& o) {
  json j;
  try {
    j = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
  require_object(j, "$");
  only_keys(j, "", {"schema_version", "group", "L_max", "s_grid", "N", "node_family", "observables",
                    "resonance_window", "output_dir", "tolerances"});
  const json& version = member(j, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    throw SchemaError("schema_version", "expected " + std::to_string(kSchemaVersion));

  if (o.nodes) j["N"] = *o.nodes;
  if (o.L_max) j["L_max"] = *o.L_max;
  if (!(o.tolerance_scale > 0.0) || !std::isfinite(o.tolerance_scale))
    throw SchemaError("--tolerance-scale", "must be positive");

  GroupResult group = parse_group(member(j, "group", ""), base_dir);
  j["group"] = group.canonical;

  RunConfig c(std::move(group.partition));
  c.L_max = positive(member(j, "L_max", ""), "L_max");
  if (group.needs_word_cutoff) c.word_cutoff = partition_word_cutoff(c.partition, c.L_max);

  const json& grid = member(j, "s_grid", "");
  require_object(grid, "s_grid");
  only_keys(grid, "s_grid", {"re", "im"});
  const json& re = array(member(grid, "re", "s_grid"), "s_grid.re");
  const json& im = array(member(grid, "im", "s_grid"), "s_grid.im");
  for (std::size_t a = 0; a < re.size(); ++a)
    for (std::size_t b = 0; b < im.size(); ++b)
      c.s_grid.emplace_back(number(re[a], index("s_grid.re", a)), number(im[b], index("s_grid.im", b)));

  const json& n = member(j, "N", "");
  if (!n.is_number_integer() || n.get<int>() < 4 || n.get<int>() > 512) throw SchemaError("N", "expected an integer in [4, 512]");
  c.discretization.nodes = n.get<int>();
  if (j.contains("node_family")) {
    try {
      c.discretization.family = parse_node_family(text(j["node_family"], "node_family"));
    } catch (const DomainError& e) {
      throw SchemaError("node_family", e.what());
    }
  }

  const json& obs = array(member(j, "observables", ""), "observables");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string id = text(obs[i], index("observables", i));
    try {
      builtin_observable(id);
    } catch (const DomainError& e) {
      throw SchemaError(index("observables", i), e.what());
    }
    if (std::find(c.observables.begin(), c.observables.end(), id) != c.observables.end())
      throw SchemaError(index("observables", i), "duplicate observable '" + id + "'");
    c.observables.push_back(id);
  }

  if (j.contains("resonance_window")) {
    const json& w = j["resonance_window"];
    const std::string wp = "resonance_window";
    require_object(w, wp);
    only_keys(w, wp, {"re_min", "re_max", "im_min", "im_max"});
    c.window = {number(member(w, "re_min", wp), wp + ".re_min"), number(member(w, "re_max", wp), wp + ".re_max"),
                number(member(w, "im_min", wp), wp + ".im_min"), number(member(w, "im_max", wp), wp + ".im_max")};
    if (c.window.re_min < 0.05) throw SchemaError(wp + ".re_min", "must be at least 0.05");
    if (!(c.window.re_min < c.window.re_max)) throw SchemaError(wp + ".re_max", "must exceed re_min");
    if (!(c.window.im_min < c.window.im_max)) throw SchemaError(wp + ".im_max", "must exceed im_min");
  }

  c.output_dir = text(member(j, "output_dir", ""), "output_dir");

  if (j.contains("tolerances")) {
    require_object(j["tolerances"], "tolerances");
    for (const auto& [k, v] : j["tolerances"].items()) tolerance_slot(c.tolerances, k) = positive(v, "tolerances." + k);
  }
  c.tolerances = c.tolerances.scaled(o.tolerance_scale);
  if (o.tolerance_scale != 1.0) j["tolerance_scale"] = o.tolerance_scale;

  c.canonical = j.dump();
  c.hash = "sha256:" + sha256(c.canonical);
  return c;
}

RunConfig load_config(const fs::path& path, const Overrides& o) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("--config", "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path(), o);
}

namespace {

json metadata(const RunConfig& c) { return {{"tool_version", kToolVersion}, {"config_hash", c.hash}}; }

std::string csv_header(const RunConfig& c) {
  return std::string("# tool_version: ") + kToolVersion + "\n# config_hash: " + c.hash + "\n";
}

std::string e17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v == 0.0 ? 0.0 : v);  // no negative zero
  return buf;
}

json cx(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

void write_file(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

struct Outcome {
  std::vector<std::string> failed;  // names of failed checks
};

Outcome run_spectrum(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  const auto& g = c.partition.group();
  const auto spec = length_spectrum(g, c.L_max, c.word_cutoff);
  std::string body = csv_header(c) + "length,count,words\n";
  for (const auto& e : spec) {
    std::string words;
    for (const auto& w : e.words) words += (words.empty() ? "" : ";") + w;
    body += e17(e.length) + "," + std::to_string(e.count) + "," + words + "\n";
  }
  write_file(dir / "length_spectrum.csv", body);
  log << "spectrum: " << spec.size() << " distinct lengths up to " << c.L_max << "\n";
  return {};
}

Outcome run_zeta(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  Outcome out;
  std::string body = csv_header(c) +
                     "observable,s_re,s_im,certified,zeta_series_re,zeta_series_im,zeta_tail,zeta2_series_re,"
                     "zeta2_series_im,zeta2_tail,zeta_det_re,zeta_det_im,zeta2_det_re,zeta2_det_im\n";
  const std::string nan = "nan";
  for (const auto& id : c.observables) {
    const Observable a = builtin_observable(id);
    if (!a.stable_constant()) {
      log << "zeta: skipping '" << id << "' (orbit integrals need a stable-constant observable)\n";
      continue;
    }
    const OrbitSpectrum spec(c.partition, c.L_max, a);
    const TransferOperator op(c.partition, c.discretization, a);
    std::vector<std::string> rows(c.s_grid.size());
    std::vector<std::string> failures(c.s_grid.size());
    parallel_for(c.s_grid.size(), [&](std::size_t k) {
      const cplx s = c.s_grid[k];
      const cplx dz = zeta_via_determinant(s, op), dz2 = zeta2_via_determinant(s, op);
      std::string row = id + "," + e17(s.real()) + "," + e17(s.imag()) + ",";
      if (s.real() > 1.0) {
        const ZetaValue z = zeta(s, spec), z2 = zeta2(s, spec);
        row += std::string(z.certified && z2.certified ? "1" : "0") + "," + e17(z.value.real()) + "," +
               e17(z.value.imag()) + "," + e17(z.tail_bound) + "," + e17(z2.value.real()) + "," +
               e17(z2.value.imag()) + "," + e17(z2.tail_bound) + ",";
        for (const auto& [name, series, det] : {std::tuple{"zeta", z, dz}, std::tuple{"zeta2", z2, dz2}}) {
          if (std::abs(series.value - det) > series.tail_bound + c.tolerances.determinant * std::abs(det)) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "zeta: %s series vs determinant for %s at s = %g%+gi", name, id.c_str(),
                          s.real(), s.imag());
            failures[k] = msg;
          }
        }
      } else {
        row += "0," + nan + "," + nan + "," + nan + "," + nan + "," + nan + "," + nan + ",";
      }
      row += e17(dz.real()) + "," + e17(dz.imag()) + "," + e17(dz2.real()) + "," + e17(dz2.imag()) + "\n";
      rows[k] = row;
    });
    for (const auto& r : rows) body += r;
    for (const auto& f : failures)
      if (!f.empty()) out.failed.push_back(f);
  }
  write_file(dir / "zeta_grid.csv", body);
  log << "zeta: " << c.s_grid.size() << " grid points per observable\n";
  return out;
}

json discretization_json(const RunConfig& c) {
  return {{"N", c.discretization.nodes}, {"node_family", to_string(c.discretization.family)}};
}

Outcome run_resonances(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  const auto search = find_resonances(c.partition, c.window, c.discretization);
  json j = json::parse(resonances_json(search));
  j["metadata"] = metadata(c);
  j["window"] = {{"re_min", c.window.re_min}, {"re_max", c.window.re_max}, {"im_min", c.window.im_min}, {"im_max", c.window.im_max}};
  j["discretization"] = discretization_json(c);
  write_file(dir / "resonances.json", j.dump(2) + "\n");
  log << "resonances: " << search.resonances.size() << " zeros (winding " << search.winding << ")\n";
  return {};
}

Outcome run_ps_residue(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  Outcome out;
  const TransferOperator one(c.partition, c.discretization);
  const double delta = ground_resonance(one);
  const BoundaryFunctional t = boundary_values(one, delta);
  const cplx r1 = residue_via_determinant(one, delta).value;
  const cplx z1 = zeta2_residue(delta, one).value;
  json reports = json::array(), checks = json::array();
  const auto check = [&](const std::string& name, double value, double tol) {
    const bool ok = value < tol;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"passed", ok}});
    if (!ok) out.failed.push_back(name);
  };
  check("ps-residue: boundary functional certificate", t.certificate, c.tolerances.ps_structure);
  for (const auto& id : c.observables) {
    const Observable a = builtin_observable(id);
    if (id == "one" || !a.stable_constant()) continue;
    const TransferOperator op(c.partition, c.discretization, a);
    const cplx det = residue_via_determinant(op, delta).value / r1;
    const Pairing p = ps_pair(a, t);
    json r = json::parse(pairing_report_json(id, delta, p, det));
    const cplx zr = zeta2_residue(delta, op).value / z1;
    r["zeta2_residue_ratio"] = cx(zr);
    reports.push_back(r);
    check("ps-residue: pairing vs determinant for " + id, r["discrepancy"].get<double>(), c.tolerances.residue);
    check("ps-residue: zeta2 residue vs determinant for " + id, std::abs(zr - det) / std::abs(det), c.tolerances.residue);
  }
  if (reports.empty()) log << "ps-residue: no stable nonconstant observable selected\n";
  const json j{{"metadata", metadata(c)},
               {"ground_resonance", delta},
               {"discretization", discretization_json(c)},
               {"observables", reports},
               {"checks", checks}};
  write_file(dir / "ps_residue.json", j.dump(2) + "\n");
  log << "ps-residue: delta = " << e17(delta) << ", " << reports.size() << " observables\n";
  return out;
}

Outcome run_verify(const RunConfig& c, const fs::path& dir, std::ostream& log) {
  SuiteInput in{c.partition, c.discretization, c.L_max, c.window, c.observables, c.tolerances};
  const SuiteReport rep = run_suite(in);
  log << format_table(rep);
  json checks = json::array();
  Outcome out;
  for (const auto& k : rep.checks) {
    checks.push_back({{"criterion", k.criterion}, {"name", k.name}, {"value", k.value}, {"tolerance", k.tolerance},
                      {"passed", k.passed}, {"note", k.note}});
    if (!k.passed) out.failed.push_back("verify: " + k.name);
  }
  const json j{{"metadata", metadata(c)}, {"checks", checks}, {"passed", rep.passed()}};
  write_file(dir / "verify.json", j.dump(2) + "\n");
  return out;
}

}  // namespace

int run(const Options& opt, std::ostream& log) {
  std::optional<RunConfig> cfg;
  try {
    if (std::find(commands().begin(), commands().end(), opt.command) == commands().end())
      throw SchemaError("command", "unknown subcommand '" + opt.command + "'");
    if (opt.threads < 1) throw SchemaError("--threads", "must be at least 1");
    cfg = load_config(opt.config, opt.overrides);
  } catch (const SchemaError& e) {
    log << "schema error at " << e.path << ": " << e.what() << "\n";
    return 2;
  }
  set_thread_count(opt.threads);
  const fs::path dir = opt.out ? *opt.out : cfg->output_dir;
  static const std::map<std::string, Outcome (*)(const RunConfig&, const fs::path&, std::ostream&)> runners{
      {"spectrum", run_spectrum}, {"zeta", run_zeta}, {"resonances", run_resonances},
      {"ps-residue", run_ps_residue}, {"verify", run_verify}};
  Outcome result;
  try {
    result = runners.at(opt.command)(*cfg, dir, log);
  } catch (const std::exception& e) {
    log << "check failed: " << opt.command << ": " << e.what() << "\n";
    return 1;
  }
  for (const auto& f : result.failed) log << "check failed: " << f << "\n";
  return result.failed.empty() ? 0 : 1;
}

}  // namespace hz::cli
