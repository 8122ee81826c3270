#include "axistokes/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "axistokes/manufactured.hpp"

namespace axistokes {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"polygon", "mesh", "h", "refine"}},
      {"modes", {"N", "wavenumbers", "n_theta"}},
      {"data", {"case", "f_r", "f_theta", "f_z", "g_r", "g_theta", "g_z"}},
      {"solver", {"method", "rel_tol", "max_iter", "pressure_mass_precond"}},
      {"output", {"dir", "formats", "vtk_n_theta"}},
      {"truncation", {"s", "last_mode", "N", "k_max_cap"}},
      {"verify", {"tolerance", "fields", "seed", "h"}},
  };
  return keys;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream in(*v);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("invalid value '" + *v + "' for " + key);
  return out;
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("invalid boolean '" + *v + "' for " + key);
}

std::vector<std::string> split_words(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<int> int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& w : split_words(text)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size()) throw ConfigError("invalid integer '" + w + "' in " + key);
    out.push_back(v);
  }
  return out;
}

std::vector<RZ> parse_polygon(const std::string& text) {
  const auto words = split_words(text);
  if (words.size() % 2 != 0 || words.size() < 6)
    throw ConfigError("domain.polygon needs at least three r z pairs");
  std::vector<RZ> poly;
  for (std::size_t i = 0; i < words.size(); i += 2) {
    try {
      poly.push_back({std::stod(words[i]), std::stod(words[i + 1])});
    } catch (const std::exception&) {
      throw ConfigError("invalid coordinate in domain.polygon: '" + words[i] + " " + words[i + 1] + "'");
    }
  }
  return poly;
}

Expr parse_key_expr(const pt::ptree& tree, const std::string& key) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return Expr(0.0);
  try {
    return parse_expr(*v);
  } catch (const ExprError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

void RunConfig::require_data() const {
  if (!manufactured && !expressions)
    throw ConfigError("data: set either case or the f_*/g_* expressions");
}

MeridianMesh RunConfig::build_mesh() const {
  if (mesh_path) return read_mesh(*mesh_path);
  if (domain) return mesh_domain(*domain);
  throw ConfigError("domain: set either polygon or mesh");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section '" + section + "'");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in section " + section);
  }

  RunConfig c;
  if (auto poly = tree.get_optional<std::string>("domain.polygon")) {
    DomainSpec d;
    d.polygon = parse_polygon(*poly);
    d.target_h = get(tree, "domain.h", 0.125);
    const int refine = get(tree, "domain.refine", 0);
    if (!(d.target_h > 0.0)) throw ConfigError("domain.h must be positive");
    if (refine < 0) throw ConfigError("domain.refine must be non-negative");
    d.refinement_level = static_cast<unsigned>(refine);
    c.domain = d;
  }
  if (auto mesh = tree.get_optional<std::string>("domain.mesh")) {
    if (c.domain) throw ConfigError("domain: polygon and mesh are mutually exclusive");
    std::filesystem::path p(*mesh);
    c.mesh_path = p.is_relative() ? base_dir / p : p;
  }

  c.N = get(tree, "modes.N", 0);
  if (c.N < 0) throw ConfigError("modes.N must be non-negative");
  if (auto ks = tree.get_optional<std::string>("modes.wavenumbers")) {
    c.wavenumbers = int_list("modes.wavenumbers", *ks);
    if (c.wavenumbers->empty()) throw ConfigError("modes.wavenumbers is empty");
  }
  c.n_theta = get(tree, "modes.n_theta", 0);
  if (c.n_theta < 0) throw ConfigError("modes.n_theta must be non-negative");

  if (auto name = tree.get_optional<std::string>("data.case")) c.manufactured = *name;
  bool any_expr = false;
  for (const char* key : {"f_r", "f_theta", "f_z", "g_r", "g_theta", "g_z"})
    any_expr = any_expr || tree.get_optional<std::string>(std::string("data.") + key).has_value();
  if (c.manufactured && any_expr) throw ConfigError("data: case and expressions are mutually exclusive");
  if (c.manufactured) {
    try {
      builtin_case(*c.manufactured);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("data.case: ") + e.what());
    }
  }
  if (any_expr) {
    ExpressionData e;
    e.forcing = {parse_key_expr(tree, "data.f_r"), parse_key_expr(tree, "data.f_theta"),
                 parse_key_expr(tree, "data.f_z")};
    e.boundary = {parse_key_expr(tree, "data.g_r"), parse_key_expr(tree, "data.g_theta"),
                  parse_key_expr(tree, "data.g_z")};
    c.expressions = e;
  }

  try {
    if (auto m = tree.get_optional<std::string>("solver.method")) c.solver.method = parse_method(*m);
    c.solver.rel_tol = get(tree, "solver.rel_tol", c.solver.rel_tol);
    c.solver.max_iter = get(tree, "solver.max_iter", c.solver.max_iter);
    c.solver.pressure_mass_precond = get_bool(tree, "solver.pressure_mass_precond", c.solver.pressure_mass_precond);
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (auto dir = tree.get_optional<std::string>("output.dir")) c.output_dir = *dir;
  if (auto f = tree.get_optional<std::string>("output.formats")) {
    c.formats = split_words(*f);
    for (const auto& w : c.formats)
      if (w != "stack" && w != "vtk") throw ConfigError("unknown output format '" + w + "' (expected stack or vtk)");
  }
  c.vtk_n_theta = get(tree, "output.vtk_n_theta", c.vtk_n_theta);
  if (c.vtk_n_theta < 8) throw ConfigError("output.vtk_n_theta must be at least 8");

  c.family.s = get(tree, "truncation.s", c.family.s);
  if (!(c.family.s >= 0.0)) throw ConfigError("truncation.s must be non-negative");
  if (tree.get_optional<std::string>("truncation.last_mode")) {
    c.family.last_mode = get(tree, "truncation.last_mode", 0);
    if (*c.family.last_mode < 0) throw ConfigError("truncation.last_mode must be non-negative");
  }
  if (auto n = tree.get_optional<std::string>("truncation.N")) {
    c.truncation_N = int_list("truncation.N", *n);
    if (c.truncation_N.empty()) throw ConfigError("truncation.N is empty");
    for (int v : c.truncation_N)
      if (v < 1) throw ConfigError("truncation.N entries must be positive");
  }
  c.truncation_k_max_cap = get(tree, "truncation.k_max_cap", c.truncation_k_max_cap);

  if (tree.get_optional<std::string>("verify.tolerance")) c.verify.tolerance = get(tree, "verify.tolerance", 0.0);
  c.verify.fields = get(tree, "verify.fields", c.verify.fields);
  c.verify.seed = get(tree, "verify.seed", c.verify.seed);
  c.verify.h = get(tree, "verify.h", c.verify.h);
  if (c.verify.fields < 1) throw ConfigError("verify.fields must be positive");
  if (!(c.verify.h > 0.0)) throw ConfigError("verify.h must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace axistokes
