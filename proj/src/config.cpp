#include "bgkale/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "bgkale/snapshot.hpp"

namespace bgkale {
namespace {

namespace pt = boost::property_tree;

constexpr std::array<std::string_view, 6> kFaces = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};

const std::set<std::string, std::less<>> kKnown = {
    "run.dims",         "run.steps",           "run.dt",          "run.workers",
    "run.equilibrium",  "run.check_stable_dt", "domain.L",        "domain.n_per_axis",
    "domain.h_factor",  "velocity.n_v",        "velocity.v_max",  "gas.R",
    "gas.diameter",     "gas.k_boltzmann",     "initial.rho",     "initial.T",
    "initial.velocity", "management.enabled",  "management.r_merge", "management.m_min",
    "output.snapshot_every", "output.format",
};

const std::set<std::string, std::less<>> kSections = {"run",     "domain",     "velocity", "gas",
                                                      "initial", "management", "output"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Line of `key` inside `[section]`, or 0 when absent.
int line_of(std::string_view text, std::string_view section, std::string_view key) {
  std::istringstream in{std::string(text)};
  std::string line, current;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(std::string_view(t).substr(1, t.size() - 2));
      if (key.empty() && current == section) return number;
      continue;
    }
    const auto eq = t.find('=');
    if (!key.empty() && current == section && eq != std::string::npos &&
        trim(std::string_view(t).substr(0, eq)) == key)
      return number;
  }
  return 0;
}

class Reader {
 public:
  Reader(std::string_view text, const pt::ptree& tree) : text_(text), tree_(tree) {}

  const pt::ptree* section(const std::string& name) const {
    const auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const auto* s = section(sec);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  [[noreturn]] void fail(const std::string& sec, const std::string& key,
                         const std::string& what) const {
    const std::string full = sec + "." + key;
    const int line = line_of(text_, sec, key);
    std::string msg = full + ": " + what;
    if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
    throw ConfigError(msg, full, line);
  }

  double number(const std::string& sec, const std::string& key, const std::string& value) const {
    double out = 0.0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || value.empty())
      fail(sec, key, "expected a number, got '" + value + "'");
    return out;
  }

  int integer(const std::string& sec, const std::string& key, const std::string& value) const {
    int out = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || value.empty())
      fail(sec, key, "expected an integer, got '" + value + "'");
    return out;
  }

  bool boolean(const std::string& sec, const std::string& key, const std::string& value) const {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    fail(sec, key, "expected true or false, got '" + value + "'");
  }

  std::vector<double> vector(const std::string& sec, const std::string& key,
                             const std::string& value) const {
    std::vector<double> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) out.push_back(number(sec, key, trim(item)));
    if (out.empty()) fail(sec, key, "expected comma separated numbers");
    return out;
  }

  template <typename T, typename Parse>
  void optional(const std::string& sec, const std::string& key, T& into, Parse parse) const {
    if (const auto v = raw(sec, key)) into = (this->*parse)(sec, key, *v);
  }

  template <typename T, typename Parse>
  void required(const std::string& sec, const std::string& key, T& into, Parse parse) const {
    const auto v = raw(sec, key);
    if (!v) throw ConfigError("missing required key " + sec + "." + key, sec + "." + key);
    into = (this->*parse)(sec, key, *v);
  }

 private:
  std::string_view text_;
  const pt::ptree& tree_;
};

std::string format_vector(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::string face_name(int face) {
  if (face < 0 || face >= static_cast<int>(kFaces.size()))
    throw InvalidArgument("face index out of range");
  return std::string(kFaces[face]);
}

int face_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFaces.size(); ++i)
    if (kFaces[i] == name) return static_cast<int>(i);
  return -1;
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message(), {},
                      static_cast<int>(e.line()));
  }
  const Reader r(text, tree);

  for (const auto& [sec, body] : tree) {
    const bool wall = sec.rfind("wall.", 0) == 0;
    if (wall && face_from_name(std::string_view(sec).substr(5)) < 0) {
      const int line = line_of(text, sec, {});
      throw ConfigError("line " + std::to_string(line) + ": unknown wall face '" + sec + "'", sec,
                        line);
    }
    if (body.empty() && !body.data().empty()) {
      const int line = line_of(text, {}, sec);
      throw ConfigError("line " + std::to_string(line) + ": key '" + sec + "' outside a section",
                        sec, line);
    }
    if (!wall && kSections.count(sec) == 0) {
      const int line = line_of(text, sec, {});
      throw ConfigError("line " + std::to_string(line) + ": unknown section '" + sec + "'", sec,
                        line);
    }
    for (const auto& kv : body) {
      const std::string full = sec + "." + kv.first;
      const bool known = wall ? (kv.first == "velocity" || kv.first == "temperature")
                              : kKnown.count(full) > 0;
      if (!known) r.fail(sec, kv.first, "unknown key");
    }
  }

  RunConfig c;
  c.walls.clear();
  r.required("run", "dims", c.dims, &Reader::integer);
  r.required("run", "steps", c.n_steps, &Reader::integer);
  r.required("run", "dt", c.dt, &Reader::number);
  r.optional("run", "workers", c.workers, &Reader::integer);
  r.optional("run", "check_stable_dt", c.check_stable_dt, &Reader::boolean);
  if (const auto v = r.raw("run", "equilibrium")) {
    if (*v == "conservative")
      c.equilibrium = EquilibriumModel::conservative;
    else if (*v == "plain")
      c.equilibrium = EquilibriumModel::plain;
    else
      r.fail("run", "equilibrium", "expected conservative or plain, got '" + *v + "'");
  }

  r.required("domain", "L", c.L, &Reader::number);
  r.required("domain", "n_per_axis", c.n_per_axis, &Reader::integer);
  r.optional("domain", "h_factor", c.h_factor, &Reader::number);

  r.required("velocity", "n_v", c.n_v, &Reader::integer);
  if (const auto v = r.raw("velocity", "v_max")) c.v_max = r.number("velocity", "v_max", *v);

  r.required("gas", "R", c.gas.R, &Reader::number);
  r.required("gas", "diameter", c.gas.diameter, &Reader::number);
  r.optional("gas", "k_boltzmann", c.gas.k_boltzmann, &Reader::number);

  r.required("initial", "rho", c.rho0, &Reader::number);
  r.required("initial", "T", c.T0, &Reader::number);
  r.optional("initial", "velocity", c.U0, &Reader::vector);

  r.optional("management", "enabled", c.management.enabled, &Reader::boolean);
  r.optional("management", "r_merge", c.management.r_merge_factor, &Reader::number);
  r.optional("management", "m_min", c.management.m_min, &Reader::integer);

  r.optional("output", "snapshot_every", c.snapshot_every, &Reader::integer);
  if (const auto v = r.raw("output", "format")) c.snapshot_format = *v;

  for (int face = 0; face < 2 * c.dims && face < static_cast<int>(kFaces.size()); ++face) {
    const std::string sec = "wall." + std::string(kFaces[face]);
    if (!r.section(sec)) continue;
    WallSpec w;
    w.wall_id = face;
    w.T_wall = c.T0;
    r.optional(sec, "temperature", w.T_wall, &Reader::number);
    r.optional(sec, "velocity", w.U_wall, &Reader::vector);
    c.walls.push_back(w);
  }
  for (int face = 2 * c.dims; face < static_cast<int>(kFaces.size()); ++face) {
    const std::string sec = "wall." + std::string(kFaces[face]);
    if (r.section(sec)) {
      const int line = line_of(text, sec, {});
      throw ConfigError("line " + std::to_string(line) + ": " + sec + " does not exist in " +
                            std::to_string(c.dims) + "D",
                        sec, line);
    }
  }

  try {
    c.validate();
  } catch (const ConfigError& e) {
    const auto dot = e.key().find('.');
    std::string sec = e.key().substr(0, dot);
    std::string key = dot == std::string::npos ? "" : e.key().substr(dot + 1);
    // Wall keys are reported by face number; point them at the section.
    if (sec == "wall" && !key.empty()) {
      const auto d2 = key.find('.');
      const int face = std::stoi(key.substr(0, d2));
      sec = "wall." + face_name(face);
      key = d2 == std::string::npos ? "" : key.substr(d2 + 1);
    }
    const std::string full = key.empty() ? sec : sec + "." + key;
    std::string what = e.what();
    if (what.rfind(e.key(), 0) == 0) what = full + what.substr(e.key().size());
    const int line = line_of(text, sec, key);
    if (line > 0) what = "line " + std::to_string(line) + ": " + what;
    throw ConfigError(what, full, line);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open configuration");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\n"
     << "dims = " << c.dims << "\n"
     << "steps = " << c.n_steps << "\n"
     << "dt = " << format_number(c.dt) << "\n"
     << "workers = " << c.workers << "\n"
     << "equilibrium = "
     << (c.equilibrium == EquilibriumModel::conservative ? "conservative" : "plain") << "\n"
     << "check_stable_dt = " << (c.check_stable_dt ? "true" : "false") << "\n\n";
  os << "[domain]\n"
     << "L = " << format_number(c.L) << "\n"
     << "n_per_axis = " << c.n_per_axis << "\n"
     << "h_factor = " << format_number(c.h_factor) << "\n\n";
  os << "[velocity]\n"
     << "n_v = " << c.n_v << "\n";
  if (c.v_max) os << "v_max = " << format_number(*c.v_max) << "\n";
  os << "\n[gas]\n"
     << "R = " << format_number(c.gas.R) << "\n"
     << "diameter = " << format_number(c.gas.diameter) << "\n"
     << "k_boltzmann = " << format_number(c.gas.k_boltzmann) << "\n\n";
  os << "[initial]\n"
     << "rho = " << format_number(c.rho0) << "\n"
     << "T = " << format_number(c.T0) << "\n";
  if (!c.U0.empty()) os << "velocity = " << format_vector(c.U0) << "\n";
  os << "\n[management]\n"
     << "enabled = " << (c.management.enabled ? "true" : "false") << "\n"
     << "r_merge = " << format_number(c.management.r_merge_factor) << "\n"
     << "m_min = " << c.management.m_min << "\n\n";
  os << "[output]\n"
     << "snapshot_every = " << c.snapshot_every << "\n"
     << "format = " << c.snapshot_format << "\n";

  std::vector<WallSpec> walls = c.walls;
  std::sort(walls.begin(), walls.end(),
            [](const WallSpec& a, const WallSpec& b) { return a.wall_id < b.wall_id; });
  for (const auto& w : walls) {
    os << "\n[wall." << face_name(w.wall_id) << "]\n"
       << "temperature = " << format_number(w.T_wall) << "\n";
    if (!w.U_wall.empty()) os << "velocity = " << format_vector(w.U_wall) << "\n";
  }
  return os.str();
}

}  // namespace bgkale
