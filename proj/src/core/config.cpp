#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace gfet {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    if (!std::isfinite(x)) throw std::invalid_argument("nonfinite");
    return x;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "config line " << line << ": value '" << v << "' for key '" << key
       << "' is not a number";
    throw ConfigError(os.str());
  }
}

int parse_int(const std::string& v, const std::string& key, int line) {
  double x = parse_double(v, key, line);
  double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) {
    std::ostringstream os;
    os << "config line " << line << ": value '" << v << "' for key '" << key
       << "' is not an integer";
    throw ConfigError(os.str());
  }
  return static_cast<int>(r);
}

using Setter = std::function<void(DeviceConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"L", [](DeviceConfig& c, const std::string& v, int n) { c.L = parse_double(v, "L", n); }},
      {"l", [](DeviceConfig& c, const std::string& v, int n) { c.l = parse_double(v, "l", n); }},
      {"d", [](DeviceConfig& c, const std::string& v, int n) { c.d = parse_double(v, "d", n); }},
      {"x_G", [](DeviceConfig& c, const std::string& v, int n) { c.x_G = parse_double(v, "x_G", n); }},
      {"eps_ox", [](DeviceConfig& c, const std::string& v, int n) { c.eps_ox = parse_double(v, "eps_ox", n); }},
      {"eps_par", [](DeviceConfig& c, const std::string& v, int n) { c.eps_par = parse_double(v, "eps_par", n); }},
      {"eps_perp", [](DeviceConfig& c, const std::string& v, int n) { c.eps_perp = parse_double(v, "eps_perp", n); }},
      {"N_plus", [](DeviceConfig& c, const std::string& v, int n) { c.N_plus = parse_double(v, "N_plus", n); }},
      {"N_minus", [](DeviceConfig& c, const std::string& v, int n) { c.N_minus = parse_double(v, "N_minus", n); }},
      {"x_j1", [](DeviceConfig& c, const std::string& v, int n) { c.x_j1 = parse_double(v, "x_j1", n); }},
      {"x_j2", [](DeviceConfig& c, const std::string& v, int n) { c.x_j2 = parse_double(v, "x_j2", n); }},
      {"T", [](DeviceConfig& c, const std::string& v, int n) { c.T = parse_double(v, "T", n); }},
      // Accepted in cm^2/Vs.
      {"mu", [](DeviceConfig& c, const std::string& v, int n) { c.mu = 1e-4 * parse_double(v, "mu", n); }},
      {"V_S", [](DeviceConfig& c, const std::string& v, int n) { c.V_S = parse_double(v, "V_S", n); }},
      {"V_D", [](DeviceConfig& c, const std::string& v, int n) { c.V_D = parse_double(v, "V_D", n); }},
      {"V_G", [](DeviceConfig& c, const std::string& v, int n) { c.V_G = parse_double(v, "V_G", n); }},
      {"coupling_mode",
       [](DeviceConfig& c, const std::string& v, int n) {
         std::string m = lower(trim(v));
         if (m == "dirichlet") c.coupling_mode = CouplingMode::Dirichlet;
         else if (m == "robin") c.coupling_mode = CouplingMode::Robin;
         else {
           std::ostringstream os;
           os << "config line " << n << ": coupling_mode must be dirichlet or robin, got '" << v << "'";
           throw ConfigError(os.str());
         }
       }},
      {"smoothing_a", [](DeviceConfig& c, const std::string& v, int n) { c.smoothing_a = parse_double(v, "smoothing_a", n); }},
      {"Nx", [](DeviceConfig& c, const std::string& v, int n) { c.Nx = parse_int(v, "Nx", n); }},
      {"Ny", [](DeviceConfig& c, const std::string& v, int n) { c.Ny = parse_int(v, "Ny", n); }},
      {"N_gamma", [](DeviceConfig& c, const std::string& v, int n) { c.N_gamma = parse_int(v, "N_gamma", n); }},
      {"trans_Nx", [](DeviceConfig& c, const std::string& v, int n) { c.trans_Nx = parse_int(v, "trans_Nx", n); }},
      {"trans_Ny_outer", [](DeviceConfig& c, const std::string& v, int n) { c.trans_Ny_outer = parse_int(v, "trans_Ny_outer", n); }},
      {"trans_y_refine", [](DeviceConfig& c, const std::string& v, int n) { c.trans_y_refine = parse_int(v, "trans_y_refine", n); }},
      {"gummel_tol", [](DeviceConfig& c, const std::string& v, int n) { c.gummel_tol = parse_double(v, "gummel_tol", n); }},
      {"gummel_max_iter", [](DeviceConfig& c, const std::string& v, int n) { c.gummel_max_iter = parse_int(v, "gummel_max_iter", n); }},
      {"dV_step", [](DeviceConfig& c, const std::string& v, int n) { c.dV_step = parse_double(v, "dV_step", n); }},
      {"V_max", [](DeviceConfig& c, const std::string& v, int n) { c.V_max = parse_double(v, "V_max", n); }},
      {"solver_path",
       [](DeviceConfig& c, const std::string& v, int n) {
         std::string m = lower(trim(v));
         if (m == "schur") c.solver_path = DeviceConfig::Path::Schur;
         else if (m == "monolithic") c.solver_path = DeviceConfig::Path::Monolithic;
         else {
           std::ostringstream os;
           os << "config line " << n << ": solver_path must be schur or monolithic, got '" << v << "'";
           throw ConfigError(os.str());
         }
       }},
  };
  return table;
}

const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> table = {
      {"L", "device"}, {"l", "device"}, {"d", "device"}, {"x_G", "device"},
      {"eps_ox", "device"}, {"eps_par", "device"}, {"eps_perp", "device"},
      {"N_plus", "device"}, {"N_minus", "device"}, {"x_j1", "device"},
      {"x_j2", "device"}, {"T", "device"}, {"mu", "device"}, {"V_S", "device"},
      {"V_D", "device"}, {"V_G", "device"}, {"coupling_mode", "device"},
      {"smoothing_a", "device"},
      {"Nx", "solver"}, {"Ny", "solver"}, {"N_gamma", "solver"},
      {"trans_Nx", "solver"}, {"trans_Ny_outer", "solver"}, {"trans_y_refine", "solver"},
      {"gummel_tol", "solver"}, {"gummel_max_iter", "solver"},
      {"solver_path", "solver"},
      {"dV_step", "sweep"}, {"V_max", "sweep"},
  };
  return table;
}

}  // namespace

void DeviceConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
  if (!(L > 0)) fail("L must be positive");
  if (!(l > 0)) fail("l must be positive");
  if (!(d > 0 && d < l / 2)) fail("d must satisfy 0 < d << l");
  if (!(x_G >= 0 && x_G < L / 2)) fail("x_G must satisfy 0 <= x_G < L/2");
  if (!(eps_ox > 0 && eps_par > 0 && eps_perp > 0)) fail("permittivities must be positive");
  if (!(N_minus > 0)) fail("N_minus must be positive");
  if (!(N_plus >= N_minus)) fail("N_plus must be >= N_minus");
  if (!(x_j1 > 0 && x_j2 > x_j1 && x_j2 < L)) fail("junctions must be ordered and strictly inside (0, L)");
  if (!(T > 0)) fail("T must be positive");
  if (!(mu > 0)) fail("mu must be positive");
  if (!(smoothing_a > 0)) fail("smoothing_a must be positive");
  if (Nx < 1 || Ny < 1) fail("Nx and Ny must be >= 1");
  if (N_gamma < 2) fail("N_gamma must be >= 2 (interface needs an interior unknown)");
  if (trans_Nx < 2 || trans_Ny_outer < 1 || trans_y_refine < 1)
    fail("transmission mesh counts too small");
  if (!(gummel_tol > 0)) fail("gummel_tol must be positive");
  if (gummel_max_iter < 1) fail("gummel_max_iter must be >= 1");
  if (!(dV_step > 0)) fail("dV_step must be positive");
  if (V_max < 0) fail("V_max must be >= 0");
}

std::vector<std::pair<std::string, std::string>> DeviceConfig::to_key_values() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto num = [](double x) { return format_double(x); };
  kv.emplace_back("L", num(L));
  kv.emplace_back("l", num(l));
  kv.emplace_back("d", num(d));
  kv.emplace_back("x_G", num(x_G));
  kv.emplace_back("eps_ox", num(eps_ox));
  kv.emplace_back("eps_par", num(eps_par));
  kv.emplace_back("eps_perp", num(eps_perp));
  kv.emplace_back("N_plus", num(N_plus));
  kv.emplace_back("N_minus", num(N_minus));
  kv.emplace_back("x_j1", num(x_j1));
  kv.emplace_back("x_j2", num(x_j2));
  kv.emplace_back("T", num(T));
  kv.emplace_back("mu", num(mu * 1e4));  // back to cm^2/Vs
  kv.emplace_back("V_S", num(V_S));
  kv.emplace_back("V_D", num(V_D));
  kv.emplace_back("V_G", num(V_G));
  kv.emplace_back("coupling_mode", coupling_mode == CouplingMode::Robin ? "robin" : "dirichlet");
  kv.emplace_back("smoothing_a", num(smoothing_a));
  kv.emplace_back("Nx", std::to_string(Nx));
  kv.emplace_back("Ny", std::to_string(Ny));
  kv.emplace_back("N_gamma", std::to_string(N_gamma));
  kv.emplace_back("trans_Nx", std::to_string(trans_Nx));
  kv.emplace_back("trans_Ny_outer", std::to_string(trans_Ny_outer));
  kv.emplace_back("trans_y_refine", std::to_string(trans_y_refine));
  kv.emplace_back("gummel_tol", num(gummel_tol));
  kv.emplace_back("gummel_max_iter", std::to_string(gummel_max_iter));
  kv.emplace_back("solver_path", solver_path == Path::Schur ? "schur" : "monolithic");
  kv.emplace_back("dV_step", num(dV_step));
  kv.emplace_back("V_max", num(V_max));
  return kv;
}

DeviceConfig parse_config(const std::string& text) {
  DeviceConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::string section;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        std::ostringstream os;
        os << "config line " << line_no << ": malformed section header '" << line << "'";
        throw ConfigError(os.str());
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section != "device" && section != "solver" && section != "sweep") {
        std::ostringstream os;
        os << "config line " << line_no << ": unknown section [" << section << "]";
        throw ConfigError(os.str());
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << line_no << ": expected key = value, got '" << line << "'";
      throw ConfigError(os.str());
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) {
      std::ostringstream os;
      os << "config line " << line_no << ": unknown key '" << key << "'";
      throw ConfigError(os.str());
    }
    if (!section.empty()) {
      const auto& home = key_sections().at(key);
      if (home != section) {
        std::ostringstream os;
        os << "config line " << line_no << ": key '" << key << "' belongs to section ["
           << home << "], found in [" << section << "]";
        throw ConfigError(os.str());
      }
    }
    it->second(cfg, value, line_no);
  }
  cfg.validate();
  return cfg;
}

DeviceConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

void apply_override(DeviceConfig& cfg, const std::string& key, const std::string& value) {
  auto it = setters().find(trim(key));
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, trim(value), 0);
  cfg.validate();
}

std::string config_get(const DeviceConfig& cfg, const std::string& key) {
  for (const auto& [k, v] : cfg.to_key_values())
    if (k == key) return v;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace gfet
