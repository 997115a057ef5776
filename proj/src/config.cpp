#include "threebody/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "threebody/errors.hpp"

namespace threebody {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

}  // namespace

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParameterError(what + ": not a number: '" + text + "'");
  return v;
}

std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t.empty()) throw ParameterError(what + ": empty grid");
  auto spaced = [&](const std::string& kind, bool log) {
    const auto parts = split(t.substr(kind.size() + 1), ':');
    if (parts.size() != 3) throw ParameterError(what + ": expected " + kind + ":a:b:n");
    const double a = parse_number(parts[0], what);
    const double b = parse_number(parts[1], what);
    const double nd = parse_number(parts[2], what);
    if (nd < 1 || nd != std::floor(nd) || nd > 1e7) throw ParameterError(what + ": bad point count");
    if (log && (a <= 0 || b <= 0)) throw ParameterError(what + ": log grid needs positive ends");
    const int n = static_cast<int>(nd);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out[i] = log ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    if (n > 1) {
      out.front() = a;
      out.back() = b;
    }
    return out;
  };
  if (t.rfind("lin:", 0) == 0) return spaced("lin", false);
  if (t.rfind("log:", 0) == 0) return spaced("log", true);
  std::vector<double> out;
  for (const auto& p : split(t, ',')) out.push_back(parse_number(p, what));
  return out;
}

Label parse_label(const std::string& text) {
  const auto parts = split(text, ',');
  auto integer = [&](const std::string& s) {
    const double v = parse_number(s, "label");
    if (v != std::floor(v) || v < 0 || v > 1000)
      throw ParameterError("label: expected non-negative integers, got '" + text + "'");
    return static_cast<int>(v);
  };
  if (parts.size() != 2) throw ParameterError("label: expected n1,n2, got '" + text + "'");
  return {integer(parts[0]), integer(parts[1])};
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

Config Config::parse(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParameterError(origin + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  Config c;
  c.origin_ = origin;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ParameterError(origin + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) c.entries_[section + "." + key] = trim(value.data());
  }
  return c;
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ParameterError("expected section.key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
      key.find('.', dot + 1) != std::string::npos)
    throw ParameterError("config keys look like section.key, got '" + key + "'");
  entries_[key] = value;
}

bool Config::has(const std::string& key) const {
  mark(key);
  return entries_.count(key) > 0;
}

std::optional<std::string> Config::raw(const std::string& key) const {
  mark(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = raw(key);
  return v ? parse_number(*v, key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  const double d = parse_number(*v, key);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw ParameterError(key + ": expected an integer, got '" + *v + "'");
  return static_cast<int>(d);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  const std::string t = lower(*v);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ParameterError(key + ": expected true or false, got '" + *v + "'");
}

std::vector<double> Config::get_grid(const std::string& key,
                                     const std::vector<double>& fallback) const {
  auto v = raw(key);
  return v ? parse_grid(*v, key) : fallback;
}

void Config::reject_unused() const {
  for (const auto& [key, value] : entries_)
    if (!used_.count(key)) throw ParameterError(origin_ + ": unknown key '" + key + "'");
}

std::string Config::to_ini() const {
  std::ostringstream out;
  std::string section;
  for (const auto& [key, value] : entries_) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << "[" << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << value << "\n";
  }
  return out.str();
}

QubitParams qubit_from(const Config& c) {
  QubitParams p;
  p.Ec = c.get_double("qubit.Ec", p.Ec);
  p.EL = c.get_double("qubit.EL", p.EL);
  p.EJ = c.get_double("qubit.EJ", p.EJ);
  p.basis_size = c.get_int("qubit.basis_size", p.basis_size);
  auto phi = c.raw("qubit.phi_x");
  if (phi && lower(*phi) != "zero-u2") p.phi_x = parse_number(*phi, "qubit.phi_x");
  return p;
}

bool qubit_phi_from_root(const Config& c, bool default_root) {
  auto phi = c.raw("qubit.phi_x");
  if (!phi) return default_root;
  return lower(*phi) == "zero-u2";
}

LatticeSpec lattice_from(const Config& c) {
  LatticeSpec s;
  s.Lx = c.get_int("lattice.Lx", s.Lx);
  s.Ly = c.get_int("lattice.Ly", s.Ly);
  s.alpha = c.get_double("lattice.alpha", s.alpha);
  s.N = c.get_int("lattice.N", s.N);
  s.scheme = parse_scheme(c.get_string("lattice.scheme", to_string(s.scheme)));
  s.range = c.get_int("lattice.R", s.range);
  s.U2 = c.get_double("interaction.U2", s.U2);
  const std::string u3 = lower(c.get_string("interaction.U3", "hardcore"));
  s.U3 = (u3 == "hardcore" || u3 == "hard-core") ? std::numeric_limits<double>::infinity()
                                                  : parse_number(u3, "interaction.U3");
  s.n_max = c.get_int("lattice.n_max", s.hard_core() ? 2 : 3);
  s.theta_x = c.get_double("twist.theta_x", s.theta_x);
  s.theta_y = c.get_double("twist.theta_y", s.theta_y);
  return s;
}

SolveOptions solver_from(const Config& c) {
  SolveOptions o;
  o.lanczos.k = c.get_int("solver.k", o.lanczos.k);
  o.lanczos.tol = c.get_double("solver.tol", o.lanczos.tol);
  const double seed = c.get_double("solver.seed", static_cast<double>(o.lanczos.seed));
  if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15)
    throw ParameterError("solver.seed: expected a non-negative integer");
  o.lanczos.seed = static_cast<std::uint64_t>(seed);
  o.lanczos.block_size = c.get_int("solver.block", o.lanczos.block_size);
  o.lanczos.max_basis = c.get_int("solver.max_basis", o.lanczos.max_basis);
  o.lanczos.max_expansions = c.get_int("solver.max_expansions", o.lanczos.max_expansions);
  o.manifold = c.get_int("solver.manifold", o.manifold);
  if (o.lanczos.k < o.manifold + 1)
    throw ParameterError("solver.k must exceed solver.manifold to resolve the gap");
  if (!(o.lanczos.tol > 0)) throw ParameterError("solver.tol must be positive");
  return o;
}

ChernOptions chern_from(const Config& c) {
  ChernOptions o;
  const SolveOptions s = solver_from(c);
  o.lanczos = s.lanczos;
  o.manifold = s.manifold;
  o.grid = c.get_int("twist.grid", o.grid);
  o.min_gap = c.get_double("twist.min_gap", o.min_gap);
  if (o.grid < 2) throw ParameterError("twist.grid must be at least 2");
  return o;
}

CoupledSpec coupled_from(const Config& c) {
  CoupledSpec s;
  s.left = qubit_from(c);
  s.right = s.left;
  if (auto v = c.raw("coupled.phi_x_right")) s.right.phi_x = parse_number(*v, "coupled.phi_x_right");
  s.M = c.get_double("coupled.M", s.M);
  s.levels_per_qubit = c.get_int("coupled.levels", s.levels_per_qubit);
  s.t_max = c.get_double("coupled.t_max", s.t_max);
  s.n_steps = c.get_int("coupled.n_steps", s.n_steps);
  return s;
}

}  // namespace threebody
