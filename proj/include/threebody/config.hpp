#pragma once
// INI-style run configuration: [section] headers and key = value lines.
// Keys are addressed as "section.key". Every key must be consumed by the
// subcommand that reads the file; leftovers are reported as unknown.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "threebody/chern.hpp"
#include "threebody/coupled_dynamics.hpp"
#include "threebody/ed.hpp"
#include "threebody/qubit_spectrum.hpp"

namespace threebody {

class Config {
 public:
  Config() = default;

  /// Throws ParameterError naming the path when it is missing or malformed.
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  /// "section.key=value" or ("section.key", "value"); later calls win.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ParameterError naming the first key that no getter asked for.
  void reject_unused() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }
  /// Entries as INI text, sections in name order.
  std::string to_ini() const;

 private:
  void mark(const std::string& key) const { used_.insert(key); }

  std::map<std::string, std::string> entries_;
  std::string origin_ = "<flags>";
  mutable std::set<std::string> used_;
};

/// Strict number parsing; also accepts inf and nan.
double parse_number(const std::string& text, const std::string& what);

/// "a,b,c", "lin:a:b:n" (n points, both ends) or "log:a:b:n" (log-spaced).
std::vector<double> parse_grid(const std::string& text, const std::string& what = "grid");

/// "n1,n2".
Label parse_label(const std::string& text);

// Section readers. Defaults are the operating points used throughout.
QubitParams qubit_from(const Config& config);
/// [qubit] phi_x = zero-U2 means: solve for the U2 root at (Ec, EL).
bool qubit_phi_from_root(const Config& config, bool default_root);
LatticeSpec lattice_from(const Config& config);
SolveOptions solver_from(const Config& config);
ChernOptions chern_from(const Config& config);
CoupledSpec coupled_from(const Config& config);

}  // namespace threebody
