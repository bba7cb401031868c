#pragma once

// Figure-data commands behind the g2kit CLI: run configuration, tabular
// results and their CSV / JSON serialization.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "g2kit/errors.hpp"
#include "g2kit/fock.hpp"
#include "g2kit/two_cavity.hpp"

namespace g2kit::reports {

enum class Command { kFig2, kFig3, kFig4, kWitness, kOracle };
enum class Format { kCsv, kJson };

std::string_view to_string(Command c) noexcept;
/// Throws Error(kParseError) for unknown names.
Command parse_command(std::string_view name);
Format parse_format(std::string_view name);

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Recognized keys of a command (including out, format, threads) with defaults.
const std::vector<KeySpec>& schema(Command c);

/// Grid syntax: "v", "v1,v2,...", "a:b:n" (linear, n points incl. ends) or
/// "log:a:b:n" (geometric, a, b > 0); "g1;g2;..." is the sorted union of
/// sub-grids. Throws Error(kParseError).
std::vector<double> parse_grid(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

/// %.17g, the shortest form guaranteed to round-trip a double.
std::string format_double(double v);

/// Flat key=value configuration. Lines are "key = value"; '#' starts a
/// comment; keys are unique. Serialization emits keys in sorted order, so
/// parse(serialize()) reproduces the map exactly.
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(Command c);  ///< schema defaults

  static RunConfig parse(std::string_view text, Command c);
  static RunConfig load(const std::filesystem::path& file, Command c);
  std::string serialize() const;

  Command command() const noexcept { return command_; }
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  /// Throws Error(kParseError) for keys outside the command schema.
  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  /// "key=value"; later overrides win.
  void apply_override(std::string_view assignment);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_grid(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  bool operator==(const RunConfig&) const = default;

 private:
  Command command_ = Command::kFig2;
  std::map<std::string, std::string> entries_;
};

using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;
  std::string units;  ///< emitted as a leading comment line
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// A grid point that produced no row.
struct Diagnostic {
  std::string table;
  std::size_t index = 0;  ///< position in the table's grid
  std::string point;      ///< human-readable grid coordinates
  std::string error;
};

struct Report {
  Command command = Command::kFig2;
  std::vector<Table> tables;
  std::vector<Diagnostic> diagnostics;
  RunConfig config;
};

/// Appends `row` unless a numeric cell is non-finite, in which case a
/// Diagnostic is recorded instead. Returns whether the row was kept.
bool add_row(Report& report, Table& table, std::vector<Cell> row, std::size_t index,
             std::string point);

void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Report& report);

/// Writes to the config's `out` ("-" is stdout). CSV: the first table goes to
/// `out`, table k > 0 to `<stem>.<name>.csv`. Diagnostics go to
/// `<stem>.diagnostics.json` (or stderr for stdout output) when present.
void write_report(const Report& report);

Report cmd_fig2(const RunConfig& cfg);
Report cmd_fig3(const RunConfig& cfg);
Report cmd_fig4(const RunConfig& cfg);
/// Throws Error(kParseError) naming the 1-based line of the first bad row.
Report cmd_witness(const RunConfig& cfg, std::istream& input);
Report cmd_witness(const RunConfig& cfg);
Report cmd_oracle(const RunConfig& cfg);

/// Base two-cavity parameters of a fig4 configuration (U taken from `u`).
upb::TwoCavityParams two_cavity_params(const RunConfig& cfg, double u);
/// Fock-oracle settings from the cutoffs / tail_tol / solver_tol /
/// escalate / max_hilbert_dim keys.
fock::FockConfig fock_config(const RunConfig& cfg);

/// Minimal g2(0) of a DPA-like state (n_eff = sinh^2 r) at displacement
/// alpha_mag, optimized over r. Pairs are (r, g2).
std::pair<double, double> dpa_overlay_point(double alpha_mag);

}  // namespace g2kit::reports
