#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "g2kit/reports.hpp"

namespace g2kit::reports {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::kParseError, what); }

// Message of a ParseError without its category prefix.
std::string reason(const Error& e) {
  const std::string_view what = e.what();
  const std::size_t skip = to_string(Errc::kParseError).size() + 2;
  return std::string(what.size() > skip ? what.substr(skip) : what);
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    parse_fail("not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

long to_long(std::string_view s) {
  s = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    parse_fail("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<KeySpec> with_common(std::vector<KeySpec> keys) {
  keys.push_back({"out", "-", "output path, '-' for stdout"});
  keys.push_back({"format", "csv", "csv or json"});
  keys.push_back({"threads", "0", "worker threads, 0 = hardware concurrency"});
  return keys;
}

std::vector<KeySpec> fock_keys(std::string cutoffs, std::string escalate) {
  return {
      {"cutoffs", std::move(cutoffs), "Fock cutoff per mode; empty = system default"},
      {"tail_tol", "1e-10", "max population of the top two levels"},
      {"solver_tol", "1e-10", "observable change accepted between escalations (x10)"},
      {"escalate", std::move(escalate), "grow cutoffs by 50% until converged"},
      {"max_hilbert_dim", "0", "Hilbert-space cap, 0 = none"},
      {"max_nonzeros", "1000000", "superoperator nonzero budget"},
  };
}

std::vector<KeySpec> two_cavity_keys() {
  return {
      {"delta", "-0.275", "detuning of both cavities"},
      {"j", "3", "inter-cavity tunneling"},
      {"f", "0.01", "drive on cavity 1"},
      {"kappa1", "1", "loss rate of cavity 1 (unit of all rates)"},
      {"kappa2", "1", "loss rate of cavity 2"},
  };
}

std::vector<KeySpec> build_schema(Command c) {
  std::vector<KeySpec> keys;
  switch (c) {
    case Command::kFig2:
      keys = {
          {"alpha_grid", "log:0.01:3:61;1", "displacements"},
          {"neff_grid", "0,0.0001,0.001,0.01,0.1", "thermal occupations of the bound curves"},
          {"neff_fixed_grid", "log:1e-6:1:61", "occupations of the fixed-n_eff optimum table"},
      };
      break;
    case Command::kFig3:
      keys = {
          {"kappa", "1", "cavity loss rate"},
          {"lambdas", "0.1,0.25,0.4", "parametric drive strengths, < kappa/2"},
          {"eta", "0.9", "QBE fraction of damping through the Bogoliubov mode"},
          {"tau_grid", "0:120:481", "delays in 1/kappa"},
          {"boundary_lambdas", "0.005:0.495:50", "drive strengths of the classification table"},
      };
      break;
    case Command::kFig4:
      keys = two_cavity_keys();
      keys.push_back({"u_grid", "log:1e-4:1e-1:61", "Kerr strengths U1 = U2"});
      keys.push_back({"with_master_equation", "false", "add the Fock-oracle column"});
      for (auto& k : fock_keys("5,5", "false")) keys.push_back(std::move(k));
      break;
    case Command::kWitness:
      keys = {
          {"input", "-", "CSV of alpha, g2[, n_eff]; '-' for stdin"},
          {"tolerance", "0.001", "margin below the Gaussian bound for certification"},
      };
      break;
    case Command::kOracle:
      keys = {
          {"system", "dpa", "dpa, qbe or two_cavity"},
          {"kappa", "1", "loss rate (dpa, qbe total)"},
          {"lambda", "0.25", "dpa parametric drive"},
          {"r_qbe", "0.3", "qbe reservoir squeezing"},
          {"eta", "0.9", "qbe fraction of damping through the Bogoliubov mode"},
          {"alpha", "1", "dpa / qbe mean field magnitude"},
          {"phi", "0", "dpa / qbe mean field phase"},
          {"u", "0.04", "two_cavity Kerr strength"},
      };
      for (auto& k : two_cavity_keys()) keys.push_back(std::move(k));
      for (auto& k : fock_keys("", "true")) keys.push_back(std::move(k));
      break;
  }
  return with_common(std::move(keys));
}

const KeySpec* find_key(Command c, std::string_view key) {
  for (const auto& k : schema(c)) {
    if (k.name == key) return &k;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::kFig2: return "fig2";
    case Command::kFig3: return "fig3";
    case Command::kFig4: return "fig4";
    case Command::kWitness: return "witness";
    case Command::kOracle: return "oracle";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::kFig2, Command::kFig3, Command::kFig4, Command::kWitness,
                    Command::kOracle}) {
    if (to_string(c) == name) return c;
  }
  parse_fail("unknown command '" + std::string(name) + "'");
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  parse_fail("unknown format '" + std::string(name) + "'");
}

const std::vector<KeySpec>& schema(Command c) {
  static const std::vector<KeySpec> tables[] = {
      build_schema(Command::kFig2), build_schema(Command::kFig3), build_schema(Command::kFig4),
      build_schema(Command::kWitness), build_schema(Command::kOracle)};
  return tables[static_cast<int>(c)];
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) parse_fail("empty grid");
  if (text.find(';') != std::string_view::npos) {
    std::vector<double> merged;
    for (auto part : split(text, ';')) {
      const auto g = parse_grid(part);
      merged.insert(merged.end(), g.begin(), g.end());
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
  }
  if (text.find(':') != std::string_view::npos) {
    auto parts = split(text, ':');
    const bool geometric = parts.front() == "log";
    if (geometric) parts.erase(parts.begin());
    if (parts.size() != 3) parse_fail("grid '" + std::string(text) + "' is not a:b:n");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const long n = to_long(parts[2]);
    if (n < 1) parse_fail("grid needs at least one point");
    if (n == 1 && a != b) parse_fail("single-point grid needs a == b");
    if (geometric && !(a > 0.0 && b > 0.0)) parse_fail("log grid needs positive ends");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      grid[i] = geometric ? std::exp(std::log(a) + t * (std::log(b) - std::log(a)))
                          : a + t * (b - a);
    }
    grid.front() = a;
    grid.back() = b;
    return grid;
  }
  std::vector<double> grid;
  for (auto part : split(text, ',')) grid.push_back(to_double(part));
  return grid;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  if (trim(text).empty()) return out;
  for (auto part : split(text, ',')) out.push_back(static_cast<int>(to_long(part)));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

RunConfig::RunConfig(Command c) : command_(c) {
  for (const auto& k : schema(c)) entries_[k.name] = k.default_value;
}

RunConfig RunConfig::parse(std::string_view text, Command c) {
  RunConfig cfg(c);
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      parse_fail("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (seen.contains(key)) {
      parse_fail("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    seen[key] = line_no;
    cfg.set(key, std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& file, Command c) {
  std::ifstream in(file, std::ios::binary);
  if (!in) parse_fail("cannot read config '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), c);
}

std::string RunConfig::serialize() const {
  std::string out = "# g2kit " + std::string(to_string(command_)) + "\n";
  for (const auto& [key, value] : entries_) out += key + " = " + value + "\n";
  return out;
}

void RunConfig::set(const std::string& key, std::string value) {
  if (!find_key(command_, key)) {
    parse_fail("unknown key '" + key + "' for " + std::string(to_string(command_)));
  }
  if (value.find_first_of("#\n") != std::string::npos) {
    parse_fail("value of '" + key + "' contains '#' or a newline");
  }
  entries_[key] = std::string(trim(value));
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    parse_fail("override '" + std::string(assignment) + "' is not key=value");
  }
  set(std::string(trim(assignment.substr(0, eq))), std::string(assignment.substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) parse_fail("missing key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  try {
    return to_double(get(key));
  } catch (const Error& e) {
    parse_fail(key + ": " + reason(e));
  }
}

long RunConfig::get_int(const std::string& key) const {
  try {
    return to_long(get(key));
  } catch (const Error& e) {
    parse_fail(key + ": " + reason(e));
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  parse_fail(key + ": not a boolean: '" + v + "'");
}

std::vector<double> RunConfig::get_grid(const std::string& key) const {
  try {
    return parse_grid(get(key));
  } catch (const Error& e) {
    parse_fail(key + ": " + reason(e));
  }
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
  try {
    return parse_int_list(get(key));
  } catch (const Error& e) {
    parse_fail(key + ": " + reason(e));
  }
}

}  // namespace g2kit::reports
