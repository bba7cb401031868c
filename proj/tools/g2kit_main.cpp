// g2kit command-line front end. Exit codes: 0 ok, 2 configuration error,
// 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "g2kit/errors.hpp"
#include "g2kit/reports.hpp"

namespace {

namespace rp = g2kit::reports;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Invocation {
  std::string config_file;
  std::string out;
  std::string format;
  std::string input;
  std::optional<long> threads;
  std::optional<long> max_hilbert_dim;
  bool with_master_equation = false;
  bool print_config = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_file, "flat key = value run configuration")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", inv.out, "output path ('-' for stdout)");
  sub->add_option("--format", inv.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", inv.threads, "worker threads (0 = all cores)");
  sub->add_option("--set", inv.overrides, "override a config key: key=value (repeatable)");
  sub->add_flag("--print-config", inv.print_config,
                "print the effective configuration and exit");
}

rp::RunConfig resolve(rp::Command cmd, const Invocation& inv) {
  rp::RunConfig cfg = inv.config_file.empty() ? rp::RunConfig(cmd)
                                              : rp::RunConfig::load(inv.config_file, cmd);
  for (const auto& o : inv.overrides) cfg.apply_override(o);
  if (!inv.out.empty()) cfg.set("out", inv.out);
  if (!inv.format.empty()) cfg.set("format", inv.format);
  if (inv.threads) cfg.set("threads", std::to_string(*inv.threads));
  if (inv.max_hilbert_dim) cfg.set("max_hilbert_dim", std::to_string(*inv.max_hilbert_dim));
  if (inv.with_master_equation) cfg.set("with_master_equation", "true");
  if (!inv.input.empty()) cfg.set("input", inv.input);
  return cfg;
}

rp::Report run(rp::Command cmd, const rp::RunConfig& cfg) {
  switch (cmd) {
    case rp::Command::kFig2: return rp::cmd_fig2(cfg);
    case rp::Command::kFig3: return rp::cmd_fig3(cfg);
    case rp::Command::kFig4: return rp::cmd_fig4(cfg);
    case rp::Command::kWitness: return rp::cmd_witness(cfg);
    case rp::Command::kOracle: return rp::cmd_oracle(cfg);
  }
  throw g2kit::Error(g2kit::Errc::kInvalidArgument, "unknown command");
}

std::string key_listing(rp::Command cmd) {
  std::string s = "configuration keys (defaults):\n";
  for (const auto& k : rp::schema(cmd)) {
    s += "  " + k.name + " = " + (k.default_value.empty() ? "\"\"" : k.default_value) + "    " +
         k.help + "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g2kit: Gaussian-state g2 toolkit; figure data, witness and Fock-space oracle"};
  app.require_subcommand(1);
  Invocation inv;

  std::map<CLI::App*, rp::Command> commands;
  auto make = [&](rp::Command cmd, const std::string& help) {
    CLI::App* sub = app.add_subcommand(std::string(rp::to_string(cmd)), help);
    add_common(sub, inv);
    sub->footer(key_listing(cmd));
    commands[sub] = cmd;
    return sub;
  };
  make(rp::Command::kFig2, "Gaussian g2(0) bound, DPA overlay and fixed-n_eff optimum");
  make(rp::Command::kFig3, "DPA vs matched QBE g2(tau), purities and antibunching boundaries");
  CLI::App* fig4 = make(rp::Command::kFig4, "two-cavity Kerr system versus U");
  fig4->add_flag("--with-master-equation", inv.with_master_equation,
                 "add the truncated-Fock master-equation column (expensive)");
  fig4->add_option("--max-hilbert-dim", inv.max_hilbert_dim, "cap on the Fock Hilbert dimension");
  CLI::App* witness = make(rp::Command::kWitness, "classify measured (alpha, g2) pairs");
  witness->add_option("input", inv.input, "CSV of alpha,g2[,n_eff]; '-' for stdin");
  CLI::App* oracle = make(rp::Command::kOracle, "raw truncated-Fock steady state");
  oracle->add_option("--max-hilbert-dim", inv.max_hilbert_dim, "cap on the Fock Hilbert dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  rp::Command cmd{};
  for (const auto& [sub, c] : commands) {
    if (sub->parsed()) cmd = c;
  }

  try {
    const rp::RunConfig cfg = resolve(cmd, inv);
    if (inv.print_config) {
      std::cout << cfg.serialize();
      return kExitOk;
    }
    const rp::Report report = run(cmd, cfg);
    rp::write_report(report);
    std::size_t rows = 0;
    for (const auto& t : report.tables) rows += t.rows.size();
    if (!report.diagnostics.empty()) {
      std::fprintf(stderr, "g2kit: %zu grid point(s) produced no row; see diagnostics\n",
                   report.diagnostics.size());
      if (rows == 0) return kExitNumerical;
    }
    return kExitOk;
  } catch (const g2kit::Error& e) {
    std::fprintf(stderr, "g2kit: %s\n", e.what());
    return g2kit::is_config_error(e.code()) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "g2kit: %s\n", e.what());
    return kExitNumerical;
  }
}
