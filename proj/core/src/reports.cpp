#include "g2kit/reports.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "g2kit/dpa.hpp"
#include "g2kit/gaussian_core.hpp"
#include "g2kit/numerics.hpp"
#include "g2kit/optimality.hpp"
#include "g2kit/qbe.hpp"

namespace g2kit::reports {
namespace {

constexpr const char* kUnitsSingle = "rates in units of kappa; tau in units of 1/kappa";
constexpr const char* kUnitsTwoCavity = "rates in units of kappa_1";
constexpr const char* kUnitsNone = "dimensionless";

unsigned worker_count(const RunConfig& cfg, std::size_t jobs) {
  const long requested = cfg.get_int("threads");
  if (requested < 0) throw Error(Errc::kInvalidArgument, "threads must be >= 0");
  unsigned n = requested > 0 ? static_cast<unsigned>(requested) : std::thread::hardware_concurrency();
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

template <class R>
struct Outcome {
  std::optional<R> value;
  std::string error;
};

// Evaluates f(i) for i < jobs on a worker pool; slot i always holds job i.
template <class R, class F>
std::vector<Outcome<R>> run_pool(std::size_t jobs, unsigned threads, F f) {
  std::vector<Outcome<R>> out(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        out[i].value = f(i);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return out;
}

std::string point(std::initializer_list<std::pair<const char*, double>> coords) {
  std::string s;
  for (const auto& [name, v] : coords) {
    if (!s.empty()) s += ", ";
    s += std::string(name) + "=" + format_double(v);
  }
  return s;
}

void record_failure(Report& report, const Table& table, std::size_t index, std::string where,
                    std::string error) {
  report.diagnostics.push_back({table.name, index, std::move(where), std::move(error)});
}

std::string csv_field(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) return format_double(*v);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

nlohmann::ordered_json table_json(const Table& t) {
  nlohmann::ordered_json j;
  j["name"] = t.name;
  j["units"] = t.units;
  j["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const double* v = std::get_if<double>(&c)) {
        r.push_back(*v);
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

nlohmann::ordered_json diagnostics_json(const std::vector<Diagnostic>& diags) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : diags) {
    arr.push_back({{"table", d.table}, {"index", d.index}, {"point", d.point}, {"error", d.error}});
  }
  return arr;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::kInvalidArgument, "cannot write '" + path.string() + "'");
  return os;
}

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  std::filesystem::path p = out;
  p.replace_filename(out.stem().string() + "." + suffix);
  return p;
}

double squared(double x) { return x * x; }

}  // namespace

bool add_row(Report& report, Table& table, std::vector<Cell> row, std::size_t index,
             std::string where) {
  for (std::size_t c = 0; c < row.size(); ++c) {
    const double* v = std::get_if<double>(&row[c]);
    if (v && !std::isfinite(*v)) {
      const std::string col = c < table.columns.size() ? table.columns[c] : std::to_string(c);
      record_failure(report, table, index, std::move(where), "non-finite value in column " + col);
      return false;
    }
  }
  table.rows.push_back(std::move(row));
  return true;
}

void write_csv(std::ostream& os, const Table& table) {
  os << "# " << table.name << ": " << table.units << "\r\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << csv_field(table.columns[c]);
  }
  os << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_field(row[c]);
    os << "\r\n";
  }
}

void write_json(std::ostream& os, const Report& report) {
  nlohmann::ordered_json j;
  j["command"] = std::string(to_string(report.command));
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config.entries()) cfg[k] = v;
  j["config"] = std::move(cfg);
  auto tables = nlohmann::ordered_json::array();
  for (const auto& t : report.tables) tables.push_back(table_json(t));
  j["tables"] = std::move(tables);
  j["diagnostics"] = diagnostics_json(report.diagnostics);
  os << j.dump(2) << "\n";
}

void write_report(const Report& report) {
  const Format format = parse_format(report.config.get("format"));
  const std::string out = report.config.get("out");
  if (out == "-") {
    if (format == Format::kJson) {
      write_json(std::cout, report);
    } else {
      for (std::size_t t = 0; t < report.tables.size(); ++t) {
        if (t) std::cout << "\r\n";
        write_csv(std::cout, report.tables[t]);
      }
      if (!report.diagnostics.empty()) {
        std::cerr << diagnostics_json(report.diagnostics).dump(2) << "\n";
      }
    }
    std::cout.flush();
    return;
  }
  const std::filesystem::path path(out);
  if (format == Format::kJson) {
    auto os = open_out(path);
    write_json(os, report);
    return;
  }
  for (std::size_t t = 0; t < report.tables.size(); ++t) {
    auto os = open_out(t == 0 ? path : sibling(path, report.tables[t].name + ".csv"));
    write_csv(os, report.tables[t]);
  }
  const auto diag_path = sibling(path, "diagnostics.json");
  if (!report.diagnostics.empty()) {
    auto os = open_out(diag_path);
    os << diagnostics_json(report.diagnostics).dump(2) << "\n";
  } else {
    std::filesystem::remove(diag_path);
  }
}

std::pair<double, double> dpa_overlay_point(double alpha_mag) {
  auto f = [&](double r) { return opt::g2_amplitude_squeezed(alpha_mag, r, squared(std::sinh(r))); };
  const double seed = alpha_mag * alpha_mag;
  const auto gs = scan_then_golden(f, std::min(1e-3 * seed, 1e-6), opt::kSqueezeBracket,
                                   std::min(opt::kSqueezeTolerance, 1e-6 * seed), opt::kMaxIterations);
  return {gs.x, gs.fx};
}

Report cmd_fig2(const RunConfig& cfg) {
  Report report{Command::kFig2, {}, {}, cfg};
  const auto alphas = cfg.get_grid("alpha_grid");
  const auto neffs = cfg.get_grid("neff_grid");
  const auto fixed = cfg.get_grid("neff_fixed_grid");
  const unsigned threads = worker_count(cfg, alphas.size() * neffs.size());

  Table bound{"bound", kUnitsNone, {"alpha", "n_eff", "r_opt", "g2_min"}, {}};
  const std::size_t jobs = alphas.size() * neffs.size();
  auto results = run_pool<opt::OptimumResult>(jobs, threads, [&](std::size_t i) {
    return opt::r_opt(alphas[i % alphas.size()], neffs[i / alphas.size()]);
  });
  for (std::size_t i = 0; i < jobs; ++i) {
    const double a = alphas[i % alphas.size()];
    const double n = neffs[i / alphas.size()];
    const std::string where = point({{"alpha", a}, {"n_eff", n}});
    if (!results[i].value) {
      record_failure(report, bound, i, where, results[i].error);
      continue;
    }
    add_row(report, bound, {a, n, results[i].value->r_opt, results[i].value->g2_min}, i, where);
  }

  Table overlay{"dpa_overlay",
                kUnitsNone,
                {"alpha", "r_dpa", "n_eff_dpa", "g2_dpa", "g2_bound_matched"},
                {}};
  auto over = run_pool<std::array<double, 4>>(alphas.size(), threads, [&](std::size_t i) {
    const auto [r, g2] = dpa_overlay_point(alphas[i]);
    const double n_eff = squared(std::sinh(r));
    return std::array<double, 4>{r, n_eff, g2, opt::r_opt(alphas[i], n_eff).g2_min};
  });
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const std::string where = point({{"alpha", alphas[i]}});
    if (!over[i].value) {
      record_failure(report, overlay, i, where, over[i].error);
      continue;
    }
    const auto& v = *over[i].value;
    add_row(report, overlay, {alphas[i], v[0], v[1], v[2], v[3]}, i, where);
  }

  Table opt_table{"fixed_neff", kUnitsNone, {"n_eff", "alpha_opt", "r_opt", "g2_min"}, {}};
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const std::string where = point({{"n_eff", fixed[i]}});
    try {
      const auto o = opt::g2_min_at_fixed_neff(fixed[i]);
      add_row(report, opt_table, {fixed[i], o.alpha_opt.value_or(0.0), o.r_opt, o.g2_min}, i, where);
    } catch (const std::exception& e) {
      record_failure(report, opt_table, i, where, e.what());
    }
  }
  report.tables = {std::move(bound), std::move(overlay), std::move(opt_table)};
  return report;
}

Report cmd_fig3(const RunConfig& cfg) {
  Report report{Command::kFig3, {}, {}, cfg};
  const double kappa = cfg.get_double("kappa");
  const double eta = cfg.get_double("eta");
  const auto lambdas = cfg.get_grid("lambdas");
  const auto taus = cfg.get_grid("tau_grid");
  const auto boundary = cfg.get_grid("boundary_lambdas");
  for (double l : lambdas) {
    if (!dpa::DpaParams(l, kappa, 0.0).is_stable() || l < 0.0) {
      throw Error(Errc::kInvalidArgument, "lambda " + format_double(l) + " outside [0, kappa/2)");
    }
  }
  if (!(eta > 0.0 && eta < 1.0)) throw Error(Errc::kBadEta, "eta must lie in (0, 1)");

  Table curves{"g2_tau", kUnitsSingle, {"lambda", "tau", "g2_dpa", "g2_qbe"}, {}};
  Table inset{"inset",
              kUnitsSingle,
              {"lambda", "r", "alpha_opt_dpa", "g2_opt_dpa", "purity_dpa", "alpha_opt_qbe",
               "g2_opt_qbe", "purity_qbe"},
              {}};
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double l = lambdas[li];
    const std::string where = point({{"lambda", l}});
    try {
      const dpa::DpaParams base(l, kappa, 0.0);
      const double a_dpa = dpa::optimal_alpha(base);
      const dpa::DpaParams d = base.with_alpha_mag(a_dpa);
      const qbe::QbeParams q0 = qbe::match_dpa(l, kappa, eta);
      const auto q_opt = qbe::optimal_point(q0);
      const qbe::QbeParams q = q0.with_alpha_mag(q_opt.alpha_opt.value_or(0.0));
      const auto [p_dpa, p_qbe] = qbe::purity_pair(l, kappa, eta);
      add_row(report, inset,
              {l, q0.r_qbe(), a_dpa, dpa::g2_tau(d, 0.0), p_dpa, q.alpha_mag(), q_opt.g2_min, p_qbe},
              li, where);
      for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        add_row(report, curves, {l, taus[ti], dpa::g2_tau(d, taus[ti]), qbe::g2_tau(q, taus[ti])},
                li * taus.size() + ti, point({{"lambda", l}, {"tau", taus[ti]}}));
      }
    } catch (const std::exception& e) {
      record_failure(report, inset, li, where, e.what());
    }
  }

  Table classes{"classification", kUnitsSingle, {"lambda", "alpha_min", "alpha_plus"}, {}};
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const std::string where = point({{"lambda", boundary[i]}});
    try {
      const auto c = dpa::classify(dpa::DpaParams(boundary[i], kappa, 0.0));
      add_row(report, classes, {boundary[i], c.alpha_min, c.alpha_plus}, i, where);
    } catch (const std::exception& e) {
      record_failure(report, classes, i, where, e.what());
    }
  }
  report.tables = {std::move(curves), std::move(inset), std::move(classes)};
  return report;
}

upb::TwoCavityParams two_cavity_params(const RunConfig& cfg, double u) {
  upb::TwoCavityParams p = upb::TwoCavityParams::symmetric(
      cfg.get_double("delta"), u, cfg.get_double("j"), cfg.get_double("f"), cfg.get_double("kappa1"));
  p.kappa[1] = cfg.get_double("kappa2");
  p.validate();
  return p;
}

fock::FockConfig fock_config(const RunConfig& cfg) {
  fock::FockConfig f;
  f.cutoffs = cfg.get_int_list("cutoffs");
  f.tail_tol = cfg.get_double("tail_tol");
  f.solver_tol = cfg.get_double("solver_tol");
  f.escalate = cfg.get_bool("escalate");
  const long dim = cfg.get_int("max_hilbert_dim");
  const long nnz = cfg.get_int("max_nonzeros");
  if (dim < 0 || nnz <= 0) {
    throw Error(Errc::kInvalidArgument, "max_hilbert_dim must be >= 0 and max_nonzeros > 0");
  }
  f.max_hilbert_dim = static_cast<std::size_t>(dim);
  f.max_nonzeros = static_cast<std::size_t>(nnz);
  return f;
}

Report cmd_fig4(const RunConfig& cfg) {
  Report report{Command::kFig4, {}, {}, cfg};
  const auto us = cfg.get_grid("u_grid");
  const bool with_me = cfg.get_bool("with_master_equation");
  fock::FockConfig fcfg = fock_config(cfg);
  if (with_me) fcfg.validate(2);
  two_cavity_params(cfg, us.front());

  std::vector<std::string> columns{"u", "g2_linearized"};
  if (with_me) {
    columns.insert(columns.end(), {"g2_master_equation", "n_tot_master_equation"});
  }
  columns.insert(columns.end(), {"r1", "r_opt", "r_opt_pure", "alpha1", "theta1", "phi1", "n_eff1",
                                 "n_tot1", "rel_angle1"});
  Table table{"fig4", kUnitsTwoCavity, columns, {}};

  auto rows = run_pool<std::vector<Cell>>(us.size(), worker_count(cfg, us.size()), [&](std::size_t i) {
    const upb::TwoCavityParams p = two_cavity_params(cfg, us[i]);
    const upb::Cavity1Result lin = upb::g2_cavity1(p);
    const GaussianStateParams& s = lin.state;
    const double r1 = s.squeeze_mag();
    std::vector<Cell> row{us[i], lin.g2};
    if (with_me) {
      const auto me = fock::steady_state(fock::TwoCavitySystem{p}, fcfg);
      const auto& m = me.modes.front();
      if (!m.g2) throw Error(Errc::kVacuumState, "master-equation state is the vacuum");
      row.insert(row.end(), {*m.g2, m.occupation});
    }
    const double ropt = opt::r_opt(s.alpha_mag(), squared(std::sinh(r1))).r_opt;
    const double ropt_pure = opt::r_opt_pure(s.alpha_mag()).r_opt;
    row.insert(row.end(), {r1, ropt, ropt_pure, s.alpha_mag(), s.squeeze_phase(), s.alpha_phase(),
                           s.n_eff(), n_total(s), s.relative_angle()});
    return row;
  });
  for (std::size_t i = 0; i < us.size(); ++i) {
    const std::string where = point({{"u", us[i]}});
    if (!rows[i].value) {
      record_failure(report, table, i, where, rows[i].error);
      continue;
    }
    add_row(report, table, std::move(*rows[i].value), i, where);
  }
  report.tables = {std::move(table)};
  return report;
}

Report cmd_witness(const RunConfig& cfg, std::istream& input) {
  Report report{Command::kWitness, {}, {}, cfg};
  const double tol = cfg.get_double("tolerance");
  Table table{"witness", kUnitsNone, {"alpha", "g2", "n_eff", "gaussian_bound", "verdict"}, {}};
  std::string line;
  int line_no = 0;
  bool seen_data = false;
  std::size_t index = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    bool numeric = true;
    while (std::getline(ss, field, ',')) {
      try {
        fields.push_back(parse_grid(field).at(0));
        if (field.find(':') != std::string::npos) numeric = false;
      } catch (const Error&) {
        numeric = false;
      }
    }
    if (!numeric && !seen_data) {
      seen_data = true;  // header row
      continue;
    }
    seen_data = true;
    if (!numeric || fields.size() < 2 || fields.size() > 3) {
      throw Error(Errc::kParseError, "witness input line " + std::to_string(line_no) +
                                         ": expected alpha,g2[,n_eff]");
    }
    const double n_eff = fields.size() == 3 ? fields[2] : 0.0;
    try {
      const auto v = opt::witness(fields[0], fields[1], tol, n_eff);
      add_row(report, table,
              {fields[0], fields[1], n_eff, v.gaussian_bound, std::string(opt::to_string(v.classification))},
              index, "line " + std::to_string(line_no));
    } catch (const Error& e) {
      if (e.code() == Errc::kInvalidArgument) {
        throw Error(Errc::kParseError, "witness input line " + std::to_string(line_no) + ": " + e.what());
      }
      record_failure(report, table, index, "line " + std::to_string(line_no), e.what());
    }
    ++index;
  }
  report.tables = {std::move(table)};
  return report;
}

Report cmd_witness(const RunConfig& cfg) {
  const std::string input = cfg.get("input");
  if (input == "-") return cmd_witness(cfg, std::cin);
  std::ifstream in(input);
  if (!in) throw Error(Errc::kParseError, "cannot read witness input '" + input + "'");
  return cmd_witness(cfg, in);
}

Report cmd_oracle(const RunConfig& cfg) {
  Report report{Command::kOracle, {}, {}, cfg};
  const std::string system_name = cfg.get("system");
  fock::System system;
  fock::FockConfig fcfg = fock_config(cfg);
  std::vector<int> defaults;
  if (system_name == "dpa") {
    system = fock::DpaSystem{dpa::DpaParams(cfg.get_double("lambda"), cfg.get_double("kappa"),
                                            cfg.get_double("alpha"), cfg.get_double("phi"))};
    defaults = fock::default_config_dpa().cutoffs;
  } else if (system_name == "qbe") {
    const double kappa = cfg.get_double("kappa");
    const double eta = cfg.get_double("eta");
    if (!(eta >= 0.0 && eta < 1.0)) throw Error(Errc::kBadEta, "eta must lie in [0, 1)");
    system = fock::QbeSystem{qbe::QbeParams(cfg.get_double("r_qbe"), eta * kappa, (1.0 - eta) * kappa,
                                            cfg.get_double("alpha"), cfg.get_double("phi"))};
    defaults = fock::default_config_qbe().cutoffs;
  } else if (system_name == "two_cavity") {
    system = fock::TwoCavitySystem{two_cavity_params(cfg, cfg.get_double("u"))};
    defaults = fock::default_config_two_cavity().cutoffs;
  } else {
    throw Error(Errc::kParseError, "unknown system '" + system_name + "'");
  }
  if (fcfg.cutoffs.empty()) fcfg.cutoffs = defaults;
  fcfg.validate(fock::mode_count(system));

  const fock::FockSteadyState st = fock::steady_state(system, fcfg);
  const char* units = system_name == "two_cavity" ? kUnitsTwoCavity : kUnitsSingle;
  Table modes{"modes",
              units,
              {"mode", "cutoff", "mean_re", "mean_im", "occupation", "squeeze_re", "squeeze_im",
               "central_n", "central_m_re", "central_m_im", "g2", "tail"},
              {}};
  for (std::size_t k = 0; k < st.modes.size(); ++k) {
    const auto& m = st.modes[k];
    add_row(report, modes,
            {static_cast<double>(k), static_cast<double>(st.cutoffs[k]), m.mean_field.real(),
             m.mean_field.imag(), m.occupation, m.squeeze_moment.real(), m.squeeze_moment.imag(),
             m.central_n, m.central_m.real(), m.central_m.imag(),
             m.g2 ? Cell{*m.g2} : Cell{std::string()}, m.tail},
            k, point({{"mode", static_cast<double>(k)}}));
  }
  Table summary{"summary",
                kUnitsNone,
                {"purity", "min_eigenvalue", "hermiticity_defect", "residual", "escalations"},
                {}};
  add_row(report, summary,
          {st.purity, st.min_eigenvalue, st.hermiticity_defect, st.residual,
           static_cast<double>(st.escalations)},
          0, "state");
  report.tables = {std::move(modes), std::move(summary)};
  return report;
}

}  // namespace g2kit::reports
