// cna: command-line front end for chain derivation, optimization, classical
// certificates, coincidence simulation and table reproduction.
//
// Exit codes: 0 success, 1 computation failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cna/errors.hpp"
#include "cna/experiment.hpp"
#include "cna/fixtures.hpp"
#include "cna/io.hpp"
#include "cna/lhv.hpp"
#include "cna/optimizer.hpp"
#include "cna/scenario.hpp"

namespace {

using cna::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Bad flag values detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double kTableTolerance = 5e-4;
constexpr double kGapTolerance = 1e-3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CNA_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("CNA_SEED is not an unsigned integer: ") + env);
  }
  return 7;
}

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw cna::Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

/// Summary lines go to stdout when the JSON goes to a file, stderr otherwise.
std::ostream& summary(const std::string& out_path) {
  return (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in state spec");
    }
  }
  return v;
}

/// "diag:a,b,…" or "real:row-major d² entries".
cna::StateMatrix parse_state_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("state spec must look like diag:… or real:…");
  const std::string kind = spec.substr(0, colon);
  const auto values = parse_list(spec.substr(colon + 1));
  if (kind == "diag") {
    cna::ComplexMatrix h = cna::ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                                    static_cast<Eigen::Index>(values.size()));
    for (std::size_t g = 0; g < values.size(); ++g) h(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g)) = values[g];
    return cna::StateMatrix::normalized(h);
  }
  if (kind == "real") {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(values.size()))));
    if (d < 1 || static_cast<std::size_t>(d * d) != values.size()) {
      throw UsageError("real: state spec needs d*d entries");
    }
    cna::ComplexMatrix h(d, d);
    for (Eigen::Index i = 0; i < d * d; ++i) h(i / d, i % d) = values[static_cast<std::size_t>(i)];
    return cna::StateMatrix::normalized(h);
  }
  throw UsageError("unknown state spec kind '" + kind + "'");
}

struct StateSource {
  std::string fixture;
  std::string state;
  std::string state_file;
  int k = 0;
  int d = 0;
  int J = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--fixture", fixture, "Published optimal state, e.g. H_2_2_1");
    cmd->add_option("--state", state, "Inline state: diag:a,b,… or real:row-major entries");
    cmd->add_option("--state-file", state_file, "State JSON document");
    cmd->add_option("--k", k, "Settings per party");
    cmd->add_option("--d", d, "Outcomes per measurement");
    cmd->add_option("--J", J, "Position of the nonzero edge");
  }

  std::pair<cna::Scenario, cna::StateMatrix> resolve() const {
    const int given = !fixture.empty() + !state.empty() + !state_file.empty();
    if (given != 1) throw UsageError("give exactly one of --fixture, --state, --state-file");
    cna::Scenario s;
    std::optional<cna::StateMatrix> st;
    if (!fixture.empty()) {
      const auto* f = cna::fixtures::find_state(fixture);
      if (!f) throw UsageError("unknown fixture '" + fixture + "'");
      s = f->scenario;
      st = f->state();
    } else {
      st = state.empty() ? cna::io::state_from_json(read_json_file(state_file))
                         : parse_state_spec(state);
      s = {2, st->dim(), 1};
    }
    if (k) s.k = k;
    if (J) s.J = J;
    if (d && d != st->dim()) {
      throw UsageError("--d " + std::to_string(d) + " does not match the state dimension " +
                       std::to_string(st->dim()));
    }
    s.d = st->dim();
    try {
      s.validate();
    } catch (const cna::InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return {s, *st};
  }
};

struct OptimizeArgs {
  int k = 0, d = 0, J = 1;
  int restarts = 64;
  int max_iter = 20000;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  bool complex = false;
  bool no_warm = false;
  bool hardy = false;
  bool scan = false;
  unsigned threads = 0;
  std::string out;
  bool no_meta = false;

  cna::OptimizerConfig config() const {
    cna::OptimizerConfig c;
    c.restarts = restarts;
    c.max_iterations = max_iter;
    c.tolerance = tol;
    c.seed = seed;
    c.allow_complex = complex;
    c.warm_start = !no_warm;
    c.threads = threads;
    try {
      c.validate();
    } catch (const cna::InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

Json reference_json(std::optional<double> published, double computed, double tolerance) {
  if (!published) return Json(nullptr);
  return Json{{"published", *published},
              {"delta", computed - *published},
              {"within_tolerance", std::abs(computed - *published) <= tolerance}};
}

int run_optimize(const OptimizeArgs& a) {
  cna::Scenario s{a.k, a.d, a.J};
  try {
    s.validate();
    cna::check_envelope(s.k, s.d);
  } catch (const cna::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto cfg = a.config();
  const auto& ref = cna::fixtures::ReferenceTable::instance();
  auto& log = summary(a.out);
  log << std::fixed << std::setprecision(6);

  if (a.scan) {
    Json rows = Json::array();
    const bool five_two = s.k == 5 && s.d == 2;
    for (const auto& e : cna::scan_J(s.k, s.d, cfg)) {
      std::optional<double> published;
      if (five_two) published = cna::fixtures::ReferenceTable::j_scan_5_2()[static_cast<std::size_t>(e.J - 1)];
      else if (s.k == 2 && s.d == 2 && e.J == 2) published = cna::fixtures::ReferenceTable::original_argument_fraction;
      else published = ref.cabello({s.k, s.d, e.J});
      rows.push_back(Json{{"J", e.J}, {"fraction", e.fraction},
                          {"reference", reference_json(published, e.fraction, kTableTolerance)}});
      log << "J=" << e.J << "  fraction=" << e.fraction;
      if (published) log << "  published=" << *published << "  delta=" << std::showpos << e.fraction - *published << std::noshowpos;
      log << '\n';
    }
    emit(Json{{"schema_version", cna::io::kSchemaVersion},
              {"objective", "cabello_j_scan"},
              {"k", s.k},
              {"d", s.d},
              {"config", cna::io::to_json(cfg)},
              {"rows", std::move(rows)}},
         a.out);
    return kExitOk;
  }

  const auto result = a.hardy ? cna::maximize_hardy(s, cfg) : cna::maximize_cabello(s, cfg);
  std::optional<double> published = a.hardy ? ref.hardy(s.k, s.d) : ref.cabello(s);
  if (!a.hardy && !published && s.k == 2 && s.d == 2 && s.J == 2) {
    published = cna::fixtures::ReferenceTable::original_argument_fraction;
  }
  Json j = cna::io::optimization_json(result, cfg, a.hardy ? "hardy" : "cabello", !a.no_meta);
  j["reference"] = reference_json(published, result.best_fraction, kTableTolerance);
  emit(j, a.out);
  log << (a.hardy ? "hardy" : "cabello") << " (" << s.k << "," << s.d << "," << s.J
      << ")  best=" << result.best_fraction;
  if (published) log << "  published=" << *published << "  delta=" << std::showpos << result.best_fraction - *published << std::noshowpos;
  log << '\n';
  return kExitOk;
}

struct DeriveArgs {
  StateSource source;
  bool schmidt = false;
  std::string out;
};

int run_derive(const DeriveArgs& a) {
  const auto [s, state] = a.source.resolve();
  cna::MeasurementChain chain;
  try {
    chain = cna::build_chain(s, state);
  } catch (const cna::LadderDegeneracyError& e) {
    std::cerr << "error: " << e.what() << " (failing edge " << e.chain_position() - 1 << "-"
              << e.chain_position() << ")\n";
    return kExitFailure;
  }
  const auto report = cna::cabello_fraction(chain);
  const auto frame = cna::to_schmidt_frame(chain);
  emit(cna::io::chain_json(chain, report, &frame), a.out);
  auto& log = summary(a.out);
  log << std::fixed << std::setprecision(6) << "(" << s.k << "," << s.d << "," << s.J
      << ")  P1=" << report.p1 << "  P2=" << report.p2 << "  fraction=" << report.fraction
      << "  S_ideal=" << report.s_ideal << std::scientific << std::setprecision(2)
      << "  max_residual=" << chain.max_residual() << '\n';
  if (a.schmidt) {
    log << std::fixed << std::setprecision(6) << "lambdas:";
    for (double l : frame.lambdas) log << ' ' << l;
    log << '\n';
  }
  return kExitOk;
}

struct LhvArgs {
  int k = 0, d = 0, J = 1;
  std::string graph;
  std::string out;
};

int run_lhv(const LhvArgs& a) {
  cna::Scenario s{a.k, a.d, a.J};
  try {
    s.validate();
  } catch (const cna::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto cert = cna::certify(s);
  Json j = cna::io::to_json(cert);
  const auto chain_graph = cna::chain_graph(s, true);
  j["chain_graph_has_directed_cycle"] = cna::has_directed_cycle(chain_graph);
  if (!a.graph.empty()) {
    cna::CompatibilityGraph g;
    try {
      g = cna::io::graph_from_json(read_json_file(a.graph));
    } catch (const cna::InvalidArgument& e) {
      throw UsageError(e.what());
    }
    j["graph"] = Json{{"has_directed_cycle", cna::has_directed_cycle(g)}, {"document", cna::io::to_json(g)}};
  }
  emit(j, a.out);
  summary(a.out) << "(" << s.k << "," << s.d << "," << s.J << ")  joint_event_impossible="
                 << std::boolalpha << cert.joint_event_impossible
                 << "  classical_fraction_bound=" << cert.classical_fraction_bound
                 << "  logical_bell_classical_max=" << cert.logical_bell_classical_max
                 << "  assignments=" << cert.assignments_checked << '\n';
  return kExitOk;
}

struct SimulateArgs {
  StateSource source;
  long long pairs = 0;
  std::uint64_t seed = 0;
  std::string csv;
  std::string out;
  bool emit_s = false;
  double q = 0.8;
  int window = 3;
};

int run_simulate(const SimulateArgs& a) {
  if (a.pairs < 1) throw UsageError("--pairs must be >= 1");
  const auto [s, state] = a.source.resolve();
  const auto chain = cna::build_chain(s, state);
  const auto ideal = cna::cabello_fraction(chain);
  const auto frame = cna::to_schmidt_frame(chain);
  if (a.window < 0 || !(a.q > 0.0)) throw UsageError("spectrum needs q > 0 and window >= 0");
  const auto source = cna::SourceSpectrum::geometric(a.q, a.window);
  const auto mask = cna::procrustean_mask(source, frame.lambdas, frame.oam_labels);

  const auto data = cna::simulate_coincidences(frame, static_cast<std::uint64_t>(a.pairs), a.seed);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw cna::Error("cannot write " + a.csv);
    cna::write_csv(out, data);
  }
  const auto est = cna::estimate(data, s);

  Json j = cna::io::to_json(est);
  j["pairs_per_setting"] = a.pairs;
  j["seed"] = a.seed;
  j["analytic"] = Json{{"fraction", ideal.fraction}, {"s_ideal", ideal.s_ideal}};
  j["concentration"] = Json{{"spectrum_q", a.q},
                            {"oam_labels", frame.oam_labels},
                            {"target_lambdas", frame.lambdas},
                            {"eta", mask.eta}};
  Json lab(nullptr);
  if (const auto* row = cna::fixtures::ReferenceTable::instance().find(s)) {
    lab = Json::object();
    if (row->lab_fraction) lab["fraction"] = cna::io::to_json(*row->lab_fraction);
    if (row->lab_bell) lab["bell_expression"] = cna::io::to_json(*row->lab_bell);
    lab["note"] = "laboratory values include apparatus noise that the simulator does not model";
  }
  j["laboratory_reference"] = std::move(lab);
  emit(j, a.out);

  auto& log = summary(a.out);
  log << std::fixed << std::setprecision(6) << "(" << s.k << "," << s.d << "," << s.J
      << ")  fraction=" << est.fraction << " +- " << est.fraction_err
      << "  analytic=" << ideal.fraction;
  if (a.emit_s) log << "  S=" << est.bell << " +- " << est.bell_err;
  log << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::string what;
  std::string table = "all";
  std::string only;
  int k = 0, d = 0;
  int restarts = 64;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string format = "json";
  std::string out;
};

int run_report(const ReportArgs& a) {
  cna::OptimizerConfig cfg;
  cfg.restarts = a.restarts;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  try {
    cfg.validate();
  } catch (const cna::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto& ref = cna::fixtures::ReferenceTable::instance();

  struct Cell {
    std::string table, quantity;
    int k, d;
    std::optional<double> computed, published;
    std::string status, message;
  };
  std::vector<Cell> cells;
  auto wanted = [&](const std::string& q) { return a.only.empty() || a.only == q; };

  for (const auto& row : ref.rows()) {
    const std::string table = row.scenario.d == 2 && row.scenario.k > 2 ? "settings_scan"
                                                                         : "dimension_scan";
    // (2, 2, 1) belongs to the dimension scan only.
    if (a.table == "1" && table != "settings_scan") continue;
    if (a.table == "2" && table != "dimension_scan") continue;
    if (a.k && row.scenario.k != a.k) continue;
    if (a.d && row.scenario.d != a.d) continue;

    std::optional<double> cab, har;
    std::string cab_err, har_err;
    const bool need_cab = wanted("cabello") || wanted("gap");
    const bool need_har = wanted("hardy") || wanted("gap");
    if (need_cab) {
      try {
        cab = cna::maximize_cabello(row.scenario, cfg).best_fraction;
      } catch (const cna::Error& e) {
        cab_err = e.what();
      }
    }
    if (need_har) {
      try {
        har = cna::maximize_hardy(row.scenario, cfg).best_fraction;
      } catch (const cna::Error& e) {
        har_err = e.what();
      }
    }
    auto add = [&](const std::string& q, std::optional<double> v, std::optional<double> pub,
                   double tol, const std::string& err) {
      Cell c{table, q, row.scenario.k, row.scenario.d, v, pub, "ok", err};
      if (!v) c.status = "error";
      else if (pub && std::abs(*v - *pub) > tol) c.status = "out_of_tolerance";
      cells.push_back(std::move(c));
    };
    if (wanted("cabello")) add("cabello", cab, row.cabello->value, kTableTolerance, cab_err);
    if (wanted("hardy")) add("hardy", har, row.hardy->value, kTableTolerance, har_err);
    if (wanted("gap")) {
      std::optional<double> gap;
      if (cab && har) gap = *cab - *har;
      add("gap", gap, row.gap->value, kGapTolerance, cab_err.empty() ? har_err : cab_err);
    }
  }

  bool all_ok = true;
  for (const auto& c : cells) all_ok = all_ok && c.status == "ok";

  if (a.format == "csv") {
    std::ostringstream os;
    os << "table,quantity,k,d,J,computed,published,delta,status\n" << std::setprecision(17);
    for (const auto& c : cells) {
      os << c.table << ',' << c.quantity << ',' << c.k << ',' << c.d << ",1,";
      if (c.computed) os << *c.computed;
      os << ',';
      if (c.published) os << *c.published;
      os << ',';
      if (c.computed && c.published) os << *c.computed - *c.published;
      os << ',' << c.status << '\n';
    }
    if (a.out.empty() || a.out == "-") {
      std::cout << os.str();
    } else {
      std::ofstream f(a.out);
      if (!f) throw cna::Error("cannot write " + a.out);
      f << os.str();
    }
  } else {
    Json rows = Json::array();
    for (const auto& c : cells) {
      Json r{{"table", c.table}, {"quantity", c.quantity}, {"k", c.k}, {"d", c.d}, {"J", 1},
             {"computed", c.computed ? Json(*c.computed) : Json(nullptr)},
             {"published", c.published ? Json(*c.published) : Json(nullptr)},
             {"delta", c.computed && c.published ? Json(*c.computed - *c.published) : Json(nullptr)},
             {"status", c.status}};
      if (!c.message.empty()) r["error"] = c.message;
      rows.push_back(std::move(r));
    }
    emit(Json{{"schema_version", cna::io::kSchemaVersion},
              {"config", cna::io::to_json(cfg)},
              {"cells", std::move(rows)},
              {"all_within_tolerance", all_ok}},
         a.out);
  }
  auto& log = summary(a.out);
  log << std::fixed << std::setprecision(6);
  for (const auto& c : cells) {
    log << c.quantity << " (" << c.k << "," << c.d << ",1)  computed=";
    if (c.computed) log << *c.computed; else log << "ERR";
    if (c.published) log << "  published=" << *c.published;
    log << "  " << c.status << '\n';
  }
  return all_ok ? kExitOk : kExitFailure;
}

/// Finds --config in argv and splices its values in right after the
/// subcommand token, so later command-line flags override them.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty() || args.empty()) return args;

  Json doc = read_json_file(path);
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  const std::string& sub = args.front();
  const Json& section = doc.contains(sub) && doc.at(sub).is_object() ? doc.at(sub) : doc;
  std::vector<std::string> injected;
  for (const auto& [key, value] : section.items()) {
    if (value.is_object()) continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_string()) {
      injected.push_back(flag);
      injected.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      injected.push_back(flag);
      injected.push_back(value.dump());
    } else {
      throw UsageError("config key '" + key + "' must be a scalar");
    }
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multisetting high-dimensional Cabello nonlocality toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "JSON file with default flag values")->expected(1);

  OptimizeArgs opt;
  DeriveArgs der;
  LhvArgs lhv;
  SimulateArgs sim;
  ReportArgs rep;

  try {
    opt.seed = sim.seed = rep.seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  auto* c_opt = app.add_subcommand("optimize", "Maximize the Cabello fraction or Hardy probability");
  c_opt->add_option("--k", opt.k, "Settings per party")->required();
  c_opt->add_option("--d", opt.d, "Outcomes per measurement")->required();
  c_opt->add_option("--J", opt.J, "Position of the nonzero edge");
  c_opt->add_option("--restarts", opt.restarts, "Random restarts");
  c_opt->add_option("--max-iter", opt.max_iter, "Simplex iterations per restart");
  c_opt->add_option("--tol", opt.tol, "Convergence tolerance");
  c_opt->add_option("--seed", opt.seed, "Generator seed (default: $CNA_SEED or 7)");
  c_opt->add_flag("--complex", opt.complex, "Search complex amplitudes");
  c_opt->add_flag("--no-warm-start", opt.no_warm, "Do not seed restart 0 at a published state");
  c_opt->add_flag("--hardy", opt.hardy, "Maximize the Hardy probability instead");
  c_opt->add_flag("--scan-J", opt.scan, "Scan J = 1..k");
  c_opt->add_option("--threads", opt.threads, "Worker threads (0: all cores)");
  c_opt->add_option("--out", opt.out, "Output JSON path (default stdout)");
  c_opt->add_flag("--no-meta", opt.no_meta, "Omit timing metadata");

  auto* c_der = app.add_subcommand("derive", "Build the measurement chain for a state");
  der.source.add_to(c_der);
  c_der->add_flag("--schmidt", der.schmidt, "Print the Schmidt coefficients");
  c_der->add_option("--out", der.out, "Output JSON path (default stdout)");
  c_der->add_flag("--no-meta", "Accepted for symmetry; derive emits no metadata");

  auto* c_lhv = app.add_subcommand("lhv", "Certify the classical bounds by enumeration");
  c_lhv->add_option("--k", lhv.k, "Settings per party")->required();
  c_lhv->add_option("--d", lhv.d, "Outcomes per measurement")->required();
  c_lhv->add_option("--J", lhv.J, "Position of the nonzero edge");
  c_lhv->add_option("--graph", lhv.graph, "Compatibility graph JSON to test for directed cycles");
  c_lhv->add_option("--out", lhv.out, "Output JSON path (default stdout)");
  c_lhv->add_flag("--no-meta", "Accepted for symmetry; lhv emits no metadata");

  auto* c_sim = app.add_subcommand("simulate", "Simulate coincidence counts and estimate");
  sim.source.add_to(c_sim);
  c_sim->add_option("--pairs", sim.pairs, "Mean photon pairs per setting pair")->required();
  c_sim->add_option("--seed", sim.seed, "Generator seed (default: $CNA_SEED or 7)");
  c_sim->add_option("--csv", sim.csv, "Write the coincidence dataset as CSV");
  c_sim->add_option("--out", sim.out, "Estimate JSON path (default stdout)");
  c_sim->add_flag("--emit-s", sim.emit_s, "Print the Bell-expression estimate");
  c_sim->add_option("--spectrum-q", sim.q, "Source spectrum decay C_l ~ q^|l|");
  c_sim->add_option("--spectrum-window", sim.window, "Source spectrum covers |l| <= window");
  c_sim->add_flag("--no-meta", "Accepted for symmetry; simulate emits no metadata");

  auto* c_rep = app.add_subcommand("report", "Recompute published tables");
  c_rep->add_option("what", rep.what, "Report kind")->required()->check(CLI::IsMember({"tables"}));
  c_rep->add_option("--table", rep.table, "1, 2 or all")->check(CLI::IsMember({"1", "2", "all"}));
  c_rep->add_option("--only", rep.only, "Restrict to one quantity")
      ->check(CLI::IsMember({"cabello", "hardy", "gap"}));
  c_rep->add_option("--k", rep.k, "Restrict to settings k");
  c_rep->add_option("--d", rep.d, "Restrict to dimension d");
  c_rep->add_option("--restarts", rep.restarts, "Random restarts per cell");
  c_rep->add_option("--seed", rep.seed, "Generator seed (default: $CNA_SEED or 7)");
  c_rep->add_option("--threads", rep.threads, "Worker threads (0: all cores)");
  c_rep->add_option("--format", rep.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  c_rep->add_option("--out", rep.out, "Output path (default stdout)");
  c_rep->add_flag("--no-meta", "Accepted for symmetry; report emits no metadata");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (c_opt->parsed()) return run_optimize(opt);
    if (c_der->parsed()) return run_derive(der);
    if (c_lhv->parsed()) return run_lhv(lhv);
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_rep->parsed()) return run_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cna::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
