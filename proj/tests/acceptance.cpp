// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cna/experiment.hpp"
#include "cna/fixtures.hpp"
#include "cna/io.hpp"
#include "cna/lhv.hpp"
#include "cna/optimizer.hpp"
#include "cna/scenario.hpp"

using namespace cna;
using io::Json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CliRun {
  int code;
  std::string out;
  double seconds;
};

CliRun cli(const std::string& args) {
  const auto t0 = Clock::now();
  const std::string cmd = std::string(CNA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, "", 0.0};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, seconds_since(t0)};
}

ComplexMatrix matrix_from(const Json& j) {
  const auto& re = j.at("real");
  const Json* im = j.contains("imag") ? &j.at("imag") : nullptr;
  const auto d = static_cast<Eigen::Index>(re.size());
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      m(r, c) = Complex(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(),
                        im ? (*im)[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>() : 0.0);
  return m;
}

double row_phase_distance(const ComplexMatrix& got, const ComplexMatrix& want) {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < got.rows(); ++s) {
    Complex overlap = 0.0;
    for (Eigen::Index g = 0; g < got.cols(); ++g) overlap += std::conj(want(s, g)) * got(s, g);
    const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1, 0);
    worst = std::max(worst, (got.row(s) - phase * want.row(s)).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x;
  return os.str();
}

const Json* cell(const Json& report, const std::string& quantity, int k, int d) {
  for (const auto& c : report.at("cells")) {
    if (c.at("quantity") == quantity && c.at("k") == k && c.at("d") == d) return &c;
  }
  return nullptr;
}

bool cell_within(const Json& report, const std::string& quantity, int k, int d, double published,
                 double tol, std::ostringstream& log) {
  const Json* c = cell(report, quantity, k, d);
  if (!c || c->at("computed").is_null()) {
    log << " " << quantity << "(" << k << "," << d << ")=missing";
    return false;
  }
  const double v = c->at("computed").get<double>();
  log << " " << quantity << "(" << k << "," << d << ")=" << fmt(v);
  return std::abs(v - published) <= tol;
}

// Shared across criteria 1 and 2: one full `report tables` run.
struct TablesRun {
  CliRun run;
  Json doc;
  bool ok = false;
};

const TablesRun& tables() {
  static const TablesRun t = [] {
    TablesRun r;
    r.run = cli("report tables --restarts 64 --format json");
    try {
      r.doc = Json::parse(r.run.out);
      r.ok = true;
    } catch (const std::exception&) {
      r.ok = false;
    }
    return r;
  }();
  return t;
}

Outcome criterion_1() {
  const auto& t = tables();
  if (!t.ok) return {false, "report tables produced no JSON (exit " + std::to_string(t.run.code) + ")"};
  std::ostringstream log;
  bool pass = true;
  const double want[] = {0.207107, 0.259733, 0.295755, 0.321900};
  for (int k = 3; k <= 6; ++k) pass &= cell_within(t.doc, "cabello", k, 2, want[k - 3], 5e-4, log);
  pass &= t.run.seconds <= 600.0;
  log << " runtime=" << fmt(t.run.seconds, 1) << "s (both tables, 64 restarts)";
  return {pass, log.str()};
}

Outcome criterion_2() {
  const auto& t = tables();
  if (!t.ok) return {false, "report tables produced no JSON"};
  std::ostringstream log;
  bool pass = true;
  const double cab[] = {0.125000, 0.193093, 0.238389};
  const double har[] = {0.090170, 0.141327, 0.176512};
  const double gap[] = {0.034830, 0.051766, 0.061877};
  for (int d = 2; d <= 4; ++d) {
    pass &= cell_within(t.doc, "cabello", 2, d, cab[d - 2], 5e-4, log);
    pass &= cell_within(t.doc, "hardy", 2, d, har[d - 2], 5e-4, log);
    pass &= cell_within(t.doc, "gap", 2, d, gap[d - 2], 1e-3, log);
  }
  return {pass, log.str()};
}

Outcome criterion_3() {
  OptimizerConfig cfg;  // 64 restarts, fixed seed
  std::ostringstream log;
  bool pass = true;
  const auto scan = scan_J(5, 2, cfg);
  const auto& want = fixtures::ReferenceTable::j_scan_5_2();
  log << "(5,2) scan:";
  double top = -1.0;
  int arg = 0;
  for (const auto& e : scan) {
    log << " " << fmt(e.fraction);
    pass &= std::abs(e.fraction - want[static_cast<std::size_t>(e.J - 1)]) <= 5e-4;
    if (e.fraction > top) top = e.fraction, arg = e.J;
  }
  pass &= arg == 1;
  log << "; argmax J=" << arg << "; mirror gaps:";
  for (int k : {3, 4}) {
    double worst = 0.0;
    for (int J = 1; J < k; ++J) {
      const double a = maximize_cabello(Scenario::make(k, 2, J), cfg).best_fraction;
      const double b = maximize_cabello(Scenario::make(k, 2, 2 * k - J), cfg).best_fraction;
      worst = std::max(worst, std::abs(a - b));
    }
    log << " k=" << k << " max|Δ|=" << sci(worst);
    pass &= worst <= 1e-3;
  }
  return {pass, log.str()};
}

Outcome criterion_4() {
  const auto r = maximize_cabello(Scenario::make(2, 2, 2), OptimizerConfig{});
  return {std::abs(r.best_fraction - 0.1078) <= 5e-4,
          "(2,2,2) optimum=" + fmt(r.best_fraction) + " vs 0.1078"};
}

Outcome criterion_5() {
  const auto run = cli("derive --fixture H_2_2_1");
  if (run.code != 0) return {false, "derive exited " + std::to_string(run.code)};
  const Json j = Json::parse(run.out);
  const double f = j.at("report").at("fraction").get<double>();
  const double residual = j.at("max_residual").get<double>();
  const auto& lambdas = j.at("schmidt_frame").at("lambdas");
  const double l0 = lambdas[0].get<double>(), l1 = lambdas[1].get<double>();
  const auto* ref = fixtures::find_frame_bases("H_2_2_1");
  double frame_dist = 0.0;
  for (const auto& b : j.at("schmidt_frame").at("bases")) {
    frame_dist = std::max(frame_dist, row_phase_distance(matrix_from(b.at("rows")), ref->chain_basis(b.at("index").get<int>())));
  }
  const bool pass = std::abs(f - 0.125) <= 5e-6 && residual <= 1e-10 &&
                    std::abs(l0 - 0.866025) <= 1e-5 && std::abs(l1 - 0.5) <= 1e-5 && frame_dist <= 1e-4;
  return {pass, "fraction=" + fmt(f) + " residual=" + sci(residual) + " lambdas=(" + fmt(l0) + ", " +
                    fmt(l1) + ") frame distance=" + sci(frame_dist)};
}

Outcome criterion_6() {
  double worst = 0.0;
  for (const auto& f : fixtures::states()) {
    const auto form = schmidt_decompose(f.state().h());
    for (std::size_t g = 0; g < form.lambdas.size(); ++g) {
      worst = std::max(worst, std::abs(form.lambdas[g] - f.schmidt_diagonal[g]));
    }
  }
  return {worst <= 1e-5, "7 fixtures, max |Δλ|=" + sci(worst)};
}

Outcome criterion_7() {
  const auto t0 = Clock::now();
  bool pass = true;
  int scenarios = 0;
  for (const auto& row : fixtures::ReferenceTable::instance().rows()) {
    const int k = row.scenario.k, d = row.scenario.d;
    for (int J = 1; J < 2 * k; ++J) {
      const auto c = certify(Scenario::make(k, d, J));
      pass &= c.joint_event_impossible && c.classical_fraction_bound == 0.0 &&
              c.logical_bell_classical_max == 2.0 * k - 1.0;
      ++scenarios;
    }
  }
  const double secs = seconds_since(t0);
  pass &= secs <= 10.0;
  return {pass, std::to_string(scenarios) + " (k,d,J) scenarios over the 7 tabulated (k,d) pairs, " +
                    fmt(secs, 3) + "s"};
}

Outcome criterion_8() {
  double worst = 0.0;
  for (const auto& f : fixtures::states()) {
    const auto r = cabello_fraction(build_chain(f.scenario, f.state()));
    worst = std::max(worst, std::abs(r.s_ideal - r.fraction));
  }
  return {worst <= 1e-12, "max |S_ideal - fraction|=" + sci(worst)};
}

Outcome criterion_9() {
  const auto t0 = Clock::now();
  const auto* f = fixtures::find_state("H_2_4_1");
  const auto frame = to_schmidt_frame(build_chain(f->scenario, f->state()));
  const double truth = 0.238389;
  std::vector<double> values;
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto e = estimate(simulate_coincidences(frame, 100000, seed), f->scenario);
    values.push_back(e.fraction);
    covered += std::abs(e.fraction - truth) <= 3.0 * e.fraction_err;
  }
  double mean = 0.0, var = 0.0;
  for (double v : values) mean += v / 100.0;
  for (double v : values) var += (v - mean) * (v - mean) / 99.0;
  const double sem = std::sqrt(var) / 10.0;
  const double secs = seconds_since(t0);
  const bool pass = std::abs(mean - truth) <= 3.0 * sem && covered >= 95 && secs <= 120.0;
  return {pass, "mean=" + fmt(mean) + " sem=" + sci(sem) + " |mean-truth|/sem=" +
                    fmt(std::abs(mean - truth) / sem, 2) + " coverage=" + std::to_string(covered) +
                    "/100 runtime=" + fmt(secs, 2) + "s"};
}

Outcome criterion_10(bool properties_passed) {
  const auto& t = fixtures::ReferenceTable::instance();
  bool shipped = true;
  for (const auto& r : t.rows()) shipped &= r.lab_fraction.has_value() && r.lab_bell.has_value();
  const auto* six = t.find({6, 2, 1});
  const auto* two = t.find({2, 4, 1});
  shipped &= six && six->lab_fraction->value == 0.2872 && six->lab_fraction->error == 0.0029;
  shipped &= two && two->lab_fraction->value == 0.2029 && two->lab_fraction->error == 0.0127;
  const auto run = cli("simulate --fixture H_6_2_1 --pairs 10000 --seed 5");
  bool displayed = false;
  double simulated = 0.0;
  if (run.code == 0) {
    const Json j = Json::parse(run.out);
    displayed = j.at("laboratory_reference").contains("fraction") && j.at("laboratory_reference").contains("note");
    simulated = j.at("fraction").at("value").get<double>();
  }
  return {shipped && displayed && properties_passed,
          "lab values are display-only (not reproduced): (6,2,1) lab 0.2872 vs simulated " + fmt(simulated, 4) +
              "; reference rows shipped=" + (shipped ? "yes" : "no") + ", shown by simulate=" +
              (displayed ? "yes" : "no") + ", property criteria 7-9 " + (properties_passed ? "passed" : "FAILED")};
}

}  // namespace

int main() {
  int failures = 0;
  std::vector<bool> passed(11, false);
  auto report = [&](int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    passed[static_cast<std::size_t>(id)] = o.pass;
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << title
              << ": " << o.detail << "  [" << fmt(seconds_since(t0), 1) << "s]" << std::endl;
  };

  report(1, "settings-scan Cabello fractions via report tables", criterion_1);
  report(2, "dimension-scan Cabello, Hardy and gap columns", criterion_2);
  report(3, "break-position scan and mirror symmetry", criterion_3);
  report(4, "two-setting two-outcome J=2 optimum", criterion_4);
  report(5, "golden chain derive --fixture H_2_2_1", criterion_5);
  report(6, "Schmidt diagonals of all fixtures", criterion_6);
  report(7, "LHV certificates by enumeration", criterion_7);
  report(8, "S identity on golden chains", criterion_8);
  report(9, "simulator calibration H_2_4_1, N=1e5, 100 seeds", criterion_9);
  report(10, "laboratory values as reference only", [&] { return criterion_10(passed[7] && passed[8] && passed[9]); });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
