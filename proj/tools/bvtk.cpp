// bvtk: command-line front end for the variation, identity, kernel and
// compactness checks.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bvtk/compactness.hpp"
#include "bvtk/error.hpp"
#include "bvtk/harness.hpp"
#include "bvtk/kernel.hpp"
#include "bvtk/operator.hpp"
#include "bvtk/sweep.hpp"
#include "bvtk/variation.hpp"
#include "bvtk/young.hpp"
#include "text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using bvtk::text::fmt_real;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;
constexpr int kDepthCap = 8;

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string phi = "jordan";
  double tol = 1e-9;
  int depth = -1;  // -1: subcommand default
  std::uint64_t seed = kDefaultSeed;
  std::string report;
  bool json = false;
  std::string exec = "parallel";
};

// Text and JSON are built side by side and flushed once at the end so that
// reports are byte-identical for identical configs.
class Report {
 public:
  explicit Report(const RunConfig& cfg) {
    doc_["subcommand"] = cfg.subcommand;
    text_ << "# bvtk " << cfg.subcommand << '\n';
  }

  void config(const std::string& key, const json& value) {
    doc_["config"][key] = value;
    text_ << "config " << key << " = " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }

  std::ostream& text() { return text_; }
  json& doc() { return doc_; }

  void check(const std::string& name, bool ok) {
    doc_["checks"][name] = ok;
    text_ << "check " << name << ": " << (ok ? "PASS" : "FAIL") << '\n';
    all_ok_ = all_ok_ && ok;
  }
  bool ok() const { return all_ok_; }

  std::string render(bool with_json) {
    std::string out = text_.str();
    out += std::string("status: ") + (all_ok_ ? "PASS" : "FAIL") + '\n';
    if (with_json) {
      doc_["status"] = all_ok_ ? "pass" : "fail";
      out += "--- json ---\n" + doc_.dump(2) + '\n';
    }
    return out;
  }

 private:
  std::ostringstream text_;
  json doc_ = json::object();
  bool all_ok_ = true;
};

void echo_common(Report& r, const RunConfig& c, int depth) {
  r.config("phi", c.phi);
  r.config("tol", c.tol);
  if (depth >= 0) r.config("depth", depth);
  r.config("seed", c.seed);
  r.config("exec", c.exec);
}

json interval_json(const bvtk::Grid& g, const bvtk::GridInterval& I) { return json::array({g[I.lo], g[I.hi]}); }

json witness_json(const bvtk::VariationValue& v, const bvtk::Grid& g) {
  json w = json::array();
  for (std::size_t j = 0; j < v.witness.size(); ++j) {
    const auto& I = v.witness.intervals[j];
    w.push_back({{"lo", I.lo}, {"hi", I.hi}, {"t", interval_json(g, I)}, {"phi", v.witness.assignment[j]}});
  }
  return w;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : bvtk::text::split(s, ',')) out.push_back(bvtk::text::parse_real(bvtk::text::trim(part), "list entry"));
  return out;
}

// "a:b,c:d" in grid coordinates; each endpoint must be a grid point.
std::vector<bvtk::GridInterval> parse_pool(const std::string& s, const bvtk::Grid& g) {
  std::vector<bvtk::GridInterval> pool;
  for (const auto& part : bvtk::text::split(s, ',')) {
    const auto ends = bvtk::text::split(bvtk::text::trim(part), ':');
    if (ends.size() != 2) throw bvtk::ParameterError("pool interval '" + std::string(part) + "' is not a:b");
    const auto lo = g.find(bvtk::text::parse_real(ends[0], "pool endpoint"));
    const auto hi = g.find(bvtk::text::parse_real(ends[1], "pool endpoint"));
    if (!lo || !hi || *lo >= *hi) throw bvtk::ParameterError("pool interval '" + std::string(part) + "' is not a grid interval");
    pool.push_back(bvtk::GridInterval{*lo, *hi});
  }
  return pool;
}

std::vector<bvtk::SampledFunction> load_set(const std::string& dir, std::vector<std::string>& names) {
  if (!fs::is_directory(dir)) throw bvtk::ParameterError("'" + dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<bvtk::SampledFunction> set;
  for (const auto& f : files) {
    set.push_back(bvtk::load_sampled_function(f.string()));
    names.push_back(f.filename().string());
    if (!(set.back().grid() == set.front().grid())) {
      throw bvtk::ParameterError("'" + f.string() + "' does not share the grid of '" + files.front().string() + "'");
    }
  }
  if (set.empty()) throw bvtk::ParameterError("'" + dir + "' holds no function files");
  return set;
}

// ---------------------------------------------------------------- var

struct VarArgs {
  std::string file;
  bool oracle = false;
};

void cmd_var(const RunConfig& c, const VarArgs& a, Report& r) {
  r.config("file", a.file);
  echo_common(r, c, -1);
  r.config("oracle", a.oracle);
  const auto x = bvtk::load_sampled_function(a.file);
  const auto seq = bvtk::parse_sequence(c.phi);

  bvtk::SearchOptions search;
  if (a.oracle) {
    search.extremal_pruning = false;
    search.tie_tolerance = 0.0;
  }
  const double jv = bvtk::jordan_var(x);
  const auto pv = bvtk::phi_var(x, seq, search);
  const double lux = bvtk::luxemburg(x, seq, bvtk::IntervalFamily::all(), c.tol, search);
  const double norm = std::abs(x[0]) + lux;

  auto& out = r.text();
  out << "points " << x.size() << '\n';
  out << "jordan_var " << fmt_real(jv) << '\n';
  out << "phi_var\n";
  bvtk::write_variation_report(out, pv, x);
  out << "luxemburg " << fmt_real(lux) << '\n';
  out << "norm_phi " << fmt_real(norm) << '\n';
  auto& d = r.doc();
  d["points"] = x.size();
  d["jordan_var"] = jv;
  d["phi_var"] = {{"value", pv.value}, {"method", bvtk::to_string(pv.method)}, {"witness", witness_json(pv, x.grid())}};
  d["luxemburg"] = lux;
  d["norm_phi"] = norm;

  if (a.oracle) {
    const auto ov = bvtk::phi_var_oracle(x, seq, x.grid().cells());
    out << "oracle " << fmt_real(ov.value) << '\n';
    d["oracle"] = ov.value;
    r.check("oracle_equal", ov.value == pv.value);
  }
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
  std::string kernel = "volterra";
  std::size_t base_cells = 8;
  std::string eps = "0.05,0.1,0.25,0.5,1";
};

void cmd_kernel(const RunConfig& c, const KernelArgs& a, Report& r) {
  const int depth = c.depth < 0 ? 2 : c.depth;
  r.config("kernel", a.kernel);
  echo_common(r, c, depth);
  r.config("base_cells", a.base_cells);
  r.config("eps", a.eps);

  const auto k = bvtk::parse_kernel(a.kernel);
  const auto seq = bvtk::parse_sequence(c.phi);
  bvtk::DiagnoseConfig cfg;
  cfg.base_cells = a.base_cells;
  cfg.depth = static_cast<std::size_t>(depth);
  cfg.eps = parse_real_list(a.eps);
  cfg.options.tol = c.tol;
  cfg.options.exec = bvtk::parse_execution(c.exec);
  const auto diag = bvtk::diagnose_kernel(k, seq, cfg);

  r.text() << "kernel " << k.name() << '\n';
  bvtk::write_kernel_report(r.text(), diag);

  json levels = json::array();
  bool consistent = true;
  for (const auto& l : diag.levels) {
    json eps_table = json::array();
    for (std::size_t i = 0; i < l.h3.eps.size(); ++i) eps_table.push_back({l.h3.eps[i], l.h3.delta[i]});
    json omega = json::array();
    for (std::size_t i = 0; i < l.h3.ladder.size(); ++i) omega.push_back({l.h3.ladder[i], l.h3.omega[i]});
    json lv = {{"level", l.level},
               {"points", l.points},
               {"mu_unbounded", l.mu.unbounded},
               {"mu", l.mu.unbounded ? json(nullptr) : json(l.mu.value)},
               {"M", l.M},
               {"omega", omega},
               {"delta", eps_table}};
    if (l.h2_check.applicable) {
      lv["h3_implies_h2"] = {{"n", l.h2_check.n}, {"mu", l.h2_check.mu},
                             {"worst_variation", l.h2_check.worst_variation}, {"pass", l.h2_check.pass}};
      consistent = consistent && l.h2_check.pass;
    }
    levels.push_back(lv);
  }
  r.doc()["kernel"] = k.name();
  r.doc()["levels"] = levels;
  r.doc()["trend"] = {{"h2", diag.h2_verdict}, {"h3", diag.h3_verdict}};
  r.check("h3_implies_h2", consistent);
}

// ---------------------------------------------------------------- identities

struct IdentityArgs {
  std::size_t n = 200;
  bool linear_phi = false;
};

void cmd_identities(const RunConfig& c, const IdentityArgs& a, Report& r) {
  r.config("n", a.n);
  r.config("seed", c.seed);
  r.config("linear_phi", a.linear_phi);
  bvtk::harness::IdentityOptions o;
  o.n = a.n;
  o.seed = c.seed;
  o.linear_phi = a.linear_phi;
  r.config("reduction_tol", o.reduction_tol);
  r.config("jensen_tol", o.jensen_tol);
  r.config("parts_levels", json::array({o.parts_min_level, o.parts_max_level}));
  const auto s = bvtk::harness::run_identity_suite(o);

  auto& out = r.text();
  out << "reduction max residual " << fmt_real(s.reduction_max) << " failures " << s.reduction_fail << '\n';
  out << "jensen margin min " << fmt_real(s.jensen_min) << " max " << fmt_real(s.jensen_max) << " failures " << s.jensen_fail << '\n';
  out << "parts order (finest pair, fitted)\n";
  for (std::size_t i = 0; i < s.parts_orders.size(); ++i) {
    out << "  pair " << i << ' ' << fmt_real(s.parts_orders[i]) << ' ' << fmt_real(s.parts_fit[i]) << '\n';
  }
  r.doc()["reduction"] = {{"max_residual", s.reduction_max}, {"failures", s.reduction_fail}};
  r.doc()["jensen"] = {{"min_margin", s.jensen_min}, {"max_margin", s.jensen_max}, {"failures", s.jensen_fail}};
  r.doc()["parts"] = {{"order", s.parts_orders}, {"fitted", s.parts_fit}, {"failures", s.parts_fail}};
  r.check("reduction", s.reduction_fail == 0);
  r.check("jensen", s.jensen_fail == 0);
  r.check("parts_order", s.parts_fail == 0);
}

// ---------------------------------------------------------------- compactness

struct CompactnessArgs {
  std::string dir;
  std::string eps = "0.5,0.1,0.01";
  std::string pool;
  std::size_t max_family = 24;
  bool demo = false;
  std::string kernel = "volterra";
  std::size_t count = 64;
  double decay_tol = 0.05;
  bool strict = false;
};

void cmd_compactness(const RunConfig& c, const CompactnessArgs& a, Report& r) {
  const int depth = c.depth < 0 ? 3 : c.depth;
  if (!a.dir.empty()) r.config("dir", a.dir);
  echo_common(r, c, depth);
  r.config("eps", a.eps);
  if (!a.pool.empty()) r.config("pool", a.pool);
  r.config("max_family", a.max_family);
  r.config("strict", a.strict);
  if (a.demo) {
    r.config("demo_kernel", a.kernel);
    r.config("demo_count", a.count);
    r.config("decay_tol", a.decay_tol);
  }
  if (a.dir.empty() && !a.demo) throw bvtk::ParameterError("compactness needs --dir, --demo, or both");

  const auto seq = bvtk::parse_sequence(c.phi);
  const auto exec = bvtk::parse_execution(c.exec);
  auto& out = r.text();

  if (!a.dir.empty()) {
    std::vector<std::string> names;
    const auto A = load_set(a.dir, names);
    const auto& g = A.front().grid();
    const auto pool = a.pool.empty() ? bvtk::dyadic_pool(g, static_cast<std::size_t>(depth)) : parse_pool(a.pool, g);
    out << "set " << A.size() << " functions on " << g.size() << " points\n";
    for (std::size_t i = 0; i < names.size(); ++i) out << "  " << i << ' ' << names[i] << '\n';
    out << "pool " << pool.size() << " intervals\n";

    bvtk::EquinormOptions o;
    o.tol = c.tol;
    o.max_family = a.max_family;
    o.exec = exec;
    json runs = json::array();
    bool verified = true;
    bool certified = true;
    for (const double eps : parse_real_list(a.eps)) {
      const auto res = bvtk::equinormed_search(A, seq, eps, pool, o);
      out << "eps " << fmt_real(eps) << '\n';
      bvtk::write_certificate(out, res, A);
      json run = {{"eps", eps}, {"certified", res.certificate.has_value()}, {"steps", res.steps}};
      json fam = json::array();
      for (const auto& I : res.family) fam.push_back(interval_json(g, I));
      run["family"] = fam;
      run["margin"] = res.margin;
      run["worst_pair"] = {res.worst_i, res.worst_j};
      if (res.certificate) {
        const auto chk = bvtk::verify_certificate(A, seq, *res.certificate, c.tol, 2.0 * c.tol);
        out << "  reverified margin " << fmt_real(chk.margin) << " max disagreement " << fmt_real(chk.max_disagreement)
            << ' ' << (chk.valid ? "ok" : "DISCREPANCY") << '\n';
        run["reverified"] = {{"margin", chk.margin}, {"max_disagreement", chk.max_disagreement}, {"valid", chk.valid}};
        verified = verified && chk.valid;
      } else {
        run["note"] = res.note;
        certified = false;
      }
      runs.push_back(run);
    }
    r.doc()["set_size"] = A.size();
    r.doc()["files"] = names;
    r.doc()["searches"] = runs;
    r.check("certificates_reverify", verified);
    if (a.strict) r.check("all_certified", certified);
  }

  if (a.demo) {
    const auto k = bvtk::parse_kernel(a.kernel);
    const auto grid = bvtk::Grid::uniform(std::size_t{1} << std::min(depth + 5, 12));
    const auto xs = bvtk::shrinking_support_sequence(grid, a.count);
    const auto rep = bvtk::compactness_equiv_demo(k, seq, xs, grid, c.tol, a.decay_tol, bvtk::Extension::left_value, exec);
    out << "demo " << k.name() << " on " << grid.size() << " points\n";
    for (std::size_t v = 0; v < xs.size(); ++v) {
      out << "  v " << v + 1 << " bv " << fmt_real(rep.bv_norms[v]) << " image " << fmt_real(rep.image_norms[v]) << '\n';
    }
    if (rep.decays) {
      out << "  decays below " << fmt_real(a.decay_tol) << " at v " << rep.first_below + 1 << '\n';
    } else {
      out << "  no decay below " << fmt_real(a.decay_tol) << " within the sequence\n";
    }
    r.doc()["demo"] = {{"kernel", k.name()},
                       {"points", grid.size()},
                       {"image_norms", rep.image_norms},
                       {"decays", rep.decays},
                       {"first_below", rep.decays ? json(rep.first_below + 1) : json(nullptr)}};
    if (a.strict) r.check("demo_decays", rep.decays);
  }
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::size_t n = 200;
  std::size_t points = 6;
  std::string mode = "exact";
};

void cmd_oracle(const RunConfig& c, const OracleArgs& a, Report& r) {
  r.config("n", a.n);
  r.config("seed", c.seed);
  r.config("points", a.points);
  r.config("mode", a.mode);
  if (a.mode != "exact" && a.mode != "pruned") throw bvtk::ParameterError("mode must be exact or pruned");
  bvtk::harness::OracleOptions o;
  o.n = a.n;
  o.seed = c.seed;
  o.max_points = a.points;
  o.exact = a.mode == "exact";
  const auto s = bvtk::harness::run_oracle_suite(o);
  auto& out = r.text();
  out << "sequences";
  for (const auto& ns : bvtk::harness::oracle_sequences()) out << ' ' << ns.label;
  out << '\n';
  out << "comparisons " << s.comparisons << " mismatches " << s.mismatches.size() << " worst relative "
      << fmt_real(s.worst_rel) << '\n';
  json mism = json::array();
  for (const auto& m : s.mismatches) {
    out << "  trial " << m.trial << ' ' << m.sequence << " search " << fmt_real(m.search) << " oracle "
        << fmt_real(m.oracle) << '\n';
    mism.push_back({{"trial", m.trial}, {"sequence", m.sequence}, {"search", m.search}, {"oracle", m.oracle}});
  }
  r.doc()["comparisons"] = s.comparisons;
  r.doc()["worst_relative"] = s.worst_rel;
  r.doc()["mismatches"] = mism;
  r.check("oracle_equivalence", s.pass());
}

void add_common(CLI::App* sub, RunConfig& c, bool with_depth, bool with_phi) {
  if (with_phi) sub->add_option("--phi", c.phi, "Young sequence preset")->capture_default_str();
  sub->add_option("--tol", c.tol, "bisection tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  if (with_depth) sub->add_option("--depth", c.depth, "refinement depth")->check(CLI::Range(0, kDepthCap));
  sub->add_option("--seed", c.seed, "seed for randomized suites")->capture_default_str();
  sub->add_option("--report", c.report, "also write the report to this path");
  sub->add_flag("--json", c.json, "append a JSON block to the report");
  sub->add_option("--exec", c.exec, "serial or parallel")->capture_default_str()->check(
      CLI::IsMember({"serial", "parallel"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bvtk: Phi-variation, Stieltjes identities, kernel diagnostics and compactness checks"};
  app.require_subcommand(1);
  RunConfig cfg;

  VarArgs var_args;
  auto* var = app.add_subcommand("var", "variation, Luxemburg norm and witness of a sampled function");
  var->add_option("file", var_args.file, "two-column function file")->required();
  var->add_flag("--oracle", var_args.oracle, "also run the exhaustive oracle and require equality");
  add_common(var, cfg, false, true);

  KernelArgs kernel_args;
  auto* kernel = app.add_subcommand("kernel", "H2/H3 diagnostics of an integral kernel");
  kernel->add_option("--kernel", kernel_args.kernel, "volterra, constant:c=<real>, separable:g=<file>,h=<file> or a file")
      ->capture_default_str();
  kernel->add_option("--base-cells", kernel_args.base_cells, "cells of the coarsest builtin grid")->capture_default_str();
  kernel->add_option("--eps", kernel_args.eps, "comma-separated eps for the delta(eps) table")->capture_default_str();
  add_common(kernel, cfg, true, true);

  IdentityArgs id_args;
  auto* ident = app.add_subcommand("identities", "reduction, parts and Jensen checks on seeded random instances");
  ident->add_option("--n", id_args.n, "random instances")->capture_default_str();
  ident->add_flag("--linear-phi", id_args.linear_phi, "use linear phi in the Jensen checks");
  add_common(ident, cfg, false, false);

  CompactnessArgs cp_args;
  auto* cp = app.add_subcommand("compactness", "equinormed search over a function set, and the operator demo");
  cp->add_option("--dir", cp_args.dir, "directory of function files sharing one grid");
  cp->add_option("--eps", cp_args.eps, "comma-separated eps ladder")->capture_default_str();
  cp->add_option("--pool", cp_args.pool, "explicit pool a:b,c:d (default: dyadic pool of --depth)");
  cp->add_option("--max-family", cp_args.max_family, "largest family tried")->capture_default_str();
  cp->add_flag("--demo", cp_args.demo, "run the shrinking-support demo against --kernel");
  cp->add_option("--kernel", cp_args.kernel, "kernel for --demo")->capture_default_str();
  cp->add_option("--count", cp_args.count, "length of the demo sequence")->capture_default_str();
  cp->add_option("--decay-tol", cp_args.decay_tol, "demo decay threshold")->capture_default_str();
  cp->add_flag("--strict", cp_args.strict, "treat uncertified eps and missing decay as failures");
  add_common(cp, cfg, true, true);

  OracleArgs or_args;
  auto* orc = app.add_subcommand("oracle", "search against the exhaustive oracle on small random grids");
  orc->add_option("--n", or_args.n, "random functions")->capture_default_str();
  orc->add_option("--points", or_args.points, "largest grid size")->capture_default_str()->check(CLI::Range(2, 8));
  orc->add_option("--mode", or_args.mode, "exact or pruned")->capture_default_str();
  add_common(orc, cfg, false, false);

  CLI11_PARSE(app, argc, argv);
  cfg.subcommand = app.get_subcommands().front()->get_name();

  const auto start = std::chrono::steady_clock::now();
  Report report(cfg);
  try {
    if (cfg.subcommand == "var") cmd_var(cfg, var_args, report);
    else if (cfg.subcommand == "kernel") cmd_kernel(cfg, kernel_args, report);
    else if (cfg.subcommand == "identities") cmd_identities(cfg, id_args, report);
    else if (cfg.subcommand == "compactness") cmd_compactness(cfg, cp_args, report);
    else cmd_oracle(cfg, or_args, report);
  } catch (const bvtk::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string rendered = report.render(cfg.json);
  std::cout << rendered;
  if (!cfg.report.empty()) {
    std::ofstream f(cfg.report);
    if (!f) {
      std::cerr << "error: cannot write report '" << cfg.report << "'\n";
      return 2;
    }
    f << rendered;
  }
  std::cerr << "runtime " << secs << " s, threads " << bvtk::sweep_threads() << '\n';
  return report.ok() ? 0 : 1;
}
