// abreu-kit: command-line front end.
//
// Exit status: 0 success, 1 domain error, 2 usage or parse error.

#include "abreu/abreu.hpp"
#include "abreu/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using abreu::io::json;

constexpr const char* kVersion = "0.1.0";

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string num(double v) { return abreu::io::format_double(v); }
std::string num(long long v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

json vec_json(const abreu::Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json affine_json(const abreu::AffineFunction& f) { return {{"a0", f.a0}, {"a", vec_json(f.a)}}; }

std::vector<std::string> coord_header(const std::string& prefix, int n) {
  std::vector<std::string> h;
  for (int j = 0; j < n; ++j) h.push_back(prefix + std::to_string(j));
  return h;
}

struct Common {
  std::string format = "json";
  int threads = 1;
  std::string out;
};

struct Output {
  json doc;
  Table table;
};

struct RunContext {
  std::string command;
  std::string input;
  json config = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

void write_file(const std::string& path, const std::string& text, const RunContext& ctx) {
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw abreu::Error(abreu::ErrorKind::ParseError, "cannot write " + path);
    f << text;
  }
  // Sidecar RunManifest row for every output file.
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  Table m{{"command", "input", "config", "tool_version", "wall_time_s", "output"}, {}};
  m.add({ctx.command, ctx.input, abreu::io::dump(ctx.config), kVersion, num(wall), path});
  std::ofstream mf(path + ".manifest.csv", std::ios::binary);
  mf << render_csv(m);
}

void emit(const Output& o, const Common& c, const RunContext& ctx) {
  const std::string text = c.format == "csv" ? render_csv(o.table) : abreu::io::dump(o.doc, 2) + "\n";
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text, ctx);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Worker threads for node-parallel evaluation")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Write output to this file (plus FILE.manifest.csv) instead of stdout");
}

// ---- subcommands ----

Output cmd_check(const abreu::DelzantPolytope& p) {
  Output o;
  const auto& r = p.validation();
  const auto& m = p.moments();
  json verts = json::array();
  for (std::size_t v = 0; v < r.vertices.size(); ++v)
    verts.push_back({{"x", vec_json(r.vertices[v])}, {"facets", r.vertex_facets[v]}, {"determinant", r.determinants[v]}});
  o.doc = {{"valid", true},
           {"dim", p.dim()},
           {"facet_count", p.facet_count()},
           {"vertices", verts},
           {"volume", m.volume},
           {"boundary_mass", m.boundary_mass},
           {"barycenter", vec_json(m.barycenter())}};
  o.table.header = {"vertex"};
  for (const auto& h : coord_header("x", p.dim())) o.table.header.push_back(h);
  o.table.header.push_back("facets");
  o.table.header.push_back("determinant");
  for (std::size_t v = 0; v < r.vertices.size(); ++v) {
    std::vector<std::string> row{num(v)};
    for (int j = 0; j < p.dim(); ++j) row.push_back(num(r.vertices[v](j)));
    std::string fs;
    for (std::size_t k = 0; k < r.vertex_facets[v].size(); ++k) fs += (k ? " " : "") + std::to_string(r.vertex_facets[v][k]);
    row.push_back(fs);
    row.push_back(num(r.determinants[v]));
    o.table.add(row);
  }
  return o;
}

Output cmd_extremal(const abreu::DelzantPolytope& p) {
  const auto e = abreu::solve_extremal_affine(p);
  Output o;
  o.doc = {{"s", affine_json(e.s)}, {"rbar", e.rbar}, {"theta", affine_json(e.theta)}};
  o.table.header = {"a0"};
  for (const auto& h : coord_header("a_", p.dim())) o.table.header.push_back(h);
  o.table.header.push_back("rbar");
  std::vector<std::string> row{num(e.s.a0)};
  for (int j = 0; j < p.dim(); ++j) row.push_back(num(e.s.a(j)));
  row.push_back(num(e.rbar));
  o.table.add(row);
  return o;
}

Output cmd_eval(const abreu::Potential& u, const abreu::Problem& pr) {
  const auto r = abreu::eval_F(u, pr);
  Output o;
  o.doc = {{"entropy", r.entropy}, {"boundary", r.boundary}, {"interior", r.interior},
           {"L", r.L},             {"F", r.F},               {"level", pr.scheme.level}};
  o.doc["optimal_scaling"] = r.optimal_scaling ? json(*r.optimal_scaling) : json(nullptr);
  o.table.header = {"entropy", "boundary", "interior", "L", "F", "optimal_scaling"};
  o.table.add({num(r.entropy), num(r.boundary), num(r.interior), num(r.L), num(r.F),
               r.optimal_scaling ? num(*r.optimal_scaling) : ""});
  return o;
}

const abreu::ParametrizedPotential& require_smooth(const abreu::Potential& u) {
  if (const auto* s = std::get_if<abreu::ParametrizedPotential>(&u)) return *s;
  throw abreu::Error(abreu::ErrorKind::DegenerateHessian, "the Abreu operator needs a potential with a nondegenerate Hessian");
}

Output residual_output(const abreu::AbreuResidual& r, int n) {
  Output o;
  json pts = json::array();
  o.table.header = coord_header("x", n);
  for (const auto& h : {"operator", "s", "residual"}) o.table.header.push_back(h);
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    pts.push_back({{"x", vec_json(r.points[k])},
                   {"operator", r.operator_values[k]},
                   {"s", r.s_values[k]},
                   {"residual", r.residuals[k]}});
    std::vector<std::string> row;
    for (int j = 0; j < n; ++j) row.push_back(num(r.points[k](j)));
    row.push_back(num(r.operator_values[k]));
    row.push_back(num(r.s_values[k]));
    row.push_back(num(r.residuals[k]));
    o.table.add(row);
  }
  o.doc = {{"sup_norm", r.sup_norm}, {"l2_norm", r.l2_norm}, {"points", pts}};
  return o;
}

Output cmd_scan(const abreu::DelzantPolytope& p, int angles, int offsets) {
  const auto e = abreu::solve_extremal_affine(p);
  const auto r = abreu::scan_creases(p, e, angles, offsets);
  Output o;
  const int n = p.dim();
  o.table.header = {"angle_index", "offset_index"};
  for (const auto& h : coord_header("d", n)) o.table.header.push_back(h);
  for (const auto& h : {"offset", "L", "violation"}) o.table.header.push_back(h);
  json entries = json::array();
  for (std::size_t k = 0; k < r.entries.size(); ++k) {
    const auto& en = r.entries[k];
    const bool bad = en.L <= abreu::kViolationTolerance;
    entries.push_back({{"angle_index", en.crease.angle_index},
                       {"offset_index", en.crease.offset_index},
                       {"direction", vec_json(en.crease.direction)},
                       {"offset", en.crease.offset},
                       {"L", en.L},
                       {"violation", bad}});
    std::vector<std::string> row{num(en.crease.angle_index), num(en.crease.offset_index)};
    for (int j = 0; j < n; ++j) row.push_back(num(en.crease.direction(j)));
    row.push_back(num(en.crease.offset));
    row.push_back(num(en.L));
    row.push_back(bad ? "1" : "0");
    o.table.add(row);
  }
  o.doc = {{"creases", r.entries.size()},
           {"violations", r.violations.size()},
           {"tolerance", abreu::kViolationTolerance},
           {"entries", entries}};
  o.doc["min_L"] = r.entries.empty() ? json(nullptr) : json(r.min_L);
  if (r.condition46)
    o.doc["condition46"] = {{"pass", r.condition46->pass}, {"margins", r.condition46->margins}};
  else
    o.doc["condition46"] = nullptr;
  return o;
}

Output cmd_check46(const abreu::DelzantPolytope& p, const std::optional<abreu::Vec>& offset) {
  const auto c = abreu::check_condition_46(p, abreu::solve_extremal_affine(p));
  Output o;
  o.doc = {{"pass", c.pass}, {"sup_s", c.sup_s}, {"margins", c.margins}};
  o.doc["translation"] = offset ? vec_json(*offset) : json(nullptr);
  o.table.header = {"facet", "support", "margin", "pass"};
  for (std::size_t i = 0; i < c.margins.size(); ++i)
    o.table.add({num(i), num(p.support(i)), num(c.margins[i]), c.margins[i] > 0 ? "1" : "0"});
  return o;
}

Output cmd_probe(const abreu::Potential& u, const abreu::Problem& pr, const std::vector<double>& scales) {
  std::vector<abreu::Potential> family;
  for (double t : scales) family.push_back(abreu::scale_potential(u, t));
  const auto rows = abreu::coercivity_probe(family, pr);
  Output o;
  o.table.header = {"scale", "integral", "F"};
  json arr = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    o.table.add({num(scales[k]), num(rows[k].integral), num(rows[k].F)});
    arr.push_back({{"scale", scales[k]}, {"integral", rows[k].integral}, {"F", rows[k].F}});
  }
  o.doc = {{"rows", arr}};
  return o;
}

Output cmd_quadrature_report(const abreu::DelzantPolytope& p, int lo, int hi) {
  const abreu::GuilleminPotential g(p);
  struct Integral {
    std::string name;
    std::function<double(const abreu::QuadratureScheme&)> eval;
  };
  const std::vector<Integral> integrals{
      {"volume", [](const auto& q) { return abreu::integrate_interior(q, [](const abreu::Vec&) { return 1.0; }); }},
      {"boundary_mass", [](const auto& q) { return abreu::integrate_boundary(q, [](const abreu::Vec&) { return 1.0; }); }},
      {"guillemin_interior", [&](const auto& q) { return abreu::integrate_interior(q, [&](const abreu::Vec& x) { return g.value(x); }); }},
      {"guillemin_entropy",
       [&](const auto& q) {
         return abreu::integrate_interior(q, [&](const abreu::Vec& x) { return -std::log(g.hessian(x).determinant()); });
       }},
  };
  Output o;
  o.table.header = {"integral", "level", "interior_nodes", "boundary_nodes", "value", "delta"};
  json arr = json::array();
  std::vector<std::optional<double>> prev(integrals.size());
  for (int level = lo; level <= hi; ++level) {
    const auto q = abreu::build_scheme(p, level);
    for (std::size_t k = 0; k < integrals.size(); ++k) {
      const double v = integrals[k].eval(q);
      const std::optional<double> delta = prev[k] ? std::optional<double>(v - *prev[k]) : std::nullopt;
      prev[k] = v;
      o.table.add({integrals[k].name, num(level), num(q.interior_size()), num(q.boundary_size()), num(v),
                   delta ? num(*delta) : ""});
      arr.push_back({{"integral", integrals[k].name},
                     {"level", level},
                     {"interior_nodes", q.interior_size()},
                     {"boundary_nodes", q.boundary_size()},
                     {"value", v},
                     {"delta", delta ? json(*delta) : json(nullptr)}});
    }
  }
  o.doc = {{"rows", arr}};
  return o;
}

int exit_code_for(const abreu::Error& e) { return e.kind() == abreu::ErrorKind::ParseError ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abreu-kit: extremal toric potentials on Delzant polytopes"};
  app.set_version_flag("--version", std::string("abreu-kit ") + kVersion);
  app.require_subcommand(1);
  app.footer(
      "CSV columns:\n"
      "  check              vertex,x0..,facets,determinant\n"
      "  extremal           a0,a_0..,rbar\n"
      "  eval               entropy,boundary,interior,L,F,optimal_scaling\n"
      "  residual           x0..,operator,s,residual\n"
      "  minimize (trace)   iteration,F,grad_norm,step,boundary_integral,interior_integral\n"
      "  scan-pl            angle_index,offset_index,d0..,offset,L,violation\n"
      "  check-46           facet,support,margin,pass\n"
      "  probe              scale,integral,F\n"
      "  quadrature-report  integral,level,interior_nodes,boundary_nodes,value,delta\n"
      "Every file written with --out (or --coeffs) gets FILE.manifest.csv:\n"
      "  command,input,config,tool_version,wall_time_s,output\n"
      "Polytopes: a JSON file, NAME.json in $ABREU_KIT_PRESETS, or a built-in preset\n"
      "  (interval, square, cp2-simplex, hirzebruch-1).");

  Common common;
  std::string polytope_spec;
  std::string potential_spec = "guillemin";
  int level = 4;

  auto add_polytope = [&](CLI::App* sub) { sub->add_option("--polytope", polytope_spec, "Polytope file or preset")->required(); };

  auto* check = app.add_subcommand("check", "Validate the Delzant condition and list vertices");
  add_polytope(check);
  add_common(check, common);

  auto* extremal = app.add_subcommand("extremal", "Extremal affine function s = Rbar + theta");
  add_polytope(extremal);
  add_common(extremal, common);

  auto* eval = app.add_subcommand("eval", "Evaluate F(u) and its terms");
  add_polytope(eval);
  eval->add_option("--potential", potential_spec, "\"guillemin\" or a potential JSON file");
  eval->add_option("--level", level, "Quadrature level")->check(CLI::PositiveNumber);
  add_common(eval, common);

  double margin = -1.0;
  std::size_t max_points = 400;
  auto* residual = app.add_subcommand("residual", "Abreu operator residual against s at interior nodes");
  add_polytope(residual);
  residual->add_option("--potential", potential_spec, "\"guillemin\" or a potential JSON file");
  residual->add_option("--level", level, "Quadrature level for the sample nodes")->check(CLI::PositiveNumber);
  residual->add_option("--margin", margin, "Minimum distance of sample points to the boundary (default 0.05 diam)");
  residual->add_option("--max-points", max_points, "Cap on the number of sample points");
  add_common(residual, common);

  abreu::MinimizeConfig mcfg;
  std::string coeffs_out;
  std::string start_spec = "guillemin";
  std::vector<double> norm_point;
  auto* minimize = app.add_subcommand("minimize", "Minimize F over u_P + polynomial");
  add_polytope(minimize);
  minimize->add_option("--start", start_spec, "Start potential (\"guillemin\" or a parametrized potential file)");
  minimize->add_option("--degree", mcfg.degree, "Polynomial degree cap")->check(CLI::Range(2, 12));
  minimize->add_option("--level", mcfg.level, "Quadrature level")->check(CLI::PositiveNumber);
  minimize->add_option("--grad-tol", mcfg.grad_tol, "Gradient tolerance");
  minimize->add_option("--max-iter", mcfg.max_iterations, "Iteration cap");
  minimize->add_option("--min-eigenvalue", mcfg.min_eigenvalue, "Admissibility margin at the nodes");
  minimize->add_option("--normalize-at", norm_point, "Normalization point (default: barycenter)");
  minimize->add_option("--coeffs", coeffs_out, "Write the minimizer as potential JSON");
  add_common(minimize, common);

  int angles = -1, offsets = -1;
  auto* scan = app.add_subcommand("scan-pl", "L(f) over a grid of simple PL creases");
  add_polytope(scan);
  scan->add_option("--angles", angles, "Crease directions (2D: angles; 1D: ignored, both orientations)");
  scan->add_option("--offsets", offsets, "Offsets per direction");
  add_common(scan, common);

  bool translate = false;
  auto* check46 = app.add_subcommand("check-46", "Per-facet margins (n+1)/lambda_i - sup s; origin must be interior");
  add_polytope(check46);
  check46->add_flag("--barycentric", translate, "Translate the barycenter to the origin first");
  add_common(check46, common);

  std::vector<double> scales{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto* probe = app.add_subcommand("probe", "Coercivity trace (int u dx, F(u)) along t*u");
  add_polytope(probe);
  probe->add_option("--potential", potential_spec, "\"guillemin\" or a potential JSON file");
  probe->add_option("--level", level, "Quadrature level")->check(CLI::PositiveNumber);
  probe->add_option("--scales", scales, "Scale factors t")->check(CLI::PositiveNumber);
  add_common(probe, common);

  int lo = 1, hi = 6;
  auto* qreport = app.add_subcommand("quadrature-report", "Per-level test integrals and level-to-level deltas");
  add_polytope(qreport);
  qreport->add_option("--min-level", lo, "First level")->check(CLI::PositiveNumber);
  qreport->add_option("--max-level", hi, "Last level")->check(CLI::PositiveNumber);
  add_common(qreport, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  abreu::parallel::set_thread_count(common.threads);
  RunContext ctx;
  ctx.input = polytope_spec;
  ctx.config = {{"format", common.format}, {"threads", common.threads}};

  try {
    const abreu::DelzantPolytope p = abreu::io::load_polytope(polytope_spec);
    Output out;
    if (check->parsed()) {
      ctx.command = "check";
      out = cmd_check(p);
    } else if (extremal->parsed()) {
      ctx.command = "extremal";
      out = cmd_extremal(p);
    } else if (eval->parsed()) {
      ctx.command = "eval";
      ctx.config["potential"] = potential_spec;
      ctx.config["level"] = level;
      const abreu::Problem pr(p, level);
      out = cmd_eval(abreu::io::load_potential(potential_spec, p), pr);
    } else if (residual->parsed()) {
      ctx.command = "residual";
      const double m = margin >= 0 ? margin : 0.05 * p.diameter();
      ctx.config["potential"] = potential_spec;
      ctx.config["level"] = level;
      ctx.config["margin"] = m;
      ctx.config["max_points"] = max_points;
      const auto u = abreu::io::load_potential(potential_spec, p);
      const auto& smooth = require_smooth(u);
      const auto q = abreu::build_scheme(p, level);
      const auto sample = abreu::sample_points(q, p, std::max(m, 2.0 * abreu::default_step(p)), max_points);
      out = residual_output(abreu::residual_report(smooth, p, abreu::solve_extremal_affine(p), sample), p.dim());
    } else if (minimize->parsed()) {
      ctx.command = "minimize";
      ctx.config["start"] = start_spec;
      ctx.config["degree"] = mcfg.degree;
      ctx.config["level"] = mcfg.level;
      ctx.config["grad_tol"] = mcfg.grad_tol;
      ctx.config["max_iterations"] = mcfg.max_iterations;
      ctx.config["min_eigenvalue"] = mcfg.min_eigenvalue;
      if (!norm_point.empty()) {
        if (static_cast<int>(norm_point.size()) != p.dim())
          throw abreu::Error(abreu::ErrorKind::ParseError, "--normalize-at needs " + std::to_string(p.dim()) + " values");
        abreu::Vec v(p.dim());
        for (int j = 0; j < p.dim(); ++j) v(j) = norm_point[static_cast<std::size_t>(j)];
        mcfg.normalization_point = v;
        ctx.config["normalize_at"] = norm_point;
      }
      const auto start = abreu::io::load_potential(start_spec, p);
      const auto* s = std::get_if<abreu::ParametrizedPotential>(&start);
      if (!s) throw abreu::Error(abreu::ErrorKind::StartInadmissible, "start must be guillemin or parametrized");
      const abreu::Problem pr(p, mcfg.level);
      const auto r = abreu::minimize(*s, pr, mcfg);
      const auto sample = abreu::sample_points(pr.scheme, p, std::max(0.05 * p.diameter(), 2.0 * abreu::default_step(p)), 400);
      const auto res = abreu::residual_report(r.minimizer, p, pr.extremal, sample);
      out.table.header = {"iteration", "F", "grad_norm", "step", "boundary_integral", "interior_integral"};
      json trace = json::array();
      for (const auto& row : r.trace) {
        out.table.add({num(row.iteration), num(row.F), num(row.grad_norm), num(row.step), num(row.boundary_integral),
                       num(row.interior_integral)});
        trace.push_back({{"iteration", row.iteration},
                         {"F", row.F},
                         {"grad_norm", row.grad_norm},
                         {"step", row.step},
                         {"boundary_integral", row.boundary_integral},
                         {"interior_integral", row.interior_integral}});
      }
      out.doc = {{"converged", r.converged},
                 {"iterations", r.trace.back().iteration},
                 {"F", r.trace.back().F},
                 {"grad_norm", r.trace.back().grad_norm},
                 {"abreu_sup_residual", res.sup_norm},
                 {"abreu_l2_residual", res.l2_norm},
                 {"diagnostics", r.diagnostics},
                 {"minimizer", abreu::io::potential_to_json(r.minimizer)},
                 {"trace", trace}};
      if (!coeffs_out.empty()) write_file(coeffs_out, abreu::io::dump(abreu::io::potential_to_json(r.minimizer), 2) + "\n", ctx);
    } else if (scan->parsed()) {
      ctx.command = "scan-pl";
      const int a = angles >= 0 ? angles : (p.dim() == 1 ? 2 : 32);
      const int m = offsets >= 0 ? offsets : (p.dim() == 1 ? 33 : 17);
      ctx.config["angles"] = a;
      ctx.config["offsets"] = m;
      out = cmd_scan(p, a, m);
    } else if (check46->parsed()) {
      ctx.command = "check-46";
      ctx.config["barycentric"] = translate;
      if (translate) {
        const auto t = abreu::barycentric_translate(p);
        out = cmd_check46(t.polytope, t.offset);
      } else {
        out = cmd_check46(p, std::nullopt);
      }
    } else if (probe->parsed()) {
      ctx.command = "probe";
      ctx.config["potential"] = potential_spec;
      ctx.config["level"] = level;
      ctx.config["scales"] = scales;
      const abreu::Problem pr(p, level);
      out = cmd_probe(abreu::io::load_potential(potential_spec, p), pr, scales);
    } else if (qreport->parsed()) {
      ctx.command = "quadrature-report";
      if (hi < lo) throw abreu::Error(abreu::ErrorKind::InvalidLevel, "--max-level is below --min-level");
      ctx.config["min_level"] = lo;
      ctx.config["max_level"] = hi;
      out = cmd_quadrature_report(p, lo, hi);
    }
    emit(out, common, ctx);
  } catch (const abreu::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
