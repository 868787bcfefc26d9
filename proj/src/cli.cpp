#include <pmcf/cli.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include <pmcf/analysis.hpp>
#include <pmcf/errors.hpp>
#include <pmcf/geometry.hpp>
#include <pmcf/mesh.hpp>
#include <pmcf/newton.hpp>
#include <pmcf/oracle.hpp>

namespace pmcf::cli {

namespace {

namespace fs = std::filesystem;

struct Common
{
  std::string domain = "circle:1";
  double k = 1.0;
  std::string out;
  double tol = 1e-10;
  double eps_start = 1.0;
  double factor = 0.5;
};

void add_common(CLI::App* app, Common& c)
{
  app->add_option("--domain", c.domain, "circle:R | ellipse:A,B | star:FILE (theta,r rows)")
    ->capture_default_str();
  app->add_option("--k", c.k, "exponent of the normal speed H^k (k > 1/3)")->capture_default_str();
  app->add_option("--out", c.out, "output directory (default: $PMCF_OUTPUT_DIR or .)");
  app->add_option("--tol", c.tol, "Newton tolerance on the residual infinity norm")
    ->capture_default_str();
  app->add_option("--eps-start", c.eps_start, "first eps of the warm-start continuation")
    ->capture_default_str();
  app->add_option("--factor", c.factor, "eps reduction factor between continuation stages")
    ->capture_default_str();
}

class Context
{
public:
  Context(const Common& c, std::ostream& out)
    : common(c)
    , domain(parse_domain(c.domain))
    , log(out)
  {
    if (!(c.k > 1.0 / 3.0))
      throw InvalidArgument("--k must exceed 1/3");
    if (c.k < 1.0)
      log << "warning: k < 1 is outside the range covered by the convergence theory\n";
    options.tol = c.tol;
    std::string dir = c.out;
    if (dir.empty()) {
      const char* env = std::getenv("PMCF_OUTPUT_DIR");
      dir = env ? env : ".";
    }
    out_dir = dir;
    fs::create_directories(out_dir);
  }

  std::ofstream open(const std::string& name) const
  {
    std::ofstream f(out_dir / name);
    if (!f)
      throw InvalidArgument("cannot write " + (out_dir / name).string());
    f << std::setprecision(17);
    return f;
  }

  //! Continuation stages from eps_start down through the requested targets.
  ContinuationSchedule schedule(std::vector<double> targets) const
  {
    std::sort(targets.begin(), targets.end(), std::greater<>());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    if (targets.empty() || !(targets.back() > 0.0))
      throw InvalidArgument("eps values must be positive");
    if (!(common.factor > 0.0 && common.factor < 1.0))
      throw InvalidArgument("--factor must lie in (0, 1)");
    std::vector<double> stages;
    for (double s = common.eps_start; s > targets.front(); s *= common.factor)
      stages.push_back(s);
    stages.insert(stages.end(), targets.begin(), targets.end());
    return ContinuationSchedule::explicit_list(std::move(stages));
  }

  FeFunction solve(const Mesh& mesh, double eps, NewtonReport* report = nullptr) const
  {
    auto [u, rep] = continuation_solve(mesh, common.k, schedule({eps}), options);
    if (report)
      *report = std::move(rep);
    return u;
  }

  //! Solutions at every requested eps from one continuation run.
  std::vector<FeFunction> solve_many(const Mesh& mesh, const std::vector<double>& eps_values) const
  {
    std::vector<FeFunction> found;
    std::vector<double> found_eps;
    continuation_solve(mesh, common.k, schedule(eps_values), options,
                       [&](const FeFunction& u, const NewtonStage& stage) {
                         found.push_back(u);
                         found_eps.push_back(stage.eps);
                       });
    std::vector<FeFunction> out;
    for (double eps : eps_values) {
      const auto it = std::find(found_eps.begin(), found_eps.end(), eps);
      out.push_back(found[static_cast<std::size_t>(it - found_eps.begin())]);
    }
    return out;
  }

  const Circle* circle() const { return std::get_if<Circle>(&domain.shape()); }

  ErrorTriple error_vs_exact(const FeFunction& u) const
  {
    const double r0 = circle()->r0;
    const double k = common.k;
    auto exact = [r0, k](Vec2 p) { return exact_circle_solution(r0, k, std::min(norm(p), r0)); };
    auto grad = [k](Vec2 p) {
      const double r = norm(p);
      return r > 0.0 ? (-std::pow(r, k - 1.0)) * p : Vec2{};
    };
    return error_norms(exact, grad, u);
  }

  Common common;
  DomainSpec domain;
  NewtonOptions options;
  fs::path out_dir;
  std::ostream& log;
};

void print_row(std::ostream& out, const char* name, double param, const ErrorTriple& e)
{
  out << std::setprecision(6) << name << "=" << param << "  L2=" << e.l2 << "  H1=" << e.h1
      << "  Linf=" << e.linf << "\n";
}

void finish_table(const Context& ctx, ConvergenceTable& table, const std::string& file)
{
  if (table.rows.size() >= 3)
    table.slopes = fit_rate(table);
  auto f = ctx.open(file);
  write_table_csv(table, f);
  if (table.slopes)
    ctx.log << std::setprecision(4) << "slopes: L2=" << table.slopes->l2
            << "  H1=" << table.slopes->h1 << "  Linf=" << table.slopes->linf << "\n";
  ctx.log << "wrote " << (ctx.out_dir / file).string() << "\n";
}

void write_mesh_files(const Context& ctx, const Mesh& mesh)
{
  auto v = ctx.open("vertices.csv");
  auto t = ctx.open("triangles.csv");
  write_mesh_csv(mesh, v, t);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Finite-element laboratory for the regularized level-set power mean curvature flow"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  Common c_solve, c_h, c_eps, c_total, c_deficit, c_section, c_level, c_mesh;

  auto* solve = app.add_subcommand("solve", "continuation solve; writes solution, mesh and report");
  add_common(solve, c_solve);
  double solve_eps = 0.1, solve_h = 0.1;
  std::vector<double> solve_list;
  solve->add_option("--eps", solve_eps, "target eps")->capture_default_str();
  solve->add_option("--eps-list", solve_list, "explicit decreasing eps stages")->delimiter(',');
  solve->add_option("--h", solve_h, "mesh size")->capture_default_str();

  auto* study_h = app.add_subcommand("study-h", "discretization error against a fine reference");
  add_common(study_h, c_h);
  double sh_eps = 0.1, sh_ref = 0.025;
  std::vector<double> sh_hs{0.4, 0.2, 0.1, 0.05};
  study_h->add_option("--eps", sh_eps, "fixed eps")->capture_default_str();
  study_h->add_option("--h", sh_hs, "mesh sizes")->delimiter(',')->capture_default_str();
  study_h->add_option("--ref-h", sh_ref, "reference mesh size")->capture_default_str();

  auto* study_eps = app.add_subcommand("study-eps", "regularization error for a list of eps");
  add_common(study_eps, c_eps);
  double se_h = 0.0125, se_ref_eps = 0.1, se_ref_h = 0.0;
  std::vector<double> se_list;
  study_eps->add_option("--eps", se_list,
                        "eps values (default 0.5,0.35,0.25,0.17,0.1; without 0.1 for references)")
    ->delimiter(',');
  study_eps->add_option("--h", se_h, "mesh size")->capture_default_str();
  study_eps->add_option("--ref-eps", se_ref_eps, "reference eps for non-circular domains")
    ->capture_default_str();
  study_eps->add_option("--ref-h", se_ref_h, "reference mesh size (default: --h)");

  auto* study_total = app.add_subcommand("study-total", "total error with eps = h");
  add_common(study_total, c_total);
  std::vector<double> st_hs{0.4, 0.2, 0.1};
  double st_ref = 0.05;
  bool st_exact = false;
  study_total->add_option("--h", st_hs, "mesh sizes (eps = h)")->delimiter(',')->capture_default_str();
  study_total->add_option("--ref-h", st_ref, "reference h = eps")->capture_default_str();
  study_total->add_flag("--vs-exact", st_exact, "compare with the exact solution (circle only)");

  auto* deficit = app.add_subcommand("deficit", "isoperimetric deficit of the level sets");
  add_common(deficit, c_deficit);
  double df_eps = 0.05, df_h = 0.05;
  int df_levels = 20;
  std::vector<double> df_list;
  deficit->add_option("--eps", df_eps, "eps")->capture_default_str();
  deficit->add_option("--h", df_h, "mesh size")->capture_default_str();
  deficit->add_option("--levels", df_levels, "number of equispaced levels in (0, 0.95 max u]")
    ->capture_default_str();
  deficit->add_option("--level-list", df_list, "explicit increasing levels")->delimiter(',');

  auto* section = app.add_subcommand("section", "solution along a coordinate axis");
  add_common(section, c_section);
  double sc_eps = 0.1, sc_h = 0.05;
  int sc_samples = 201;
  std::string sc_axis = "x";
  bool sc_oracle = false;
  section->add_option("--eps", sc_eps, "eps")->capture_default_str();
  section->add_option("--h", sc_h, "mesh size")->capture_default_str();
  section->add_option("--axis", sc_axis, "x or y")->check(CLI::IsMember({"x", "y"}))
    ->capture_default_str();
  section->add_option("--samples", sc_samples, "number of sample points")->capture_default_str();
  section->add_flag("--with-oracle", sc_oracle, "add radial oracle and exact columns (circle only)");

  auto* levelset = app.add_subcommand("levelset", "extract level curves as CSV and SVG");
  add_common(levelset, c_level);
  double ls_eps = 0.1, ls_h = 0.05;
  int ls_levels = 10;
  std::vector<double> ls_list;
  levelset->add_option("--eps", ls_eps, "eps")->capture_default_str();
  levelset->add_option("--h", ls_h, "mesh size")->capture_default_str();
  levelset->add_option("--levels", ls_levels, "number of equispaced levels")->capture_default_str();
  levelset->add_option("--level-list", ls_list, "explicit levels")->delimiter(',');

  auto* mesh_cmd = app.add_subcommand("mesh", "generate, import and export meshes");
  add_common(mesh_cmd, c_mesh);
  double ms_h = 0.1;
  std::string ms_import, ms_export;
  mesh_cmd->add_option("--h", ms_h, "mesh size")->capture_default_str();
  mesh_cmd->add_option("--import-msh", ms_import, "read a Gmsh 2.2 ASCII file instead of generating");
  mesh_cmd->add_option("--export-msh", ms_export, "write the mesh as Gmsh 2.2 ASCII");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    // subcommand help requests surface as Success-derived errors too
    if (e.get_exit_code() == 0) {
      for (const auto* sub : app.get_subcommands())
        out << sub->help();
      return Ok;
    }
    err << "error: " << e.what() << "\n";
    return UsageError;
  }

  try {
    if (solve->parsed()) {
      Context ctx(c_solve, out);
      const Mesh mesh = generate_mesh(ctx.domain, solve_h);
      NewtonReport report;
      FeFunction u(mesh);
      if (!solve_list.empty()) {
        auto result = continuation_solve(mesh, c_solve.k,
                                         ContinuationSchedule::explicit_list(solve_list),
                                         ctx.options);
        u = std::move(result.first);
        report = std::move(result.second);
      } else {
        u = ctx.solve(mesh, solve_eps, &report);
      }
      write_mesh_files(ctx, mesh);
      auto sol = ctx.open("solution.csv");
      write_function_csv(u, sol);
      auto rep = ctx.open("newton_report.csv");
      write_report_csv(report, rep);
      const auto& last = report.stages.back();
      out << std::setprecision(6) << "vertices=" << mesh.num_vertices()
          << " stages=" << report.stages.size() << " eps=" << last.eps
          << " residual=" << last.residual_inf
          << " max_u=" << *std::max_element(u.values().begin(), u.values().end()) << "\n";
      if (last.min_value < 0.0)
        out << "note: solution has negative values (min " << last.min_value << ")\n";
      return Ok;
    }

    if (study_h->parsed()) {
      Context ctx(c_h, out);
      std::sort(sh_hs.begin(), sh_hs.end(), std::greater<>());
      const Mesh ref_mesh = generate_mesh(ctx.domain, sh_ref);
      const FeFunction ref = ctx.solve(ref_mesh, sh_eps);
      ConvergenceTable table;
      for (double h : sh_hs) {
        const Mesh mesh = generate_mesh(ctx.domain, h);
        const FeFunction u = ctx.solve(mesh, sh_eps);
        table.rows.push_back({h, error_norms(ref, u)});
        print_row(out, "h", h, table.rows.back().error);
      }
      finish_table(ctx, table, "study_h.csv");
      return Ok;
    }

    if (study_eps->parsed()) {
      Context ctx(c_eps, out);
      const bool exact = ctx.circle() != nullptr;
      if (se_list.empty())
        se_list = exact ? std::vector<double>{0.5, 0.35, 0.25, 0.17, 0.1}
                        : std::vector<double>{0.5, 0.35, 0.25, 0.17};
      std::sort(se_list.begin(), se_list.end(), std::greater<>());
      const Mesh mesh = generate_mesh(ctx.domain, se_h);
      ConvergenceTable table;
      if (exact) {
        const auto sols = ctx.solve_many(mesh, se_list);
        for (std::size_t i = 0; i < se_list.size(); ++i) {
          table.rows.push_back({se_list[i], ctx.error_vs_exact(sols[i])});
          print_row(out, "eps", se_list[i], table.rows.back().error);
        }
      } else {
        if (!(se_list.back() > se_ref_eps))
          throw InvalidArgument("--eps values must exceed --ref-eps");
        const double ref_h = se_ref_h > 0.0 ? se_ref_h : se_h;
        std::vector<double> all = se_list;
        std::vector<FeFunction> sols;
        std::unique_ptr<Mesh> ref_mesh;
        std::unique_ptr<FeFunction> ref;
        if (ref_h == se_h) {
          all.push_back(se_ref_eps);
          sols = ctx.solve_many(mesh, all);
          ref = std::make_unique<FeFunction>(sols.back());
        } else {
          sols = ctx.solve_many(mesh, all);
          ref_mesh = std::make_unique<Mesh>(generate_mesh(ctx.domain, ref_h));
          ref = std::make_unique<FeFunction>(ctx.solve(*ref_mesh, se_ref_eps));
        }
        for (std::size_t i = 0; i < se_list.size(); ++i) {
          table.rows.push_back({se_list[i], error_norms(*ref, sols[i])});
          print_row(out, "eps", se_list[i], table.rows.back().error);
        }
      }
      finish_table(ctx, table, "study_eps.csv");
      return Ok;
    }

    if (study_total->parsed()) {
      Context ctx(c_total, out);
      if (st_exact && !ctx.circle())
        throw InvalidArgument("--vs-exact needs a circular domain");
      std::sort(st_hs.begin(), st_hs.end(), std::greater<>());
      std::unique_ptr<Mesh> ref_mesh;
      std::unique_ptr<FeFunction> ref;
      if (!st_exact) {
        ref_mesh = std::make_unique<Mesh>(generate_mesh(ctx.domain, st_ref));
        ref = std::make_unique<FeFunction>(ctx.solve(*ref_mesh, st_ref));
      }
      ConvergenceTable table;
      for (double h : st_hs) {
        const Mesh mesh = generate_mesh(ctx.domain, h);
        const FeFunction u = ctx.solve(mesh, h);
        table.rows.push_back({h, st_exact ? ctx.error_vs_exact(u) : error_norms(*ref, u)});
        print_row(out, "h=eps", h, table.rows.back().error);
      }
      finish_table(ctx, table, "study_total.csv");
      return Ok;
    }

    if (deficit->parsed()) {
      Context ctx(c_deficit, out);
      const Mesh mesh = generate_mesh(ctx.domain, df_h);
      const FeFunction u = ctx.solve(mesh, df_eps);
      const std::vector<double> levels =
        df_list.empty() ? equispaced_levels(u, df_levels) : df_list;
      const DeficitSeries series = deficit_series(u, levels);
      auto csv = ctx.open("deficit.csv");
      write_deficit_csv(series, csv);
      std::vector<LevelCurve> curves;
      for (double t : levels)
        curves.push_back(extract_level_set(u, t));
      auto svg = ctx.open("deficit_levels.svg");
      write_curves_svg(curves, svg, &mesh);
      for (const auto& row : series.rows)
        out << std::setprecision(6) << "t=" << row.level << "  l=" << row.length
            << "  a=" << row.area << "  deficit=" << row.deficit << "\n";
      if (series.omitted)
        out << "warning: " << series.omitted << " levels produced empty curves\n";
      return Ok;
    }

    if (section->parsed()) {
      Context ctx(c_section, out);
      if (sc_oracle && !ctx.circle())
        throw InvalidArgument("--with-oracle needs a circular domain");
      if (sc_samples < 2)
        throw InvalidArgument("--samples must be at least 2");
      const Mesh mesh = generate_mesh(ctx.domain, sc_h);
      const FeFunction u = ctx.solve(mesh, sc_eps);
      const PointLocator locator(mesh);
      const Vec2 dir = sc_axis == "x" ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
      const double extent = norm(ctx.domain.project_to_boundary(dir));
      std::unique_ptr<RadialProfile> profile;
      if (sc_oracle)
        profile = std::make_unique<RadialProfile>(
          radial_regularized_solve(ctx.circle()->r0, c_section.k, sc_eps));
      auto csv = ctx.open("section.csv");
      csv << "s,x,y,u" << (sc_oracle ? ",radial_oracle,exact" : "") << "\n";
      for (int i = 0; i < sc_samples; ++i) {
        const double s = -extent + 2.0 * extent * i / (sc_samples - 1);
        const Vec2 p = s * dir;
        csv << s << "," << p.x << "," << p.y << "," << u.evaluate(locator, p);
        if (profile) {
          const double r = std::min(std::abs(s), ctx.circle()->r0);
          csv << "," << (*profile)(r) << ","
              << exact_circle_solution(ctx.circle()->r0, c_section.k, r);
        }
        csv << "\n";
      }
      out << "wrote " << (ctx.out_dir / "section.csv").string() << "\n";
      return Ok;
    }

    if (levelset->parsed()) {
      Context ctx(c_level, out);
      const Mesh mesh = generate_mesh(ctx.domain, ls_h);
      const FeFunction u = ctx.solve(mesh, ls_eps);
      const std::vector<double> levels =
        ls_list.empty() ? equispaced_levels(u, ls_levels) : ls_list;
      std::vector<LevelCurve> curves;
      for (double t : levels)
        curves.push_back(extract_level_set(u, t));
      auto csv = ctx.open("levels.csv");
      write_curves_csv(curves, csv);
      auto svg = ctx.open("levels.svg");
      write_curves_svg(curves, svg, &mesh);
      out << "wrote " << curves.size() << " level curves to " << ctx.out_dir.string() << "\n";
      return Ok;
    }

    if (mesh_cmd->parsed()) {
      Context ctx(c_mesh, out);
      Mesh mesh;
      if (!ms_import.empty()) {
        std::ifstream in(ms_import);
        if (!in)
          throw InvalidArgument("cannot open " + ms_import);
        mesh = import_gmsh(in);
      } else {
        mesh = generate_mesh(ctx.domain, ms_h);
      }
      write_mesh_files(ctx, mesh);
      if (!ms_export.empty()) {
        std::ofstream f(ms_export);
        if (!f)
          throw InvalidArgument("cannot write " + ms_export);
        export_gmsh(mesh, f);
      }
      const MeshCheck check = check_mesh(mesh, ms_import.empty() ? &ctx.domain : nullptr);
      out << std::setprecision(6) << "vertices=" << mesh.num_vertices()
          << " triangles=" << mesh.num_triangles() << " h_actual=" << mesh.h_actual
          << " edge_ratio=" << check.edge_ratio << (check.ok() ? " ok" : " INVALID") << "\n";
      for (const auto& p : check.problems)
        out << "  " << p << "\n";
      return Ok;
    }
  } catch (const NewtonError& e) {
    err << "solver failure: " << e.what() << "\n";
    return SolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return UsageError;
  }
  return UsageError;
}

} // namespace pmcf::cli
