// sisbox: sampling spaces inside shift-invariant spaces, from the command line.
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sisbox/sisbox.hpp>

namespace {

using namespace sisbox;

// SISBOX_GRID="K,N" replaces the default grid; explicit flags win.
void apply_environment(Settings& s) {
  const char* env = std::getenv("SISBOX_GRID");
  if (!env || !*env) return;
  const std::string v(env);
  const auto comma = v.find(',');
  double k = 0, n = 0;
  if (comma == std::string::npos || !io::detail::to_double(v.substr(0, comma), k) || !io::detail::to_double(v.substr(comma + 1), n))
    throw ParseError("SISBOX_GRID must be \"K,N\" (got '" + v + "')", 0);
  s.grid = {static_cast<int>(k), static_cast<int>(n)};
}

int exit_code(Verdict v) { return v == Verdict::pass ? 0 : 2; }

void emit(const ReportDocument& d, const std::string& path) {
  const nlohmann::json j = d;
  if (path.empty() || path == "-")
    std::cout << j.dump(2) << "\n";
  else
    io::write_file(path, j.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling spaces in shift-invariant spaces: Grammians, Zak fibers, membership and reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();

  commands::Options opt;
  for (int i = 0; i < argc; ++i) opt.argv.emplace_back(argv[i]);
  int k = 0, n = 0;
  std::string report_path;
  auto* k_opt = app.add_option("--K", k, "half bandwidth of the frequency grid (power of two)");
  auto* n_opt = app.add_option("--N", n, "grid points per unit frequency (power of two)");
  app.add_option("--eps", opt.settings.eps, "support and division guard tolerance")->capture_default_str();
  app.add_option("--kmax", opt.settings.k_max, "sample window is [-kmax, kmax)")->capture_default_str();
  app.add_option("--seed", opt.settings.seed, "seed for random probe points")->capture_default_str();
  app.add_option("--quad", opt.settings.quad_order, "quadrature nodes for time kernels")->capture_default_str();
  app.add_option("--nmax", opt.n_max, "number of ex2 blocks minus one")->capture_default_str();
  app.add_option("--report", report_path, "write the JSON report here instead of stdout");

  std::string signal, space, csv, theorem, samples, partition, functions, out_dir = ".", out_csv = "reconstruction.csv",
                                                                         x_spec = "-8:8:201", lattice, emit_s;
  bool statement_norm = false;

  auto* analyze = app.add_subcommand("analyze", "Grammian, support, frame bounds and sampling-space check of a generator");
  analyze->add_option("signal", signal, "catalog name or spectrum file")->required();
  analyze->add_option("--csv", csv, "write omega, G and |Z(0,.)| over [0,1)");

  auto* member = app.add_subcommand("membership", "membership criteria for a function");
  member->add_option("signal", signal, "catalog name or spectrum file")->required();
  member->add_option("--theorem", theorem, "1, 2, 5 or sz04")->required();
  member->add_option("--space", space, "generator of the enclosing space (theorem 1)");
  member->add_flag("--statement-normalization", statement_norm, "theorem 2: use h = f/G_f instead of h = f/Z_f(0,.)");
  member->add_option("--emit-s", emit_s, "theorem 5: write the constructed sampling spectrum");

  auto* recon = app.add_subcommand("reconstruct", "reconstruct from integer samples");
  recon->add_option("--space", space, "generator")->required();
  recon->add_option("--samples", samples, "CSV rows k,re,im")->required();
  recon->add_option("--x", x_spec, "evaluation points lo:hi:count")->capture_default_str();
  recon->add_option("--out", out_csv, "CSV rows x,re,im")->capture_default_str();
  recon->add_option("--lattice", lattice, "a,b: samples taken at (k+b)/a");

  auto* decomp = app.add_subcommand("decompose", "direct sum along a periodic partition of the spectral support");
  decomp->add_option("--space", space, "generator")->required();
  decomp->add_option("--partition", partition, "JSON list of masks")->required();
  decomp->add_option("--out-dir", out_dir, "directory for component spectra")->capture_default_str();

  auto* det = app.add_subcommand("determine", "determining-set check");
  det->add_option("--space", space, "generator")->required();
  det->add_option("--functions", functions, "comma separated signals")->required();
  det->add_option("--out-dir", out_dir, "directory for B_i masks and alpha_i")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    apply_environment(opt.settings);
    if (*k_opt) opt.settings.grid.K = k, opt.k_explicit = true;
    if (*n_opt) opt.settings.grid.N = n;
    opt.settings.grid.validate();
    if (opt.settings.k_max < 1) throw ParseError("--kmax must be positive", 0);

    ReportDocument doc;
    if (*analyze) {
      doc = commands::analyze(opt, signal, csv);
    } else if (*member) {
      doc = commands::membership(opt, signal, commands::parse_theorem(theorem), space,
                                 statement_norm ? Theorem2Normalization::grammian : Theorem2Normalization::zak, emit_s);
    } else if (*recon) {
      std::optional<std::pair<double, double>> lat;
      if (!lattice.empty()) {
        const auto parts = split_list(lattice);
        double a = 0, b = 0;
        if (parts.size() != 2 || !io::detail::to_double(parts[0], a) || !io::detail::to_double(parts[1], b))
          throw ParseError("--lattice must be a,b", 0);
        lat = std::make_pair(a, b);
      }
      doc = commands::reconstruct(opt, space, samples, commands::parse_xrange(x_spec), out_csv, lat);
    } else if (*decomp) {
      doc = commands::decompose(opt, space, partition, out_dir);
    } else if (*det) {
      doc = commands::determine(opt, space, split_list(functions), out_dir);
    }
    emit(doc, report_path);
    return exit_code(doc.overall);
  } catch (const SpaceRejected& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    const nlohmann::json j = e.report().to_report();
    std::cerr << j.dump(2) << "\n";
    return 2;
  } catch (const ReportError& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    const nlohmann::json j = e.report();
    std::cerr << j.dump(2) << "\n";
    return 2;
  } catch (const NotInSpace& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    return 2;
  } catch (const NotASamplingSpace& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateSpace& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sisbox: " << e.what() << "\n";
    return 1;
  }
}
