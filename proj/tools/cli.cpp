#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "capelast/config.hpp"
#include "capelast/error.hpp"
#include "capelast/field_io.hpp"
#include "capelast/limit.hpp"

namespace capelast::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<int> nx, ny, nz, snapshot_every;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--nx", o.nx, "override grid.nx");
  app->add_option("--ny", o.ny, "override grid.ny");
  app->add_option("--nz", o.nz, "override grid.nz");
  app->add_option("--dt", o.dt, "override time.dt");
  app->add_option("--seed", o.seed, "seed for the random surface recipe");
  app->add_option("--snapshot-every", o.snapshot_every, "steps between field dumps");
}

RunConfig configure(const std::string& path, const Overrides& o) {
  RunConfig c = load_config(path);
  if (o.nx) c.init.nx = *o.nx;
  if (o.ny) c.init.ny = *o.ny;
  if (o.nz) c.init.nz = *o.nz;
  if (o.dt) c.dt = *o.dt;
  if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
  if (o.seed) {
    if (!c.init.psi.random) throw ConfigError("--seed given but the surface recipe has no random term");
    c.init.psi.random->seed = *o.seed;
  }
  // Re-validate the overridden values through the parser.
  return parse_config(to_config_text(c));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
  if (!os) throw Error("cannot write " + path.string());
}

void dump_state(const fs::path& dir, const State& s, double b) {
  ensure_dir(dir);
  write_field(dir / "psi.bin", s.psi, b);
  write_field(dir / "q.bin", s.q, b);
  for (int i = 0; i < 3; ++i) {
    write_field(dir / ("v" + std::to_string(i + 1) + ".bin"), s.v[i], b);
    for (int j = 0; j < 3; ++j)
      write_field(dir / ("F" + std::to_string(i + 1) + std::to_string(j + 1) + ".bin"), s.F[j][i], b);
  }
}

std::string step_dir(int step) {
  std::ostringstream os;
  os << "step_" << std::setw(6) << std::setfill('0') << step;
  return os.str();
}

int cmd_simulate(const std::string& config_path, const fs::path& out_dir, const Overrides& o, std::ostream& out) {
  const RunConfig c = configure(config_path, o);
  ensure_dir(out_dir);
  write_text(out_dir / "config.ini", to_config_text(c));

  std::ofstream csv(out_dir / "diagnostics.csv");
  if (!csv) throw Error("cannot write diagnostics.csv");
  csv << diagnostics_csv_header() << '\n';
  json snaps = json::array();
  RunObserver obs;
  obs.on_record = [&](const DiagnosticsRecord& r) { csv << to_csv_row(r) << '\n' << std::flush; };
  obs.on_snapshot = [&](int step, const State& s) {
    const std::string name = step_dir(step);
    dump_state(out_dir / "snapshots" / name, s, c.init.b);
    snaps.push_back({{"step", step}, {"t", s.t}, {"dir", "snapshots/" + name}});
  };

  const RunResult r = run(c, obs);
  const DiagnosticsRecord& last = r.diagnostics.back();
  json manifest = {{"t", last.t},
                   {"sigma", c.init.sigma},
                   {"b", c.init.b},
                   {"nx", c.init.nx},
                   {"ny", c.init.ny},
                   {"nz", c.init.nz},
                   {"dt", last.dt},
                   {"steps", r.steps},
                   {"rt_min", r.rt_min},
                   {"aborted", r.aborted},
                   {"abort_reason", r.abort_reason},
                   {"format", "CAPELAST1 nx ny nz b kind, little-endian float64, x1 fastest"},
                   {"snapshots", snaps}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  out << "steps " << r.steps << ", t = " << last.t << ", E_cons drift "
      << std::abs(last.E_cons - r.diagnostics.front().E_cons) << ", rt_min " << r.rt_min << '\n';
  if (r.aborted) {
    out << "run aborted: " << r.abort_reason << '\n';
    return kFailure;
  }
  return kOk;
}

std::vector<double> parse_sigmas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad sigma value '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("bad sigma value '" + item + "'");
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError("empty --sigmas list");
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& sigma_text, const fs::path& out_dir, int jobs,
              const Overrides& o, std::ostream& out) {
  const RunConfig c = configure(config_path, o);
  const std::vector<double> sigmas = parse_sigmas(sigma_text);
  ensure_dir(out_dir);
  const SweepReport rep = sweep_sigma(c, sigmas, jobs);
  write_text(out_dir / "sweep.csv", to_csv(rep));
  std::string text = summary(rep);
  bool ok = rep.verdict == Verdict::kDecreasing || rep.verdict == Verdict::kWithheld;

  if (sigmas.size() >= 2 && sigmas.back() == 0.0) {
    SweepReport head = rep;
    head.members.pop_back();
    const Grid g = Grid::make(c.init.nx, c.init.ny, c.init.nz, c.init.b);
    const SweepReport lim = limit_compare(head, rep.members.back(), g);
    write_text(out_dir / "limit.csv", to_csv(lim));
    text += "\nagainst sigma = 0:\n" + summary(lim);
    ok = ok && (lim.verdict == Verdict::kDecreasing || lim.verdict == Verdict::kWithheld);
  }
  write_text(out_dir / "summary.txt", text);
  out << text;
  return ok ? kOk : kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"capelast: free-boundary elastodynamics in graph coordinates", "capelast"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", suite, sigmas;
  Overrides o;
  int jobs = 1;
  VerifyOptions vopts;

  auto* sim = app.add_subcommand("simulate", "evolve a configured initial state");
  sim->add_option("--config", config_path, "INI configuration")->required();
  sim->add_option("--out", out_dir, "output directory");
  add_overrides(sim, o);

  auto* ver = app.add_subcommand("verify", "run an identity battery and print its residual table");
  ver->add_option("--suite", suite, "operators, lemmas, alinhac or elliptic")->required();
  ver->add_option("--nx", vopts.nx);
  ver->add_option("--ny", vopts.ny);
  ver->add_option("--nz", vopts.nz);
  ver->add_option("--history", vopts.history, "stored states for the alinhac suite");
  ver->add_option("--out", out_dir, "directory for verify_<suite>.csv (stdout when omitted)");

  auto* sw = app.add_subcommand("sweep-sigma", "surface-tension sweep from shared initial data");
  sw->add_option("--config", config_path, "INI configuration")->required();
  sw->add_option("--sigmas", sigmas, "comma-separated, non-increasing")->required();
  sw->add_option("--out", out_dir, "output directory");
  sw->add_option("--jobs", jobs, "members run in parallel")->check(CLI::PositiveNumber);
  add_overrides(sw, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, o, out);
    if (sw->parsed()) return cmd_sweep(config_path, sigmas, out_dir, jobs, o, out);
    std::ostringstream csv;
    const int code = verify_suite(suite, vopts, csv);
    if (ver->count("--out")) {
      ensure_dir(out_dir);
      write_text(fs::path(out_dir) / ("verify_" + suite + ".csv"), csv.str());
    } else {
      out << csv.str();
    }
    if (code != kOk) err << "verify: some residuals exceed their tolerance\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\nsuites:";
    for (const auto& n : suite_names()) err << ' ' << n;
    err << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace capelast::cli
