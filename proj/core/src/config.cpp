#include "capelast/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "capelast/error.hpp"

namespace capelast {

namespace pt = boost::property_tree;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_terms(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ';') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  std::vector<std::string> kept;
  for (auto& t : out)
    if (t.find_first_not_of(" \t") != std::string::npos) kept.push_back(t);
  return kept;
}

[[noreturn]] void bad_term(const std::string& term, const char* why) {
  throw ConfigError("bad recipe term '" + term + "': " + why);
}

Trig parse_trig(const std::string& s, const std::string& term) {
  if (s == "cos") return Trig::kCos;
  if (s == "sin") return Trig::kSin;
  bad_term(term, "expected cos or sin");
}

const char* trig_name(Trig t) { return t == Trig::kCos ? "cos" : "sin"; }

DepthProfile parse_profile(const std::string& s, const std::string& term) {
  if (s == "one") return DepthProfile::kOne;
  if (s == "linear") return DepthProfile::kLinear;
  if (s == "exp") return DepthProfile::kExp;
  if (s == "cos") return DepthProfile::kCos;
  bad_term(term, "expected one, linear, exp or cos");
}

const char* profile_name(DepthProfile p) {
  switch (p) {
    case DepthProfile::kOne: return "one";
    case DepthProfile::kLinear: return "linear";
    case DepthProfile::kExp: return "exp";
    default: return "cos";
  }
}

/// Reads exactly the listed fields from a term; anything left over is an error.
class TermReader {
 public:
  explicit TermReader(std::string term) : term_(std::move(term)), is_(term_) {}
  std::string word() {
    std::string w;
    if (!(is_ >> w)) bad_term(term_, "too few fields");
    return w;
  }
  template <class T>
  T number() {
    T x{};
    if (!(is_ >> x)) bad_term(term_, "expected a number");
    return x;
  }
  bool optional_word(std::string& w) { return static_cast<bool>(is_ >> w); }
  void finish() {
    std::string rest;
    if (is_ >> rest) bad_term(term_, "unexpected trailing fields");
  }
  const std::string& term() const { return term_; }

 private:
  std::string term_;
  std::istringstream is_;
};

CutoffProfile parse_cutoff(const std::string& s) {
  if (s == "polynomial") return CutoffProfile::kPolynomial;
  if (s == "plateau") return CutoffProfile::kPlateau;
  throw ConfigError("physics.cutoff must be polynomial or plateau, got '" + s + "'");
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  std::istringstream is(*node);
  T x{};
  is >> x;
  std::string rest;
  if (!is || (is >> rest)) throw ConfigError("invalid value for " + key + ": '" + *node + "'");
  return x;
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  if (*node == "true" || *node == "1") return true;
  if (*node == "false" || *node == "0") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + *node + "'");
}

}  // namespace

SurfaceRecipe parse_surface_recipe(std::string_view text) {
  SurfaceRecipe r;
  for (const auto& term : split_terms(text)) {
    TermReader in(term);
    const std::string kind = in.word();
    if (kind == "mode") {
      SurfaceMode m;
      m.amp = in.number<double>();
      m.trig = parse_trig(in.word(), term);
      m.k1 = in.number<int>();
      m.k2 = in.number<int>();
      r.modes.push_back(m);
    } else if (kind == "random") {
      if (r.random) bad_term(term, "only one random term is allowed");
      RandomModes m;
      m.amp = in.number<double>();
      m.kmax = in.number<int>();
      m.seed = in.number<std::uint64_t>();
      if (m.kmax < 1) bad_term(term, "kmax must be positive");
      r.random = m;
    } else {
      bad_term(term, "expected mode or random");
    }
    in.finish();
  }
  return r;
}

FieldRecipe parse_field_recipe(std::string_view text) {
  FieldRecipe r;
  for (const auto& term : split_terms(text)) {
    TermReader in(term);
    const std::string kind = in.word();
    FieldTerm t;
    if (kind == "potential") {
      t.kind = FieldTerm::Kind::kPotential;
      t.amp = in.number<double>();
      t.trig = parse_trig(in.word(), term);
      t.k1 = in.number<int>();
      t.k2 = in.number<int>();
    } else if (kind == "comp") {
      t.kind = FieldTerm::Kind::kComponent;
      t.component = in.number<int>();
      if (t.component < 1 || t.component > 3) bad_term(term, "component must be 1, 2 or 3");
      t.amp = in.number<double>();
      t.trig = parse_trig(in.word(), term);
      t.k1 = in.number<int>();
      t.k2 = in.number<int>();
      t.profile = parse_profile(in.word(), term);
    } else if (kind == "tangent") {
      t.kind = FieldTerm::Kind::kTangent;
      t.amp = in.number<double>();
      t.dir = in.number<int>();
      if (t.dir != 1 && t.dir != 2) bad_term(term, "direction must be 1 or 2");
      std::string shape;
      if (in.optional_word(shape)) {
        t.trig = parse_trig(shape, term);
        (t.dir == 1 ? t.k2 : t.k1) = in.number<int>();
      }
    } else {
      bad_term(term, "expected potential, comp or tangent");
    }
    in.finish();
    r.push_back(t);
  }
  return r;
}

std::string to_string(const SurfaceRecipe& r) {
  std::ostringstream os;
  const char* sep = "";
  for (const auto& m : r.modes) {
    os << sep << "mode " << num(m.amp) << ' ' << trig_name(m.trig) << ' ' << m.k1 << ' ' << m.k2;
    sep = "; ";
  }
  if (r.random) os << sep << "random " << num(r.random->amp) << ' ' << r.random->kmax << ' ' << r.random->seed;
  return os.str();
}

std::string to_string(const FieldRecipe& r) {
  std::ostringstream os;
  const char* sep = "";
  for (const auto& t : r) {
    os << sep;
    switch (t.kind) {
      case FieldTerm::Kind::kPotential:
        os << "potential " << num(t.amp) << ' ' << trig_name(t.trig) << ' ' << t.k1 << ' ' << t.k2;
        break;
      case FieldTerm::Kind::kComponent:
        os << "comp " << t.component << ' ' << num(t.amp) << ' ' << trig_name(t.trig) << ' ' << t.k1 << ' ' << t.k2
           << ' ' << profile_name(t.profile);
        break;
      case FieldTerm::Kind::kTangent:
        os << "tangent " << num(t.amp) << ' ' << t.dir;
        if (t.trig != Trig::kCos || t.k1 != 0 || t.k2 != 0)
          os << ' ' << trig_name(t.trig) << ' ' << (t.dir == 1 ? t.k2 : t.k1);
        break;
    }
    sep = "; ";
  }
  return os.str();
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream is{std::string(text)};
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  static const std::map<std::string, std::vector<std::string>> known = {
      {"grid", {"nx", "ny", "nz", "b"}},
      {"surface", {"psi"}},
      {"fields", {"v", "F1", "F2", "F3"}},
      {"physics", {"sigma", "cutoff", "delta0"}},
      {"time", {"t_final", "dt", "dealias", "filter", "check_cfl"}},
      {"output", {"snapshot_every"}},
      {"solver", {"tol", "max_iter", "restart"}},
      {"diagnostics", {"k_max", "rt_c0", "history"}},
  };
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("config: unknown key " + section + "." + key);
  }

  RunConfig c;
  InitSpec& s = c.init;
  s.nx = get(tree, "grid.nx", s.nx);
  s.ny = get(tree, "grid.ny", s.ny);
  s.nz = get(tree, "grid.nz", s.nz);
  s.b = get(tree, "grid.b", s.b);
  s.psi = parse_surface_recipe(tree.get<std::string>("surface.psi", ""));
  s.v = parse_field_recipe(tree.get<std::string>("fields.v", ""));
  for (int j = 0; j < 3; ++j) s.F[j] = parse_field_recipe(tree.get<std::string>("fields.F" + std::to_string(j + 1), ""));
  s.sigma = get(tree, "physics.sigma", s.sigma);
  if (const auto cut = tree.get_optional<std::string>("physics.cutoff")) s.cutoff = parse_cutoff(*cut);
  s.delta0 = get(tree, "physics.delta0", s.delta0);

  c.t_final = get(tree, "time.t_final", c.t_final);
  c.dt = get(tree, "time.dt", c.dt);
  c.step.dealias = get_bool(tree, "time.dealias", c.step.dealias);
  c.step.filter = get_bool(tree, "time.filter", c.step.filter);
  c.step.check_cfl = get_bool(tree, "time.check_cfl", c.step.check_cfl);
  c.snapshot_every = get(tree, "output.snapshot_every", c.snapshot_every);
  c.solver.tol = get(tree, "solver.tol", c.solver.tol);
  c.solver.max_iter = get(tree, "solver.max_iter", c.solver.max_iter);
  c.solver.restart = get(tree, "solver.restart", c.solver.restart);
  c.k_max = get(tree, "diagnostics.k_max", c.k_max);
  c.rt_c0 = get(tree, "diagnostics.rt_c0", c.rt_c0);
  c.history_length = get(tree, "diagnostics.history", c.history_length);

  if (s.nx < 4 || s.ny < 4 || s.nx % 2 || s.ny % 2 || s.nz < 5 || !(s.b > 0.0))
    throw ConfigError("config: grid needs even nx, ny >= 4, nz >= 5 and b > 0");
  if (s.sigma < 0.0) throw ConfigError("config: physics.sigma must be non-negative");
  if (!(c.dt > 0.0) || c.t_final < 0.0) throw ConfigError("config: time.dt must be positive and t_final >= 0");
  if (c.snapshot_every < 1) throw ConfigError("config: output.snapshot_every must be at least 1");
  if (c.k_max < 0 || c.k_max > 4) throw ConfigError("config: diagnostics.k_max must be in 0..4");
  if (c.history_length < 2) throw ConfigError("config: diagnostics.history must be at least 2");
  if (!(c.solver.tol > 0.0) || c.solver.max_iter < 1 || c.solver.restart < 1)
    throw ConfigError("config: solver settings must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str());
}

std::string to_config_text(const RunConfig& c) {
  const InitSpec& s = c.init;
  const auto flag = [](bool x) { return x ? "true" : "false"; };
  std::ostringstream os;
  os << "[grid]\nnx = " << s.nx << "\nny = " << s.ny << "\nnz = " << s.nz << "\nb = " << num(s.b) << "\n\n";
  os << "[surface]\npsi = " << to_string(s.psi) << "\n\n";
  os << "[fields]\nv = " << to_string(s.v) << '\n';
  for (int j = 0; j < 3; ++j) os << 'F' << j + 1 << " = " << to_string(s.F[j]) << '\n';
  os << "\n[physics]\nsigma = " << num(s.sigma)
     << "\ncutoff = " << (s.cutoff == CutoffProfile::kPolynomial ? "polynomial" : "plateau")
     << "\ndelta0 = " << num(s.delta0) << "\n\n";
  os << "[time]\nt_final = " << num(c.t_final) << "\ndt = " << num(c.dt) << "\ndealias = " << flag(c.step.dealias)
     << "\nfilter = " << flag(c.step.filter) << "\ncheck_cfl = " << flag(c.step.check_cfl) << "\n\n";
  os << "[output]\nsnapshot_every = " << c.snapshot_every << "\n\n";
  os << "[solver]\ntol = " << num(c.solver.tol) << "\nmax_iter = " << c.solver.max_iter
     << "\nrestart = " << c.solver.restart << "\n\n";
  os << "[diagnostics]\nk_max = " << c.k_max << "\nrt_c0 = " << num(c.rt_c0) << "\nhistory = " << c.history_length
     << '\n';
  return os.str();
}

}  // namespace capelast
