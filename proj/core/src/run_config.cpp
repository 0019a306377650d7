#include "confbaryo/run_config.hpp"

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cb {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Reads keys from one JSON object and rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(where() + " must be an object");
  }
  bool has(const std::string& k) const { return j_.contains(k); }
  const json& raw(const std::string& k) {
    used_.insert(k);
    return j_.at(k);
  }
  double num(const std::string& k, std::optional<double> def = std::nullopt) {
    if (!has(k)) {
      if (def) return *def;
      throw ConfigError("missing required key '" + key(k) + "'");
    }
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError("'" + key(k) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + key(k) + "' must be finite");
    return d;
  }
  long integer(const std::string& k, long def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError("'" + key(k) + "' must be an integer");
    return v.get<long>();
  }
  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) throw ConfigError("'" + key(k) + "' must be true or false");
    return v.get<bool>();
  }
  std::string str(const std::string& k, std::optional<std::string> def = std::nullopt) {
    if (!has(k)) {
      if (def) return *def;
      throw ConfigError("missing required key '" + key(k) + "'");
    }
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError("'" + key(k) + "' must be a string");
    return v.get<std::string>();
  }
  std::string choice(const std::string& k, const std::string& def, const std::vector<std::string>& allowed) {
    const std::string v = str(k, def);
    for (const auto& a : allowed)
      if (a == v) return v;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError("'" + key(k) + "' must be one of: " + list);
  }
  std::vector<double> vec(const std::string& k, std::optional<std::vector<double>> def = std::nullopt) {
    if (!has(k)) {
      if (def) return *def;
      throw ConfigError("missing required key '" + key(k) + "'");
    }
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError("'" + key(k) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("'" + key(k) + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Vec3 vec3(const std::string& k, const Vec3& def) {
    if (!has(k)) return def;
    const auto v = vec(k);
    if (v.size() != 3) throw ConfigError("'" + key(k) + "' must have 3 entries");
    return {v[0], v[1], v[2]};
  }
  Obj sub(const std::string& k) { return Obj(raw(k), key(k)); }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key '" + key(it.key()) + "'");
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

// CSV with columns r, delta, delta_t; lines starting with '#' and a
// non-numeric header line are skipped.
void read_radial_csv(const std::string& path, std::vector<double>& r, std::vector<double>& d, std::vector<double>& dt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open radial table '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b, c;
    if (!(ls >> a >> b >> c)) {
      if (r.empty()) continue;  // header
      throw ConfigError("malformed row in radial table '" + path + "'");
    }
    r.push_back(a);
    d.push_back(b);
    dt.push_back(c);
  }
}

ConformalProfile parse_profile(Obj o, json& canon, const std::string& base_dir, std::optional<BumpParams>* bump) {
  const std::string fam = o.choice("family", "", {"minkowski", "gaussian_bump", "flrw", "radial_table"});
  canon["family"] = fam;
  ConformalProfile p;
  try {
    if (fam == "minkowski") {
      p = ConformalProfile::minkowski();
    } else if (fam == "gaussian_bump") {
      const double A = o.num("A"), w = o.num("w"), t0 = o.num("t0", 0.0);
      const Vec3 c = o.vec3("center", Vec3::Zero());
      canon["A"] = A;
      canon["w"] = w;
      canon["t0"] = t0;
      canon["center"] = vec_json(c);
      p = ConformalProfile::gaussian_bump(A, w, t0, c);
      if (bump) *bump = BumpParams{A, w, t0, c};
    } else if (fam == "flrw") {
      if (o.has("polynomial") == o.has("exponential"))
        throw ConfigError("'profile' flrw needs exactly one of 'polynomial' or 'exponential'");
      if (o.has("polynomial")) {
        const auto c = o.vec("polynomial");
        canon["polynomial"] = c;
        p = ConformalProfile::flrw_polynomial(c);
      } else {
        Obj e = o.sub("exponential");
        const double a = e.num("a"), H = e.num("H");
        e.finish();
        canon["exponential"] = {{"a", a}, {"H", H}};
        p = ConformalProfile::flrw_exponential(a, H);
      }
    } else {
      std::vector<double> r, d, dt;
      if (o.has("file")) {
        fs::path f = o.str("file");
        if (f.is_relative()) f = fs::path(base_dir) / f;
        read_radial_csv(f.string(), r, d, dt);
      } else {
        r = o.vec("r");
        d = o.vec("delta");
        dt = o.vec("delta_t");
      }
      canon["r"] = r;
      canon["delta"] = d;
      canon["delta_t"] = dt;
      for (double v : d)
        if (!(v > -1.0)) throw ConfigError("'profile.delta' must stay above -1 so that Omega > 0");
      p = ConformalProfile::radial_table(r, d, dt);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  o.finish();
  return p;
}

SliceField parse_field(Obj o, json& canon) {
  const std::string fam = o.choice("family", "", {"zero", "gaussian", "offset_bump"});
  canon["family"] = fam;
  const double lambda = o.num("lambda", 0.0);
  if (lambda < 0.0) throw ConfigError("'field.lambda' must be >= 0");
  canon["lambda"] = lambda;
  SliceField f;
  if (fam == "zero") {
    f = SliceField::zero();
    f.lambda = lambda;
  } else if (fam == "gaussian") {
    double fa = 0.0, fw = 1.0, Xw = 1.0;
    Vec3 fc = Vec3::Zero(), Xa = Vec3::Zero(), Xc = Vec3::Zero();
    if (o.has("f")) {
      Obj s = o.sub("f");
      fa = s.num("amplitude");
      fw = s.num("width");
      fc = s.vec3("center", Vec3::Zero());
      s.finish();
    }
    if (o.has("X")) {
      Obj s = o.sub("X");
      Xa = s.vec3("amplitude", Vec3::Zero());
      Xw = s.num("width");
      Xc = s.vec3("center", Vec3::Zero());
      s.finish();
    }
    if (!(fw > 0.0) || !(Xw > 0.0)) throw ConfigError("'field' widths must be positive");
    canon["f"] = {{"amplitude", fa}, {"width", fw}, {"center", vec_json(fc)}};
    canon["X"] = {{"amplitude", vec_json(Xa)}, {"width", Xw}, {"center", vec_json(Xc)}};
    f = SliceField::gaussian(fa, fw, fc, Xa, Xw, Xc, lambda);
  } else {
    const double f0 = o.num("f0"), fa = o.num("fa"), fw = o.num("fw");
    if (!(fw > 0.0)) throw ConfigError("'field.fw' must be positive");
    canon["f0"] = f0;
    canon["fa"] = fa;
    canon["fw"] = fw;
    f = SliceField::offset_bump(f0, fa, fw, lambda);
  }
  o.finish();
  return f;
}

template <class E>
E pick(const std::string& v, const std::vector<std::pair<std::string, E>>& m) {
  for (const auto& [k, e] : m)
    if (k == v) return e;
  throw ConfigError("internal: unmapped choice " + v);
}

void validate_request(const RunConfig& c) {
  const RateRequest& r = c.request;
  const double m = r.cutoffs.m;
  const double lam = r.field ? r.field->lambda : 0.0;
  const bool homogeneous = r.profile.spatially_homogeneous;
  try {
    r.cutoffs.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("cutoffs: ") + e.what());
  }
  auto need_compact_field = [&] {
    if (!r.field) throw ConfigError("scenario '" + to_string(r.scenario) + "' needs a 'field'");
    if (lam > 0.0 && !r.field->support_radius)
      throw ConfigError("field must be compactly supported (offset_bump with f0 != 0 is not)");
    if (lam > 0.0 && !r.field->identically_zero && r.options.dynamics == Dynamics::canonical)
      throw ConfigError("canonical dynamics needs f > 0 everywhere, which a compactly supported f violates; use 'linearized'");
  };
  switch (r.scenario) {
    case Scenario::scenario1:
      if (lam != 0.0) throw ConfigError("scenario1 requires lambda = 0 (u = d_t)");
      if (m > 0.0 && homogeneous)
        throw ConfigError("scenario1 with m > 0 needs a compactly supported Omega - 1; flrw is spatially homogeneous");
      break;
    case Scenario::scenario2:
      if (m != 0.0) throw ConfigError("scenario2 requires m = 0 (use 'mixed' for m > 0)");
      need_compact_field();
      break;
    case Scenario::mixed:
      if (!(m > 0.0)) throw ConfigError("mixed requires m > 0");
      if (!(lam > 0.0)) throw ConfigError("mixed requires lambda > 0");
      if (homogeneous) throw ConfigError("mixed with m > 0 needs a compactly supported Omega - 1");
      need_compact_field();
      break;
    case Scenario::generic:
      if (lam != 0.0) throw ConfigError("generic uses the scenario-1 G and requires lambda = 0");
      if (c.generic_G == "scenario1" && m > 0.0 && homogeneous)
        throw ConfigError("generic scenario-1 G needs a compactly supported Omega - 1");
      break;
  }
  if (c.sweep) {
    const auto vals = c.sweep->values();
    if (vals.empty()) throw ConfigError("sweep range is empty");
    if (c.sweep->variable == "Lambda") {
      for (double L : vals) {
        CutoffConfig cc = r.cutoffs;
        cc.Lambda = L;
        try {
          cc.validate();
        } catch (const DomainError& e) {
          throw ConfigError("sweep Lambda=" + std::to_string(L) + ": " + e.what());
        }
      }
    }
  }
  if (!(r.profile.omega(r.t, Vec3::Zero()) > 0.0)) throw ConfigError("Omega must be positive at the evaluation time");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string convention_string(const RateReport& rep) {
  std::string s;
  for (const auto& [k, v] : rep.convention) s += (s.empty() ? "" : ";") + k + "=" + v;
  return s;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  if (points < 1 || !(from <= to)) return v;
  if (points == 1) {
    if (from == to) v.push_back(from);
    return v;
  }
  for (int i = 0; i < points; ++i) v.push_back(from + (to - from) * i / (points - 1));
  return v;
}

std::string fnv1a_hex(const std::string& s) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& ov, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Obj root(j, "");
  RunConfig cfg;
  RateRequest& req = cfg.request;
  json canon;
  const std::string sc = root.choice("scenario", "", {"scenario1", "scenario2", "mixed", "generic"});
  req.scenario = pick<Scenario>(sc, {{"scenario1", Scenario::scenario1},
                                     {"scenario2", Scenario::scenario2},
                                     {"mixed", Scenario::mixed},
                                     {"generic", Scenario::generic}});
  canon["scenario"] = sc;
  if (req.scenario == Scenario::generic) {
    cfg.generic_G = root.choice("G", "scenario1", {"scenario1", "zero"});
    canon["G"] = cfg.generic_G;
  }
  req.t = root.num("t", 0.0);
  canon["t"] = req.t;
  req.cutoffs.m = root.num("m");
  canon["m"] = req.cutoffs.m;

  {
    Obj c = root.sub("cutoffs");
    req.cutoffs.eps = c.num("eps");
    req.cutoffs.Lambda = c.num("Lambda");
    req.cutoffs.mass_factor = c.num("mass_factor", 10.0);
    req.cutoffs.lambda_factor = c.num("lambda_factor", 10.0);
    c.finish();
    canon["cutoffs"] = {{"eps", req.cutoffs.eps},
                        {"Lambda", req.cutoffs.Lambda},
                        {"mass_factor", req.cutoffs.mass_factor},
                        {"lambda_factor", req.cutoffs.lambda_factor}};
  }
  {
    json pc;
    req.profile = parse_profile(root.sub("profile"), pc, base_dir, &cfg.bump);
    canon["profile"] = pc;
  }
  if (root.has("field")) {
    json fc;
    req.field = parse_field(root.sub("field"), fc);
    canon["field"] = fc;
  }

  QuadConfig& q = req.quad;
  int threads = 1;
  if (root.has("quadrature")) {
    Obj o = root.sub("quadrature");
    q.rel_tol = o.num("rel_tol", q.rel_tol);
    q.abs_tol = o.num("abs_tol", q.abs_tol);
    q.max_evals = o.integer("max_evals", q.max_evals);
    q.mc_samples = o.integer("mc_samples", q.mc_samples);
    q.importance_scale = o.num("importance_scale", q.importance_scale);
    q.mc_rel_tol = o.num("mc_rel_tol", q.mc_rel_tol);
    threads = static_cast<int>(o.integer("threads", 1));
    o.finish();
  }
  if (root.has("seed")) {
    const json& s = root.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long>() >= 0))
      throw ConfigError("'seed' must be a nonnegative integer");
    q.seed = s.get<uint64_t>();
  }
  if (ov.seed) q.seed = *ov.seed;
  if (ov.tolerance) q.rel_tol = *ov.tolerance;
  if (ov.threads) threads = *ov.threads;
  if (threads < 1) throw ConfigError("'threads' must be >= 1");
  q.threads = threads;
  if (!(q.rel_tol > 0.0 && q.rel_tol < 1.0)) throw ConfigError("'quadrature.rel_tol' must lie in (0, 1)");
  if (!(q.abs_tol >= 0.0)) throw ConfigError("'quadrature.abs_tol' must be >= 0");
  if (q.max_evals < 100) throw ConfigError("'quadrature.max_evals' must be >= 100");
  if (q.mc_samples < 2) throw ConfigError("'quadrature.mc_samples' must be >= 2");
  if (!(q.importance_scale > 0.0)) throw ConfigError("'quadrature.importance_scale' must be positive");
  if (!(q.mc_rel_tol > 0.0)) throw ConfigError("'quadrature.mc_rel_tol' must be positive");
  canon["quadrature"] = {{"rel_tol", q.rel_tol},
                         {"abs_tol", q.abs_tol},
                         {"max_evals", q.max_evals},
                         {"mc_samples", q.mc_samples},
                         {"importance_scale", q.importance_scale},
                         {"mc_rel_tol", q.mc_rel_tol}};
  canon["seed"] = q.seed;

  RateOptions& opt = req.options;
  if (root.has("options")) {
    Obj o = root.sub("options");
    opt.normalization = pick<Normalization>(o.choice("normalization", "theorem", {"theorem", "derivation"}),
                                            {{"theorem", Normalization::theorem}, {"derivation", Normalization::derivation}});
    opt.conjugation = pick<Conjugation>(o.choice("conjugation", "forward", {"forward", "reverse"}),
                                        {{"forward", Conjugation::forward}, {"reverse", Conjugation::reverse}});
    opt.t1_convention = pick<T1Convention>(o.choice("t1_convention", "exact", {"exact", "three_quarters"}),
                                           {{"exact", T1Convention::exact}, {"three_quarters", T1Convention::three_quarters}});
    opt.dynamics = pick<Dynamics>(o.choice("dynamics", "linearized", {"linearized", "canonical"}),
                                  {{"linearized", Dynamics::linearized}, {"canonical", Dynamics::canonical}});
    opt.grid_n = static_cast<int>(o.integer("grid_n", opt.grid_n));
    opt.grid_half_width = o.num("grid_half_width", opt.grid_half_width);
    opt.inner_samples = static_cast<int>(o.integer("inner_samples", opt.inner_samples));
    opt.k_table_nodes = static_cast<int>(o.integer("k_table_nodes", opt.k_table_nodes));
    opt.scenario1_force_generic = o.boolean("scenario1_force_generic", false);
    o.finish();
  }
  if (opt.grid_n < 8 || opt.grid_n > 256) throw ConfigError("'options.grid_n' must lie in [8, 256]");
  if (opt.grid_half_width < 0.0) throw ConfigError("'options.grid_half_width' must be >= 0");
  if (opt.inner_samples < 1) throw ConfigError("'options.inner_samples' must be >= 1");
  if (opt.k_table_nodes < 8 || opt.k_table_nodes > 512) throw ConfigError("'options.k_table_nodes' must lie in [8, 512]");
  canon["options"] = {{"normalization", to_string(opt.normalization)},
                      {"conjugation", to_string(opt.conjugation)},
                      {"t1_convention", to_string(opt.t1_convention)},
                      {"dynamics", to_string(opt.dynamics)},
                      {"grid_n", opt.grid_n},
                      {"grid_half_width", opt.grid_half_width},
                      {"inner_samples", opt.inner_samples},
                      {"k_table_nodes", opt.k_table_nodes},
                      {"scenario1_force_generic", opt.scenario1_force_generic}};

  if (root.has("sweep")) {
    Obj s = root.sub("sweep");
    SweepSpec sw;
    sw.variable = s.choice("variable", "t", {"t", "Lambda"});
    sw.from = s.num("from");
    sw.to = s.num("to");
    sw.points = static_cast<int>(s.integer("points", 1));
    s.finish();
    cfg.sweep = sw;
    canon["sweep"] = {{"variable", sw.variable}, {"from", sw.from}, {"to", sw.to}, {"points", sw.points}};
  }
  if (root.has("output")) {
    Obj o = root.sub("output");
    cfg.out_dir = o.str("dir", cfg.out_dir);
    o.finish();
  }
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  root.finish();

  validate_request(cfg);
  cfg.canonical = canon.dump();
  cfg.hash = fnv1a_hex(cfg.canonical);
  return cfg;
}

RunConfig load_config(const std::string& path, const ConfigOverrides& ov) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path parent = fs::path(path).parent_path();
  return parse_config(ss.str(), ov, parent.empty() ? "." : parent.string());
}

RateReport evaluate(const RunConfig& cfg) {
  const RateRequest& req = cfg.request;
  if (req.scenario != Scenario::generic) return compute_rate(req);
  RateReport rep;
  const CutoffConfig& cut = req.cutoffs;
  if (cfg.generic_G == "zero") {
    rep = rate_generic(GFunction([](const Vec3&, const Vec3&) { return 0.0; }), cut, req.quad,
                       req.options.inner_samples);
  } else if (cfg.bump && req.cutoffs.m > 0.0) {
    // Closed-form transforms: delta = A exp(-tau^2/w^2) exp(-|x-c|^2/w^2), d_t Omega = -2 tau/w^2 delta.
    const BumpParams& b = *cfg.bump;
    const double tau = req.t - b.t0, w2 = b.w * b.w;
    const double a2 = b.A * std::exp(-tau * tau / w2), a1 = -2.0 * tau / w2 * a2;
    const double we = b.w / std::sqrt(2.0);
    const Vec3 c = b.center;
    auto hat = [c, we](double amp) {
      return HatFunction([c, we, amp](const Vec3& q) { return std::polar(amp * gaussian_hat(we, q.norm()), -q.dot(c)); });
    };
    rep = rate_generic(scenario1_G(hat(a1), hat(a2), cut.m, req.options.normalization), cut, req.quad,
                       req.options.inner_samples);
  } else {
    RateRequest r1 = req;
    r1.options.scenario1_force_generic = true;
    r1.scenario = Scenario::scenario1;
    rep = rate_scenario1(r1);
  }
  rep.scenario = "generic";
  rep.convention = convention_record(req.options);
  return rep;
}

std::string report_json(const RateReport& rep, const RunConfig& cfg) {
  const LowerOrders lo = b0_and_b1();
  json j;
  j["format"] = "confbaryo-report/1";
  j["config_hash"] = cfg.hash;
  j["seed"] = cfg.request.quad.seed;
  j["config"] = json::parse(cfg.canonical);
  j["scenario"] = rep.scenario;
  j["path"] = rep.path;
  j["status"] = rep.converged ? "ok" : "non_converged";
  if (!rep.reason.empty()) j["reason"] = rep.reason;
  j["B2"] = rep.B2;
  j["B2_imag"] = rep.B2_imag;
  j["error_estimate"] = rep.error_estimate;
  j["order0"] = rep.order0 + lo.b0;
  j["order1"] = rep.order1 + lo.b1;
  j["lower_orders_rationale"] = lo.rationale;
  j["cutoffs"] = {{"eps", rep.eps}, {"Lambda", rep.Lambda}, {"m", rep.m}, {"s_max", rep.s_max}, {"rho_max", rep.rho_max}};
  json conv = json::object();
  for (const auto& [k, v] : rep.convention) conv[k] = v;
  j["convention"] = conv;
  j["perturbation_scale"] = rep.perturbation_scale;
  j["evals"] = rep.evals;
  json terms = json::array();
  for (const auto& t : rep.terms) terms.push_back({{"name", t.name}, {"re", t.re}, {"im", t.im}, {"error", t.error}});
  j["terms"] = terms;
  return j.dump(2) + "\n";
}

std::string table_csv(const Table& table, const RateReport& rep, const RunConfig& cfg) {
  std::ostringstream os;
  os << "# config_hash=" << cfg.hash << " seed=" << cfg.request.quad.seed << " eps=" << fmt(rep.eps)
     << " Lambda=" << fmt(rep.Lambda) << " m=" << fmt(rep.m) << " s_max=" << fmt(rep.s_max)
     << " rho_max=" << fmt(rep.rho_max) << " convention=" << convention_string(rep) << "\n";
  const std::string note = "{eps=" + fmt(rep.eps) + ";Lambda=" + fmt(rep.Lambda) + "}";
  for (size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c] << note;
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << fmt(row[c]);
    os << "\n";
  }
  return os.str();
}

RunOutcome run(const RunConfig& cfg) {
  const RateReport rep = evaluate(cfg);
  RunOutcome out;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_file(dir / "report.json", report_json(rep, cfg));
  out.files.push_back((dir / "report.json").string());
  if (!rep.k_table.rows.empty()) {
    write_file(dir / "k_table.csv", table_csv(rep.k_table, rep, cfg));
    out.files.push_back((dir / "k_table.csv").string());
  }
  if (!rep.alpha_table.rows.empty()) {
    write_file(dir / "alpha_table.csv", table_csv(rep.alpha_table, rep, cfg));
    out.files.push_back((dir / "alpha_table.csv").string());
  }
  Table terms;
  terms.columns = {"index[1]", "re[natural]", "im[natural]", "error[natural]"};
  std::string names = "# terms:";
  for (size_t i = 0; i < rep.terms.size(); ++i) {
    terms.rows.push_back({static_cast<double>(i), rep.terms[i].re, rep.terms[i].im, rep.terms[i].error});
    names += " " + std::to_string(i) + "=" + rep.terms[i].name;
  }
  write_file(dir / "terms.csv", table_csv(terms, rep, cfg) + names + "\n");
  out.files.push_back((dir / "terms.csv").string());
  out.exit_code = rep.converged ? 0 : 3;
  std::ostringstream msg;
  msg.precision(12);
  msg << "B2 = " << rep.B2 << " +- " << rep.error_estimate << " (" << rep.path
      << (rep.reason.empty() ? "" : ", " + rep.reason) << ")";
  if (!rep.converged) msg << " [non-converged]";
  out.message = msg.str();
  return out;
}

RunOutcome sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep needs a 'sweep' section");
  const auto vals = cfg.sweep->values();
  if (vals.empty()) throw ConfigError("sweep range is empty");
  const bool over_t = cfg.sweep->variable == "t";
  Table tab;
  tab.columns = {over_t ? "t[time]" : "Lambda[1/length]", "B2[natural]", "error[natural]", "B2_imag[natural]",
                 "converged[bool]"};
  json rows = json::array();
  bool all_conv = true;
  RateReport last;
  for (double v : vals) {
    RunConfig c = cfg;
    if (over_t)
      c.request.t = v;
    else
      c.request.cutoffs.Lambda = v;
    const RateReport rep = evaluate(c);
    all_conv = all_conv && rep.converged;
    tab.rows.push_back({v, rep.B2, rep.error_estimate, rep.B2_imag, rep.converged ? 1.0 : 0.0});
    rows.push_back({{cfg.sweep->variable, v},
                    {"B2", rep.B2},
                    {"error_estimate", rep.error_estimate},
                    {"B2_imag", rep.B2_imag},
                    {"path", rep.path},
                    {"reason", rep.reason},
                    {"rho_max", rep.rho_max},
                    {"converged", rep.converged}});
    last = rep;
  }
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  RunOutcome out;
  json j;
  j["format"] = "confbaryo-sweep/1";
  j["config_hash"] = cfg.hash;
  j["seed"] = cfg.request.quad.seed;
  j["config"] = json::parse(cfg.canonical);
  j["variable"] = cfg.sweep->variable;
  json conv = json::object();
  for (const auto& [k, v] : last.convention) conv[k] = v;
  j["convention"] = conv;
  j["rows"] = rows;
  write_file(dir / "sweep_report.json", j.dump(2) + "\n");
  RateReport echo = last;
  if (!over_t) echo.Lambda = std::numeric_limits<double>::quiet_NaN();
  write_file(dir / "sweep.csv", table_csv(tab, echo, cfg));
  out.files = {(dir / "sweep_report.json").string(), (dir / "sweep.csv").string()};
  out.exit_code = all_conv ? 0 : 3;
  out.message = std::to_string(vals.size()) + " sweep points written";
  return out;
}

}  // namespace cb
