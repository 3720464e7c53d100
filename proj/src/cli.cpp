#include "sectorial/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sectorial/eigenstate.hpp"
#include "sectorial/holocheck.hpp"
#include "sectorial/resolvent.hpp"
#include "sectorial/semigroup.hpp"

namespace sectorial::cli {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) bad("unknown key '" + k + "' in " + where);
  }
}

double get_real(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + " must be an integer");
  return j.get<int>();
}

Complex get_complex(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad(what + " must be a number or [re, im]");
}

ComplexVector get_complex_vector(const json& j, Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    bad(what + " must be an array of " + std::to_string(n) + " values");
  }
  ComplexVector v(n);
  for (Index k = 0; k < n; ++k) v[k] = get_complex(j[static_cast<std::size_t>(k)], what);
  return v;
}

RealVector get_real_vector(const json& j, Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    bad(what + " must be an array of " + std::to_string(n) + " numbers");
  }
  RealVector v(n);
  for (Index k = 0; k < n; ++k) v[k] = get_real(j[static_cast<std::size_t>(k)], what);
  return v;
}

ComplexMatrix get_matrix(const json& j, const std::string& what) {
  try {
    return matrix_from_json(j);
  } catch (const std::exception& e) {
    bad(what + ": " + e.what());
  }
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

Options parse_tolerances(const json& j) {
  Options o;
  if (j.is_null()) return o;
  if (!j.is_object()) bad("tolerances must be an object");
  const std::map<std::string, double*> reals = {
      {"solve_tolerance", &o.solve_tolerance},
      {"pivot_tolerance", &o.pivot_tolerance},
      {"eig_residual", &o.eig_residual},
      {"expm_norm_cap", &o.expm_norm_cap},
      {"convexity_slack", &o.convexity_slack},
      {"sector_margin", &o.sector_margin},
      {"tiny_threshold", &o.tiny_threshold},
      {"node_spacing_factor", &o.node_spacing_factor},
      {"enclosure_trace_tolerance", &o.enclosure_trace_tolerance},
      {"truncation", &o.truncation},
      {"sector_delta", &o.sector_delta},
      {"z_floor", &o.z_floor},
      {"gap_floor", &o.gap_floor},
      {"radius_factor", &o.radius_factor},
      {"repin_threshold", &o.repin_threshold},
      {"normalization_tolerance", &o.normalization_tolerance},
  };
  const std::map<std::string, int*> ints = {{"range_nodes", &o.range_nodes},
                                            {"gauss_order", &o.gauss_order}};
  for (const auto& [k, v] : j.items()) {
    if (auto it = reals.find(k); it != reals.end()) {
      const double x = get_real(v, "tolerances." + k);
      if (!(x > 0.0)) bad("tolerances." + k + " must be > 0");
      *it->second = x;
    } else if (auto jt = ints.find(k); jt != ints.end()) {
      const int x = get_int(v, "tolerances." + k);
      if (x < 1) bad("tolerances." + k + " must be >= 1");
      *jt->second = x;
    } else {
      bad("unknown tolerance '" + k + "'");
    }
  }
  return o;
}

Sector parse_sector(const json& j, const std::string& what) {
  allow_keys(j, what, {"vertex", "half_angle"});
  if (!j.contains("vertex") || !j.contains("half_angle")) bad(what + " needs vertex, half_angle");
  try {
    return Sector(get_real(j["vertex"], what + ".vertex"),
                  get_real(j["half_angle"], what + ".half_angle"));
  } catch (const Error& e) {
    bad(what + ": " + e.what());
  }
}

Contour parse_contour(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    bad("contour needs a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "circle") {
    allow_keys(j, "contour", {"type", "center", "radius", "nodes"});
    Circle c;
    if (j.contains("center")) c.center = get_complex(j["center"], "contour.center");
    if (j.contains("radius")) c.radius = get_real(j["radius"], "contour.radius");
    if (j.contains("nodes")) c.nodes = get_int(j["nodes"], "contour.nodes");
    if (!(c.radius > 0.0) || c.nodes < 4) bad("circle needs radius > 0 and nodes >= 4");
    return c;
  }
  if (type == "polyline") {
    allow_keys(j, "contour", {"type", "vertices", "order", "max_panel"});
    Polyline p;
    if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].size() < 3) {
      bad("polyline needs at least 3 vertices");
    }
    for (const auto& v : j["vertices"]) p.vertices.push_back(get_complex(v, "contour.vertices"));
    if (j.contains("order")) p.order = get_int(j["order"], "contour.order");
    if (j.contains("max_panel")) p.max_panel = get_real(j["max_panel"], "contour.max_panel");
    if (p.order < 1 || p.max_panel < 0.0) bad("polyline needs order >= 1, max_panel >= 0");
    return p;
  }
  if (type == "right_boundary") {
    allow_keys(j, "contour", {"type", "gamma", "sector", "order", "max_panel"});
    RightBoundary rb;
    if (!j.contains("gamma") || !j.contains("sector")) bad("right_boundary needs gamma, sector");
    rb.gamma = get_real(j["gamma"], "contour.gamma");
    rb.sector = parse_sector(j["sector"], "contour.sector");
    if (j.contains("order")) rb.order = get_int(j["order"], "contour.order");
    if (j.contains("max_panel")) rb.max_panel = get_real(j["max_panel"], "contour.max_panel");
    if (rb.order < 1 || rb.max_panel < 0.0) bad("right_boundary needs order >= 1");
    return rb;
  }
  if (type == "sector_boundary") {
    allow_keys(j, "contour",
               {"type", "vertex", "half_angle", "radius", "order", "panels_per_ray"});
    SectorBoundary sb;
    if (j.contains("vertex")) sb.vertex = get_real(j["vertex"], "contour.vertex");
    if (j.contains("half_angle")) sb.half_angle = get_real(j["half_angle"], "contour.half_angle");
    if (j.contains("radius")) sb.radius = get_real(j["radius"], "contour.radius");
    if (j.contains("order")) sb.order = get_int(j["order"], "contour.order");
    if (j.contains("panels_per_ray")) {
      sb.panels_per_ray = get_int(j["panels_per_ray"], "contour.panels_per_ray");
    }
    if (!(sb.half_angle > 0.0 && sb.half_angle < kPi / 2) || !(sb.radius > 0.0) ||
        sb.order < 1 || sb.panels_per_ray < 1) {
      bad("sector_boundary parameters out of range");
    }
    return sb;
  }
  bad("unknown contour type '" + type + "'");
}

// Lattice problem: grid, particle number and fields.
struct Lattice {
  Grid grid;
  int particles = 1;
  FieldConfig x;
};

Grid parse_grid(const json& j, int& particles) {
  allow_keys(j, "grid", {"d", "n", "delta", "particles"});
  if (!j.contains("d") || !j.contains("n") || !j.contains("delta")) {
    bad("grid needs d, n, delta");
  }
  particles = j.contains("particles") ? get_int(j["particles"], "grid.particles") : 1;
  try {
    return Grid(get_int(j["d"], "grid.d"), get_int(j["n"], "grid.n"),
                get_real(j["delta"], "grid.delta"));
  } catch (const Error& e) {
    bad(std::string("grid: ") + e.what());
  }
}

// Site field given as an array, or as {"harmonic": k} for k |x - centre|^2 / 2
// over minimal displacements from site 0 shifted to the middle of the box.
RealVector parse_background(const json& j, const Grid& g, const std::string& what,
                            bool kernel) {
  if (j.is_array()) return get_real_vector(j, g.sites(), what);
  if (!j.is_object()) bad(what + " must be an array or an object");
  if (j.contains("harmonic")) {
    allow_keys(j, what, {"harmonic"});
    const double k = get_real(j["harmonic"], what + ".harmonic");
    RealVector out(g.sites());
    const int mid = g.n / 2;
    for (Index s = 0; s < g.sites(); ++s) {
      const auto c = g.coords(s);
      const double x0 = (c[0] - mid) * g.delta;
      const double x1 = g.d == 2 ? (c[1] - mid) * g.delta : 0.0;
      out[s] = 0.5 * k * (x0 * x0 + x1 * x1);
    }
    return out;
  }
  if (j.contains("soft_coulomb")) {
    if (!kernel) bad(what + ": soft_coulomb is a kernel shape");
    allow_keys(j, what, {"soft_coulomb", "softening"});
    const double q = get_real(j["soft_coulomb"], what + ".soft_coulomb");
    const double a = j.contains("softening") ? get_real(j["softening"], what + ".softening") : 1.0;
    if (!(a > 0.0)) bad(what + ".softening must be > 0");
    const ComplexVector v = radial_kernel(g, [&](double r) { return q / std::sqrt(r * r + a * a); });
    return v.real();
  }
  bad(what + ": expected 'harmonic' or 'soft_coulomb'");
}

FieldConfig parse_fields(const json& j, const Grid& g, bool direction) {
  FieldConfig x = FieldConfig::zeros(g);
  if (j.is_null()) return x;
  if (direction) {
    allow_keys(j, "direction", {"u", "a", "v", "f"});
  } else {
    allow_keys(j, "fields", {"u", "a", "v", "f", "u0", "v0"});
  }
  if (j.contains("u")) x.u = get_complex_vector(j["u"], g.sites(), "fields.u");
  if (j.contains("a")) x.a = get_complex_vector(j["a"], g.links(), "fields.a");
  if (j.contains("v")) x.v = get_complex_vector(j["v"], g.sites(), "fields.v");
  if (j.contains("f")) x.f = get_complex_vector(j["f"], g.sites(), "fields.f");
  if (j.contains("u0")) x.u0 = parse_background(j["u0"], g, "fields.u0", false);
  if (j.contains("v0")) x.v0 = parse_background(j["v0"], g, "fields.v0", true);
  try {
    x.validate(g);
  } catch (const Error& e) {
    bad(std::string("fields: ") + e.what());
  }
  return x;
}

std::vector<double> parse_path_s(const json& path) {
  if (path.contains("s")) {
    if (!path["s"].is_array() || path["s"].empty()) bad("path.s must be a non-empty array");
    std::vector<double> s;
    for (const auto& v : path["s"]) s.push_back(get_real(v, "path.s"));
    return s;
  }
  if (!path.contains("start") || !path.contains("stop") || !path.contains("count")) {
    bad("path needs 's' or start/stop/count");
  }
  const double a = get_real(path["start"], "path.start");
  const double b = get_real(path["stop"], "path.stop");
  const int n = get_int(path["count"], "path.count");
  if (n < 1) bad("path.count must be >= 1");
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) s[static_cast<std::size_t>(k)] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return s;
}

std::vector<Complex> parse_betas(const json& j) {
  if (j.is_null()) bad("beta is required");
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
    return {get_complex(j, "beta")};
  }
  if (!j.is_array() || j.empty()) bad("beta must be a value or a list of values");
  std::vector<Complex> out;
  for (const auto& b : j) out.push_back(get_complex(b, "beta"));
  return out;
}

// ---------------------------------------------------------------------------
// Output.

std::string num(double x) { return fmt::format("{}", x); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
    line(header);
  }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::logic_error("csv row width");
    line(cells);
  }
  const std::string& text() const { return text_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) text_ += ',';
      text_ += cells[k];
    }
    text_ += '\n';
  }
  std::size_t cols_;
  std::string text_;
};

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  json summary = json::object();
};

struct Context {
  json cfg;
  Options opt;
  std::uint64_t seed = 0;
};

bool has(const json& cfg, const char* key) { return cfg.contains(key) && !cfg[key].is_null(); }

std::optional<Lattice> lattice_of(const Context& c) {
  if (!has(c.cfg, "grid")) return std::nullopt;
  Lattice l;
  l.grid = parse_grid(c.cfg["grid"], l.particles);
  l.x = parse_fields(has(c.cfg, "fields") ? c.cfg["fields"] : json(), l.grid, false);
  return l;
}

ManyBodySpace space_of(const Lattice& l) {
  try {
    return ManyBodySpace(l.grid, l.particles);
  } catch (const Error& e) {
    bad(std::string("grid: ") + e.what());
  }
}

// The operator of a run: "matrix" directly, or the lattice family at "fields".
FormMatrix operator_of(const Context& c) {
  if (auto l = lattice_of(c)) return family(space_of(*l), l->x);
  if (!has(c.cfg, "matrix")) bad("either 'matrix' or 'grid' is required");
  const ComplexMatrix m = get_matrix(c.cfg["matrix"], "matrix");
  if (!m.allFinite()) bad("matrix entries must be finite");
  return FormMatrix(m);
}

const json& params_of(const Context& c) {
  static const json empty = json::object();
  return has(c.cfg, "params") ? c.cfg["params"] : empty;
}

json sector_json(const Sector& s) { return {{"vertex", s.vertex}, {"half_angle", s.half_angle}}; }

// ---------------------------------------------------------------------------
// Subcommands.

Outputs cmd_numrange(const Context& c) {
  const json& p = params_of(c);
  allow_keys(p, "params", {"nodes"});
  const int nodes = p.contains("nodes") ? get_int(p["nodes"], "params.nodes") : c.opt.range_nodes;
  if (nodes < 8) bad("params.nodes must be >= 8");
  const FormMatrix t = operator_of(c);
  const NumericalRangeBoundary b = numerical_range(t, nodes);
  Csv csv({"index", "angle", "re_point", "im_point", "support"});
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    csv.row({std::to_string(k), num(b.angles[k]), num(b.points[k].real()),
             num(b.points[k].imag()), num(b.support[k])});
  }
  Outputs out;
  out.files.emplace_back("numrange.csv", csv.text());
  out.summary["dimension"] = t.dim();
  out.summary["nodes"] = nodes;
  out.summary["max_modulus"] = b.max_modulus();
  out.summary["convex"] = b.is_convex(c.opt.convexity_slack);
  try {
    out.summary["sector"] = sector_json(fit_sector(b, c.opt.sector_margin));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSectorial) throw;
    out.summary["sector"] = nullptr;
  }
  return out;
}

Outputs cmd_riesz(const Context& c) {
  allow_keys(params_of(c), "params", {});
  if (!has(c.cfg, "contour")) bad("riesz needs a contour");
  const Contour contour = parse_contour(c.cfg["contour"]);
  const FormMatrix t = operator_of(c);
  const ComplexMatrix& a = t.matrix();
  Outputs out;
  if (const auto* rb = std::get_if<RightBoundary>(&contour)) {
    const LowEnergyPart low = low_energy_hamiltonian(a, *rb, c.opt);
    out.summary["rank"] = rank_of_projection(low.projection);
    out.summary["low_energy_trace"] = complex_json(trace(low.hamiltonian));
    out.summary["idempotency"] = spectral_norm(low.projection * low.projection - low.projection);
  } else {
    const Enclosure enc = enclose(a, contour, c.opt);
    const int rank = rank_of_projection(enc.projection);
    out.summary["rank"] = rank;
    out.summary["trace"] = complex_json(trace(enc.projection));
    out.summary["idempotency"] =
        spectral_norm(enc.projection * enc.projection - enc.projection);
    out.summary["projected_trace"] = complex_json(trace(enc.projected));
  }
  const SpectralData sd = eig_oracle(a, c.opt);
  const QuadratureRule rule = quadrature(contour, c.opt, &sd.eigenvalues);
  Csv csv({"index", "re_lambda", "im_lambda", "inside"});
  int inside_count = 0;
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) {
    const int w = winding_number(rule, sd.eigenvalues[k]);
    inside_count += w != 0;
    csv.row({std::to_string(k), num(sd.eigenvalues[k].real()), num(sd.eigenvalues[k].imag()),
             std::to_string(w)});
  }
  out.files.emplace_back("riesz.csv", csv.text());
  out.summary["dimension"] = t.dim();
  out.summary["oracle_inside"] = inside_count;
  out.summary["quadrature_nodes"] = rule.size();
  return out;
}

Outputs cmd_track(const Context& c) {
  allow_keys(params_of(c), "params", {});
  if (!has(c.cfg, "path")) bad("track needs a path");
  const json& path = c.cfg["path"];
  allow_keys(path, "path", {"s", "start", "stop", "count", "direction"});
  const std::vector<double> s = parse_path_s(path);
  if (!path.contains("direction")) bad("path.direction is required");
  FormFamily fam;
  if (auto l = lattice_of(c)) {
    const FieldConfig w = parse_fields(path["direction"], l->grid, true);
    auto space = std::make_shared<ManyBodySpace>(space_of(*l));
    const FieldConfig x = l->x;
    fam = [space, x, w](double t) { return family(*space, x.displaced(w, Complex(t))); };
  } else {
    const FormMatrix a = operator_of(c);
    const ComplexMatrix b = get_matrix(path["direction"], "path.direction");
    if (b.rows() != a.dim()) bad("path.direction has the wrong dimension");
    fam = [a, b](double t) { return FormMatrix(a.matrix() + t * b); };
  }
  Circle c0;
  if (has(c.cfg, "contour")) {
    const Contour parsed = parse_contour(c.cfg["contour"]);
    const auto* circ = std::get_if<Circle>(&parsed);
    if (!circ) bad("track needs a circle contour");
    c0 = *circ;
  } else {
    c0 = isolating_circle(fam(s.front()).matrix(), c.opt);
  }
  const TrackResult tr = track_eigenvalue(fam, s, c0, c.opt);
  Csv csv({"parameter_index", "s", "re_E", "im_E", "gap", "repinned"});
  double min_gap = std::numeric_limits<double>::infinity();
  int repins = 0;
  for (const TrackPoint& p : tr.points) {
    csv.row({std::to_string(p.index), num(p.s), num(p.e.real()), num(p.e.imag()), num(p.gap),
             p.repinned ? "1" : "0"});
    min_gap = std::min(min_gap, p.gap);
    repins += p.repinned;
  }
  Outputs out;
  out.files.emplace_back("track.csv", csv.text());
  out.summary["points"] = tr.points.size();
  out.summary["min_gap"] = real_or_null(min_gap);
  out.summary["repins"] = repins;
  out.summary["discrepancy"] = complex_json(tr.discrepancy);
  return out;
}

Outputs cmd_density(const Context& c) {
  allow_keys(params_of(c), "params", {});
  const auto l = lattice_of(c);
  if (!l) bad("density needs a grid");
  const ManyBodySpace space = space_of(*l);
  std::optional<Contour> contour;
  if (has(c.cfg, "contour")) contour = parse_contour(c.cfg["contour"]);
  const ChargeCurrent cc = eigenstate_density(space, l->x, contour, c.opt);
  const Grid& g = l->grid;
  Csv rho({"site", "x0", "x1", "re_rho", "im_rho"});
  for (Index s = 0; s < g.sites(); ++s) {
    const auto xy = g.coords(s);
    rho.row({std::to_string(s), std::to_string(xy[0]), std::to_string(xy[1]),
             num(cc.rho[s].real()), num(cc.rho[s].imag())});
  }
  Csv cur({"link", "site", "mu", "re_J", "im_J"});
  for (Index k = 0; k < g.links(); ++k) {
    cur.row({std::to_string(k), std::to_string(k / g.d), std::to_string(k % g.d),
             num(cc.j[k].real()), num(cc.j[k].imag())});
  }
  Outputs out;
  out.files.emplace_back("density.csv", rho.text());
  out.files.emplace_back("current.csv", cur.text());
  const Complex total = cc.rho.sum() * g.cell_volume();
  out.summary["total_charge"] = complex_json(total);
  out.summary["charge_defect"] = std::abs(total - static_cast<double>(l->particles));
  out.summary["max_abs_current"] = cc.j.size() ? cc.j.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

Outputs cmd_thermal(const Context& c) {
  const json& p = params_of(c);
  allow_keys(p, "params", {"sector"});
  const std::vector<Complex> betas = parse_betas(has(c.cfg, "beta") ? c.cfg["beta"] : json());
  const FormMatrix t = operator_of(c);
  const Sector sector = p.contains("sector")
                            ? parse_sector(p["sector"], "params.sector")
                            : fit_sector(numerical_range(t, c.opt.range_nodes),
                                         c.opt.sector_margin);
  std::vector<ThermalState> states;
  std::vector<Complex> zs;
  for (const Complex& b : betas) {
    states.push_back(thermal_state(b, t, sector, c.opt));
    zs.push_back(states.back().z);
  }
  const std::vector<Complex> fs = free_energy_path(betas, zs);
  Csv csv({"index", "re_beta", "im_beta", "re_Z", "im_Z", "re_F", "im_F", "re_energy",
           "im_energy", "re_trace_rho", "im_trace_rho"});
  double max_trace_defect = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const ThermalState& st = states[k];
    const Complex energy = thermal_expectation(st, t.matrix());
    const Complex tr = trace(st.rho);
    max_trace_defect = std::max(max_trace_defect, std::abs(tr - 1.0));
    csv.row({std::to_string(k), num(st.beta.real()), num(st.beta.imag()), num(st.z.real()),
             num(st.z.imag()), num(fs[k].real()), num(fs[k].imag()), num(energy.real()),
             num(energy.imag()), num(tr.real()), num(tr.imag())});
  }
  Outputs out;
  out.files.emplace_back("thermal.csv", csv.text());
  out.summary["dimension"] = t.dim();
  out.summary["sector"] = sector_json(sector);
  out.summary["max_trace_defect"] = max_trace_defect;
  return out;
}

Outputs cmd_holocheck(const Context& c) {
  const json& p = params_of(c);
  allow_keys(p, "params", {"target", "slices", "radius", "nodes", "k_max", "zeta", "beta"});
  if (!p.contains("target") || !p["target"].is_string()) bad("params.target is required");
  const std::string target = p["target"].get<std::string>();
  const int slices = p.contains("slices") ? get_int(p["slices"], "params.slices") : 20;
  const int m = p.contains("nodes") ? get_int(p["nodes"], "params.nodes") : 64;
  const int k_max = p.contains("k_max") ? get_int(p["k_max"], "params.k_max") : m / 4;
  if (slices < 1 || m < 8 || k_max < 0 || m < 4 * k_max) {
    bad("holocheck needs slices >= 1, nodes >= 8 and nodes >= 4 k_max");
  }
  std::mt19937_64 rng(c.seed);
  std::vector<MatrixSlice> fs;
  double radius = 1e-2;
  Index n = 0;
  if (target == "rmap") {
    const FormMatrix t = operator_of(c);
    n = t.dim();
    const Complex z0 = p.contains("zeta") ? get_complex(p["zeta"], "params.zeta") : Complex(0.0);
    ComplexMatrix shifted = t.matrix();
    shifted.diagonal().array() -= z0;
    radius = 0.1 * min_singular_value(shifted);
    for (int k = 0; k < slices; ++k) {
      ComplexMatrix w = random_matrix(n, rng);
      w /= spectral_norm(w);
      fs.emplace_back([t, w, z0, opt = c.opt](Complex z) {
        return rmap(z0, FormMatrix(t.matrix() + z * w), opt);
      });
    }
  } else if (target == "emap") {
    const FormMatrix t = operator_of(c);
    n = t.dim();
    const Complex b0 = p.contains("beta") ? get_complex(p["beta"], "params.beta") : Complex(1.0);
    const Sector sector = fit_sector(numerical_range(t, c.opt.range_nodes), c.opt.sector_margin);
    const double room = kPi / 2 - sector.half_angle - std::abs(std::arg(b0));
    if (!(room > 0.0)) bad("params.beta is outside the admissible wedge");
    radius = 0.1 * std::abs(b0) * std::sin(room);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    for (int k = 0; k < slices; ++k) {
      const Complex dir = std::polar(1.0, ang(rng));
      fs.emplace_back([t, b0, dir, sector, opt = c.opt](Complex z) {
        return emap(b0 + z * dir, t, sector, opt);
      });
    }
  } else if (target == "family") {
    const auto l = lattice_of(c);
    if (!l) bad("holocheck target 'family' needs a grid");
    auto space = std::make_shared<ManyBodySpace>(space_of(*l));
    n = space->dim();
    radius = 1.0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < slices; ++k) {
      FieldConfig w = FieldConfig::zeros(l->grid);
      for (Index i = 0; i < w.u.size(); ++i) w.u[i] = {gauss(rng), gauss(rng)};
      for (Index i = 0; i < w.a.size(); ++i) w.a[i] = {gauss(rng), gauss(rng)};
      w.u /= std::sqrt(static_cast<double>(w.u.size()));
      w.a /= std::sqrt(static_cast<double>(w.a.size()));
      const FieldConfig x = l->x;
      fs.emplace_back([space, x, w](Complex z) {
        return family(*space, x.displaced(w, z)).matrix();
      });
    }
  } else {
    bad("params.target must be rmap, emap or family");
  }
  if (p.contains("radius")) radius = get_real(p["radius"], "params.radius");
  if (!(radius > 0.0)) bad("slice radius must be > 0");
  const std::vector<Probe> probes = make_probes(n, 5, c.seed + 1);

  Csv csv({"slice", "residual_abs", "residual_rel", "radius_estimate", "c1_vs_fd"});
  json table = json::array();
  double worst = 0.0;
  for (int k = 0; k < slices; ++k) {
    const auto z = circle_points(radius, m);
    std::vector<std::vector<Complex>> vals(probes.size(), std::vector<Complex>(z.size()));
    for (std::size_t j = 0; j < z.size(); ++j) {
      const ComplexMatrix fm = fs[static_cast<std::size_t>(k)](z[j]);
      for (std::size_t q = 0; q < probes.size(); ++q) vals[q][j] = probes[q](fm);
    }
    Residual res;
    for (const auto& v : vals) {
      const Residual r = cauchy_residual(v, radius);
      if (r.relative >= res.relative) res = r;
    }
    const std::vector<Complex> probe0 = taylor_coefficients(vals.front(), radius, k_max);
    json row = json::array();
    for (const Complex& ck : probe0) row.push_back(complex_json(ck));
    double rad = std::numeric_limits<double>::quiet_NaN();
    try {
      rad = radius_estimate(probe0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotEnoughTerms) throw;
    }
    const auto& f = fs[static_cast<std::size_t>(k)];
    const Probe& pr = probes.front();
    const ScalarSlice g = [&](Complex zz) { return pr(f(zz)); };
    const Complex c1 = probe0.size() > 1 ? probe0[1] : Complex(0.0);
    const double hstep = 1e-5 * radius;
    const Complex fd = (g(Complex(hstep)) - g(Complex(-hstep))) / (2.0 * hstep);
    const double sc = std::max(std::abs(c1), std::abs(fd));
    const double dchk = sc > 0.0 ? std::abs(c1 - fd) / sc : 0.0;
    worst = std::max(worst, res.relative);
    csv.row({std::to_string(k), num(res.absolute), num(res.relative), num(rad), num(dchk)});
    table.push_back({{"slice", k},
                     {"residual", res.relative},
                     {"radius_estimate", real_or_null(rad)},
                     {"coefficients", row}});
  }
  Outputs out;
  out.files.emplace_back("holocheck.csv", csv.text());
  out.summary["target"] = target;
  out.summary["radius"] = radius;
  out.summary["nodes"] = m;
  out.summary["max_residual"] = worst;
  out.summary["slices"] = table;
  return out;
}

Outputs cmd_neumann(const Context& c) {
  const json& p = params_of(c);
  allow_keys(p, "params", {"h", "n_terms"});
  if (!p.contains("h")) bad("neumann needs params.h");
  const FormMatrix h(get_matrix(p["h"], "params.h"));
  const FormMatrix t = operator_of(c);
  if (t.dim() != h.dim()) bad("params.h and matrix differ in dimension");
  const int n_terms = p.contains("n_terms") ? get_int(p["n_terms"], "params.n_terms") : 40;
  if (n_terms < 1) bad("params.n_terms must be >= 1");
  const Rigging rg = make_h_plus(h);
  const NeumannResult nr = neumann_resolvent(h, t, rg, n_terms, c.opt);
  const std::vector<double> errs = neumann_error_curve(h, t, n_terms, c.opt);
  Csv csv({"term", "error", "bound"});
  for (std::size_t k = 0; k < errs.size(); ++k) {
    const double bound = nr.contractive ? nr.constant * std::pow(nr.ratio, double(k + 1)) /
                                              (1.0 - nr.ratio)
                                        : std::numeric_limits<double>::infinity();
    csv.row({std::to_string(k), num(errs[k]), num(bound)});
  }
  Outputs out;
  out.files.emplace_back("neumann.csv", csv.text());
  out.summary["ratio"] = nr.ratio;
  out.summary["constant"] = nr.constant;
  out.summary["contractive"] = nr.contractive;
  out.summary["final_error"] = errs.empty() ? 0.0 : errs.back();
  if (errs.size() >= 8) {
    try {
      out.summary["fitted_ratio"] = geometric_ratio_fit(errs, 2, errs.size() / 2);
    } catch (const Error&) {
      out.summary["fitted_ratio"] = nullptr;
    }
  }
  return out;
}

const std::map<std::string, std::function<Outputs(const Context&)>>& commands() {
  static const std::map<std::string, std::function<Outputs(const Context&)>> table = {
      {"numrange", cmd_numrange}, {"riesz", cmd_riesz},         {"track", cmd_track},
      {"density", cmd_density},   {"thermal", cmd_thermal},     {"holocheck", cmd_holocheck},
      {"neumann", cmd_neumann},
  };
  return table;
}

int report(std::ostream& err, int code, std::string_view kind, const std::string& message) {
  json e = {{"error", kind}, {"message", message}, {"exit", code}};
  err << e.dump() << '\n';
  return code;
}

bool is_config_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidField:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ModulationTooLarge:
    case ErrorCode::InvalidP:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run_config(const nlohmann::json& config, const Overrides& ov, std::ostream& err) {
  Context ctx;
  std::filesystem::path dir;
  std::function<Outputs(const Context&)> cmd;
  std::string name;
  try {
    allow_keys(config, "config",
               {"subcommand", "grid", "fields", "contour", "beta", "path", "tolerances", "seed",
                "output_dir", "matrix", "params"});
    if (!config.contains("subcommand") || !config["subcommand"].is_string()) {
      bad("'subcommand' is required");
    }
    name = config["subcommand"].get<std::string>();
    const auto it = commands().find(name);
    if (it == commands().end()) bad("unknown subcommand '" + name + "'");
    cmd = it->second;
    ctx.cfg = config;
    ctx.opt = parse_tolerances(has(config, "tolerances") ? config["tolerances"] : json());
    if (has(config, "seed")) {
      if (!config["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
      ctx.seed = config["seed"].get<std::uint64_t>();
    }
    if (ov.seed) ctx.seed = *ov.seed;
    if (ov.threads) ctx.opt.threads = std::max(1u, *ov.threads);
    if (ov.output_dir) {
      dir = *ov.output_dir;
    } else if (has(config, "output_dir")) {
      if (!config["output_dir"].is_string()) bad("output_dir must be a string");
      dir = config["output_dir"].get<std::string>();
    } else {
      dir = "out";
    }
  } catch (const ConfigError& e) {
    return report(err, kConfigError, "ConfigError", e.what());
  }

  Outputs out;
  try {
    out = cmd(ctx);
  } catch (const ConfigError& e) {
    return report(err, kConfigError, "ConfigError", e.what());
  } catch (const Error& e) {
    return report(err, is_config_code(e.code()) ? kConfigError : kNumericalError,
                  to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report(err, kNumericalError, "Failure", e.what());
  }

  json summary = {{"subcommand", name}, {"seed", ctx.seed}};
  json files = json::array();
  for (const auto& f : out.files) files.push_back(f.first);
  summary["outputs"] = files;
  summary["results"] = out.summary;
  try {
    std::filesystem::create_directories(dir);
    for (const auto& [file, text] : out.files) {
      std::ofstream os(dir / file, std::ios::binary);
      os << text;
      if (!os) throw std::runtime_error("cannot write " + (dir / file).string());
    }
    std::ofstream os(dir / "summary.json", std::ios::binary);
    os << summary.dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write summary.json");
  } catch (const std::exception& e) {
    return report(err, kIoError, "IoError", e.what());
  }
  return kOk;
}

int run(const std::filesystem::path& config_path, const Overrides& ov, std::ostream& err) {
  json config;
  try {
    std::ifstream is(config_path);
    if (!is) {
      return report(err, kIoError, "IoError", "cannot open " + config_path.string());
    }
    config = json::parse(is);
  } catch (const json::exception& e) {
    return report(err, kConfigError, "ConfigError", e.what());
  }
  return run_config(config, ov, err);
}

}  // namespace sectorial::cli
