// Command-line front end: scenario configs in, JSON/CSV reports out.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "disloc/disloc.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace disloc;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  unsigned seed = 12345;
  double tol_scale = 1.0;
  std::string format = "json";  // json | csv | both
};

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

struct Config {
  json data;
  std::string hash;
};

Config load_config(const Options& opt) {
  if (opt.config_path.empty()) throw ConfigParseError("--config is required");
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigParseError("cannot open config file: " + opt.config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  Config cfg;
  cfg.hash = fnv1a_hex(text);
  try {
    cfg.data = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return cfg;
}

Vec3 to_vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigParseError("field '" + field + "' must be a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Chart chart_from_config(const json& cfg) {
  if (!cfg.contains("chart")) return Chart(Vec3(-0.5, -0.5, -0.5), Vec3(1.5, 1.5, 1.5));
  const json& c = cfg["chart"];
  Vec3 lo = c.contains("lower") ? to_vec3(c["lower"], "chart.lower") : Vec3(-0.5, -0.5, -0.5);
  Vec3 hi = c.contains("upper") ? to_vec3(c["upper"], "chart.upper") : Vec3(1.5, 1.5, 1.5);
  std::array<int, 3> shape{33, 33, 33};
  if (c.contains("grid")) {
    if (!c["grid"].is_array() || c["grid"].size() != 3)
      throw ConfigParseError("chart.grid must be a 3-element array");
    for (int i = 0; i < 3; ++i) shape[i] = c["grid"][i].get<int>();
  }
  try {
    return Chart(lo, hi, shape);
  } catch (const InvalidField& e) {
    throw ConfigParseError(std::string("bad chart: ") + e.what());
  }
}

CoframeSpec coframe_from_config(const json& cfg) {
  if (!cfg.contains("frame"))
    throw ConfigParseError("missing 'frame' section (builtin name or coframe rows)");
  const json& f = cfg["frame"];
  if (f.contains("builtin")) {
    std::string name = f["builtin"].get<std::string>();
    if (name == "holonomic") return holonomic_coframe();
    if (name == "screw") return screw_coframe(f.value("b0", 0.1));
    if (name == "edge") return edge_coframe(f.value("beta", 0.1));
    if (name == "umbilical") return umbilical_coframe(f.value("h0", 0.5));
    throw ConfigParseError("unknown builtin frame '" + name + "'");
  }
  if (f.contains("coframe")) {
    const json& rows = f["coframe"];
    if (!rows.is_array() || rows.size() != 3)
      throw ConfigParseError("frame.coframe must be a 3x3 array of expressions");
    std::array<std::array<ScalarExpr, 3>, 3> exprs;
    for (int a = 0; a < 3; ++a) {
      if (!rows[a].is_array() || rows[a].size() != 3)
        throw ConfigParseError("frame.coframe rows must have 3 entries");
      for (int A = 0; A < 3; ++A)
        exprs[a][A] = parse_expression(rows[a][A].get<std::string>());
    }
    CoframeSpec spec;
    spec.name = "custom";
    spec.components = [exprs](const Vec3& p) {
      Mat3 c;
      for (int a = 0; a < 3; ++a)
        for (int A = 0; A < 3; ++A) c(a, A) = exprs[a][A](p, 0.0);
      return c;
    };
    return spec;
  }
  throw ConfigParseError("frame section needs 'builtin' or 'coframe'");
}

MovingFrame frame_from_config(const json& cfg) {
  Chart ch = chart_from_config(cfg);
  CoframeSpec spec = coframe_from_config(cfg);
  double eps = cfg.contains("frame") ? cfg["frame"].value("epsilon", 1.0) : 1.0;
  bool gridded = cfg.contains("frame") ? cfg["frame"].value("gridded", false) : false;
  return MovingFrame(ch, spec, eps, gridded);
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json mat_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigParseError("cannot write " + path.string());
  out << text;
}

json base_report(const std::string& command, const Config& cfg, const Options& opt) {
  json rep;
  rep["command"] = command;
  rep["scenario"] = cfg.data.value("scenario", std::string("unnamed"));
  rep["provenance"] = {{"config_hash", cfg.hash},
                       {"seed", opt.seed},
                       {"tol_scale", opt.tol_scale},
                       {"version", kVersion}};
  return rep;
}

int emit(const json& report, const std::string& csv, const std::string& csv_name,
         const std::string& command, const Options& opt) {
  bool want_json = opt.format == "json" || opt.format == "both";
  bool want_csv = opt.format == "csv" || opt.format == "both";
  fs::path out(opt.out_dir);
  if (want_json) {
    std::string text = report.dump(2) + "\n";
    write_text(out / (command + "_report.json"), text);
    std::cout << text;
  }
  if (want_csv && !csv.empty()) write_text(out / csv_name, csv);
  return report.value("pass", true) ? 0 : 1;
}

// ---- subcommands ------------------------------------------------------------

int cmd_analyze(const Config& cfg, const Options& opt) {
  MovingFrame frame = frame_from_config(cfg.data);
  DislocationDensity dd(frame);
  double holo_tol = 1e-10 * opt.tol_scale;
  HolonomyVerdict hv = is_holonomic(frame, holo_tol);

  double worst_decomp = 0.0, worst_trace = 0.0;
  std::ostringstream csv;
  csv << "X1[cm],X2[cm],X3[cm]";
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) csv << ",alpha_" << a + 1 << b + 1 << "[cm^-1]";
  csv << ",t_1[cm^-1],t_2[cm^-1],t_3[cm^-1]\n";
  for (const Vec3& p : frame.chart().test_lattice(opt.seed)) {
    Mat3 a = dd.alpha_at(p);
    Vec3 t = dd.t_at(p);
    worst_decomp = std::max(worst_decomp, dd.decomposition_residual(p));
    worst_trace = std::max(worst_trace, dd.trace_identity_residual(p));
    csv << p[0] << "," << p[1] << "," << p[2];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) csv << "," << a(i, j);
    csv << "," << t[0] << "," << t[1] << "," << t[2] << "\n";
  }
  Vec3 center = 0.5 * (frame.chart().lower + frame.chart().upper);

  json rep = base_report("analyze", cfg, opt);
  rep["results"] = {{"is_holonomic", hv.holonomic},
                    {"max_torsion", hv.max_torsion},
                    {"alpha_center", mat_json(dd.alpha_at(center))},
                    {"gamma_center", mat_json(dd.gamma_at(center))},
                    {"t_center", vec_json(dd.t_at(center))}};
  double decomp_tol = 1e-10 * opt.tol_scale;
  double trace_tol = (frame.coframe_field().gridded() ? 1e-3 : 1e-8) * opt.tol_scale;
  rep["residuals"] = {{"decomposition", worst_decomp}, {"trace_identity", worst_trace}};
  rep["pass"] = worst_decomp < decomp_tol && worst_trace < trace_tol;
  return emit(rep, csv.str(), "analyze_density.csv", "analyze", opt);
}

int cmd_burgers(const Config& cfg, const Options& opt) {
  MovingFrame frame = frame_from_config(cfg.data);
  DislocationDensity dd(frame);

  Polyline circuit = [&] {
    if (cfg.data.contains("circuit")) {
      const json& c = cfg.data["circuit"];
      std::vector<Vec3> verts;
      for (const auto& v : c["vertices"]) verts.push_back(to_vec3(v, "circuit vertex"));
      return Polyline(verts, c.value("closed", true));
    }
    return Polyline({Vec3(0, 0, 0.5), Vec3(1, 0, 0.5), Vec3(1, 1, 0.5), Vec3(0, 1, 0.5)},
                    true);
  }();
  ParametricPatch patch = [&] {
    if (cfg.data.contains("patch")) {
      const json& c = cfg.data["patch"];
      return ParametricPatch::rectangle(
          to_vec3(c["origin"], "patch.origin"), to_vec3(c["edge_u"], "patch.edge_u"),
          to_vec3(c["edge_v"], "patch.edge_v"), c.value("orientation", 1.0));
    }
    return ParametricPatch::rectangle(Vec3(0, 0, 0.5), Vec3(1, 0, 0), Vec3(0, 1, 0));
  }();

  BurgersResult bc = burgers_circuit(frame, circuit);
  BurgersResult bs = burgers_surface(frame, dd, patch);
  double stokes = (bc.components - bs.components).norm() /
                  std::max(bc.components.norm(), 1e-30);
  double tol = (frame.coframe_field().gridded() ? 1e-3 : 1e-6) * opt.tol_scale;

  json rep = base_report("burgers", cfg, opt);
  rep["results"] = {{"b_circuit[cm]", vec_json(bc.components)},
                    {"b_surface[cm]", vec_json(bs.components)},
                    {"epsilon", bc.epsilon}};
  rep["residuals"] = {{"stokes", stokes}};
  rep["pass"] = stokes < tol;

  std::ostringstream csv;
  csv << "component,b_circuit[cm],b_surface[cm]\n";
  for (int i = 0; i < 3; ++i)
    csv << i + 1 << "," << bc.components[i] << "," << bs.components[i] << "\n";
  return emit(rep, csv.str(), "burgers_vectors.csv", "burgers", opt);
}

int cmd_congruence(const Config& cfg, const Options& opt) {
  MovingFrame frame = frame_from_config(cfg.data);
  DislocationDensity dd(frame);
  Vec3 p = cfg.data.contains("point") ? to_vec3(cfg.data["point"], "point")
                                      : Vec3(0.5 * (frame.chart().lower + frame.chart().upper));
  Vec3 l = cfg.data.contains("line_tangent")
               ? to_vec3(cfg.data["line_tangent"], "line_tangent")
               : Vec3(0, 0, 1);
  l.normalize();
  double rho_val = cfg.data.value("rho", 1.0);
  ScalarDensitySpec rho{[rho_val](const Vec3&) { return rho_val; }};

  Classification cls = local_burgers_classify(dd, l, rho, p);
  Mat3 gamma = dd.gamma_at(p);
  Vec3 t = dd.t_at(p);
  PrincipalDecomposition pd = principal_congruences(gamma, t);

  json rep = base_report("congruence", cfg, opt);
  json results;
  results["line_type"] = to_string(cls.local.line_type);
  results["b[cm]"] = vec_json(cls.local.b);
  results["b_g[cm]"] = cls.local.b_g;
  results["angle_bl[rad]"] = cls.local.angle_bl;
  if (cls.triple) {
    results["volterra"] = cls.triple->volterra;
    results["m"] = vec_json(cls.triple->m);
    results["n"] = vec_json(cls.triple->n);
  }
  results["principal"] = {{"degenerate", pd.degenerate},
                          {"gamma_scalar[cm^-1]", pd.gamma_scalar},
                          {"H[cm^-1]", pd.H},
                          {"mu[cm^-1]", pd.mu},
                          {"rho_bg[cm^-1]", pd.rho_bg},
                          {"phi[rad]", pd.phi}};
  rep["results"] = std::move(results);
  rep["residuals"] = {{"t_reconstruction", pd.t_residual}};
  rep["pass"] = pd.t_residual < 1e-8 * opt.tol_scale;
  return emit(rep, "", "", "congruence", opt);
}

int cmd_evolve(const Config& cfg, const Options& opt) {
  if (!cfg.data.contains("evolve")) throw ConfigParseError("missing 'evolve' section");
  const json& e = cfg.data["evolve"];
  if (!e.contains("omega"))
    throw ConfigParseError("evolve.omega closure expression is required");
  int n = e.value("s_nodes", 64);
  double length = e.value("s_length", 2.0 * M_PI);
  int steps = e.value("steps", 20);
  double dt = e.value("dt", 0.01);
  bool periodic = e.value("periodic", true);
  if (n < 5 || steps < 1 || dt <= 0.0)
    throw ConfigParseError("evolve needs s_nodes >= 5, steps >= 1, dt > 0");

  // arclength profiles are expressions in X1 = s (and t for the closure)
  ScalarExpr kappa0 = parse_expression(e.value("kappa0", std::string("1")));
  ScalarExpr theta0 = parse_expression(e.value("theta0", std::string("0")));
  ScalarExpr zeta0 = parse_expression(e.value("zeta0", std::string("0")));
  ScalarExpr omega = parse_expression(e["omega"].get<std::string>());

  std::vector<double> s(n), k0(n), th0(n), z0(n);
  for (int i = 0; i < n; ++i) {
    s[i] = length * i / n;
    Vec3 q(s[i], 0, 0);
    k0[i] = kappa0(q, 0.0);
    th0[i] = theta0(q, 0.0);
    z0[i] = zeta0(q, 0.0);
  }
  auto closure = [&omega](double sv, double tv) {
    return omega(Vec3(sv, 0, 0), tv);
  };
  KinematicProfile prof = evolve_kinematics(s, k0, th0, z0, closure, steps, dt, periodic);
  ConsistencyResidual res = consistency_residual(prof, steps / 2);

  std::ostringstream csv;
  csv << "t[s],s[cm],kappa[cm^-1],theta[rad],zeta[s^-1],omega[s^-1]\n";
  for (std::size_t j = 0; j < prof.t.size(); ++j)
    for (int i = 0; i < n; ++i)
      csv << prof.t[j] << "," << s[i] << "," << prof.kappa[j][i] << ","
          << prof.theta[j][i] << "," << prof.zeta[j][i] << "," << prof.omega[j][i]
          << "\n";

  double tol = e.value("residual_tol", 1e-3) * opt.tol_scale;
  json rep = base_report("evolve", cfg, opt);
  rep["results"] = {{"s_nodes", n}, {"steps", steps}, {"dt[s]", dt},
                    {"final_time[s]", prof.t.back()}};
  rep["residuals"] = {{"curvature_rate", res.r_kappa},
                      {"angle_rate", res.r_theta},
                      {"torsion_rate", res.r_zeta}};
  rep["pass"] = res.max() < tol;
  return emit(rep, csv.str(), "evolve_profile.csv", "evolve", opt);
}

int cmd_flow(const Config& cfg, const Options& opt) {
  if (!cfg.data.contains("flow")) throw ConfigParseError("missing 'flow' section");
  const json& f = cfg.data["flow"];
  if (!f.contains("velocity") || !f["velocity"].is_array() || f["velocity"].size() != 3)
    throw ConfigParseError("flow.velocity must be 3 expressions");
  std::array<ScalarExpr, 3> vex;
  for (int i = 0; i < 3; ++i) vex[i] = parse_expression(f["velocity"][i].get<std::string>());
  auto v = [vex](const Vec3& p, double t) {
    return Vec3(vex[0](p, t), vex[1](p, t), vex[2](p, t));
  };
  Chart ch = chart_from_config(cfg.data);
  MetricField g = cfg.data.contains("frame")
                      ? MetricField::from_frame(frame_from_config(cfg.data))
                      : MetricField::direct(ch, [](const Vec3&) {
                          return Mat3(Mat3::Identity());
                        });
  std::vector<Vec3> seeds;
  if (f.contains("seeds")) {
    for (const auto& s : f["seeds"]) seeds.push_back(to_vec3(s, "flow seed"));
  } else {
    seeds.push_back(Vec3(0.5 * (ch.lower + ch.upper)));
  }
  double T = f.value("T", 1.0);
  double dt = f.value("dt", 0.01);
  FlowState st = advance_flow(v, g, seeds, T, dt);

  double tol = f.value("tol", 1e-8) * opt.tol_scale;
  FlowConsistency fc = flow_consistency(
      ch, [&](const Vec3& p, double) { return g.at(p); }, v,
      [](const Vec3&, double) { return Mat3(Mat3::Zero()); }, 0.5 * T, 0.0, T, tol);

  std::ostringstream csv;
  csv << "seed_index,t[s],X1[cm],X2[cm],X3[cm]\n";
  for (std::size_t si = 0; si < st.records.size(); ++si)
    for (std::size_t j = 0; j < st.records[si].path.size(); ++j) {
      const Vec3& p = st.records[si].path[j];
      csv << si << "," << j * dt << "," << p[0] << "," << p[1] << "," << p[2] << "\n";
    }

  json rep = base_report("flow", cfg, opt);
  json recs = json::array();
  double worst_det = 0.0;
  for (const auto& rec : st.records) {
    worst_det = std::max(worst_det, rec.det_residual);
    recs.push_back({{"seed", vec_json(rec.seed)},
                    {"position", vec_json(rec.position)},
                    {"J", rec.J},
                    {"E_p", mat_json(rec.E_p)}});
  }
  rep["results"] = {{"trajectories", recs},
                    {"consistent", fc.consistent},
                    {"conservative", fc.conservative}};
  rep["residuals"] = {{"rate_balance", fc.r_balance},
                      {"rates_equal", fc.r_rates_equal},
                      {"metric_rate", fc.r_metric_rate},
                      {"volume_rate", fc.r_volume},
                      {"divergence", fc.max_divergence},
                      {"det_identity", worst_det}};
  rep["pass"] = worst_det < 1e-6 * opt.tol_scale;
  return emit(rep, csv.str(), "flow_trajectories.csv", "flow", opt);
}

int cmd_orowan(const Config& cfg, const Options& opt) {
  const json& o = cfg.data.contains("orowan") ? cfg.data["orowan"] : json::object();
  double h0 = o.value("h0", 0.5);
  double v0 = o.value("v0", 1.0);
  double T0 = o.value("T0", 1.0);
  double n_exp = o.value("n_exp", 1.0);
  double T_resolved = o.value("T_resolved", T0);
  double tau0 = o.value("tau0", T_resolved);
  double D_amp = o.value("D", 0.5);
  double delta_g = o.value("delta_g", 0.0);

  Chart ch = chart_from_config(cfg.data);
  UmbilicalSpace sp = build_umbilical_space(ch, [h0](double x3) { return h0 * x3; });
  double H = sp.H(0.5 * (ch.lower[2] + ch.upper[2]));

  StressInput stress{T0, n_exp, v0, H};
  PowerLawResult pl = dislocation_speed_power_law(T_resolved, stress);

  VolterraTriple tri;
  tri.l = Vec3(1, 0, 0);
  tri.m = Vec3(0, 1, 0);
  tri.n = Vec3(0, 0, 1);
  double S_g = std::sqrt(1.0 + delta_g * delta_g);
  Vec3 shear_dir = Vec3((delta_g * tri.l + tri.m) / S_g);
  Mat3 dg = Mat3(D_amp * S_g *
                 (shear_dir * tri.n.transpose() + tri.n * shear_dir.transpose()));
  SlipSystem ss = slip_system(dg, tri);

  double g_aligned = orowan_rate(H, pl.v_g, 0.0, OrowanVariant::Aligned);
  double g_directional = orowan_rate(H, pl.v_g, ss.psi_angle, OrowanVariant::Directional);

  Mat3 T_stress = Mat3(tau0 * (tri.m * tri.n.transpose() + tri.n * tri.m.transpose()));
  DissipationResult diss = dissipation_check(T_stress, dg);

  // leaf-tangent rigid rotation must be an isometry of the leaf metric
  Chart leaf_chart(Vec3(-1, -1, ch.lower[2]), Vec3(1, 1, ch.upper[2]));
  double killing = killing_residual(
      leaf_chart, sp.leaf, [](const Vec3& p) { return Vec3(-p[1], p[0], 0.0); });

  // shear relation: v_alpha solving v'/2 + H v = gamma_dot S_g s_alpha
  double c_rhs = ss.gamma_dot * ss.S_g;
  auto v_alpha = [&](double x3) { return (c_rhs / H) * (1.0 - std::exp(-2.0 * H * x3)); };
  double x3c = 0.5 * (ch.lower[2] + ch.upper[2]);
  double dv = fd_derivative_1d(v_alpha, x3c, ch.lower[2], ch.upper[2],
                               1e-3 * ch.extent(2));
  double shear_residual = std::abs(0.5 * dv + H * v_alpha(x3c) - c_rhs);

  // stress alignment: m constant along X3 requires X3-independent resolved T
  double stress_alignment = 0.0;  // configured T_resolved is a constant here

  json rep = base_report("orowan", cfg, opt);
  rep["results"] = {{"H[cm^-1]", H},
                    {"rho_bg[cm^-1]", H},
                    {"leaf_class", to_string(sp.leaf_class)},
                    {"v_g[cm s^-1]", pl.v_g},
                    {"gamma_dot_directional[s^-1]", g_directional},
                    {"gamma_dot_aligned[s^-1]", g_aligned},
                    {"gamma_dot_power_law[s^-1]", pl.gamma_dot},
                    {"slip_gamma_dot[s^-1]", ss.gamma_dot},
                    {"psi[rad]", ss.psi_angle},
                    {"dissipation[kg cm^-2 s^-1]", diss.value},
                    {"dissipation_nonnegative", diss.nonnegative}};
  rep["residuals"] = {{"killing", killing},
                      {"inextensibility", ss.reconstruction_residual},
                      {"shear_relation", shear_residual},
                      {"stress_alignment", stress_alignment},
                      {"christoffel_closed_form", sp.christoffel_residual},
                      {"orowan_chain", std::abs(pl.gamma_dot - g_aligned)}};
  bool pass = killing < 1e-8 * opt.tol_scale &&
              ss.reconstruction_residual < 1e-8 * opt.tol_scale &&
              shear_residual < 1e-6 * opt.tol_scale &&
              std::abs(pl.gamma_dot - g_aligned) < 1e-12 * opt.tol_scale &&
              diss.nonnegative;
  rep["pass"] = pass;
  return emit(rep, "", "", "orowan", opt);
}

int cmd_verify(const std::vector<std::string>& modules, const Options& opt,
               const Config* cfg) {
  auto results = run_verify_suite(modules, opt.tol_scale);
  json rep;
  rep["command"] = "verify";
  rep["provenance"] = {{"config_hash", cfg ? cfg->hash : std::string("none")},
                       {"seed", opt.seed},
                       {"tol_scale", opt.tol_scale},
                       {"version", kVersion}};
  json table = json::array();
  std::ostringstream csv;
  csv << "module,check,residual,tolerance,pass\n";
  for (const auto& r : results) {
    table.push_back({{"module", r.module},
                     {"check", r.name},
                     {"residual", r.residual},
                     {"tolerance", r.tol},
                     {"pass", r.pass}});
    csv << r.module << "," << r.name << "," << r.residual << "," << r.tol << ","
        << (r.pass ? "true" : "false") << "\n";
    std::printf("%-20s %-32s %12.3e %10.1e %s\n", r.module.c_str(), r.name.c_str(),
                r.residual, r.tol, r.pass ? "pass" : "FAIL");
  }
  rep["checks"] = std::move(table);
  rep["pass"] = all_pass(results);
  bool want_json = opt.format == "json" || opt.format == "both";
  bool want_csv = opt.format == "csv" || opt.format == "both";
  fs::path out(opt.out_dir);
  if (want_json) write_text(out / "verify_report.json", rep.dump(2) + "\n");
  if (want_csv) write_text(out / "verify_checks.csv", csv.str());
  std::printf("verify: %s\n", rep["pass"].get<bool>() ? "all checks passed" : "FAILURES");
  return rep["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effective dislocation line kinematics toolkit"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path, "scenario config file (JSON)");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--seed", opt.seed, "lattice sampling seed");
  app.add_option("--tol-scale", opt.tol_scale, "tolerance multiplier");
  app.add_option("--format", opt.format, "json | csv | both")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  auto* analyze = app.add_subcommand("analyze", "frame anholonomy and density tensor");
  auto* burgers = app.add_subcommand("burgers", "circuit and surface Burgers vectors");
  auto* congruence = app.add_subcommand("congruence", "line classification and principal congruences");
  auto* evolve = app.add_subcommand("evolve", "curvature/torsion profile evolution");
  auto* flow = app.add_subcommand("flow", "material trajectories and consistency");
  auto* orowan = app.add_subcommand("orowan", "umbilical glide and Orowan rates");
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  std::vector<std::string> verify_modules;
  verify->add_option("modules", verify_modules, "restrict to these modules");

  // accept the shared flags on either side of the subcommand
  for (auto* sub : {analyze, burgers, congruence, evolve, flow, orowan, verify})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) {
      if (opt.config_path.empty()) return cmd_verify(verify_modules, opt, nullptr);
      Config cfg = load_config(opt);
      return cmd_verify(verify_modules, opt, &cfg);
    }
    Config cfg = load_config(opt);
    if (analyze->parsed()) return cmd_analyze(cfg, opt);
    if (burgers->parsed()) return cmd_burgers(cfg, opt);
    if (congruence->parsed()) return cmd_congruence(cfg, opt);
    if (evolve->parsed()) return cmd_evolve(cfg, opt);
    if (flow->parsed()) return cmd_flow(cfg, opt);
    if (orowan->parsed()) return cmd_orowan(cfg, opt);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
