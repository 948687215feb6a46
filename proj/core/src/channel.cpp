#include "ranslab/channel.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "ranslab/assembly.hpp"
#include "ranslab/error.hpp"
#include "ranslab/post.hpp"

namespace ranslab {

using json = nlohmann::json;

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigurationError(msg);
  };
  need(problem == "channel", "problem must be 'channel'");
  need(nx >= 1 && ny >= 1, "mesh.nx and mesh.ny must be positive");
  need(grading >= 1.0, "mesh.grading must be >= 1");
  auto names = turbulence_model_names();
  need(std::find(names.begin(), names.end(), model) != names.end(), "unknown model '" + model + "'");
  need(e_d >= 0.0 && e_d <= 1.0, "e_d must lie in [0, 1]");
  need(velocity_degree >= 1 && velocity_degree <= 2, "degrees.velocity must be 1 or 2");
  need(pressure_degree == 1, "degrees.pressure must be 1");
  need(turbulence_degree >= 1 && turbulence_degree <= 2, "degrees.turbulence must be 1 or 2");
  need(omega_ns > 0.0 && omega_ns <= 1.0 && omega_turb > 0.0 && omega_turb <= 1.0, "omegas must lie in (0, 1]");
  need(max_iter >= 0, "max_iter must be >= 0");
  need(max_err > 0.0, "max_err must be positive");
  need(tau > 0.0, "tau must be positive");
  need(Re_tau > 0.0 && u_tau > 0.0, "Re_tau and u_tau must be positive");
  need(initial_k > 0.0 && initial_e > 0.0, "initial k and e must be positive");
  need(laminar_iter >= 0 && laminar_err > 0.0, "bad laminar pre-solve settings");
  need(vtk_every >= 0, "vtk_every must be >= 0");
  parse_linear_solver(linear_solver);
  parse_dq_mode(dq_mode);
}

namespace {

class Reader {
 public:
  explicit Reader(std::string where) : where_(std::move(where)) {}

  template <class F>
  void on(const std::string& key, F f) {
    fields_[key] = [f](const json& v, const std::string& path) { f(v, path); };
  }

  void read(const json& obj) const {
    if (!obj.is_object()) throw ConfigurationError(label() + "must be an object");
    for (const auto& [key, value] : obj.items()) {
      auto it = fields_.find(key);
      if (it == fields_.end()) throw ConfigurationError("unknown key '" + where_ + key + "'");
      it->second(value, where_ + key);
    }
  }

 private:
  std::string label() const { return where_.empty() ? "config " : "'" + where_.substr(0, where_.size() - 1) + "' "; }
  std::string where_;
  std::map<std::string, std::function<void(const json&, const std::string&)>> fields_;
};

auto int_field(int& out) {
  return [&out](const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigurationError("'" + path + "' must be an integer");
    out = v.get<int>();
  };
}

auto num_field(double& out) {
  return [&out](const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigurationError("'" + path + "' must be a number");
    out = v.get<double>();
  };
}

auto str_field(std::string& out) {
  return [&out](const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigurationError("'" + path + "' must be a string");
    out = v.get<std::string>();
  };
}

template <class Setup>
auto object_field(const std::string& prefix, Setup setup) {
  return [prefix, setup](const json& v, const std::string&) {
    Reader r(prefix + ".");
    setup(r);
    r.read(v);
  };
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("invalid JSON: ") + e.what());
  }
  RunConfig c;
  Reader top("");
  top.on("problem", str_field(c.problem));
  top.on("mesh", object_field("mesh", [&](Reader& r) {
    r.on("nx", int_field(c.nx));
    r.on("ny", int_field(c.ny));
    r.on("grading", num_field(c.grading));
  }));
  top.on("model", str_field(c.model));
  top.on("e_d", num_field(c.e_d));
  top.on("degrees", object_field("degrees", [&](Reader& r) {
    r.on("velocity", int_field(c.velocity_degree));
    r.on("pressure", int_field(c.pressure_degree));
    r.on("turbulence", int_field(c.turbulence_degree));
  }));
  top.on("omegas", object_field("omegas", [&](Reader& r) {
    r.on("ns", num_field(c.omega_ns));
    r.on("turb", num_field(c.omega_turb));
  }));
  top.on("max_iter", int_field(c.max_iter));
  top.on("max_err", num_field(c.max_err));
  top.on("tau", num_field(c.tau));
  top.on("Re_tau", num_field(c.Re_tau));
  top.on("u_tau", num_field(c.u_tau));
  top.on("linear_solver", str_field(c.linear_solver));
  top.on("dq_mode", str_field(c.dq_mode));
  top.on("initial", object_field("initial", [&](Reader& r) {
    r.on("k", num_field(c.initial_k));
    r.on("e", num_field(c.initial_e));
  }));
  top.on("laminar", object_field("laminar", [&](Reader& r) {
    r.on("max_iter", int_field(c.laminar_iter));
    r.on("max_err", num_field(c.laminar_err));
  }));
  top.on("vtk_every", int_field(c.vtk_every));
  top.on("output_dir", str_field(c.output_dir));
  top.read(j);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigurationError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json j = {
      {"problem", c.problem},
      {"mesh", {{"nx", c.nx}, {"ny", c.ny}, {"grading", c.grading}}},
      {"model", c.model},
      {"e_d", c.e_d},
      {"degrees", {{"velocity", c.velocity_degree}, {"pressure", c.pressure_degree}, {"turbulence", c.turbulence_degree}}},
      {"omegas", {{"ns", c.omega_ns}, {"turb", c.omega_turb}}},
      {"max_iter", c.max_iter},
      {"max_err", c.max_err},
      {"tau", c.tau},
      {"Re_tau", c.Re_tau},
      {"u_tau", c.u_tau},
      {"linear_solver", c.linear_solver},
      {"dq_mode", c.dq_mode},
      {"initial", {{"k", c.initial_k}, {"e", c.initial_e}}},
      {"laminar", {{"max_iter", c.laminar_iter}, {"max_err", c.laminar_err}}},
      {"vtk_every", c.vtk_every},
      {"output_dir", c.output_dir},
  };
  return j.dump(2);
}

ChannelCase make_channel_case(const RunConfig& cfg) {
  cfg.validate();
  ChannelCase cc;
  cc.mesh = std::make_shared<const Mesh>(generate_channel_mesh(cfg.nx, cfg.ny, 1.0, 1.0, cfg.grading));

  NSParams np;
  np.nu = cfg.nu();
  np.body_force = {cfg.u_tau * cfg.u_tau, 0.0};
  np.velocity_degree = cfg.velocity_degree;
  np.pressure_degree = cfg.pressure_degree;
  np.stabilized = cfg.velocity_degree == cfg.pressure_degree;
  np.tau = cfg.tau;
  np.prm.omega = cfg.omega_ns;
  np.prm.linear_solver = parse_linear_solver(cfg.linear_solver);
  cc.ns = std::make_unique<NSSolver>(cc.mesh, np);

  cc.ns->scheme().prm.omega = 1.0;
  if (cfg.laminar_iter > 0) {
    auto info = cc.ns->solve(cfg.laminar_iter, cfg.laminar_err);
    spdlog::info("laminar pre-solve: {} iterations, error {:.3e}", info.iter, info.error());
  }
  cc.ns->scheme().prm.omega = cfg.omega_ns;

  TurbParams tp;
  tp.model = cfg.model;
  tp.e_d = cfg.e_d;
  tp.prm.omega = cfg.omega_turb;
  tp.prm.linear_solver = np.prm.linear_solver;
  tp.dq_mode = parse_dq_mode(cfg.dq_mode);
  tp.u_tau = cfg.u_tau;
  tp.initial_k = cfg.initial_k;
  tp.initial_e = cfg.initial_e;
  tp.degree = cfg.turbulence_degree;
  cc.turb = std::make_unique<LowReynoldsSolver>(*cc.ns, tp);
  return cc;
}

namespace {

std::vector<FieldFunction> output_fields(ChannelCase& cc) {
  auto named = [](FieldFunction f, const std::string& n) {
    f.set_name(n);
    return f;
  };
  std::vector<FieldFunction> out{named(cc.ns->u_, "u"), named(cc.ns->p_, "p"), named(cc.turb->k(), "k"),
                                 named(cc.turb->e(), "e")};
  if (cc.turb->nut().valid()) out.push_back(named(cc.turb->nut(), "nut"));
  if (cc.turb->y.valid()) out.push_back(named(cc.turb->y, "y"));
  out.push_back(streamfunction(cc.ns->u_));
  return out;
}

double max_of(std::span<const double> v, int stride = 1) {
  double m = -INFINITY;
  for (std::size_t i = 0; i < v.size(); i += stride) m = std::max(m, v[i]);
  return m;
}

void write_summary(const RunResult& r, const std::filesystem::path& path) {
  const auto& h = r.coupling.history;
  json final_err = nullptr;
  if (!h.empty())
    final_err = {{"ns_residual", h.back().ns_residual},
                 {"ns_dx", h.back().ns_dx},
                 {"turb_residual", h.back().turb_residual},
                 {"turb_dx", h.back().turb_dx},
                 {"error", h.back().error()}};
  json j = {{"model", r.model},
            {"e_d", r.e_d},
            {"converged", r.coupling.converged},
            {"finite", r.coupling.finite},
            {"iterations", r.coupling.iterations},
            {"final_errors", final_err},
            {"u_tau_reaction", r.u_tau_reaction},
            {"u_tau_gradient", r.u_tau_gradient},
            {"u_max", r.u_max},
            {"k_max", r.k_max},
            {"wall_clock_s", r.wall_clock}};
  if (!r.error.empty()) j["error"] = r.error;
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << j.dump(2) << '\n';
}

}  // namespace

RunResult run_channel(const RunConfig& cfg, bool write_outputs, ChannelCase* keep) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  r.model = cfg.model;
  r.e_d = cfg.e_d;
  const std::filesystem::path dir = cfg.output_dir;
  if (write_outputs) std::filesystem::create_directories(dir);

  ChannelCase cc = make_channel_case(cfg);
  if (write_outputs) write_vtk(*cc.mesh, output_fields(cc), dir / "fields_0.vtk");

  r.coupling = coupled_rans_iteration(*cc.ns, *cc.turb, cfg.max_iter, cfg.max_err, [&](const CouplingRecord& rec) {
    if (write_outputs && cfg.vtk_every > 0 && rec.iter % cfg.vtk_every == 0)
      write_vtk(*cc.mesh, output_fields(cc), dir / ("fields_" + std::to_string(rec.iter) + ".vtk"));
  });
  r.u_tau_reaction = cc.ns->wall_friction_velocity();
  r.u_tau_gradient = cc.ns->wall_friction_velocity_gradient();
  r.u_max = max_of(cc.ns->u_.values(), 2);
  r.k_max = max_of(cc.turb->k().values());
  r.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  spdlog::info("{} e_d={}: converged={} iterations={} u_tau={:.5f}", r.model, r.e_d, r.coupling.converged,
               r.coupling.iterations, r.u_tau_reaction);

  if (write_outputs) {
    write_convergence_csv(r.coupling.history, dir / "convergence.csv");
    if (r.coupling.finite) write_vtk(*cc.mesh, output_fields(cc), dir / "fields_final.vtk");
    write_summary(r, dir / "summary.json");
  }
  if (keep) *keep = std::move(cc);
  return r;
}

std::vector<RunResult> run_sweep(const RunConfig& base, bool write_outputs,
                                 const std::function<void(const RunResult&)>& cb) {
  std::vector<RunResult> out;
  json rows = json::array();
  for (const auto& model : turbulence_model_names())
    for (double e_d : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      RunConfig cfg = base;
      cfg.model = model;
      cfg.e_d = e_d;
      std::ostringstream sub;
      sub << model << "_ed" << e_d;
      cfg.output_dir = (std::filesystem::path(base.output_dir) / sub.str()).string();
      RunResult r;
      try {
        r = run_channel(cfg, write_outputs);
      } catch (const std::exception& e) {
        r.model = model;
        r.e_d = e_d;
        r.coupling.finite = false;
        r.error = e.what();
        spdlog::error("{} e_d={} failed: {}", model, e_d, e.what());
      }
      rows.push_back({{"model", r.model},
                      {"e_d", r.e_d},
                      {"converged", r.coupling.converged},
                      {"iterations", r.coupling.iterations},
                      {"u_tau_reaction", r.u_tau_reaction},
                      {"wall_clock_s", r.wall_clock},
                      {"error", r.error},
                      {"output_dir", cfg.output_dir}});
      if (cb) cb(r);
      out.push_back(std::move(r));
    }
  if (write_outputs) {
    std::filesystem::create_directories(base.output_dir);
    std::ofstream f(std::filesystem::path(base.output_dir) / "sweep_summary.json");
    f << rows.dump(2) << '\n';
  }
  return out;
}

double poisson_l2_error(int n) {
  using std::numbers::pi;
  auto mesh = std::make_shared<const Mesh>(generate_channel_mesh(n, n, 1.0, 1.0));
  auto V = make_space(mesh, Element{1, ValueShape::Scalar});
  const Expr u = trial_function(V), v = test_function(V), x = spatial_coordinate();
  const Expr exact = sin(constant(pi) * component(x, 0)) * sin(constant(pi) * component(x, 1));
  const Expr f = constant(2 * pi * pi) * exact;
  CSRMatrix A = assemble_matrix(inner(grad(u), grad(v)) * dx, V, V);
  DenseVector b = assemble_vector(f * v * dx, V);
  std::vector<DirichletBC> bcs;
  for (int m : {markers::wall, markers::inlet, markers::outlet, markers::symmetry}) bcs.emplace_back(V, 0, -1, m, 0.0);
  apply_dirichlet(A, b, bcs);
  FieldFunction uh(V, "u");
  uh.assign(sparse_lu_solve(A, b));
  const Expr e = coefficient(uh) - exact;
  return std::sqrt(assemble_scalar(e * e * dx.with_degree(6), mesh));
}

std::pair<double, double> stokes_poiseuille_error(int nx, int ny) {
  auto mesh = std::make_shared<const Mesh>(generate_channel_mesh(nx, ny, 1.0, 1.0));
  NSParams prm;
  prm.nu = 0.1;
  prm.body_force = {0.3, 0.0};
  NSSolver s(mesh, prm);
  s.solve(20, 1e-11);
  double err = 0.0;
  const auto& V = *s.V->block(0);
  for (int n = 0; n < V.num_nodes(); ++n) {
    const double y = V.node_coordinates()[n][1];
    const double exact = 0.3 / (2 * 0.1) * y * (2 - y);
    err = std::max({err, std::abs(s.u_[V.dof(n, 0)] - exact), std::abs(s.u_[V.dof(n, 1)])});
  }
  const Expr d = div(coefficient(s.u_));
  return {err, std::sqrt(assemble_scalar(d * d * dx, mesh))};
}

std::vector<ValidationCase> run_validation() {
  std::vector<ValidationCase> out;
  auto fmt_num = [](double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
  };
  {
    ValidationCase c{"poisson_p1_convergence", true, ""};
    double prev = 0.0;
    for (int n : {8, 16, 32, 64}) {
      const double e = poisson_l2_error(n);
      if (prev > 0.0) {
        const double rate = std::log2(prev / e);
        c.detail += "rate " + fmt_num(rate) + " ";
        c.passed = c.passed && rate >= 1.9 && rate <= 2.1;
      }
      prev = e;
    }
    out.push_back(c);
  }
  {
    auto [err, dv] = stokes_poiseuille_error(10, 20);
    out.push_back({"stokes_taylor_hood_poiseuille", err <= 1e-9 && dv <= 1e-9,
                   "max error " + fmt_num(err) + ", div L2 " + fmt_num(dv)});
  }
  {
    auto mesh = std::make_shared<const Mesh>(generate_channel_mesh(4, 8, 1.0, 1.0));
    FieldFunction u(make_space(mesh, Element{2, ValueShape::Vector}), "u");
    u.interpolate([](const Point&) { return std::array<double, 3>{1.0, 0.0, 0.0}; });
    auto psi = streamfunction(u);
    double err = 0.0;
    const auto& X = psi.space()->block(0)->node_coordinates();
    for (std::size_t i = 0; i < X.size(); ++i) err = std::max(err, std::abs(psi[i] - X[i][1]));
    out.push_back({"streamfunction_uniform_flow", err <= 1e-10, "max error " + fmt_num(err)});
  }
  return out;
}

}  // namespace ranslab
