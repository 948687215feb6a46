#include "ranslab/turbulence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <spdlog/spdlog.h>

#include "ranslab/error.hpp"

namespace ranslab {

std::vector<std::string> SystemComposition::names() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

std::string SystemComposition::group_name(std::size_t i) const {
  std::string s;
  for (const auto& n : groups.at(i)) s += n;
  return s;
}

void TurbSystem::bind(Namespace& ns) const {
  for (const auto& name : composition.names()) {
    ns[name] = q.at(name);
    ns["v_" + name] = v.at(name);
    ns[name + "_"] = coefficient(q_.at(name));
  }
}

TurbSystem compose_system(const SystemComposition& comp, const MeshPtr& mesh,
                          const std::map<std::string, int>& degrees) {
  TurbSystem s;
  s.composition = comp;
  std::set<std::string> seen;
  for (const auto& name : comp.names()) {
    if (name.empty() || name == "dq") throw InvalidArgument("invalid unknown name '" + name + "'");
    if (!seen.insert(name).second) throw InvalidArgument("unknown '" + name + "' appears twice");
  }
  auto degree = [&](const std::string& n) {
    auto it = degrees.find(n);
    return it == degrees.end() ? 1 : it->second;
  };
  for (const auto& name : comp.names()) s.V[name] = make_space(mesh, {degree(name), ValueShape::Scalar});
  s.V["dq"] = make_space(mesh, {degree("dq"), ValueShape::Scalar});
  for (std::size_t g = 0; g < comp.groups.size(); ++g) {
    const auto& grp = comp.groups[g];
    if (grp.empty()) throw InvalidArgument("empty group in system composition");
    if (grp.size() == 1) {
      const auto& n = grp[0];
      s.q[n] = trial_function(s.V[n]);
      s.v[n] = test_function(s.V[n]);
      s.q_[n] = FieldFunction(s.V[n], n);
      continue;
    }
    const std::string sys = comp.group_name(g);
    if (s.V.count(sys)) throw InvalidArgument("group name '" + sys + "' collides with an unknown");
    std::vector<SpacePtr> subs;
    for (const auto& n : grp) subs.push_back(s.V[n]);
    s.V[sys] = mixed_space(subs);
    s.q_[sys] = FieldFunction(s.V[sys], sys);
    auto parts = s.q_[sys].split();
    auto tr = trial_functions(s.V[sys]);
    auto te = test_functions(s.V[sys]);
    for (std::size_t i = 0; i < grp.size(); ++i) {
      parts[i].set_name(grp[i]);
      s.q_[grp[i]] = parts[i];
      s.q[grp[i]] = tr[i];
      s.v[grp[i]] = te[i];
    }
  }
  return s;
}

void ModelParams::bind(Namespace& ns) const {
  ns["Cmu"] = constant(Cmu);
  ns["sigma_k"] = constant(sigma_k);
  ns["sigma_e"] = constant(sigma_e);
  ns["Ce1"] = constant(Ce1);
  ns["Ce2"] = constant(Ce2);
  ns["e_nut"] = constant(e_nut);
  ns["f1"] = constant(f1);
  ns["e_d"] = constant(e_d);
}

std::vector<std::string> turbulence_model_names() { return {"LaunderSharma", "JonesLaunder", "Chien"}; }

ModelParams model_parameters(const std::string& model) {
  ModelParams p;
  p.model = model;
  if (model == "LaunderSharma") {
    p.Ce1 = 1.44;
    p.Ce2 = 1.92;
  } else if (model == "JonesLaunder") {
    p.Ce1 = 1.55;
    p.Ce2 = 2.0;
  } else if (model == "Chien") {
    p.Ce1 = 1.35;
    p.Ce2 = 1.8;
  } else {
    throw LookupError("unknown turbulence model '" + model + "'; available: LaunderSharma, JonesLaunder, Chien");
  }
  return p;
}

std::vector<DerivedSpec> model_derived_quantities(const std::string& model) {
  const auto W = DQBoundary::Wall, N = DQBoundary::None;
  if (model == "LaunderSharma")
    return {{"D_", "nu/2./k_*inner(grad(k_), grad(k_))", N},
            {"fmu_", "exp(-3.4/(1. + (k_*k_/nu/e_)/50.)**2)", W},
            {"f2_", "1. - 0.3*exp(-(k_*k_/nu/e_)**2)", W},
            {"nut_", "Cmu*fmu_*k_*k_*(1./e_)", W},
            {"E_", "2.*nu*nut_*dot(d2udy2_, d2udy2_)", W}};
  if (model == "JonesLaunder")
    return {{"D_", "nu/2./k_*inner(grad(k_), grad(k_))", N},
            {"fmu_", "exp(-2.5/(1. + (k_*k_/nu/e_)/50.))", W},
            {"f2_", "(1. - 0.3*exp(-(k_*k_/nu/e_)**2))", W},
            {"nut_", "Cmu*fmu_*k_*k_*(1./e_)", W},
            {"E_", "2.*nu*nut_*dot(d2udy2_, d2udy2_)", W}};
  if (model == "Chien")
    return {{"D_", "2.*nu*k_/y**2", N},
            {"fmu_", "1. - exp(-0.0115*yplus_)", W},
            {"f2_", "1. - 0.22*exp(-(k_*k_/nu/e_/6.)**2)", W},
            {"nut_", "Cmu*fmu_*k_*k_*(1./e_)", W},
            {"E_", "-2.*nu*e_/y**2*exp(-0.5*yplus_)", W}};
  model_parameters(model);
  return {};
}

namespace {

struct KeNames {
  Expr k, e, v_k, v_e, k_, e_, nut_, u_, Sij_, E_, f2_, D_, nu, e_d, sigma_e, Ce1, Ce2;
  explicit KeNames(const Namespace& ns, bool need_k = true, bool need_e = true) {
    auto get = [&](const char* n) { return lookup(ns, n); };
    if (need_k) {
      k = get("k");
      v_k = get("v_k");
      e_d = get("e_d");
      D_ = get("D_");
    }
    if (need_e) {
      e = get("e");
      v_e = get("v_e");
      E_ = get("E_");
      f2_ = get("f2_");
      sigma_e = get("sigma_e");
      Ce1 = get("Ce1");
      Ce2 = get("Ce2");
    }
    k_ = get("k_");
    e_ = get("e_");
    nut_ = get("nut_");
    u_ = get("u_");
    Sij_ = get("Sij_");
    nu = get("nu");
  }
};

Form k_form(const KeNames& s, const Expr& sink) {
  return (s.nu + s.nut_) * inner(grad(s.v_k), grad(s.k)) * dx + inner(s.v_k, dot(grad(s.k), s.u_)) * dx -
         2. * inner(grad(s.u_), s.Sij_) * s.nut_ * s.v_k * dx + sink * (1. / s.k_) * s.v_k * dx + s.v_k * s.D_ * dx;
}

Form e_form(const KeNames& s) {
  return (s.nu + s.nut_ * (1. / s.sigma_e)) * inner(grad(s.v_e), grad(s.e)) * dx +
         inner(s.v_e, dot(grad(s.e), s.u_)) * dx -
         (s.Ce1 * 2. * inner(grad(s.u_), s.Sij_) * s.nut_ * s.e_ - s.f2_ * s.Ce2 * s.e_ * s.e) * (1. / s.k_) * s.v_e *
             dx -
         s.E_ * s.v_e * dx;
}

Expr blended_sink(const KeNames& s) { return s.k_ * s.e * s.e_d + s.k * s.e_ * (1. - s.e_d); }

}  // namespace

Form steady_ke_1(const Namespace& ns) {
  KeNames s(ns);
  return k_form(s, blended_sink(s)) + e_form(s);
}

Form steady_k_segregated(const Namespace& ns) {
  KeNames s(ns, true, false);
  return k_form(s, s.k * s.e_);
}

Form steady_e_segregated(const Namespace& ns) {
  KeNames s(ns, false, true);
  return e_form(s);
}

Form ke_sink(const Namespace& ns) {
  KeNames s(ns);
  return blended_sink(s) * (1. / s.k_) * s.v_k * dx;
}

FieldFunction compute_wall_scales(const FieldFunction& y, double u_tau, double nu) {
  FieldFunction yp(y.space(), "yplus");
  auto out = yp.values();
  auto in = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = u_tau * in[i] / nu;
  return yp;
}

LowReynoldsSolver::LowReynoldsSolver(NSSolver& ns_solver, TurbParams prm)
    : ns_(ns_solver), prm_(std::move(prm)), mp_(model_parameters(prm_.model)) {
  if (!(prm_.e_d >= 0.0 && prm_.e_d <= 1.0)) throw InvalidArgument("e_d must lie in [0, 1]");
  mp_.e_d = prm_.e_d;
  const auto& mesh = ns_.mesh();
  SystemComposition comp;
  comp.groups = prm_.coupled ? std::vector<std::vector<std::string>>{{"k", "e"}}
                             : std::vector<std::vector<std::string>>{{"k"}, {"e"}};
  sys = compose_system(comp, mesh, {{"k", prm_.degree}, {"e", prm_.degree}, {"dq", prm_.degree}});

  const double nu = ns_.params().nu;
  ns["nu"] = constant(nu);
  for (const char* n : {"u_", "Sij_", "d2udy2_", "n", "h"}) ns[n] = lookup(ns_.ns, n);
  sys.bind(ns);
  mp_.bind(ns);

  PeriodicMap map;
  if (ns_.params().periodic) map = build_periodic_map(*mesh, markers::inlet, markers::outlet);
  auto periodic_for = [&](const SpacePtr& W) { return map.pairs.empty() ? PeriodicDofs{} : periodic_dofs(W, map); };
  periodic_["dq"] = periodic_for(sys.V.at("dq"));
  for (std::size_t g = 0; g < comp.groups.size(); ++g) {
    const std::string name = comp.group_name(g);
    const auto& W = sys.V.at(name);
    periodic_[name] = periodic_for(W);
    auto& bcs = bcs_[name];
    for (int b = 0; b < W->num_blocks(); ++b)
      for (int m : prm_.wall_markers)
        if (mesh->has_marker(m)) bcs.emplace_back(W, b, -1, m, 0.0);
    for (int b = 0; b < W->num_blocks(); ++b) {
      auto& fixed = fixed_[comp.groups[g][b]];
      const int lo = W->offset(b), hi = lo + W->block(b)->ndofs();
      for (const auto& bc : bcs)
        for (int d : bc.dofs())
          if (d >= lo && d < hi) fixed.push_back(d - lo);
    }
  }

  if (prm_.model == "Chien") {
    EikonalParams ep = prm_.eikonal;
    ep.degree = prm_.degree;
    ep.wall_markers = prm_.wall_markers;
    ep.periodic = map;
    auto wd = solve_eikonal(mesh, ep);
    yplus = compute_wall_scales(wd.y, prm_.u_tau, nu);
    y = wd.y;
    double ymin = INFINITY;
    for (double v : y.values())
      if (v > 1e-14) ymin = std::min(ymin, v);
    for (double& v : y.values()) v = std::max(v, ymin);
    ns["y"] = coefficient(y);
    ns["yplus_"] = coefficient(yplus);
  }
  initialize();
  define();
}

DerivedQuantity& LowReynoldsSolver::dq(const std::string& name) {
  for (auto& d : dqs)
    if (d.name() == name) return d;
  throw LookupError("no derived quantity named '" + name + "'");
}

void LowReynoldsSolver::initialize() {
  k().fill(prm_.initial_k);
  e().fill(prm_.initial_e);
  for (const char* n : {"k", "e"})
    for (int d : fixed_[n]) sys.q_.at(n)[d] = 0.0;
}

void LowReynoldsSolver::clamp(const std::string& name) {
  auto x = sys.q_.at(name).values();
  std::vector<double> keep;
  const auto& fixed = fixed_[name];
  for (int d : fixed) keep.push_back(x[d]);
  positivity_clamp(x, prm_.clamp_floor);
  for (std::size_t i = 0; i < fixed.size(); ++i) x[fixed[i]] = keep[i];
}

void LowReynoldsSolver::define() {
  ns_.update_derived();
  dqs.clear();
  for (const auto& spec : model_derived_quantities(prm_.model)) {
    const double w = spec.name != "nut_" ? 1.0 : prm_.nut_omega < 0.0 ? prm_.prm.omega : prm_.nut_omega;
    auto ov = prm_.dq_mode_overrides.find(spec.name);
    const DQMode mode = ov == prm_.dq_mode_overrides.end() ? prm_.dq_mode : ov->second;
    dqs.emplace_back(spec.name, sys.V.at("dq"), spec.formula, mode, spec.boundary, prm_.wall_markers,
                     periodic_.at("dq"), w);
  }
  update_all(dqs, ns);

  schemes.clear();
  if (prm_.coupled) {
    auto s = std::make_unique<Scheme>(make_scheme("Steady_ke_1", ns, steady_ke_1, sys.q_.at("ke"),
                                                  {{"k_", "k"}, {"e_", "e"}}, prm_.prm, bcs_.at("ke"),
                                                  periodic_.at("ke")));
    s->update_hook = [this] {
      clamp("k");
      clamp("e");
    };
    schemes.push_back(std::move(s));
  } else {
    auto sk = std::make_unique<Scheme>(make_scheme("Steady_k_1", ns, steady_k_segregated, k(), {{"k_", "k"}},
                                                   prm_.prm, bcs_.at("k"), periodic_.at("k")));
    sk->update_hook = [this] { clamp("k"); };
    auto se = std::make_unique<Scheme>(make_scheme("Steady_e_1", ns, steady_e_segregated, e(), {{"e_", "e"}},
                                                   prm_.prm, bcs_.at("e"), periodic_.at("e")));
    se->update_hook = [this] { clamp("e"); };
    schemes.push_back(std::move(sk));
    schemes.push_back(std::move(se));
  }
  ns_.set_viscosity(constant(ns_.params().nu) + lookup(ns, "nut_"));
}

void LowReynoldsSolver::set_e_d(double e_d) {
  if (!(e_d >= 0.0 && e_d <= 1.0)) throw InvalidArgument("e_d must lie in [0, 1]");
  prm_.e_d = mp_.e_d = e_d;
  mp_.bind(ns);
  define();
}

void LowReynoldsSolver::update_derived() { update_all(dqs, ns); }

std::pair<double, double> LowReynoldsSolver::step() {
  double r2 = 0.0, d2 = 0.0;
  for (auto& s : schemes) {
    auto r = s->step();
    r2 += r.residual * r.residual;
    const double d = norm2(r.dx);
    d2 += d * d;
  }
  return {std::sqrt(r2), std::sqrt(d2)};
}

double CouplingRecord::error() const { return std::max({ns_residual, ns_dx, turb_residual, turb_dx}); }

CouplingResult coupled_rans_iteration(NSSolver& ns, LowReynoldsSolver& turb, int max_iter, double max_err,
                                      const std::function<void(const CouplingRecord&)>& cb) {
  CouplingResult out;
  for (int it = 1; it <= max_iter; ++it) {
    CouplingRecord rec;
    rec.iter = it;
    auto rn = ns.scheme().step();
    rec.ns_residual = rn.residual;
    rec.ns_dx = norm2(rn.dx);
    ns.update_derived();
    std::tie(rec.turb_residual, rec.turb_dx) = turb.step();
    turb.update_derived();
    out.history.push_back(rec);
    out.iterations = it;
    spdlog::debug("iter {}: ns {:.3e}/{:.3e} turb {:.3e}/{:.3e}", it, rec.ns_residual, rec.ns_dx, rec.turb_residual,
                  rec.turb_dx);
    if (cb) cb(rec);
    const bool finite = all_finite(ns.up_.values()) && all_finite(turb.k().values()) &&
                        all_finite(turb.e().values()) && std::isfinite(rec.error());
    if (!finite) {
      out.finite = false;
      break;
    }
    if (rec.error() <= max_err) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace ranslab
