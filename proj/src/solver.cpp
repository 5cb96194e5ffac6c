#include "gradlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradlab::solver {

using nlohmann::json;

RelaxConfig config_from_json(const json& j) {
  RelaxConfig cfg;
  try {
    const json& grid = j.at("grid");
    cfg.origin = grid.at("origin").get<std::vector<double>>();
    cfg.h = grid.at("h").get<std::vector<double>>();
    cfg.extents = grid.at("extents").get<std::vector<int>>();
    if (j.contains("boundary")) {
      const json& b = j.at("boundary");
      cfg.boundary = catalog_make(b.at("field").get<std::string>(),
                                  b.value("params", json::object()));
    }
    cfg.tau = j.value("tau", cfg.tau);
    cfg.safety = j.value("safety", cfg.safety);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
  } catch (const json::exception& e) {
    throw SolverError(std::string("relax config: ") + e.what());
  }
  if (cfg.origin.size() != 2 || cfg.h.size() != 2 || cfg.extents.size() != 2) {
    throw SolverError("relax config: grid must be two-dimensional");
  }
  return cfg;
}

json RelaxResult::log() const {
  json j;
  j["iters"] = iterations;
  j["residual"] = residual;
  j["energy_first"] = energy.empty() ? json(nullptr) : json(energy.front());
  j["energy_last"] = energy.empty() ? json(nullptr) : json(energy.back());
  return j;
}

kernels::GridShape shape_of(const GridField& f) {
  kernels::GridShape g;
  g.n = f.n();
  g.m = f.m();
  g.rows = f.extents()[0];
  g.h0 = f.h()[0];
  if (f.n() == 2) {
    g.cols = f.extents()[1];
    g.h1 = f.h()[1];
  }
  return g;
}

GridField boundary_start(const RelaxConfig& cfg, int m) {
  GridField f(2, m, cfg.origin, cfg.h, cfg.extents);
  if (!cfg.boundary) return f;
  if (cfg.boundary->m() != m || cfg.boundary->n() != 2) {
    throw SolverError("boundary trace does not match the grid");
  }
  for (std::size_t k = 0; k < f.node_count(); ++k) {
    const auto idx = f.multi(k);
    if (!f.is_boundary(idx)) continue;
    const auto u = cfg.boundary->value(f.node_position(idx));
    for (int c = 0; c < m; ++c) f.at(idx, c) = u[c];
  }
  return f;
}

double hessian_bound(const Potential& p, const GridField& f) {
  const int m = f.m();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  const auto& v = f.values();
  for (std::size_t k = 0; k < f.node_count(); ++k) {
    for (int c = 0; c < m; ++c) {
      lo[c] = std::min(lo[c], v[k * m + c]);
      hi[c] = std::max(hi[c], v[k * m + c]);
    }
  }
  for (int c = 0; c < m; ++c) {
    const double pad = 0.1 * (hi[c] - lo[c]) + 0.05;
    lo[c] -= pad;
    hi[c] += pad;
  }
  const int per_axis = std::max(3, static_cast<int>(std::pow(4000.0, 1.0 / m)));
  std::size_t total = 1;
  for (int c = 0; c < m; ++c) total *= per_axis;
  std::vector<double> u(m);
  double bound = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (int c = 0; c < m; ++c) {
      const int i = static_cast<int>(rest % per_axis);
      rest /= per_axis;
      u[c] = lo[c] + (hi[c] - lo[c]) * i / (per_axis - 1);
    }
    const Eigen::MatrixXd H = p.hessian(u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    bound = std::max({bound, std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m - 1))});
  }
  return bound;
}

namespace {

double sup_abs(const GridField& f) {
  double s = 0.0;
  for (double x : f.values()) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    s = std::max(s, std::abs(x));
  }
  return s;
}

}  // namespace

RelaxResult relax(const Potential& p, const RelaxConfig& cfg, GridField init) {
  if (init.n() != 2 || init.m() != p.m()) throw SolverError("relax: init does not match W");
  if (init.extents() != cfg.extents || init.h() != cfg.h || init.origin() != cfg.origin) {
    throw SolverError("relax: init does not match the configured grid");
  }
  if (cfg.extents[0] < 3 || cfg.extents[1] < 3) throw SolverError("relax: no interior nodes");
  if (!(cfg.tol > 0.0)) throw SolverError("relax: tolerance must be > 0");
  if (cfg.boundary) {
    const GridField trace = boundary_start(cfg, p.m());
    for (std::size_t k = 0; k < init.node_count(); ++k) {
      const auto idx = init.multi(k);
      if (!init.is_boundary(idx)) continue;
      for (int c = 0; c < p.m(); ++c) init.at(idx, c) = trace.at(idx, c);
    }
  }
  if (!std::isfinite(sup_abs(init))) throw SolverError("relax: non-finite boundary or init data");

  const auto shape = shape_of(init);
  auto residual_of = [&](std::span<const double> u) {
    return cfg.parallel ? kernels::omp::residual(shape, u, p) : kernels::serial::residual(shape, u, p);
  };
  auto energy_of = [&](std::span<const double> u) {
    return cfg.parallel ? kernels::omp::energy(shape, u, p) : kernels::serial::energy(shape, u, p);
  };
  auto sweep = [&](std::span<double> u, double tau, int color) {
    if (cfg.parallel) {
      kernels::omp::sweep(shape, u, p, tau, color);
    } else {
      kernels::serial::sweep(shape, u, p, tau, color);
    }
  };

  RelaxResult out{std::move(init), 0, 0.0, 0.0, 0.0, false, {}};
  out.lipschitz = hessian_bound(p, out.field);
  const double stiffness = 2.0 / (cfg.h[0] * cfg.h[0]) + 2.0 / (cfg.h[1] * cfg.h[1]);
  out.tau = cfg.tau > 0.0 ? cfg.tau : cfg.safety / (stiffness + out.lipschitz);

  auto& u = out.field.values();
  out.energy.push_back(energy_of(u));
  out.residual = residual_of(u);
  while (out.residual > cfg.tol && out.iterations < cfg.max_iters) {
    sweep(u, out.tau, 0);
    sweep(u, out.tau, 1);
    ++out.iterations;
    const double e = energy_of(u);
    const double prev = out.energy.back();
    out.energy.push_back(e);
    if (!std::isfinite(e) || sup_abs(out.field) > 1e6) {
      throw DivergenceError("relax: values blew up",
                            {{"iteration", out.iterations}, {"energy", prev}});
    }
    if (e > prev + 1e-12 * std::max(1.0, std::abs(prev))) {
      throw DivergenceError("relax: energy increased",
                            {{"iteration", out.iterations}, {"energy_before", prev},
                             {"energy_after", e}, {"tau", out.tau}});
    }
    if (out.iterations % cfg.check_every == 0 || out.iterations == cfg.max_iters) {
      out.residual = residual_of(u);
    }
  }
  out.converged = out.residual <= cfg.tol;
  return out;
}

double residual(const GridField& field, const Potential& p) {
  if (field.m() != p.m()) throw SolverError("residual: field and W dimensions differ");
  return kernels::omp::residual(shape_of(field), field.values(), p);
}

double energy(const GridField& field, const Potential& p) {
  if (field.m() != p.m()) throw SolverError("energy: field and W dimensions differ");
  return kernels::omp::energy(shape_of(field), field.values(), p);
}

}  // namespace gradlab::solver
