#include "gradlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "gradlab/counterexample.hpp"

namespace gradlab {

using nlohmann::json;

namespace {

void zero_fill(std::span<double> s) { std::fill(s.begin(), s.end(), 0.0); }

/// 1/4 (|u|^2 - 1)^2 in any dimension; m = 1 is the scalar double well.
class GinzburgLandau final : public PotentialModel {
 public:
  explicit GinzburgLandau(int m) : m_(m) {}
  int dim() const override { return m_; }
  void evaluate(std::span<const double> u, double* W, std::span<double> grad,
                std::span<double> hess) const override {
    double r2 = 0.0;
    for (double v : u) r2 += v * v;
    const double q = r2 - 1.0;
    if (W) *W = 0.25 * q * q;
    if (!grad.empty()) {
      for (int i = 0; i < m_; ++i) grad[i] = q * u[i];
    }
    if (!hess.empty()) {
      for (int i = 0; i < m_; ++i) {
        for (int k = 0; k < m_; ++k) hess[i * m_ + k] = 2.0 * u[i] * u[k] + (i == k ? q : 0.0);
      }
    }
  }
  std::vector<std::vector<double>> zeros() const override {
    std::vector<std::vector<double>> z;
    for (int i = 0; i < m_; ++i) {
      std::vector<double> e(m_, 0.0);
      e[i] = 1.0;
      z.push_back(e);
      e[i] = -1.0;
      z.push_back(e);
    }
    return z;
  }

 private:
  int m_;
};

/// |z^N - 1|^2 on C ~ R^2. With f = z^N - 1 holomorphic:
/// W_x + i W_y = 2 f conj(f'), W_xx = 2|f'|^2 + 2 Re(conj(f) f''),
/// W_xy = -2 Im(conj(f) f''), W_yy = 2|f'|^2 - 2 Re(conj(f) f'').
class NWell final : public PotentialModel {
 public:
  explicit NWell(int N) : N_(N) {}
  int dim() const override { return 2; }
  void evaluate(std::span<const double> u, double* W, std::span<double> grad,
                std::span<double> hess) const override {
    using C = std::complex<double>;
    const C z(u[0], u[1]);
    const C zN1 = N_ >= 1 ? std::pow(z, N_ - 1) : C(1.0);
    const C f = zN1 * z - 1.0;
    const C f1 = static_cast<double>(N_) * zN1;
    const C f2 = N_ >= 2 ? static_cast<double>(N_ * (N_ - 1)) * std::pow(z, N_ - 2) : C(0.0);
    if (W) *W = std::norm(f);
    if (!grad.empty()) {
      const C g = 2.0 * f * std::conj(f1);
      grad[0] = g.real();
      grad[1] = g.imag();
    }
    if (!hess.empty()) {
      const C a = std::conj(f) * f2;
      const double lap_half = 2.0 * std::norm(f1);
      hess[0] = lap_half + 2.0 * a.real();
      hess[1] = -2.0 * a.imag();
      hess[2] = hess[1];
      hess[3] = lap_half - 2.0 * a.real();
    }
  }
  std::vector<std::vector<double>> zeros() const override {
    std::vector<std::vector<double>> z;
    for (int k = 0; k < N_; ++k) {
      const double th = 2.0 * std::numbers::pi * k / N_;
      z.push_back({std::cos(th), std::sin(th)});
    }
    return z;
  }

 private:
  int N_;
};

/// prod_i |u - a_i|^2 on R^2 (or R^m).
class PolygonProduct final : public PotentialModel {
 public:
  explicit PolygonProduct(std::vector<std::vector<double>> a)
      : a_(std::move(a)), m_(static_cast<int>(a_.front().size())) {}
  int dim() const override { return m_; }
  void evaluate(std::span<const double> u, double* W, std::span<double> grad,
                std::span<double> hess) const override {
    const std::size_t N = a_.size();
    std::vector<double> d2(N);
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (int c = 0; c < m_; ++c) s += (u[c] - a_[i][c]) * (u[c] - a_[i][c]);
      d2[i] = s;
    }
    auto prod_except = [&](std::size_t skip1, std::size_t skip2) {
      double p = 1.0;
      for (std::size_t j = 0; j < N; ++j) {
        if (j != skip1 && j != skip2) p *= d2[j];
      }
      return p;
    };
    if (W) *W = prod_except(N, N);
    if (!grad.empty()) {
      zero_fill(grad);
      for (std::size_t i = 0; i < N; ++i) {
        const double p = prod_except(i, N);
        for (int c = 0; c < m_; ++c) grad[c] += 2.0 * (u[c] - a_[i][c]) * p;
      }
    }
    if (!hess.empty()) {
      zero_fill(hess);
      for (std::size_t i = 0; i < N; ++i) {
        const double p = prod_except(i, N);
        for (int c = 0; c < m_; ++c) hess[c * m_ + c] += 2.0 * p;
        for (std::size_t k = 0; k < N; ++k) {
          if (k == i) continue;
          const double pk = prod_except(i, k);
          for (int r = 0; r < m_; ++r) {
            for (int c = 0; c < m_; ++c) {
              hess[r * m_ + c] += 4.0 * (u[r] - a_[i][r]) * (u[c] - a_[k][c]) * pk;
            }
          }
        }
      }
    }
  }
  std::vector<std::vector<double>> zeros() const override { return a_; }

 private:
  std::vector<std::vector<double>> a_;
  int m_;
};

/// |u|^2 / 2
class Quadratic final : public PotentialModel {
 public:
  explicit Quadratic(int m) : m_(m) {}
  int dim() const override { return m_; }
  void evaluate(std::span<const double> u, double* W, std::span<double> grad,
                std::span<double> hess) const override {
    if (W) {
      double s = 0.0;
      for (double v : u) s += v * v;
      *W = 0.5 * s;
    }
    if (!grad.empty()) std::copy(u.begin(), u.end(), grad.begin());
    if (!hess.empty()) {
      zero_fill(hess);
      for (int i = 0; i < m_; ++i) hess[i * m_ + i] = 1.0;
    }
  }
  std::vector<std::vector<double>> zeros() const override {
    return {std::vector<double>(m_, 0.0)};
  }

 private:
  int m_;
};

class Zero final : public PotentialModel {
 public:
  explicit Zero(int m) : m_(m) {}
  int dim() const override { return m_; }
  void evaluate(std::span<const double>, double* W, std::span<double> grad,
                std::span<double> hess) const override {
    if (W) *W = 0.0;
    zero_fill(grad);
    zero_fill(hess);
  }
  std::vector<std::vector<double>> zeros() const override {
    return {std::vector<double>(m_, 0.0)};
  }

 private:
  int m_;
};

int int_param(const json& p, const char* key, int fallback) {
  return p.contains(key) ? p.at(key).get<int>() : fallback;
}

}  // namespace

Potential::Potential(std::string id, json params, std::shared_ptr<const PotentialModel> model)
    : id_(std::move(id)), params_(std::move(params)), model_(std::move(model)) {}

void Potential::check_dim(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != m()) {
    throw PotentialError("potential '" + id_ + "': argument has dimension " +
                         std::to_string(u.size()) + ", expected " + std::to_string(m()));
  }
}

double Potential::value(std::span<const double> u) const {
  check_dim(u);
  double W = 0.0;
  model_->evaluate(u, &W, {}, {});
  return W;
}

void Potential::gradient(std::span<const double> u, std::span<double> out) const {
  check_dim(u);
  model_->evaluate(u, nullptr, out, {});
}

std::vector<double> Potential::gradient(std::span<const double> u) const {
  std::vector<double> g(m());
  gradient(u, g);
  return g;
}

Eigen::MatrixXd Potential::hessian(std::span<const double> u) const {
  check_dim(u);
  Eigen::MatrixXd H(m(), m());
  std::vector<double> h(m() * m());
  model_->evaluate(u, nullptr, {}, h);
  for (int i = 0; i < m(); ++i) {
    for (int k = 0; k < m(); ++k) H(i, k) = h[i * m() + k];
  }
  return H;
}

PotentialEval Potential::eval(std::span<const double> u) const {
  check_dim(u);
  const int d = m();
  std::vector<double> g(d);
  std::vector<double> h(d * d);
  PotentialEval out;
  model_->evaluate(u, &out.W, g, h);
  out.grad = Eigen::Map<const Eigen::VectorXd>(g.data(), d);
  out.hess = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(h.data(), d, d);
  return out;
}

std::vector<std::string> potential_names() {
  return {"double_well", "ginzburg_landau", "n_well", "polygon",
          "quadratic",   "zero",            "counterexample"};
}

Potential make_potential(const std::string& id, const json& params) {
  if (id == "double_well") {
    return {id, params, std::make_shared<GinzburgLandau>(1)};
  }
  if (id == "ginzburg_landau") {
    const int m = int_param(params, "m", 2);
    if (m < 1) throw PotentialError("ginzburg_landau: m must be >= 1");
    return {id, params, std::make_shared<GinzburgLandau>(m)};
  }
  if (id == "n_well") {
    const int N = int_param(params, "N", 3);
    if (N < 1) throw PotentialError("n_well: N must be >= 1");
    return {id, params, std::make_shared<NWell>(N)};
  }
  if (id == "polygon") {
    std::vector<std::vector<double>> v;
    if (params.contains("vertices")) {
      v = params.at("vertices").get<std::vector<std::vector<double>>>();
    } else {
      // equilateral triangle on the unit circle
      for (int k = 0; k < 3; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 3.0;
        v.push_back({std::cos(th), std::sin(th)});
      }
    }
    if (v.empty()) throw PotentialError("polygon: no vertices");
    for (const auto& a : v) {
      if (a.size() != v.front().size() || a.empty()) {
        throw PotentialError("polygon: vertices must share a positive dimension");
      }
    }
    return {id, params, std::make_shared<PolygonProduct>(std::move(v))};
  }
  if (id == "quadratic") {
    return {id, params, std::make_shared<Quadratic>(int_param(params, "m", 2))};
  }
  if (id == "zero") {
    return {id, params, std::make_shared<Zero>(int_param(params, "m", 2))};
  }
  if (id == "counterexample") {
    return counterexample::make_potential(params);
  }
  throw PotentialError("unknown potential '" + id + "'");
}

double fd_consistency(const Potential& p, std::span<const double> u, double h) {
  const int m = p.m();
  const PotentialEval e = p.eval(u);
  std::vector<double> x(u.begin(), u.end());
  double grad_err = 0.0;
  double hess_err = 0.0;
  Eigen::MatrixXd fd_hess(m, m);
  for (int i = 0; i < m; ++i) {
    x[i] = u[i] + h;
    const double Wp = p.value(x);
    const auto gp = p.gradient(x);
    x[i] = u[i] - h;
    const double Wm = p.value(x);
    const auto gm = p.gradient(x);
    x[i] = u[i];
    grad_err = std::max(grad_err, std::abs((Wp - Wm) / (2.0 * h) - e.grad[i]));
    for (int k = 0; k < m; ++k) fd_hess(k, i) = (gp[k] - gm[k]) / (2.0 * h);
  }
  hess_err = (fd_hess - e.hess).cwiseAbs().maxCoeff();
  const double gscale = std::max(1.0, e.grad.cwiseAbs().maxCoeff());
  const double hscale = std::max(1.0, e.hess.cwiseAbs().maxCoeff());
  return std::max(grad_err / gscale, hess_err / hscale);
}

RadialProbe radial_parameters(const Potential& p, double R, double tol) {
  if (!(R > 0.0)) throw PotentialError("radial_parameters: R must be > 0");
  const PointSet pts = circle_samples(p.m(), R, 64);
  std::vector<double> Ws;
  std::vector<double> mus;
  double perp = 0.0;
  std::vector<double> g(p.m());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const std::span<const double> u(pts.point(k), p.m());
    Ws.push_back(p.value(u));
    p.gradient(u, g);
    double dot = 0.0;
    for (int c = 0; c < p.m(); ++c) dot += g[c] * u[c];
    const double mu = -dot / (R * R);
    mus.push_back(mu);
    for (int c = 0; c < p.m(); ++c) perp = std::max(perp, std::abs(g[c] + mu * u[c]));
  }
  const auto [wmin, wmax] = std::minmax_element(Ws.begin(), Ws.end());
  const auto [mmin, mmax] = std::minmax_element(mus.begin(), mus.end());
  RadialProbe out;
  out.worst_deviation = std::max({*wmax - *wmin, *mmax - *mmin, perp});
  out.params.R = R;
  out.params.lambda = 0.5 * (*wmin + *wmax);
  out.params.mu = 0.5 * (*mmin + *mmax);
  out.radial = out.worst_deviation <= tol;
  out.degenerate = out.radial && out.params.mu <= tol;
  return out;
}

double min_hessian_eigenvalue(const Potential& p, std::span<const double> u) {
  const Eigen::MatrixXd H = p.hessian(u);
  if (H.rows() == 1) return H(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> convexity_region_probe(const Potential& p, const PointSet& samples) {
  std::vector<double> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out[k] = min_hessian_eigenvalue(p, std::span<const double>(samples.point(k), p.m()));
  }
  return out;
}

}  // namespace gradlab
