#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fac/aeps.hpp"
#include "fac/constants.hpp"
#include "fac/fracops.hpp"
#include "fac/interp.hpp"
#include "fac/layer.hpp"
#include "fac/potential.hpp"
#include "fac/quadrature.hpp"

namespace fac {

// Frozen-point data for the linearized transversal equation L[psi] = g.
struct CorrectorProblem {
  double eps = 0.05, sigma = 0.0, sigma_tilde = 0.0, lne = 0.0;
  const LayerProfile* profile = nullptr;
  const Potential* pot = nullptr;
  double Cn = 2.0, c0 = 2.0 * pi;
  std::vector<double> xi;      // collocation nodes (shared with the operator)
  std::vector<double> a_vals;  // a_eps at the nodes
  double abar = 0.0;           // consistent with the spline inner product below

  void check() const {
    if (!profile || !pot) throw std::invalid_argument("corrector: profile/potential required");
    if (std::abs(sigma_tilde * pot->Wpp(0.0) - sigma) > 1e-12 * std::max(1.0, std::abs(sigma)))
      throw std::invalid_argument("corrector: sigma_tilde * W''(0) must equal sigma");
  }
};

// g(xi) = a_eps/(eps|ln eps|) + c0 phid (sigma - abar) + sigma_tilde (W''(phi) - W''(0))
inline double build_g(const CorrectorProblem& prob, size_t j) {
  const double phid = prob.profile->eval(prob.xi[j], 1);
  const double wpp0 = prob.pot->Wpp(0.0);
  return prob.a_vals[j] / (prob.eps * prob.lne) +
         prob.c0 * phid * (prob.sigma - prob.abar) +
         prob.sigma_tilde * (prob.pot->Wpp(prob.profile->eval(prob.xi[j])) - wpp0);
}

inline std::vector<double> g_vector(const CorrectorProblem& prob) {
  prob.check();
  std::vector<double> g(prob.xi.size());
  for (size_t j = 0; j < prob.xi.size(); ++j) g[j] = build_g(prob, j);
  return g;
}

// \int f phid dxi realized as natural-spline-in-f against the exact phid;
// linear in the nodal values, so a-bar cancels exactly inside the
// orthogonality identity.
inline double spline_inner_phid(const std::vector<double>& xi, const std::vector<double>& f,
                                const LayerProfile& phi) {
  CubicSpline s(xi, f);
  return integrate([&](double x) { return s(x) * phi.eval(x, 1); }, xi.front(), xi.back(), 1e-12);
}

inline double abar_from_nodes(const std::vector<double>& xi, const std::vector<double>& a_vals,
                              const LayerProfile& phi, double eps) {
  return spline_inner_phid(xi, a_vals, phi) / (eps * std::abs(std::log(eps)));
}

inline double orthogonality_residual(const CorrectorProblem& prob) {
  return std::abs(spline_inner_phid(prob.xi, g_vector(prob), *prob.profile));
}

struct CorrectorSolution {
  std::vector<double> xi, psi;
  double lambda = 0.0;            // Lagrange multiplier of the bordered solve
  double constraint_residual = 0.0;  // discrete \int psi phid
  double eq_residual = 0.0;          // sup |L psi - g| on the inner half-grid
};

// Dense discretization of L = -C_n I_1 + W''(phi), shared across frozen
// points: only the right-hand side changes between solves.
class CorrectorOperator {
 public:
  CorrectorOperator(const LayerProfile& profile, const Potential& pot, double Cn,
                    double Xi = 100.0, int m = 1200)
      : profile_(&profile), pot_(&pot), Cn_(Cn) {
    xi_ = sinh_grid(Xi, m);
    const int n = static_cast<int>(xi_.size());
    w_.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double lo = (j == 0) ? xi_[0] : 0.5 * (xi_[j - 1] + xi_[j]);
      double hi = (j == n - 1) ? xi_[n - 1] : 0.5 * (xi_[j] + xi_[j + 1]);
      w_[j] = hi - lo;
    }
    phid_.resize(n);
    for (int j = 0; j < n; ++j) phid_[j] = profile.eval(xi_[j], 1);

    // decay closure: psi -> 0 beyond the window.  The raw collocation rows are
    // kept as built: averaging with the transpose (a tempting symmetrization)
    // perturbs them at leading order on a graded grid and wrecks the kernel.
    // Doubled panel counts: the kernel residual is quadrature-limited at the
    // fine grids this operator runs on.
    I1Matrix K = build_i1_matrix(xi_, LineField::Tail::zero, 0.0, 192, 480);
    A_ = std::move(K.A);

    L_ = -Cn_ * A_;
    for (int j = 0; j < n; ++j) L_(j, j) += pot.Wpp(profile.eval(xi_[j]));

    Eigen::MatrixXd B(n + 1, n + 1);
    B.topLeftCorner(n, n) = L_;
    for (int j = 0; j < n; ++j) {
      B(j, n) = phid_[j];            // Lagrange column
      B(n, j) = w_[j] * phid_[j];    // constraint row
    }
    B(n, n) = 0.0;
    lu_.compute(B);
    // kernel mis-capture guard: the bordered matrix must be solidly invertible
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    e(n) = 1.0;
    if (!lu_.solve(e).allFinite())
      throw std::runtime_error("corrector: singular bordered system");
  }

  const std::vector<double>& grid() const { return xi_; }
  const std::vector<double>& weights() const { return w_; }
  const Eigen::MatrixXd& matrix() const { return L_; }
  const Eigen::MatrixXd& i1_matrix() const { return A_; }

  std::vector<double> apply(const std::vector<double>& v) const {
    const int n = static_cast<int>(xi_.size());
    Eigen::Map<const Eigen::VectorXd> vv(v.data(), n);
    Eigen::VectorXd r = L_ * vv;
    return {r.data(), r.data() + n};
  }

  // sup |L phid| on the inner half-window (phid spans the kernel)
  double kernel_check(const std::vector<double>* perturb = nullptr) const {
    std::vector<double> v = phid_;
    if (perturb)
      for (size_t j = 0; j < v.size(); ++j) v[j] += (*perturb)[j];
    std::vector<double> r = apply(v);
    double sup = 0.0;
    const double win = 0.5 * xi_.back();
    for (size_t j = 0; j < xi_.size(); ++j)
      if (std::abs(xi_[j]) <= win) sup = std::max(sup, std::abs(r[j]));
    return sup;
  }

  CorrectorSolution solve(const std::vector<double>& g) const {
    const int n = static_cast<int>(xi_.size());
    Eigen::VectorXd rhs(n + 1);
    for (int j = 0; j < n; ++j) rhs(j) = g[j];
    rhs(n) = 0.0;
    Eigen::VectorXd sol = lu_.solve(rhs);
    CorrectorSolution out;
    out.xi = xi_;
    out.psi.assign(sol.data(), sol.data() + n);
    out.lambda = sol(n);
    double cres = 0.0;
    for (int j = 0; j < n; ++j) cres += w_[j] * out.psi[j] * phid_[j];
    out.constraint_residual = std::abs(cres);
    // L psi - g = -lambda phid exactly, up to LU roundoff
    std::vector<double> Lp = apply(out.psi);
    double sup = 0.0;
    const double win = 0.5 * xi_.back();
    for (int j = 0; j < n; ++j)
      if (std::abs(xi_[j]) <= win) sup = std::max(sup, std::abs(Lp[j] - g[j]));
    out.eq_residual = sup;
    return out;
  }

  // Fredholm precondition enforced before solving a physical problem
  CorrectorSolution solve_problem(const CorrectorProblem& prob, double ortho_gate = 1e-5) const {
    double res = orthogonality_residual(prob);
    if (res > ortho_gate)
      throw std::runtime_error("corrector: orthogonality residual " + std::to_string(res) +
                               " exceeds the Fredholm gate");
    return solve(g_vector(prob));
  }

 private:
  const LayerProfile* profile_;
  const Potential* pot_;
  double Cn_;
  std::vector<double> xi_, w_, phid_;
  Eigen::MatrixXd A_, L_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// Sample a_eps on a coarse graded set and spline onto the operator grid;
// a_eps is smooth and slowly varying in xi, the solve grid is not.
inline CorrectorProblem make_frozen_problem(const CorrectorOperator& op,
                                            const LayerProfile& profile, const Potential& pot,
                                            const DerivedConstants& dc, double eps, double sigma,
                                            const AepsParams& aprm, Vec2 x,
                                            int coarse_m = 120) {
  CorrectorProblem prob;
  prob.eps = eps;
  prob.sigma = sigma;
  prob.sigma_tilde = sigma / pot.Wpp(0.0);
  prob.lne = std::abs(std::log(eps));
  prob.profile = &profile;
  prob.pot = &pot;
  prob.Cn = dc.Cn;
  prob.c0 = dc.c0;
  prob.xi = op.grid();

  std::vector<double> cx = sinh_grid(prob.xi.back(), coarse_m);
  std::vector<double> ca(cx.size());
  for (size_t j = 0; j < cx.size(); ++j) ca[j] = a_eps(aprm, cx[j], x);
  CubicSpline sa(cx, ca);
  prob.a_vals.resize(prob.xi.size());
  for (size_t j = 0; j < prob.xi.size(); ++j) prob.a_vals[j] = sa(prob.xi[j]);
  prob.abar = abar_from_nodes(prob.xi, prob.a_vals, profile, eps);
  return prob;
}

}  // namespace fac
