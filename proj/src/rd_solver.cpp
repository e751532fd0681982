#include "rdlab/rd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kInf = std::numeric_limits<double>::infinity();

double log2_sum_exp2(const std::vector<double>& log2_terms) {
  double m = -kInf;
  for (double t : log2_terms) m = std::max(m, t);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double t : log2_terms) s += std::exp2(t - m);
  return m + std::log2(s);
}

// Mutual information in bits for source p and channel rows W.
double channel_mi_bits(const std::vector<double>& p,
                       const std::vector<std::vector<double>>& w) {
  const std::size_t nx = p.size(), ny = w[0].size();
  std::vector<double> marginal(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) marginal[y] += p[x] * w[x][y];
  }
  double mi = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] == 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      if (w[x][y] > 0.0 && marginal[y] > 0.0)
        mi += p[x] * w[x][y] * std::log2(w[x][y] / marginal[y]);
    }
  }
  return std::max(mi, 0.0);
}

double channel_distortion(const std::vector<double>& p,
                          const std::vector<std::vector<double>>& w,
                          const DistortionSpec& d) {
  double ed = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (std::size_t y = 0; y < w[x].size(); ++y) ed += p[x] * w[x][y] * d.at(x, y);
  }
  return ed;
}

struct BaPoint {
  std::vector<std::vector<double>> w;  // test channel rows
  double distortion = 0.0;
  double rate_bits = 0.0;
  double lagrangian_lb_bits = 0.0;  // certified lower bound on min_W (I + beta*E d)
};

// Alternating minimization at a fixed slope beta (bits per unit distortion).
// The lower-bound certificate comes from the linearization gap of the convex
// reproduction-marginal objective.
BaPoint ba_fixed_slope(const std::vector<double>& p, const DistortionSpec& d,
                       double beta) {
  const std::size_t nx = p.size(), ny = d.output_alphabet().size();
  std::vector<double> q(ny, 1.0 / static_cast<double>(ny));
  std::vector<std::vector<double>> w(nx, std::vector<double>(ny, 0.0));
  std::vector<double> log2_terms(ny);

  const int max_iters = 30000;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<double> q_next(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      if (p[x] == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) {
        log2_terms[y] = (q[y] > 0.0 ? std::log2(q[y]) : -kInf) - beta * d.at(x, y);
      }
      const double norm = log2_sum_exp2(log2_terms);
      for (std::size_t y = 0; y < ny; ++y) {
        const double v = log2_terms[y] == -kInf ? 0.0 : std::exp2(log2_terms[y] - norm);
        w[x][y] = v;
        q_next[y] += p[x] * v;
      }
    }
    double change = 0.0;
    for (std::size_t y = 0; y < ny; ++y) change += std::abs(q_next[y] - q[y]);
    q.swap(q_next);
    if (change < 1e-14) break;
  }

  // Rebuild rows from the final marginal so the returned channel is the exact
  // minimizer for this q.
  std::vector<double> log2_c(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      log2_terms[y] = (q[y] > 0.0 ? std::log2(q[y]) : -kInf) - beta * d.at(x, y);
    }
    const double norm = log2_sum_exp2(log2_terms);
    log2_c[x] = norm;
    for (std::size_t y = 0; y < ny; ++y)
      w[x][y] = log2_terms[y] == -kInf ? 0.0 : std::exp2(log2_terms[y] - norm);
  }

  BaPoint out;
  out.w = w;
  out.distortion = channel_distortion(p, w, d);
  out.rate_bits = channel_mi_bits(p, w);

  // F(q) = -sum_x p(x) log2 c_q(x) is convex in q and its minimum equals
  // min_W (I + beta E d). A Frank-Wolfe linearization gives the certified
  // lower bound F(q) - gap.
  double f_bits = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] > 0.0) f_bits -= p[x] * log2_c[x];
  }
  std::vector<double> grad(ny, 0.0);  // dF/dq_y in bits
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] == 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      grad[y] -= p[x] * std::exp2(-beta * d.at(x, y) - log2_c[x]) / kLn2;
    }
  }
  double inner = 0.0, gmin = kInf;
  for (std::size_t y = 0; y < ny; ++y) {
    inner += q[y] * grad[y];
    gmin = std::min(gmin, grad[y]);
  }
  out.lagrangian_lb_bits = f_bits - (inner - gmin);
  return out;
}

std::size_t best_constant_output(const std::vector<double>& p, const DistortionSpec& d) {
  const std::size_t ny = d.output_alphabet().size();
  std::size_t best = 0;
  double best_cost = kInf;
  for (std::size_t y = 0; y < ny; ++y) {
    double cost = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) cost += p[x] * d.at(x, y);
    if (cost < best_cost) {
      best_cost = cost;
      best = y;
    }
  }
  return best;
}

void check_spec_matches(const Distribution& p_x, const DistortionSpec& d) {
  if (p_x.alphabet() != d.input_alphabet())
    throw std::invalid_argument("rd_solver: source and distortion input alphabets differ");
}

}  // namespace

DistortionRange distortion_range(const Distribution& p_x, const DistortionSpec& d) {
  check_spec_matches(p_x, d);
  DistortionRange r;
  for (std::size_t x = 0; x < p_x.size(); ++x) {
    double row_min = kInf;
    for (std::size_t y = 0; y < d.output_alphabet().size(); ++y)
      row_min = std::min(row_min, d.at(x, y));
    r.d_min += p_x[x] * row_min;
  }
  const std::size_t y_star = best_constant_output(p_x.probs(), d);
  r.d_max = 0.0;
  for (std::size_t x = 0; x < p_x.size(); ++x) r.d_max += p_x[x] * d.at(x, y_star);
  r.d_max = std::max(r.d_max, r.d_min);
  return r;
}

RdPoint rate_distortion(const Distribution& p_x, const DistortionSpec& d, double D,
                        double tol) {
  check_spec_matches(p_x, d);
  if (!(tol > 0.0)) throw std::invalid_argument("rate_distortion: tol must be > 0");
  const DistortionRange range = distortion_range(p_x, d);
  if (D < range.d_min - 1e-12)
    throw InfeasibleError("rate_distortion: D below the distortion floor");
  const std::size_t nx = p_x.size(), ny = d.output_alphabet().size();

  if (D >= range.d_max) {
    RdPoint pt;
    pt.distortion_target = D;
    pt.rate_bits = 0.0;
    pt.slope = 0.0;
    const std::size_t y_star = best_constant_output(p_x.probs(), d);
    pt.test_channel.assign(nx, std::vector<double>(ny, 0.0));
    for (std::size_t x = 0; x < nx; ++x) pt.test_channel[x][y_star] = 1.0;
    return pt;
  }

  const std::vector<double>& p = p_x.probs();

  // Bracket: slope 0 sits at (d_max, rate 0); grow beta until the distortion
  // side crosses the target.
  double beta_lo = 0.0;
  BaPoint lo;
  lo.distortion = range.d_max;
  lo.rate_bits = 0.0;
  lo.lagrangian_lb_bits = 0.0;
  {
    const std::size_t y_star = best_constant_output(p, d);
    lo.w.assign(nx, std::vector<double>(ny, 0.0));
    for (std::size_t x = 0; x < nx; ++x) lo.w[x][y_star] = 1.0;
  }

  double beta_hi = 1.0;
  BaPoint hi = ba_fixed_slope(p, d, beta_hi);
  int doublings = 0;
  while (hi.distortion > D && doublings < 60) {
    beta_lo = beta_hi;
    lo = hi;
    beta_hi *= 2.0;
    hi = ba_fixed_slope(p, d, beta_hi);
    ++doublings;
  }

  auto mixed_point = [&](const BaPoint& a, const BaPoint& b) {
    // Convex combination of the bracket channels hitting the target exactly.
    // a has distortion >= D, b has distortion <= D.
    double s = 0.0;
    if (a.distortion > b.distortion)
      s = (D - b.distortion) / (a.distortion - b.distortion);
    s = std::clamp(s, 0.0, 1.0);
    std::vector<std::vector<double>> w(nx, std::vector<double>(ny, 0.0));
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) w[x][y] = s * a.w[x][y] + (1.0 - s) * b.w[x][y];
    }
    return w;
  };

  double lower_bound = 0.0;  // R(D) >= lb(beta) - beta * D, maximized over visited betas
  auto update_lb = [&](double beta, const BaPoint& pt) {
    lower_bound = std::max(lower_bound, pt.lagrangian_lb_bits - beta * D);
  };
  update_lb(beta_hi, hi);
  if (beta_lo > 0.0) update_lb(beta_lo, lo);

  std::vector<std::vector<double>> w_best = mixed_point(lo, hi);
  double rate_best = channel_mi_bits(p, w_best);

  for (int iter = 0; iter < 200 && rate_best - lower_bound > tol * 0.98; ++iter) {
    const double beta_mid = 0.5 * (beta_lo + beta_hi);
    const BaPoint mid = ba_fixed_slope(p, d, beta_mid);
    update_lb(beta_mid, mid);
    if (mid.distortion >= D) {
      beta_lo = beta_mid;
      lo = mid;
    } else {
      beta_hi = beta_mid;
      hi = mid;
    }
    w_best = mixed_point(lo, hi);
    rate_best = channel_mi_bits(p, w_best);
  }

  RdPoint pt;
  pt.distortion_target = D;
  pt.rate_bits = std::max(rate_best, 0.0);
  pt.test_channel = w_best;
  pt.slope = -beta_hi;
  // Zero-probability source rows carry no information; pin them to the best
  // constant output so every row is a valid distribution.
  const std::size_t y_star = best_constant_output(p, d);
  for (std::size_t x = 0; x < nx; ++x) {
    double row = std::accumulate(pt.test_channel[x].begin(), pt.test_channel[x].end(), 0.0);
    if (row <= 0.0) pt.test_channel[x][y_star] = 1.0;
  }
  return pt;
}

std::vector<RdPoint> rd_curve(const Distribution& p_x, const DistortionSpec& d,
                              const std::vector<double>& d_grid, double tol) {
  std::vector<RdPoint> out;
  out.reserve(d_grid.size());
  for (double D : d_grid) out.push_back(rate_distortion(p_x, d, D, tol));
  return out;
}

double min_ball_distortion(const Distribution& p_x, const DistortionSpec& d, double eps) {
  check_spec_matches(p_x, d);
  const std::size_t nx = p_x.size();
  std::vector<double> row_min(nx, kInf);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < d.output_alphabet().size(); ++y)
      row_min[x] = std::min(row_min[x], d.at(x, y));
  }
  std::vector<double> m = p_x.probs();
  // Move up to eps/2 of mass from the most expensive letters to the cheapest.
  std::size_t target = 0;
  for (std::size_t x = 1; x < nx; ++x) {
    if (row_min[x] < row_min[target]) target = x;
  }
  std::vector<std::size_t> order(nx);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return row_min[a] > row_min[b]; });
  double budget = eps / 2.0;
  for (std::size_t x : order) {
    if (x == target || budget <= 0.0) continue;
    if (row_min[x] <= row_min[target]) break;
    const double delta = std::min(m[x], budget);
    m[x] -= delta;
    m[target] += delta;
    budget -= delta;
  }
  double cost = 0.0;
  for (std::size_t x = 0; x < nx; ++x) cost += m[x] * row_min[x];
  return cost;
}

namespace {

// --- Sanov exponent solver ---
//
// Minimizes f(q) = D(q || p (x) q_Y) in nats over the joint simplex, where
// q_Y is q's own column marginal, subject to
//   c1(q) = sum q d - D <= 0
//   c2(q) = ||rowsum(q) - p||_1 - eps <= 0.
// Phase 1 runs exponentiated gradient descent on an augmented-Lagrangian
// penalty (the L1 term Huber-smoothed on a shrinking schedule). Phase 2
// restores exact feasibility by cyclic projection and polishes with
// projected gradient steps that are only accepted when they improve the
// objective at a feasible point.

struct SanovProblem {
  std::vector<double> p;                  // source over active rows
  std::vector<std::vector<double>> dmat;  // distortion over active rows
  double D = 0.0;
  double eps = 0.0;
  std::size_t nx = 0, ny = 0;
};

using Mat = std::vector<double>;  // row-major nx*ny

double objective_nats(const SanovProblem& pr, const Mat& q) {
  std::vector<double> qy(pr.ny, 0.0);
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) qy[y] += q[x * pr.ny + y];
  }
  double f = 0.0;
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) {
      const double v = q[x * pr.ny + y];
      if (v <= 0.0) continue;
      const double ref = pr.p[x] * qy[y];
      if (ref <= 0.0) return kInf;
      f += v * std::log(v / ref);
    }
  }
  return std::max(f, 0.0);
}

void objective_grad_nats(const SanovProblem& pr, const Mat& q, Mat& grad) {
  std::vector<double> qy(pr.ny, 0.0);
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) qy[y] += q[x * pr.ny + y];
  }
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) {
      const double v = std::max(q[x * pr.ny + y], 1e-300);
      const double ref = std::max(pr.p[x] * qy[y], 1e-300);
      grad[x * pr.ny + y] = std::log(v / ref);
    }
  }
}

double distortion_of(const SanovProblem& pr, const Mat& q) {
  double s = 0.0;
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) s += q[x * pr.ny + y] * pr.dmat[x][y];
  }
  return s;
}

double marginal_l1(const SanovProblem& pr, const Mat& q) {
  double s = 0.0;
  for (std::size_t x = 0; x < pr.nx; ++x) {
    double row = 0.0;
    for (std::size_t y = 0; y < pr.ny; ++y) row += q[x * pr.ny + y];
    s += std::abs(row - pr.p[x]);
  }
  return s;
}

bool is_feasible(const SanovProblem& pr, const Mat& q, double slack) {
  return distortion_of(pr, q) <= pr.D + slack && marginal_l1(pr, q) <= pr.eps + slack;
}

// Euclidean projection of v onto the probability simplex.
void project_simplex(Mat& v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      theta = t;
      k = i + 1;
    }
  }
  (void)k;
  for (double& x : v) x = std::max(x - theta, 0.0);
}

// Euclidean projection onto { q : sum q d <= D }.
void project_halfspace(const SanovProblem& pr, Mat& q) {
  double excess = distortion_of(pr, q) - pr.D;
  if (excess <= 0.0) return;
  double norm2 = 0.0;
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) norm2 += pr.dmat[x][y] * pr.dmat[x][y];
  }
  if (norm2 <= 0.0) return;
  const double step = excess / norm2;
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) q[x * pr.ny + y] -= step * pr.dmat[x][y];
  }
}

// Euclidean projection onto { q : ||rowsum(q) - p||_1 <= eps }; the row
// correction spreads uniformly over the columns.
void project_marginal_ball(const SanovProblem& pr, Mat& q) {
  std::vector<double> w(pr.nx, 0.0);
  for (std::size_t x = 0; x < pr.nx; ++x) {
    double row = 0.0;
    for (std::size_t y = 0; y < pr.ny; ++y) row += q[x * pr.ny + y];
    w[x] = row - pr.p[x];
  }
  double l1 = 0.0;
  for (double v : w) l1 += std::abs(v);
  if (l1 <= pr.eps) return;
  // Soft-threshold the deviation vector onto the L1 ball of radius eps.
  std::vector<double> mag(pr.nx);
  for (std::size_t x = 0; x < pr.nx; ++x) mag[x] = std::abs(w[x]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t i = 0; i < pr.nx; ++i) {
    cum += mag[i];
    const double t = (cum - pr.eps) / static_cast<double>(i + 1);
    if (mag[i] - t > 0.0) tau = t;
  }
  for (std::size_t x = 0; x < pr.nx; ++x) {
    const double target = std::copysign(std::max(std::abs(w[x]) - tau, 0.0), w[x]);
    const double delta = (target - w[x]) / static_cast<double>(pr.ny);
    for (std::size_t y = 0; y < pr.ny; ++y) q[x * pr.ny + y] += delta;
  }
}

// Dykstra's alternating projection onto the intersection of the simplex, the
// distortion halfspace, and the marginal ball.
void project_feasible(const SanovProblem& pr, Mat& q, int cycles = 120) {
  const std::size_t sz = q.size();
  Mat inc1(sz, 0.0), inc2(sz, 0.0), inc3(sz, 0.0);
  Mat before(sz);
  for (int c = 0; c < cycles; ++c) {
    for (std::size_t i = 0; i < sz; ++i) q[i] += inc1[i];
    before = q;
    project_simplex(q);
    for (std::size_t i = 0; i < sz; ++i) inc1[i] = before[i] - q[i];

    for (std::size_t i = 0; i < sz; ++i) q[i] += inc2[i];
    before = q;
    project_halfspace(pr, q);
    for (std::size_t i = 0; i < sz; ++i) inc2[i] = before[i] - q[i];

    for (std::size_t i = 0; i < sz; ++i) q[i] += inc3[i];
    before = q;
    project_marginal_ball(pr, q);
    for (std::size_t i = 0; i < sz; ++i) inc3[i] = before[i] - q[i];

    if (is_feasible(pr, q, 1e-14)) {
      double total = 0.0;
      bool nonneg = true;
      for (double v : q) {
        total += v;
        nonneg = nonneg && v >= 0.0;
      }
      if (nonneg && std::abs(total - 1.0) < 1e-12) break;
    }
  }
  // Final cleanup: clip and renormalize, then nudge inside the constraints if
  // the cleanup pushed anything out.
  double total = 0.0;
  for (double& v : q) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (total > 0.0) {
    for (double& v : q) v /= total;
  }
}

// Strictly feasible anchor: greedy marginal paired with per-row cheapest
// columns. Used to pull near-feasible iterates inside the constraint set.
Mat feasible_anchor(const SanovProblem& pr) {
  std::vector<std::size_t> best_col(pr.nx, 0);
  std::vector<double> row_min(pr.nx, kInf);
  for (std::size_t x = 0; x < pr.nx; ++x) {
    for (std::size_t y = 0; y < pr.ny; ++y) {
      if (pr.dmat[x][y] < row_min[x]) {
        row_min[x] = pr.dmat[x][y];
        best_col[x] = y;
      }
    }
  }
  std::vector<double> m = pr.p;
  std::size_t target = 0;
  for (std::size_t x = 1; x < pr.nx; ++x) {
    if (row_min[x] < row_min[target]) target = x;
  }
  std::vector<std::size_t> order(pr.nx);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return row_min[a] > row_min[b]; });
  double budget = pr.eps / 2.0;
  for (std::size_t x : order) {
    if (x == target || budget <= 0.0) continue;
    if (row_min[x] <= row_min[target]) break;
    const double delta = std::min(m[x], budget);
    m[x] -= delta;
    m[target] += delta;
    budget -= delta;
  }
  Mat q(pr.nx * pr.ny, 0.0);
  for (std::size_t x = 0; x < pr.nx; ++x) q[x * pr.ny + best_col[x]] = m[x];
  return q;
}

Mat eg_phase(const SanovProblem& pr, Mat q) {
  const std::size_t sz = pr.nx * pr.ny;
  double lambda1 = 0.0, lambda2 = 0.0;
  double mu = 4.0;
  double delta = 1e-3;  // Huber smoothing width for the L1 constraint
  Mat grad(sz, 0.0);

  auto penalized = [&](const Mat& v) {
    const double f = objective_nats(pr, v);
    if (f == kInf) return kInf;
    const double c1 = distortion_of(pr, v) - pr.D;
    double c2 = -pr.eps;
    for (std::size_t x = 0; x < pr.nx; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < pr.ny; ++y) row += v[x * pr.ny + y];
      const double dev = row - pr.p[x];
      c2 += std::sqrt(dev * dev + delta * delta) - delta;
    }
    const double a1 = std::max(0.0, lambda1 / mu + c1);
    const double a2 = std::max(0.0, lambda2 / mu + c2);
    return f + 0.5 * mu * (a1 * a1 + a2 * a2) -
           (lambda1 * lambda1 + lambda2 * lambda2) / (2.0 * mu);
  };

  double eta = 0.5;
  for (int outer = 0; outer < 40; ++outer) {
    double current = penalized(q);
    for (int inner = 0; inner < 1200; ++inner) {
      objective_grad_nats(pr, q, grad);
      const double c1 = distortion_of(pr, q) - pr.D;
      const double lam1_eff = mu * std::max(0.0, lambda1 / mu + c1);
      double c2 = -pr.eps;
      std::vector<double> hprime(pr.nx, 0.0);
      for (std::size_t x = 0; x < pr.nx; ++x) {
        double row = 0.0;
        for (std::size_t y = 0; y < pr.ny; ++y) row += q[x * pr.ny + y];
        const double dev = row - pr.p[x];
        const double root = std::sqrt(dev * dev + delta * delta);
        c2 += root - delta;
        hprime[x] = dev / root;
      }
      const double lam2_eff = mu * std::max(0.0, lambda2 / mu + c2);
      for (std::size_t x = 0; x < pr.nx; ++x) {
        for (std::size_t y = 0; y < pr.ny; ++y) {
          grad[x * pr.ny + y] += lam1_eff * pr.dmat[x][y] + lam2_eff * hprime[x];
        }
      }
      // Multiplicative step with normalization; backtrack on the penalty.
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        Mat trial(sz);
        double gmax = -kInf;
        for (std::size_t i = 0; i < sz; ++i) gmax = std::max(gmax, -eta * grad[i]);
        double total = 0.0;
        for (std::size_t i = 0; i < sz; ++i) {
          trial[i] = q[i] * std::exp(-eta * grad[i] - gmax);
          total += trial[i];
        }
        if (total > 0.0) {
          for (double& v : trial) v /= total;
          const double val = penalized(trial);
          if (val < current - 1e-15) {
            q.swap(trial);
            current = val;
            eta = std::min(eta * 1.25, 64.0);
            accepted = true;
            break;
          }
        }
        eta *= 0.5;
        if (eta < 1e-13) break;
      }
      if (!accepted) break;
    }
    const double c1 = distortion_of(pr, q) - pr.D;
    const double c2 = marginal_l1(pr, q) - pr.eps;
    lambda1 = std::max(0.0, lambda1 + mu * c1);
    lambda2 = std::max(0.0, lambda2 + mu * c2);
    if (c1 > 1e-10 || c2 > 1e-10) mu = std::min(mu * 2.0, 1e9);
    delta = std::max(delta * 0.3, 1e-12);
    eta = std::max(eta, 1e-3);
  }
  return q;
}

// Projected-gradient polish; accepts only feasible, improving steps.
void polish_phase(const SanovProblem& pr, Mat& q, double& best_f) {
  const std::size_t sz = pr.nx * pr.ny;
  Mat grad(sz, 0.0);
  double alpha = 0.05;
  for (int iter = 0; iter < 4000; ++iter) {
    objective_grad_nats(pr, q, grad);
    for (double& g : grad) g = std::clamp(g, -60.0, 60.0);
    bool moved = false;
    while (alpha >= 1e-10) {
      Mat trial = q;
      for (std::size_t i = 0; i < sz; ++i) trial[i] -= alpha * grad[i];
      project_feasible(pr, trial, 40);
      if (is_feasible(pr, trial, 1e-11)) {
        const double f = objective_nats(pr, trial);
        if (f < best_f - 1e-14) {
          q.swap(trial);
          best_f = f;
          alpha = std::min(alpha * 1.3, 1.0);
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) {
      if (alpha < 1e-10) break;
    }
  }
}

}  // namespace

ExponentResult sanov_exponent(const Distribution& p_x, const Alphabet& y_alphabet,
                              const DistortionSpec& d, double D, double eps,
                              double tol) {
  check_spec_matches(p_x, d);
  if (d.output_alphabet() != y_alphabet)
    throw std::invalid_argument("sanov_exponent: distortion output alphabet mismatch");
  if (eps < 0.0) throw std::invalid_argument("sanov_exponent: eps must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("sanov_exponent: tol must be > 0");

  ExponentResult result;
  result.epsilon = eps;
  result.distortion_target = D;

  if (min_ball_distortion(p_x, d, eps) > D + 1e-12) {
    result.exponent_bits = kInf;
    result.minimizer = std::nullopt;
    return result;
  }

  // Rows with zero source probability are forced to zero: any mass there
  // makes the divergence infinite and the ball constraint never requires it.
  const std::size_t full_nx = p_x.size();
  std::vector<std::size_t> active;
  for (std::size_t x = 0; x < full_nx; ++x) {
    if (p_x[x] > 0.0) active.push_back(x);
  }

  SanovProblem pr;
  pr.nx = active.size();
  pr.ny = d.output_alphabet().size();
  pr.D = D;
  pr.eps = eps;
  pr.p.resize(pr.nx);
  pr.dmat.assign(pr.nx, std::vector<double>(pr.ny, 0.0));
  for (std::size_t i = 0; i < pr.nx; ++i) {
    pr.p[i] = p_x[active[i]];
    for (std::size_t y = 0; y < pr.ny; ++y) pr.dmat[i][y] = d.at(active[i], y);
  }

  // Early exit: when the best constant reproduction is affordable, the
  // product distribution p (x) delta_y* has divergence zero.
  {
    std::size_t y_star = 0;
    double best_cost = kInf;
    for (std::size_t y = 0; y < pr.ny; ++y) {
      double cost = 0.0;
      for (std::size_t i = 0; i < pr.nx; ++i) cost += pr.p[i] * pr.dmat[i][y];
      if (cost < best_cost) {
        best_cost = cost;
        y_star = y;
      }
    }
    if (best_cost <= D) {
      std::vector<std::vector<double>> probs(full_nx, std::vector<double>(pr.ny, 0.0));
      for (std::size_t i = 0; i < pr.nx; ++i) probs[active[i]][y_star] = pr.p[i];
      result.exponent_bits = 0.0;
      result.minimizer =
          JointDistribution(p_x.alphabet(), d.output_alphabet(), std::move(probs));
      return result;
    }
  }

  const Mat anchor = feasible_anchor(pr);
  const std::size_t sz = pr.nx * pr.ny;

  std::vector<Mat> inits;
  {
    Mat q(sz, 0.0);
    for (std::size_t i = 0; i < pr.nx; ++i) {
      for (std::size_t y = 0; y < pr.ny; ++y)
        q[i * pr.ny + y] = pr.p[i] / static_cast<double>(pr.ny);
    }
    inits.push_back(q);
    Mat mixed(sz, 0.0);
    for (std::size_t i = 0; i < sz; ++i) mixed[i] = 0.5 * q[i] + 0.5 * anchor[i];
    // Keep the mixed start strictly interior.
    double total = 0.0;
    for (double& v : mixed) {
      v += 1e-9;
      total += v;
    }
    for (double& v : mixed) v /= total;
    inits.push_back(mixed);
  }

  Mat best_q = anchor;
  double best_f = objective_nats(pr, anchor);
  for (const Mat& init : inits) {
    Mat q = eg_phase(pr, init);
    project_feasible(pr, q);
    if (!is_feasible(pr, q, 1e-9)) {
      // Mix toward the anchor until feasible.
      double t_lo = 0.0, t_hi = 1.0;
      for (int i = 0; i < 60; ++i) {
        const double t = 0.5 * (t_lo + t_hi);
        Mat mix(sz);
        for (std::size_t j = 0; j < sz; ++j)
          mix[j] = (1.0 - t) * q[j] + t * anchor[j];
        if (is_feasible(pr, mix, 1e-12)) {
          t_hi = t;
        } else {
          t_lo = t;
        }
      }
      for (std::size_t j = 0; j < sz; ++j)
        q[j] = (1.0 - t_hi) * q[j] + t_hi * anchor[j];
    }
    double f = objective_nats(pr, q);
    polish_phase(pr, q, f);
    if (f < best_f) {
      best_f = f;
      best_q = q;
    }
  }
  (void)tol;

  std::vector<std::vector<double>> probs(full_nx, std::vector<double>(pr.ny, 0.0));
  double total = 0.0;
  for (std::size_t i = 0; i < pr.nx; ++i) {
    for (std::size_t y = 0; y < pr.ny; ++y) {
      const double v = std::max(best_q[i * pr.ny + y], 0.0);
      probs[active[i]][y] = v;
      total += v;
    }
  }
  if (total > 0.0) {
    for (auto& row : probs) {
      for (double& v : row) v /= total;
    }
  }
  result.exponent_bits = std::max(best_f / kLn2, 0.0);
  result.minimizer =
      JointDistribution(p_x.alphabet(), d.output_alphabet(), std::move(probs));
  return result;
}

}  // namespace rdlab
