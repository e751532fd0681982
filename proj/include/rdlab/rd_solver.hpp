#ifndef RDLAB_RD_SOLVER_HPP
#define RDLAB_RD_SOLVER_HPP

#include <optional>
#include <vector>

#include "rdlab/prob.hpp"

namespace rdlab {

// One point on the rate-distortion curve. test_channel[x][y] is the
// conditional probability of output y given source letter x; rows for
// zero-probability source letters are uniform placeholders.
struct RdPoint {
  double distortion_target = 0.0;
  double rate_bits = 0.0;
  std::vector<std::vector<double>> test_channel;
  double slope = 0.0;  // Lagrange multiplier dR/dD at the returned point
};

// Feasible distortion interval for a (source, distortion) pair:
// d_min is the best achievable expected distortion, d_max the distortion of
// the best constant reproduction (where the curve hits rate zero).
struct DistortionRange {
  double d_min = 0.0;
  double d_max = 0.0;
};

struct ExponentResult {
  double exponent_bits = 0.0;
  std::optional<JointDistribution> minimizer;  // empty iff infeasible
  double epsilon = 0.0;
  double distortion_target = 0.0;

  bool feasible() const { return minimizer.has_value(); }
};

DistortionRange distortion_range(const Distribution& p_x, const DistortionSpec& d);

// Information rate-distortion function via alternating minimization with a
// slope parameter, bisected to hit the target distortion. The returned rate
// carries a duality-gap certificate <= tol; the returned test channel is
// feasible (expected distortion <= D).
RdPoint rate_distortion(const Distribution& p_x, const DistortionSpec& d, double D,
                        double tol = 1e-4);

std::vector<RdPoint> rd_curve(const Distribution& p_x, const DistortionSpec& d,
                              const std::vector<double>& d_grid, double tol = 1e-4);

// inf over q_ZY of D(q_ZY || p_x q_Y) subject to the Z-marginal lying in the
// inclusive L1 ball of radius eps around p_x and expected distortion <= D,
// where q_Y is the Y-marginal of the optimization variable itself.
// Infeasible constraint sets return +infinity with an empty minimizer.
ExponentResult sanov_exponent(const Distribution& p_x, const Alphabet& y_alphabet,
                              const DistortionSpec& d, double D, double eps,
                              double tol = 1e-4);

// Smallest expected distortion achievable by any joint distribution whose
// Z-marginal lies in the L1 ball of radius eps around p_x. Used for
// feasibility checks; pass eps = 0 for the plain source floor.
double min_ball_distortion(const Distribution& p_x, const DistortionSpec& d, double eps);

}  // namespace rdlab

#endif  // RDLAB_RD_SOLVER_HPP
