#include "uavnav/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavnav/error.hpp"

namespace uavnav {

void RewardParams::validate() const {
  require(std::isfinite(beta), ErrorCode::InvalidArgument, "beta must be finite");
  require(std::isfinite(gui_scale) && gui_scale > 0.0, ErrorCode::InvalidArgument, "gui_scale must be > 0");
  require(std::isfinite(obp_scale) && obp_scale > 0.0, ErrorCode::InvalidArgument, "obp_scale must be > 0");
}

double guidance(double distance, const RewardParams& p) { return std::exp(-p.gui_scale * distance * distance); }

double obstacle_penalty(double sigma, const RewardParams& p) { return std::expm1(-p.obp_scale * sigma); }

double reward(double distance, double sigma, const RewardParams& p) {
  return (1.0 - p.beta) * guidance(distance, p) + p.beta * obstacle_penalty(sigma, p);
}

RewardRange reward_range(const RewardParams& p) {
  // Linear in (guidance, penalty) over [0, 1] x [-1, 0], so the corners bound it.
  RewardRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double g : {0.0, 1.0})
    for (double o : {-1.0, 0.0}) {
      const double v = (1.0 - p.beta) * g + p.beta * o;
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  return r;
}

}  // namespace uavnav
