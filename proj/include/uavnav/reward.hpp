#pragma once

namespace uavnav {

struct RewardParams {
  double beta = 0.5;
  double gui_scale = 5.0;
  double obp_scale = 100.0;

  void validate() const;
};

/// exp(-gui_scale * D^2)
double guidance(double distance, const RewardParams& p);

/// exp(-obp_scale * sigma) - 1
double obstacle_penalty(double sigma, const RewardParams& p);

/// (1 - beta) * guidance + beta * obstacle_penalty
double reward(double distance, double sigma, const RewardParams& p);

/// Bounds of `reward` over all distances and crash depths.
struct RewardRange {
  double lo = 0.0;
  double hi = 0.0;
};
RewardRange reward_range(const RewardParams& p);

}  // namespace uavnav
