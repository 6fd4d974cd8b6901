#pragma once

#include <cstdint>
#include <vector>

namespace ltm {

/// Per-time threshold vectors for time-varying dynamics.  Times beyond the
/// last supplied entry hold the last vector.
class ThresholdSchedule {
 public:
  static ThresholdSchedule constant(std::vector<std::uint32_t> thresholds) {
    ThresholdSchedule s;
    s.per_time_.push_back(std::move(thresholds));
    return s;
  }

  static ThresholdSchedule table(std::vector<std::vector<std::uint32_t>> per_time) {
    ThresholdSchedule s;
    s.per_time_ = std::move(per_time);
    return s;
  }

  const std::vector<std::uint32_t>& at(std::uint32_t t) const {
    return t < per_time_.size() ? per_time_[t] : per_time_.back();
  }

  /// First time from which the schedule no longer changes.
  std::uint32_t settle_time() const {
    return per_time_.empty() ? 0 : static_cast<std::uint32_t>(per_time_.size() - 1);
  }

  bool empty() const { return per_time_.empty(); }

 private:
  std::vector<std::vector<std::uint32_t>> per_time_;
};

}  // namespace ltm
