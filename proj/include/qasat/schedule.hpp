#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace qasat {

struct SchedulePoint {
  double s;
  double a;
  double b;
};

/// Control functions of H(s) = A(s) H_I + B(s) H_P. Either the linear ramp
/// A = 1 - s, B = s, or a table sampled at increasing s covering [0, 1] with
/// linear interpolation in between.
class Schedule {
 public:
  enum class Kind { linear, tabulated };

  static Schedule linear() { return Schedule(); }

  static Schedule tabulated(std::vector<SchedulePoint> points) {
    if (points.size() < 2) throw InputError("a tabulated schedule needs at least two points");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i].s > points[i - 1].s)) throw InputError("schedule s values must increase strictly");
    if (points.front().s != 0.0 || points.back().s != 1.0)
      throw InputError("schedule must start at s=0 and end at s=1");
    Schedule out;
    out.kind_ = Kind::tabulated;
    out.points_ = std::move(points);
    out.validate();
    return out;
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<SchedulePoint>& points() const noexcept { return points_; }

  double a(double s) const { return kind_ == Kind::linear ? 1.0 - s : interpolate(s, &SchedulePoint::a); }
  double b(double s) const { return kind_ == Kind::linear ? s : interpolate(s, &SchedulePoint::b); }

  /// Transverse term dominates at s=0 and the problem term at s=1.
  void validate() const {
    const double a0 = a(0.0), b0 = b(0.0), a1 = a(1.0), b1 = b(1.0);
    if (!(b0 == 0.0 || a0 > 10.0 * b0)) throw InputError("schedule: A(0) must dominate B(0)");
    if (!(a1 == 0.0 || b1 > 10.0 * a1)) throw InputError("schedule: B(1) must dominate A(1)");
  }

  /// Largest |dA/ds| and |dB/ds| over [0, 1].
  std::pair<double, double> max_slopes() const {
    if (kind_ == Kind::linear) return {1.0, 1.0};
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const double ds = points_[i].s - points_[i - 1].s;
      sa = std::max(sa, std::abs(points_[i].a - points_[i - 1].a) / ds);
      sb = std::max(sb, std::abs(points_[i].b - points_[i - 1].b) / ds);
    }
    return {sa, sb};
  }

 private:
  double interpolate(double s, double SchedulePoint::*field) const {
    if (s < 0.0 || s > 1.0) throw InputError("schedule evaluated outside [0, 1]");
    auto hi = std::lower_bound(points_.begin(), points_.end(), s,
                               [](const SchedulePoint& p, double v) { return p.s < v; });
    if (hi == points_.begin()) return (*hi).*field;
    auto lo = hi - 1;
    const double w = (s - lo->s) / (hi->s - lo->s);
    return (*lo).*field + w * ((*hi).*field - (*lo).*field);
  }

  Kind kind_ = Kind::linear;
  std::vector<SchedulePoint> points_;
};

}  // namespace qasat
