#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bsymp/errors.hpp"

namespace bsymp::flow {

using State = Eigen::VectorXd;
using Rhs = std::function<void(double, const State&, State&)>;
using Monitor = std::pair<std::string, std::function<double(const State&)>>;

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0;
};

enum class HaltReason { None, StepSizeUnderflow, NonFiniteState, MaxSteps };

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  StepStats stats;
  HaltReason halt = HaltReason::None;
  std::map<std::string, double> monitor_initial;
  std::map<std::string, std::vector<double>> monitor_values;
  std::map<std::string, double> monitor_drift;  // max |value - initial|

  bool completed() const { return halt == HaltReason::None; }
};

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0;  // 0: pick from the span
  double safety = 0.9;
  double max_ratio = 5.0;
  double min_ratio = 0.2;
  long max_steps = 2'000'000;
};

// Dormand-Prince 5(4) embedded pair with a PI step controller.
inline Trajectory integrate_dopri54(const Rhs& rhs, const State& x0, double t0, double t1,
                                    const IntegratorOptions& opts = {},
                                    const std::vector<Monitor>& monitors = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  Trajectory traj;
  const auto n = x0.size();
  State y = x0;
  double t = t0;
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  auto record = [&](double tt, const State& yy) {
    traj.times.push_back(tt);
    traj.states.push_back(yy);
    for (const auto& [name, fn] : monitors) {
      const double v = fn(yy);
      auto [it, fresh] = traj.monitor_initial.try_emplace(name, v);
      traj.monitor_values[name].push_back(v);
      double& drift = traj.monitor_drift[name];
      drift = std::max(fresh ? 0.0 : drift, std::abs(v - it->second));
    }
  };
  record(t, y);
  if (span == 0) return traj;

  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
  rhs(t, y, k1);
  double h = (opts.initial_step > 0 ? opts.initial_step : span / 100.0);
  h = std::min(h, span) * dir;
  double err_prev = 1e-4;

  while (dir * (t1 - t) > 0) {
    if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      traj.halt = HaltReason::StepSizeUnderflow;
      return traj;
    }
    if (traj.stats.accepted + traj.stats.rejected > opts.max_steps) {
      traj.halt = HaltReason::MaxSteps;
      return traj;
    }

    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);  // FSAL
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!ynew.allFinite() || !yerr.allFinite()) {
      traj.stats.rejected++;
      h *= 0.5;
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
        traj.halt = HaltReason::NonFiniteState;
        return traj;
      }
      continue;
    }

    double err2 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      const double q = yerr(i) / scale;
      err2 += q * q;
    }
    const double err = std::sqrt(err2 / static_cast<double>(n));

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;
      traj.stats.accepted++;
      traj.stats.min_step = std::min(traj.stats.min_step, std::abs(h));
      traj.stats.max_step = std::max(traj.stats.max_step, std::abs(h));
      record(t, y);
      // PI controller (safety 0.9, growth capped at max_ratio)
      const double fac = opts.safety * std::pow(std::max(err, 1e-16), -0.17) *
                         std::pow(err_prev, 0.04);
      h *= std::clamp(fac, opts.min_ratio, opts.max_ratio);
      err_prev = std::max(err, 1e-4);
    } else {
      traj.stats.rejected++;
      const double fac = opts.safety * std::pow(err, -0.2);
      h *= std::clamp(fac, 0.1, 1.0);
    }
  }
  return traj;
}

}  // namespace bsymp::flow
