#include "esr/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace esr {

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// b - b_hat
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// continuous extension: y(t0 + s h) = y0 + h sum_i k_i (P[i][0] s + P[i][1] s^2 + P[i][2] s^3 + P[i][3] s^4)
constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
};

// PI controller constants (Hairer-Wanner DOPRI5 defaults)
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMinShrink = 0.2;
constexpr double kMaxGrow = 10.0;

}  // namespace

Dopri5::Dopri5(Rhs rhs, double t0, Vector y0, Options options)
    : rhs_(std::move(rhs)), opt_(options), t_(t0), y_(std::move(y0)), t_prev_(t0), y_prev_(y_) {
  if (!(opt_.abs_tol > 0.0) || !(opt_.rel_tol >= 0.0)) throw std::invalid_argument("Dopri5: tolerances must be positive");
  if (!y_.allFinite()) throw std::invalid_argument("Dopri5: non-finite initial state");
  for (auto& k : k_) k.resize(y_.size());
  for (auto& k : stage_) k.resize(y_.size());
  eval(t_, y_, k_[0]);
  h_ = opt_.initial_step > 0.0 ? opt_.initial_step : initial_step();
}

void Dopri5::eval(double t, const Vector& y, Vector& out) {
  rhs_(t, y, out);
  ++evaluations_;
}

double Dopri5::error_norm(const Vector& err, const Vector& y_new) const {
  const Vector scale =
      (opt_.abs_tol + opt_.rel_tol * y_.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
  return std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / static_cast<double>(err.size()));
}

double Dopri5::initial_step() const {
  // Hairer-Norsett-Wanner starting step heuristic
  const Vector scale = (opt_.abs_tol + opt_.rel_tol * y_.cwiseAbs().array()).matrix();
  const double n = static_cast<double>(y_.size());
  const double d0 = std::sqrt(y_.cwiseQuotient(scale).squaredNorm() / n);
  const double d1 = std::sqrt(k_[0].cwiseQuotient(scale).squaredNorm() / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  const Vector y1 = y_ + h0 * k_[0];
  Vector f1(y_.size());
  rhs_(t_ + h0, y1, f1);
  const double d2 = std::sqrt((f1 - k_[0]).cwiseQuotient(scale).squaredNorm() / n) / h0;
  const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / std::max(d1, d2), 0.2);
  double h = std::min(100.0 * h0, h1);
  if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
  return h;
}

void Dopri5::step(double t_limit) {
  if (!(t_limit > t_)) throw std::invalid_argument("Dopri5::step: limit must lie ahead of the current time");
  const Vector& f0 = k_[0];
  Vector tmp(y_.size());
  Vector y_new(y_.size());
  Vector err(y_.size());
  for (;;) {
    if (accepted_ + rejected_ >= opt_.max_steps)
      throw IntegratorError(fmt::format("Dopri5: step budget of {} exhausted at t = {}", opt_.max_steps, t_), t_, y_);
    double h = std::min(h_, t_limit - t_);
    if (opt_.max_step > 0.0) h = std::min(h, opt_.max_step);
    const double h_min = opt_.min_step_factor * std::max(1.0, std::abs(t_));
    if (h < h_min && t_limit - t_ > h_min)
      throw IntegratorError(fmt::format("Dopri5: step size underflow (h = {:.3e}) at t = {}", h, t_), t_, y_);

    tmp = y_ + h * a21 * f0;
    eval(t_ + c2 * h, tmp, k_[1]);
    tmp = y_ + h * (a31 * f0 + a32 * k_[1]);
    eval(t_ + c3 * h, tmp, k_[2]);
    tmp = y_ + h * (a41 * f0 + a42 * k_[1] + a43 * k_[2]);
    eval(t_ + c4 * h, tmp, k_[3]);
    tmp = y_ + h * (a51 * f0 + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
    eval(t_ + c5 * h, tmp, k_[4]);
    tmp = y_ + h * (a61 * f0 + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]);
    eval(t_ + h, tmp, k_[5]);
    y_new = y_ + h * (b1 * f0 + b3 * k_[2] + b4 * k_[3] + b5 * k_[4] + b6 * k_[5]);
    eval(t_ + h, y_new, k_[6]);
    err = h * (e1 * f0 + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);

    const double en = y_new.allFinite() ? error_norm(err, y_new) : std::numeric_limits<double>::infinity();
    if (en <= 1.0) {
      const double fac = std::pow(en, kExpo) / std::pow(err_prev_, kBeta);
      const double grow = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMinShrink);
      err_prev_ = std::max(en, 1e-4);
      for (int i = 0; i < 7; ++i) stage_[i] = k_[i];
      h_last_ = h;
      t_prev_ = t_;
      y_prev_ = y_;
      t_ = (t_limit - (t_ + h) <= 1e-15 * std::max(1.0, std::abs(t_limit))) ? t_limit : t_ + h;
      y_ = y_new;
      k_[0] = k_[6];
      h_ = h / grow;
      ++accepted_;
      return;
    }
    ++rejected_;
    const double shrink = std::isfinite(en) ? std::min(1.0 / kMinShrink, std::pow(en, kExpo) / kSafety) : 1.0 / kMinShrink;
    h_ = h / shrink;
  }
}

Vector Dopri5::restep(double t) {
  if (accepted_ == 0) return y_;
  const double h = t - t_prev_;
  if (h == 0.0) return y_prev_;
  if (t == t_) return y_;
  const Vector& f0 = stage_[0];
  Vector k[6];
  for (auto& v : k) v.resize(y_.size());
  Vector tmp = y_prev_ + h * a21 * f0;
  eval(t_prev_ + c2 * h, tmp, k[1]);
  tmp = y_prev_ + h * (a31 * f0 + a32 * k[1]);
  eval(t_prev_ + c3 * h, tmp, k[2]);
  tmp = y_prev_ + h * (a41 * f0 + a42 * k[1] + a43 * k[2]);
  eval(t_prev_ + c4 * h, tmp, k[3]);
  tmp = y_prev_ + h * (a51 * f0 + a52 * k[1] + a53 * k[2] + a54 * k[3]);
  eval(t_prev_ + c5 * h, tmp, k[4]);
  tmp = y_prev_ + h * (a61 * f0 + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
  eval(t_prev_ + h, tmp, k[5]);
  return y_prev_ + h * (b1 * f0 + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
}

Vector Dopri5::dense(double t) const {
  if (accepted_ == 0) return y_;
  const double s = (t - t_prev_) / h_last_;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  Vector acc = Vector::Zero(y_.size());
  for (int i = 0; i < 7; ++i) {
    const double w = P[i][0] * s + P[i][1] * s2 + P[i][2] * s3 + P[i][3] * s4;
    if (w != 0.0) acc += w * stage_[i];
  }
  return y_prev_ + h_last_ * acc;
}

}  // namespace esr
