#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "permanental/errors.hpp"

namespace permanental {

using json = nlohmann::json;

// A scalar function of time with a serializable descriptor. Built-in kinds
// carry analytic second derivatives; custom callables fall back to finite
// differences and cannot be written to JSON.
class ScalarFn {
 public:
  enum class Kind { zero, constant, exp, power, affine_power, custom };

  static ScalarFn zero() { return ScalarFn(Kind::zero, 0, 0, 0); }
  static ScalarFn constant(double c) { return ScalarFn(Kind::constant, c, 0, 0); }
  // c e^{r t}
  static ScalarFn exponential(double c, double r) { return ScalarFn(Kind::exp, c, r, 0); }
  // c t^p for t >= 0
  static ScalarFn power(double c, double p) { return ScalarFn(Kind::power, c, p, 0); }
  // q + c t^p for t >= 0
  static ScalarFn affine_power(double q, double c, double p) {
    return ScalarFn(Kind::affine_power, c, p, q);
  }
  static ScalarFn custom(std::function<double(double)> fn, std::string label = "custom") {
    ScalarFn f(Kind::custom, 0, 0, 0);
    f.fn_ = std::make_shared<std::function<double(double)>>(std::move(fn));
    f.label_ = std::move(label);
    return f;
  }

  Kind kind() const { return kind_; }
  bool serializable() const { return kind_ != Kind::custom; }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::zero: return 0.0;
      case Kind::constant: return c_;
      case Kind::exp: return c_ * std::exp(p_ * t);
      case Kind::power: return c_ * std::pow(t, p_);
      case Kind::affine_power: return q_ + c_ * std::pow(t, p_);
      case Kind::custom: return (*fn_)(t);
    }
    return 0.0;
  }

  double second_derivative(double t) const {
    switch (kind_) {
      case Kind::zero:
      case Kind::constant: return 0.0;
      case Kind::exp: return c_ * p_ * p_ * std::exp(p_ * t);
      case Kind::power:
      case Kind::affine_power:
        if (p_ == 0.0 || p_ == 1.0) return 0.0;
        return c_ * p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
      case Kind::custom: {
        const double h = 1e-4 * std::max(1.0, std::fabs(t));
        return ((*fn_)(t + h) - 2.0 * (*fn_)(t) + (*fn_)(t - h)) / (h * h);
      }
    }
    return 0.0;
  }

  // log f(e^{-v}); exact for power laws so large v does not underflow.
  double log_at_exp_neg(double v) const {
    if (kind_ == Kind::power) return std::log(c_) - p_ * v;
    return std::log((*this)(std::exp(-v)));
  }

  json to_json() const {
    switch (kind_) {
      case Kind::zero: return {{"kind", "zero"}};
      case Kind::constant: return {{"kind", "constant"}, {"c", c_}};
      case Kind::exp: return {{"kind", "exp"}, {"c", c_}, {"r", p_}};
      case Kind::power: return {{"kind", "power"}, {"c", c_}, {"p", p_}};
      case Kind::affine_power: return {{"kind", "affine_power"}, {"q", q_}, {"c", c_}, {"p", p_}};
      case Kind::custom: break;
    }
    throw parameter_error("function '" + label_ + "' is a custom callable and cannot be serialized");
  }

  static ScalarFn from_json(const json& j) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "zero") return zero();
    if (k == "constant") return constant(j.at("c").get<double>());
    if (k == "exp") return exponential(j.at("c").get<double>(), j.at("r").get<double>());
    if (k == "power") return power(j.at("c").get<double>(), j.at("p").get<double>());
    if (k == "affine_power")
      return affine_power(j.at("q").get<double>(), j.at("c").get<double>(), j.at("p").get<double>());
    throw parameter_error("unknown function kind '" + k + "'");
  }

 private:
  ScalarFn(Kind k, double c, double p, double q) : kind_(k), c_(c), p_(p), q_(q) {}

  Kind kind_;
  double c_, p_, q_;
  std::shared_ptr<std::function<double(double)>> fn_;
  std::string label_;
};

// A sequence j -> value for j >= 1 with the same descriptor idea.
class SeqFn {
 public:
  enum class Kind { constant, geometric, power, one_minus, custom };

  static SeqFn constant(double c) { return SeqFn(Kind::constant, c, 0); }
  // c r^j
  static SeqFn geometric(double c, double r) { return SeqFn(Kind::geometric, c, r); }
  // c j^{-p}
  static SeqFn power(double c, double p) { return SeqFn(Kind::power, c, p); }
  // 1 - inner(j)
  static SeqFn one_minus(const SeqFn& inner) {
    SeqFn s(Kind::one_minus, 0, 0);
    s.inner_ = std::make_shared<SeqFn>(inner);
    return s;
  }
  static SeqFn custom(std::function<double(int)> fn) {
    SeqFn s(Kind::custom, 0, 0);
    s.fn_ = std::make_shared<std::function<double(int)>>(std::move(fn));
    return s;
  }

  double operator()(int j) const {
    switch (kind_) {
      case Kind::constant: return c_;
      case Kind::geometric: return c_ * std::pow(r_, j);
      case Kind::power: return c_ * std::pow(static_cast<double>(j), -r_);
      case Kind::one_minus: return 1.0 - (*inner_)(j);
      case Kind::custom: return (*fn_)(j);
    }
    return 0.0;
  }

  json to_json() const {
    switch (kind_) {
      case Kind::constant: return {{"kind", "constant"}, {"c", c_}};
      case Kind::geometric: return {{"kind", "geometric"}, {"c", c_}, {"r", r_}};
      case Kind::power: return {{"kind", "power"}, {"c", c_}, {"p", r_}};
      case Kind::one_minus: return {{"kind", "one_minus"}, {"inner", inner_->to_json()}};
      case Kind::custom: break;
    }
    throw parameter_error("custom sequence cannot be serialized");
  }

  static SeqFn from_json(const json& j) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "constant") return constant(j.at("c").get<double>());
    if (k == "geometric") return geometric(j.at("c").get<double>(), j.at("r").get<double>());
    if (k == "power") return power(j.at("c").get<double>(), j.at("p").get<double>());
    if (k == "one_minus") return one_minus(from_json(j.at("inner")));
    throw parameter_error("unknown sequence kind '" + k + "'");
  }

 private:
  SeqFn(Kind k, double c, double r) : kind_(k), c_(c), r_(r) {}

  Kind kind_;
  double c_, r_;
  std::shared_ptr<SeqFn> inner_;
  std::shared_ptr<std::function<double(int)>> fn_;
};

}  // namespace permanental
