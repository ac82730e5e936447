#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "permanental/errors.hpp"

namespace permanental {

// Majorant phi for the sigma function, sigma(s,t) <= phi(|t-s|).
// at_log(L) returns phi(e^L) and is exact for the built-in kinds, which keeps
// the improper integrals over log scales free of underflow.
class EnvelopeFn {
 public:
  enum class Kind { power, log_power, custom };

  // c u^p
  static EnvelopeFn power(double c, double p) {
    EnvelopeFn e(Kind::power, c, p);
    e.rv_ = p;
    return e;
  }
  // c (log 1/u)^{-g}, defined for 0 < u < 1
  static EnvelopeFn log_power(double c, double g) {
    EnvelopeFn e(Kind::log_power, c, g);
    e.rv_ = 0.0;
    return e;
  }
  static EnvelopeFn custom(std::function<double(double)> fn,
                           std::optional<double> rv_index = std::nullopt, bool monotone = true) {
    EnvelopeFn e(Kind::custom, 0, 0);
    e.fn_ = std::make_shared<std::function<double(double)>>(std::move(fn));
    e.rv_ = rv_index;
    e.monotone_ = monotone;
    return e;
  }

  double operator()(double u) const {
    if (u < 0.0) throw domain_error("envelope evaluated at a negative gap");
    if (u == 0.0) return kind_ == Kind::custom ? (*fn_)(0.0) : 0.0;
    if (kind_ == Kind::custom) return (*fn_)(u);
    return at_log(std::log(u));
  }

  double at_log(double L) const {
    switch (kind_) {
      case Kind::power: return c_ * std::exp(p_ * L);
      case Kind::log_power:
        if (L >= 0.0) throw domain_error("log_power envelope needs 0 < u < 1");
        return c_ * std::pow(-L, -p_);
      case Kind::custom: return (*fn_)(std::exp(L));
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  std::optional<double> rv_index() const { return rv_; }
  bool monotone() const { return monotone_; }

  nlohmann::json to_json() const {
    switch (kind_) {
      case Kind::power: return {{"kind", "power"}, {"c", c_}, {"p", p_}};
      case Kind::log_power: return {{"kind", "log_power"}, {"c", c_}, {"g", p_}};
      case Kind::custom: break;
    }
    return {{"kind", "custom"}};
  }

  static EnvelopeFn from_json(const nlohmann::json& j) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "power") return power(j.at("c").get<double>(), j.at("p").get<double>());
    if (k == "log_power") return log_power(j.at("c").get<double>(), j.at("g").get<double>());
    throw parameter_error("unknown envelope kind '" + k + "'");
  }

 private:
  EnvelopeFn(Kind k, double c, double p) : kind_(k), c_(c), p_(p) {}

  Kind kind_;
  double c_, p_;
  std::shared_ptr<std::function<double(double)>> fn_;
  std::optional<double> rv_;
  bool monotone_ = true;
};

}  // namespace permanental
