#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace rqproc {

// Inverse of the standard normal CDF (Wichura's PPND16). Accurate to within
// a few ulp over (0,1); the tails are handled by the log-sqrt branch.
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

// An error distribution F together with the tail envelope parameters used by
// the (F3)-style tail check: |F^{-1}(a)| <= c (a(1-a))^{-tail_exponent} near
// the ends, and 1/f(F^{-1}(a)) <= c (a(1-a))^{-tail_exponent-1}.
struct ErrorModel {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> density;
  std::function<double(double)> quantile;
  double tail_exponent_a = 0.05;
  double tail_constant_c = 30.0;

  // f(F^{-1}(alpha)), with the endpoint limit 0 for alpha in {0,1}.
  double density_at_quantile(double alpha) const {
    if (alpha <= 0.0 || alpha >= 1.0) return 0.0;
    return density(quantile(alpha));
  }
};

inline ErrorModel normal_model() {
  ErrorModel m;
  m.name = "normal";
  m.cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  m.density = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  };
  m.quantile = [](double a) { return inverse_normal_cdf(a); };
  return m;
}

inline ErrorModel logistic_model() {
  ErrorModel m;
  m.name = "logistic";
  m.cdf = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  m.density = [](double x) {
    const double e = std::exp(-std::abs(x));
    const double d = 1.0 + e;
    return e / (d * d);
  };
  m.quantile = [](double a) { return std::log(a / (1.0 - a)); };
  return m;
}

inline ErrorModel laplace_model() {
  ErrorModel m;
  m.name = "laplace";
  m.cdf = [](double x) {
    return (x < 0.0) ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
  };
  m.density = [](double x) { return 0.5 * std::exp(-std::abs(x)); };
  m.quantile = [](double a) {
    return (a < 0.5) ? std::log(2.0 * a) : -std::log(2.0 * (1.0 - a));
  };
  return m;
}

inline ErrorModel error_model(const std::string& name) {
  if (name == "normal") return normal_model();
  if (name == "logistic") return logistic_model();
  if (name == "laplace") return laplace_model();
  throw std::invalid_argument("unknown error model: " + name);
}

}  // namespace rqproc
