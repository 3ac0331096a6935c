#include <cmath>

#include "rayleigh/prob.hpp"

namespace rayleigh {

const char* to_string(WickPattern p) {
  switch (p) {
    case WickPattern::Thermal: return "thermal";
    case WickPattern::FirstOrder: return "first-order";
    case WickPattern::FirstSquared: return "first-squared";
    case WickPattern::SecondOrder: return "second-order";
    case WickPattern::FirstPair: return "first-pair";
  }
  return "unknown";
}

double wick_expectation(WickPattern pattern, int k, double epsilon, double m1, double mu2) {
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const int kmin = pattern == WickPattern::Thermal ? 0 : pattern == WickPattern::FirstPair ? 2 : 1;
  if (k < kmin)
    throw Error(ErrorCode::UnsupportedPattern,
                std::string(to_string(pattern)) + " needs k >= " + std::to_string(kmin));
  // k! ε^k / (1+ε)^{k+1} in logs to stay finite for large k
  const double lg = std::lgamma(k + 1.0) + k * std::log(epsilon) - (k + 1) * std::log1p(epsilon);
  const double base = std::exp(lg);
  switch (pattern) {
    case WickPattern::Thermal:
      return base;
    case WickPattern::FirstOrder:
      return base * m1;
    case WickPattern::FirstSquared:
      // (k-1)! ε^k / (1+ε)^k = base (1+ε) / k
      return base * (1.0 + epsilon) / k * (mu2 - m1 * m1) + base * m1 * m1;
    case WickPattern::SecondOrder:
      return base * mu2;
    case WickPattern::FirstPair:
      return base * m1 * m1;
  }
  throw Error(ErrorCode::UnsupportedPattern, "unknown pattern");
}

}  // namespace rayleigh
