#include "telsym/airy.hpp"

#include <cmath>

namespace telsym {

namespace {

// y'' = z*y has the even-led series f = 1 + z^3/6 + ... and the odd-led
// series g = z + z^4/12 + ...; both special functions are fixed rational
// combinations of f and g through their values at the origin.
struct SeriesPair {
  double f, g, fp, gp;
};

SeriesPair maclaurin(double z) {
  const double z3 = z * z * z;
  double a = 1.0;      // term of f, starts at k = 0
  double b = z;        // term of g
  double fa = a, gb = b;
  for (int k = 0; k < 80; ++k) {
    a *= z3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
    b *= z3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
    fa += a;
    gb += b;
    if (std::fabs(a) + std::fabs(b) < 1e-17 * (1.0 + std::fabs(fa) + std::fabs(gb)))
      break;
  }
  double A = 0.5 * z * z;  // term of f', starts at k = 1
  double fp = A;
  for (int k = 1; k < 80; ++k) {
    A *= z3 * (k + 1.0) / (k * (3.0 * k + 2.0) * (3.0 * k + 3.0));
    fp += A;
    if (std::fabs(A) < 1e-17 * (1.0 + std::fabs(fp))) break;
  }
  double B = 1.0;  // term of g', starts at k = 0
  double gp = B;
  for (int k = 0; k < 80; ++k) {
    B *= z3 / ((3.0 * k + 3.0) * (3.0 * k + 1.0));
    gp += B;
    if (std::fabs(B) < 1e-17 * (1.0 + std::fabs(gp))) break;
  }
  return {fa, gb, fp, gp};
}

constexpr double kAi0 = 0.35502805388781723926;   //  3^(-2/3)/Gamma(2/3)
constexpr double kAip0 = -0.25881940379280679840; // -3^(-1/3)/Gamma(1/3)
constexpr double kBi0 = 0.61492662744600073515;   //  3^(-1/6)/Gamma(2/3)
constexpr double kBip0 = 0.44828835735382635791;  //  3^(1/6)/Gamma(1/3)

} // namespace

double airy_ai(double z) {
  const SeriesPair s = maclaurin(z);
  return kAi0 * s.f + kAip0 * s.g;
}

double airy_bi(double z) {
  const SeriesPair s = maclaurin(z);
  return kBi0 * s.f + kBip0 * s.g;
}

double airy_ai_prime(double z) {
  const SeriesPair s = maclaurin(z);
  return kAi0 * s.fp + kAip0 * s.gp;
}

double airy_bi_prime(double z) {
  const SeriesPair s = maclaurin(z);
  return kBi0 * s.fp + kBip0 * s.gp;
}

} // namespace telsym
