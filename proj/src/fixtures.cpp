#include "mpqec/fixtures.hpp"

#include <cmath>
#include <random>

namespace mpqec::fixtures {

namespace {

// Portable draws: the standard distributions are implementation-defined.
double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& g) {
  double u1 = uniform01(g), u2 = uniform01(g);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

NoiseModel qutrit_model() {
  CMatrix h(3, 3), l = CMatrix::Zero(3, 3);
  h << 1, 0, 0, 0, -1, -1, 0, -1, -1;
  l(0, 1) = l(0, 2) = l(1, 2) = 1.0;
  return make_model(h, {l}, "qutrit");
}

NoiseModel qubit_zx_model() {
  CMatrix z(2, 2), x(2, 2);
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  return make_model(z, {x}, "qubit-zx");
}

NoiseModel qubit_dephasing_model(double gamma) {
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return make_model(z / 2.0, {std::sqrt(gamma / 2.0) * z}, "qubit-dephasing");
}

NoiseModel generic_hl_model(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  CMatrix a(3, 3), l1(3, 3), s(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = cplx(gaussian(g), gaussian(g));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) l1(i, j) = 0.5 * cplx(gaussian(g), gaussian(g)) / std::sqrt(2.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = gaussian(g);
  CMatrix h = (a + a.adjoint()) / 2.0;
  CMatrix l2 = 0.25 * (s + s.transpose());
  return make_model(h, {l1, l2}, "generic-d3-r2-seed" + std::to_string(seed));
}

}  // namespace mpqec::fixtures
