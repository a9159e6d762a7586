#pragma once

#include <cstdint>

#include "mpqec/noise_model.hpp"

namespace mpqec::fixtures {

// H = [[1,0,0],[0,-1,-1],[0,-1,-1]], L = |0><1| + |0><2| + |1><2|.
NoiseModel qutrit_model();

// H = Z, L = X.
NoiseModel qubit_zx_model();

// H = Z/2, L = sqrt(gamma/2) Z.
NoiseModel qubit_dephasing_model(double gamma = 1.0);

// d = 3, r = 2 model drawn from a fixed seed: random Hermitian H, a random
// complex L_1 and a random real symmetric L_2, which keeps the span one
// dimension short of all Hermitian 3 x 3 matrices.
inline constexpr std::uint64_t kGenericSeed = 7;
NoiseModel generic_hl_model(std::uint64_t seed = kGenericSeed);

}  // namespace mpqec::fixtures
