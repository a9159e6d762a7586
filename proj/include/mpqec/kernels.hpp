#pragma once
// Hot loops with a serial reference and an OpenMP path. Every output element is
// produced by exactly one thread in a fixed order, so both paths give bitwise
// identical results.

#include <cstdint>
#include <functional>
#include <vector>

#include "mpqec/linalg.hpp"

namespace mpqec::kernels {

enum class Exec { Serial, Parallel };

// out = op^(site) * m, where the rows of m index the product space `dims`.
void left_apply(const CMatrix& op, int site, const std::vector<int>& dims, const CMatrix& m, CMatrix& out,
                Exec exec);

// out = m * op^(site), where the columns of m index the product space `dims`.
void right_apply(const CMatrix& m, const CMatrix& op, int site, const std::vector<int>& dims, CMatrix& out,
                 Exec exec);

CVector apply_site(const CMatrix& op, int site, const std::vector<int>& dims, const CVector& v);

// Tr_{rest}(|a><b|) for every site pair x < y among the first `nsites`
// subsystems, ordered (0,1), (0,2), ..., (1,2), ...
std::vector<CMatrix> pair_reduced_outers(const CVector& a, const CVector& b, const std::vector<int>& dims,
                                         int nsites, Exec exec);

inline int pair_index(int x, int y, int m) { return x * m - x * (x + 1) / 2 + (y - x - 1); }

std::uint64_t splitmix64(std::uint64_t x);

// Uniform phase in [0, 2pi) keyed by (seed, packed string).
double hashed_phase(std::uint64_t seed, std::uint64_t code);

std::uint64_t pack(const std::vector<int>& word, int bits);
inline int letter(std::uint64_t code, int pos, int bits) {
  return static_cast<int>((code >> (pos * bits)) & ((std::uint64_t(1) << bits) - 1));
}
int bits_for(int d);

// For every site pair (x, y), the d x d table
//   S[i][j] = (1/|W|) sum_{w in W, w_x = i, w_y = j, i != j} exp(i (theta(swap_xy w) - theta(w)))
// where W is the list of packed strings in `codes`.
std::vector<CMatrix> swap_phase_sums(const std::vector<std::uint64_t>& codes, int m, int d, int bits,
                                     const std::function<double(std::uint64_t)>& phase, Exec exec);

}  // namespace mpqec::kernels
