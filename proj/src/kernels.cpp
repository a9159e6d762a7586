#include "mpqec/kernels.hpp"

#include <cmath>

namespace mpqec::kernels {

namespace {

struct SiteSplit {
  long before = 1, d = 1, after = 1;
};

SiteSplit split(const std::vector<int>& dims, int site) {
  if (site < 0 || site >= static_cast<int>(dims.size())) throw ShapeError("site index out of range");
  SiteSplit s;
  for (int k = 0; k < site; ++k) s.before *= dims[k];
  s.d = dims[site];
  for (std::size_t k = site + 1; k < dims.size(); ++k) s.after *= dims[k];
  return s;
}

}  // namespace

void left_apply(const CMatrix& op, int site, const std::vector<int>& dims, const CMatrix& m, CMatrix& out,
                Exec exec) {
  const SiteSplit s = split(dims, site);
  if (m.rows() != s.before * s.d * s.after || op.rows() != s.d || op.cols() != s.d)
    throw ShapeError("left_apply: shape mismatch");
  out.resize(m.rows(), m.cols());
  const long cols = m.cols();
  const long d = s.d, after = s.after, before = s.before;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (long c = 0; c < cols; ++c) {
    const cplx* src = m.data() + c * m.rows();
    cplx* dst = out.data() + c * m.rows();
    for (long o = 0; o < before; ++o)
      for (long i = 0; i < after; ++i) {
        const long base = o * d * after + i;
        for (long a = 0; a < d; ++a) {
          cplx acc = 0.0;
          for (long b = 0; b < d; ++b) acc += op(a, b) * src[base + b * after];
          dst[base + a * after] = acc;
        }
      }
  }
}

void right_apply(const CMatrix& m, const CMatrix& op, int site, const std::vector<int>& dims, CMatrix& out,
                 Exec exec) {
  const SiteSplit s = split(dims, site);
  if (m.cols() != s.before * s.d * s.after || op.rows() != s.d || op.cols() != s.d)
    throw ShapeError("right_apply: shape mismatch");
  out.resize(m.rows(), m.cols());
  const long rows = m.rows();
  const long d = s.d, after = s.after, blocks = s.before * s.after;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (long blk = 0; blk < blocks; ++blk) {
    const long o = blk / after, i = blk % after;
    const long base = o * d * after + i;
    for (long a = 0; a < d; ++a) {
      cplx* dst = out.data() + (base + a * after) * rows;
      for (long r = 0; r < rows; ++r) dst[r] = 0.0;
      for (long b = 0; b < d; ++b) {
        const cplx w = op(b, a);
        if (w == cplx(0.0)) continue;
        const cplx* src = m.data() + (base + b * after) * rows;
        for (long r = 0; r < rows; ++r) dst[r] += w * src[r];
      }
    }
  }
}

CVector apply_site(const CMatrix& op, int site, const std::vector<int>& dims, const CVector& v) {
  CMatrix out;
  left_apply(op, site, dims, v, out, Exec::Serial);
  return out.col(0);
}

std::vector<CMatrix> pair_reduced_outers(const CVector& a, const CVector& b, const std::vector<int>& dims,
                                         int nsites, Exec exec) {
  const int npairs = nsites * (nsites - 1) / 2;
  std::vector<CMatrix> out(npairs);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int p = 0; p < npairs; ++p) {
    int x = 0, rem = p;
    while (rem >= nsites - 1 - x) {
      rem -= nsites - 1 - x;
      ++x;
    }
    int y = x + 1 + rem;
    out[p] = reduced_outer(a, b, dims, {x, y});
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double hashed_phase(std::uint64_t seed, std::uint64_t code) {
  std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(code + 0x632BE59BD9B4E019ULL));
  return 2.0 * M_PI * static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t pack(const std::vector<int>& word, int bits) {
  std::uint64_t code = 0;
  for (std::size_t p = 0; p < word.size(); ++p) code |= std::uint64_t(word[p]) << (p * bits);
  return code;
}

int bits_for(int d) {
  int b = 1;
  while ((1 << b) < d) ++b;
  return b;
}

std::vector<CMatrix> swap_phase_sums(const std::vector<std::uint64_t>& codes, int m, int d, int bits,
                                     const std::function<double(std::uint64_t)>& phase, Exec exec) {
  const int npairs = m * (m - 1) / 2;
  std::vector<CMatrix> out(npairs, CMatrix::Zero(d, d));
  if (codes.empty()) return out;
  std::vector<double> theta(codes.size());
  for (std::size_t w = 0; w < codes.size(); ++w) theta[w] = phase(codes[w]);
  const double inv = 1.0 / static_cast<double>(codes.size());
  const std::uint64_t mask = (std::uint64_t(1) << bits) - 1;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int p = 0; p < npairs; ++p) {
    int x = 0, rem = p;
    while (rem >= m - 1 - x) {
      rem -= m - 1 - x;
      ++x;
    }
    const int y = x + 1 + rem;
    CMatrix acc = CMatrix::Zero(d, d);
    for (std::size_t w = 0; w < codes.size(); ++w) {
      const std::uint64_t c = codes[w];
      const std::uint64_t i = (c >> (x * bits)) & mask, j = (c >> (y * bits)) & mask;
      if (i == j) continue;
      const std::uint64_t swapped = (c & ~((mask << (x * bits)) | (mask << (y * bits)))) | (j << (x * bits)) |
                                    (i << (y * bits));
      const double dth = phase(swapped) - theta[w];
      acc(static_cast<long>(i), static_cast<long>(j)) += cplx(std::cos(dth), std::sin(dth));
    }
    out[p] = acc * inv;
  }
  return out;
}

}  // namespace mpqec::kernels
