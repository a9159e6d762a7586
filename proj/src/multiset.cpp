#include "mpqec/multiset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mpqec/errors.hpp"

namespace mpqec::multiset {

std::vector<int> round_counts(const std::vector<double>& weights, int m) {
  if (m < 1) throw InvalidInput("round_counts: m must be positive");
  if (weights.empty()) throw InvalidInput("round_counts: empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("round_counts: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6) throw InvalidInput("round_counts: weights must sum to 1");
  const std::size_t d = weights.size();
  std::vector<int> counts(d);
  std::vector<double> rem(d);
  int used = 0;
  for (std::size_t i = 0; i < d; ++i) {
    double x = weights[i] / total * m;
    counts[i] = static_cast<int>(std::floor(x));
    rem[i] = std::round((x - counts[i]) * 1e9);  // remainders equal to roundoff count as ties
    used += counts[i];
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; used < m; k = (k + 1) % d, ++used) ++counts[order[k]];
  return counts;
}

double string_count(const std::vector<int>& counts) {
  int n = 0;
  double lg = 0.0;
  for (int c : counts) {
    n += c;
    lg -= std::lgamma(c + 1.0);
  }
  lg += std::lgamma(n + 1.0);
  return std::round(std::exp(lg));
}

long swap_degree(const std::vector<int>& counts) {
  long deg = 0, seen = 0;
  for (int c : counts) {
    deg += seen * c;
    seen += c;
  }
  return deg;
}

namespace {

void check_cap(const std::vector<int>& counts, long cap) {
  double n = string_count(counts);
  if (n > static_cast<double>(cap))
    throw WSetTooLarge("string set of size " + std::to_string(static_cast<long double>(n)) +
                       " exceeds enumeration cap " + std::to_string(cap));
}

// Exact multinomial for sets already known to be under the cap.
long multinomial(const std::vector<int>& counts) {
  long result = 1;
  int n = 0;
  for (int c : counts)
    for (int j = 1; j <= c; ++j) {
      ++n;
      result = result * n / j;
    }
  return result;
}

}  // namespace

void for_each_string(const std::vector<int>& counts, const std::function<void(const std::vector<int>&)>& fn,
                     long cap) {
  check_cap(counts, cap);
  std::vector<int> w;
  for (std::size_t i = 0; i < counts.size(); ++i) w.insert(w.end(), counts[i], static_cast<int>(i));
  do fn(w);
  while (std::next_permutation(w.begin(), w.end()));
}

std::vector<std::vector<int>> enumerate(const std::vector<int>& counts, long cap) {
  std::vector<std::vector<int>> out;
  for_each_string(counts, [&](const std::vector<int>& w) { out.push_back(w); }, cap);
  return out;
}

long rank(const std::vector<int>& word, const std::vector<int>& counts) {
  std::vector<int> rem = counts;
  long total = multinomial(rem);  // strings completing the current prefix
  int left = static_cast<int>(word.size());
  long r = 0;
  for (int letter_here : word) {
    for (int c = 0; c < letter_here; ++c)
      if (rem[c] > 0) r += total * rem[c] / left;
    total = total * rem[letter_here] / left;
    --rem[letter_here];
    --left;
  }
  return r;
}

Coloring greedy_coloring(const std::vector<int>& counts, long cap) {
  auto words = enumerate(counts, cap);
  const int m = words.empty() ? 0 : static_cast<int>(words[0].size());
  Coloring out;
  out.colors.assign(words.size(), -1);
  std::vector<char> used;
  for (std::size_t idx = 0; idx < words.size(); ++idx) {
    std::vector<int> w = words[idx];
    used.assign(used.size(), 0);
    for (int x = 0; x < m; ++x)
      for (int y = x + 1; y < m; ++y) {
        if (w[x] == w[y]) continue;
        std::swap(w[x], w[y]);
        long nb = rank(w, counts);
        std::swap(w[x], w[y]);
        if (static_cast<std::size_t>(nb) < idx) {
          int c = out.colors[nb];
          if (c >= static_cast<int>(used.size())) used.resize(c + 1, 0);
          used[c] = 1;
        }
      }
    int c = 0;
    while (c < static_cast<int>(used.size()) && used[c]) ++c;
    out.colors[idx] = c;
    out.palette = std::max(out.palette, c + 1);
  }
  return out;
}

bool is_proper(const std::vector<int>& counts, const std::vector<int>& colors) {
  auto words = enumerate(counts);
  if (colors.size() != words.size()) return false;
  const int m = words.empty() ? 0 : static_cast<int>(words[0].size());
  for (std::size_t idx = 0; idx < words.size(); ++idx) {
    std::vector<int> w = words[idx];
    for (int x = 0; x < m; ++x)
      for (int y = x + 1; y < m; ++y) {
        if (w[x] == w[y]) continue;
        std::swap(w[x], w[y]);
        long nb = rank(w, counts);
        std::swap(w[x], w[y]);
        if (colors[nb] == colors[idx]) return false;
      }
  }
  return true;
}

}  // namespace mpqec::multiset
