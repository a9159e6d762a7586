#pragma once
// Strings over d letters with prescribed letter counts, in lexicographic order.

#include <cstdint>
#include <functional>
#include <vector>

namespace mpqec::multiset {

// Hard ceiling on |W| for any enumeration.
inline constexpr long kEnumerationCap = 10'000'000;

// Largest-remainder rounding of nonnegative weights (summing to 1) to integer
// counts summing to m. Ties in the remainder go to the lower index, so
// |counts_i / m - weights_i| <= 1/m.
std::vector<int> round_counts(const std::vector<double>& weights, int m);

// Number of distinct strings (as double, so it never overflows).
double string_count(const std::vector<int>& counts);

// Number of strings reachable from any string by swapping two unequal
// letters: sum_{i<j} counts_i counts_j.
long swap_degree(const std::vector<int>& counts);

// Calls fn(word) for every string in lexicographic order. Throws WSetTooLarge
// beyond `cap`.
void for_each_string(const std::vector<int>& counts, const std::function<void(const std::vector<int>&)>& fn,
                     long cap = kEnumerationCap);

std::vector<std::vector<int>> enumerate(const std::vector<int>& counts, long cap = kEnumerationCap);

// Lexicographic rank of `word` among all strings with its letter counts.
long rank(const std::vector<int>& word, const std::vector<int>& counts);

struct Coloring {
  std::vector<int> colors;  // indexed by lexicographic rank
  int palette = 0;
};

// Greedy colouring of the swap graph (edges join strings differing by one
// transposition of unequal letters), visiting strings in lexicographic order.
Coloring greedy_coloring(const std::vector<int>& counts, long cap = kEnumerationCap);

// Exhaustive check that no two swap-adjacent strings share a colour.
bool is_proper(const std::vector<int>& counts, const std::vector<int>& colors);

}  // namespace mpqec::multiset
