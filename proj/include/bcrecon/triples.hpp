#pragma once

#include <array>
#include <cstddef>

namespace bcrecon {

inline constexpr std::size_t kTripleCount = 20;

/// Zero-based column triples (i < j < k) in lexicographic order:
/// 123, 124, 125, 126, 134, ..., 456.
inline constexpr std::array<std::array<int, 3>, kTripleCount> kTripleColumns = [] {
  std::array<std::array<int, 3>, kTripleCount> out{};
  std::size_t n = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k) out[n++] = {i, j, k};
  return out;
}();

struct LeibnizTerm {
  std::array<int, 3> slot;  // column slot taken by rows 0, 1, 2
  int sign;
};

inline constexpr std::array<LeibnizTerm, 6> kLeibniz = {{
    {{0, 1, 2}, +1},
    {{0, 2, 1}, -1},
    {{1, 0, 2}, -1},
    {{1, 2, 0}, +1},
    {{2, 0, 1}, +1},
    {{2, 1, 0}, -1},
}};

}  // namespace bcrecon
