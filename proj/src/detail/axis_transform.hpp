#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rplab::detail {

/// Applies a dense (rows x shape[axis]) matrix along one axis of a row-major array.
/// On return shape[axis] == rows.
inline std::vector<std::complex<double>> transform_axis(const std::vector<std::complex<double>>& data,
                                                        std::vector<std::size_t>& shape, std::size_t axis,
                                                        const std::vector<std::complex<double>>& matrix,
                                                        std::size_t rows) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t j = 0; j < axis; ++j) outer *= shape[j];
  for (std::size_t j = axis + 1; j < shape.size(); ++j) inner *= shape[j];
  const std::size_t cols = shape[axis];

  std::vector<std::complex<double>> out(outer * rows * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    const auto* src = data.data() + o * cols * inner;
    auto* dst = out.data() + o * rows * inner;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto* w = matrix.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        const auto wc = w[c];
        if (wc == std::complex<double>{}) continue;
        const auto* s = src + c * inner;
        auto* d = dst + r * inner;
        for (std::size_t i = 0; i < inner; ++i) d[i] += wc * s[i];
      }
    }
  }
  shape[axis] = rows;
  return out;
}

}  // namespace rplab::detail
