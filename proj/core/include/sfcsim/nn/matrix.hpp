#pragma once

#include <cstddef>
#include <vector>

namespace sfcsim::nn {

/// Row-major float32 matrix. Vectors are 1xN or Nx1 by convention of the
/// using code; biases are stored 1xN.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0f) {}

  float& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  float at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return data.size(); }
  void fill(float v) { std::fill(data.begin(), data.end(), v); }
  void zero() { fill(0.0f); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Matrix&) const = default;
};

/// Gradient buffers shaped like a parameter list.
inline std::vector<Matrix> make_like(const std::vector<Matrix*>& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const auto* p : params) out.emplace_back(p->rows, p->cols);
  return out;
}

inline void zero_all(std::vector<Matrix>& grads) {
  for (auto& g : grads) g.zero();
}

}  // namespace sfcsim::nn
