#include "sfcsim/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "sfcsim/errors.hpp"

namespace sfcsim::nn {

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "IEEE-754 float32 required");

constexpr std::uint32_t kMagic = 0x4E4E4653;  // "SFNN"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw CheckpointError("truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float f) {
  std::uint32_t v = std::bit_cast<std::uint32_t>(f);
  put_u32(os, v);
}

float get_f32(std::istream& is) { return std::bit_cast<float>(get_u32(is)); }

void save_impl(const std::string& path, const std::vector<const Matrix*>& tensors) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open '" + path + "' for writing");
  put_u32(os, kMagic);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(tensors.size()));
  for (const auto* t : tensors) {
    put_u32(os, static_cast<std::uint32_t>(t->rows));
    put_u32(os, static_cast<std::uint32_t>(t->cols));
    for (float f : t->data) put_f32(os, f);
  }
  if (!os) throw CheckpointError("write failed for '" + path + "'");
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<const Matrix*>& tensors) {
  save_impl(path, tensors);
}

void save_checkpoint(const std::string& path, const std::vector<Matrix*>& tensors) {
  std::vector<const Matrix*> view(tensors.begin(), tensors.end());
  save_impl(path, view);
}

std::vector<Matrix> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open '" + path + "'");
  if (get_u32(is) != kMagic) throw CheckpointError("bad magic in '" + path + "'");
  const auto version = get_u32(is);
  if (version != kVersion) {
    throw CheckpointError("unsupported version " + std::to_string(version) + " in '" + path + "'");
  }
  const auto count = get_u32(is);
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rows = get_u32(is);
    const auto cols = get_u32(is);
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    for (auto& f : m.data) f = get_f32(is);
    out.push_back(std::move(m));
  }
  return out;
}

void load_checkpoint_into(const std::string& path, const std::vector<Matrix*>& tensors) {
  auto loaded = load_checkpoint(path);
  if (loaded.size() != tensors.size()) {
    throw CheckpointError("tensor count mismatch in '" + path + "': file has " +
                          std::to_string(loaded.size()) + ", model needs " +
                          std::to_string(tensors.size()));
  }
  for (size_t i = 0; i < tensors.size(); ++i) {
    if (!loaded[i].same_shape(*tensors[i])) {
      throw CheckpointError("tensor " + std::to_string(i) + " shape mismatch in '" + path + "'");
    }
  }
  for (size_t i = 0; i < tensors.size(); ++i) *tensors[i] = std::move(loaded[i]);
}

}  // namespace sfcsim::nn
