#include "vbits/simd/utf8_kernels.hpp"

namespace vbits::simd {

namespace {

std::size_t count_lead_bytes_scalar(const std::uint8_t* p, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (p[i] & 0xC0) != 0x80;
  return count;
}

std::size_t ascii_prefix_scalar(const std::uint8_t* p, std::size_t n) {
  std::size_t i = 0;
  while (i < n && p[i] < 0x80) ++i;
  return i;
}

constexpr Utf8Kernels kScalar{Isa::Scalar, count_lead_bytes_scalar, ascii_prefix_scalar};

}  // namespace

const Utf8Kernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace vbits::simd
