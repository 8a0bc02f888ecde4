// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "vbits/simd/utf8_kernels.hpp"

namespace vbits::simd::avx2 {

namespace {

std::size_t count_lead_bytes(const std::uint8_t* p, std::size_t n) {
  // As signed bytes, continuation bytes are exactly [-128, -65].
  const __m256i threshold = _mm256_set1_epi8(-65);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    const auto lead = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpgt_epi8(v, threshold)));
    count += static_cast<std::size_t>(std::popcount(lead));
  }
  for (; i < n; ++i) count += (p[i] & 0xC0) != 0x80;
  return count;
}

std::size_t ascii_prefix(const std::uint8_t* p, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    const auto high = static_cast<std::uint32_t>(_mm256_movemask_epi8(v));
    if (high != 0) return i + static_cast<std::size_t>(std::countr_zero(high));
  }
  while (i < n && p[i] < 0x80) ++i;
  return i;
}

}  // namespace

extern const Utf8Kernels kKernels{Isa::Avx2, count_lead_bytes, ascii_prefix};

}  // namespace vbits::simd::avx2
