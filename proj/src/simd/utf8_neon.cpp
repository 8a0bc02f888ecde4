#include <arm_neon.h>

#include "vbits/simd/utf8_kernels.hpp"

namespace vbits::simd::neon {

namespace {

std::size_t count_lead_bytes(const std::uint8_t* p, std::size_t n) {
  const int8x16_t threshold = vdupq_n_s8(-65);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const int8x16_t v = vreinterpretq_s8_u8(vld1q_u8(p + i));
    const uint8x16_t lead = vshrq_n_u8(vcgtq_s8(v, threshold), 7);
    count += vaddvq_u8(lead);
  }
  for (; i < n; ++i) count += (p[i] & 0xC0) != 0x80;
  return count;
}

std::size_t ascii_prefix(const std::uint8_t* p, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    if (vmaxvq_u8(vld1q_u8(p + i)) >= 0x80) break;
  }
  while (i < n && p[i] < 0x80) ++i;
  return i;
}

}  // namespace

extern const Utf8Kernels kKernels{Isa::Neon, count_lead_bytes, ascii_prefix};

}  // namespace vbits::simd::neon
