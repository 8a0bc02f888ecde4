#include <array>
#include <cstdlib>
#include <string_view>

#include "vbits/simd/utf8_kernels.hpp"

namespace vbits::simd {

#ifdef VBITS_HAVE_AVX2
namespace avx2 {
extern const Utf8Kernels kKernels;
}
#endif
#ifdef VBITS_HAVE_NEON
namespace neon {
extern const Utf8Kernels kKernels;
}
#endif

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "?";
}

const Utf8Kernels* avx2_kernels() noexcept {
#if defined(VBITS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2::kKernels : nullptr;
#else
  return nullptr;
#endif
}

const Utf8Kernels* neon_kernels() noexcept {
#ifdef VBITS_HAVE_NEON
  return &neon::kKernels;  // mandatory on AArch64
#else
  return nullptr;
#endif
}

std::span<const Utf8Kernels* const> available_kernels() noexcept {
  static const auto table = [] {
    struct Table {
      std::array<const Utf8Kernels*, 3> sets{};
      std::size_t n = 0;
    } t;
    t.sets[t.n++] = &scalar_kernels();
    if (auto* k = avx2_kernels()) t.sets[t.n++] = k;
    if (auto* k = neon_kernels()) t.sets[t.n++] = k;
    return t;
  }();
  return {table.sets.data(), table.n};
}

const Utf8Kernels& active_kernels() noexcept {
  static const Utf8Kernels& chosen = []() -> const Utf8Kernels& {
    const auto sets = available_kernels();
    if (const char* env = std::getenv("VBITS_SIMD")) {
      for (const auto* k : sets) {
        if (isa_name(k->isa) == env) return *k;
      }
    }
    return *sets.back();
  }();
  return chosen;
}

}  // namespace vbits::simd
