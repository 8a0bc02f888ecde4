#pragma once

// Byte-scan kernels over UTF-8 buffers. The scalar set is the reference;
// vector sets must return identical results for every input.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace vbits::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct Utf8Kernels {
  Isa isa;
  // Number of bytes that are not continuation bytes (10xxxxxx).
  std::size_t (*count_lead_bytes)(const std::uint8_t* p, std::size_t n);
  // Length of the leading run of bytes below 0x80.
  std::size_t (*ascii_prefix)(const std::uint8_t* p, std::size_t n);
};

const Utf8Kernels& scalar_kernels() noexcept;

// nullptr when the set was not compiled in or the CPU lacks the feature.
const Utf8Kernels* avx2_kernels() noexcept;
const Utf8Kernels* neon_kernels() noexcept;

// Every kernel set usable on this machine, scalar first.
std::span<const Utf8Kernels* const> available_kernels() noexcept;

// Best available set, chosen once. VBITS_SIMD=scalar|avx2|neon overrides
// the choice when the requested set is available.
const Utf8Kernels& active_kernels() noexcept;

}  // namespace vbits::simd
