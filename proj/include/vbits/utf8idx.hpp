#pragma once

// A UTF-8 cursor that carries the character (logical) index and the byte
// (physical) index in one 64-bit word: logical in bits 32-63, physical in
// bits 0-31. Stepping one character adds 0x1_0000_0001 and then adjusts the
// physical half by the width of the character.
//
// Cursor operations trust that the buffer is well formed; use validate()
// for untrusted input.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "vbits/errors.hpp"
#include "vbits/simd/utf8_kernels.hpp"

namespace vbits::utf8 {

using CodePoint = char32_t;

class StrIdx {
 public:
  static constexpr std::uint64_t kStep = 0x1'0000'0001ull;

  constexpr StrIdx() = default;
  constexpr explicit StrIdx(std::uint64_t word) : word_(word) {}
  static constexpr StrIdx make(std::uint32_t logical, std::uint32_t physical) {
    return StrIdx((std::uint64_t{logical} << 32) | physical);
  }

  constexpr std::uint64_t word() const noexcept { return word_; }
  constexpr std::uint32_t logical() const noexcept { return static_cast<std::uint32_t>(word_ >> 32); }
  constexpr std::uint32_t physical() const noexcept {
    return static_cast<std::uint32_t>(word_ & 0xFFFF'FFFFull);
  }

  friend constexpr bool operator==(StrIdx, StrIdx) = default;

 private:
  std::uint64_t word_ = 0;
};

constexpr std::uint32_t logical(StrIdx i) noexcept { return i.logical(); }
constexpr std::uint32_t physical(StrIdx i) noexcept { return i.physical(); }

// Borrowed byte range shorter than 2^32 bytes.
class Utf8Buffer {
 public:
  static constexpr std::uint64_t kMaxBytes = 0xFFFF'FFFFull;

  constexpr Utf8Buffer() = default;
  // Throws RangeError for 2^32 bytes or more.
  explicit Utf8Buffer(std::span<const std::uint8_t> bytes);
  explicit Utf8Buffer(std::string_view text)
      : Utf8Buffer(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                 text.size())) {}

  const std::uint8_t* data() const noexcept { return bytes_.data(); }
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(bytes_.size()); }
  std::uint8_t operator[](std::uint32_t i) const noexcept { return bytes_[i]; }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

 private:
  std::span<const std::uint8_t> bytes_;
};

struct Decoded {
  CodePoint code;
  StrIdx next;
};

namespace detail {
[[noreturn]] void throw_out_of_bounds(const char* op, std::uint64_t offset, std::uint32_t size);
[[noreturn]] void throw_invalid(const char* what, std::uint64_t offset);
}  // namespace detail

// Decodes the character starting at `phys` using the four structural
// branches (1 to 4 byte sequences). Throws InvalidSequence or OutOfBounds.
CodePoint decode_at(const Utf8Buffer& s, std::uint32_t phys);

// One character forward. The lead byte alone determines the width.
inline StrIdx next(const Utf8Buffer& s, StrIdx idx) {
  const std::uint32_t phys = idx.physical();
  if (phys >= s.size()) detail::throw_out_of_bounds("next", phys, s.size());
  unsigned code = s[phys];
  std::uint64_t w = idx.word() + StrIdx::kStep;
  if (code & 0x80) {
    do {
      code <<= 1;
      ++w;
    } while (code & 0x40);
  }
  const std::uint64_t advance = (w - idx.word()) - (StrIdx::kStep - 1);
  if (phys + advance > s.size()) detail::throw_out_of_bounds("next", phys + advance, s.size());
  return StrIdx(w);
}

// One character backward; exact inverse of next on valid input.
inline StrIdx prev(const Utf8Buffer& s, StrIdx idx) {
  if (idx.logical() == 0 || idx.physical() == 0 || idx.physical() > s.size()) {
    detail::throw_out_of_bounds("prev", idx.physical(), s.size());
  }
  std::uint64_t w = idx.word() - StrIdx::kStep;
  while ((s[static_cast<std::uint32_t>(w)] & 0xC0) == 0x80) {
    if (static_cast<std::uint32_t>(w) == 0) {
      detail::throw_invalid("prev: no lead byte before offset 0", 0);
    }
    --w;
  }
  return StrIdx(w);
}

// Fused decode and step: the returned index equals next(s, idx) and the
// code point equals decode_at(s, idx.physical()) on valid input.
inline Decoded decode_and_next(const Utf8Buffer& s, StrIdx idx) {
  const std::uint32_t phys = idx.physical();
  if (phys >= s.size()) detail::throw_out_of_bounds("decode_and_next", phys, s.size());
  std::uint64_t ucode = s[phys];
  std::uint64_t w = idx.word() + StrIdx::kStep;
  if (ucode & 0x80) {
    std::uint64_t msk = 0x40;
    do {
      const auto at = static_cast<std::uint32_t>(w);
      if (at >= s.size()) detail::throw_out_of_bounds("decode_and_next", at, s.size());
      ucode = (ucode << 6) | (s[at] & 0x3F);
      msk <<= 5;
      ++w;
    } while (ucode & msk);
    ucode &= msk - 1;
  }
  return {static_cast<CodePoint>(ucode), StrIdx(w)};
}

// Moves |n| characters forward (n >= 0) or backward. ASCII runs are
// skipped with the given byte-scan kernels. Throws OutOfBounds on overrun.
StrIdx advance_by(const Utf8Buffer& s, StrIdx idx, std::int64_t n,
                  const simd::Utf8Kernels& kernels = simd::active_kernels());

struct Validation {
  bool valid = true;
  std::size_t error_offset = 0;  // byte offset of the offending sequence
  std::size_t char_count = 0;    // characters before the error, or total
};

// Structural check by default. Strict mode also rejects overlong forms,
// surrogates and code points above U+10FFFF.
Validation validate(const Utf8Buffer& s, bool strict = false,
                    const simd::Utf8Kernels& kernels = simd::active_kernels());

// Lead-byte count; equals the character count of a valid buffer.
std::size_t char_count(const Utf8Buffer& s, const simd::Utf8Kernels& kernels = simd::active_kernels());

// Index one past the last character of a valid buffer.
StrIdx end_index(const Utf8Buffer& s, const simd::Utf8Kernels& kernels = simd::active_kernels());

}  // namespace vbits::utf8
