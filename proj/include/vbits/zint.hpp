#pragma once

// Signed multi-precision integers packed in one 64-bit word.
//
//   Tiny   bit 63 = 0; bits 0-62 hold a two's complement value in
//          [-2^62, 2^62 - 1].
//   Large  bit 63 = 1; bits 59-62 = log2(capacity) in 0..14;
//          bits 45-58 = size - 1; bits 0-44 = limb buffer address >> 3.
//   Huge   bits 59-63 all set; bits 0-47 = address of a HugeHeader.
//
// Limbs are little-endian 64-bit words in two's complement, minimal width.
// Every value has exactly one of the three encodings. ZWords are immutable;
// each operation returns a fresh word that the caller releases with free_z.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "vbits/tagcore.hpp"

namespace vbits::zint {

using tagcore::Address48;
using tagcore::Arena;
using tagcore::Packed45;

enum class Format { Tiny, Large, Huge };

std::string_view format_name(Format f) noexcept;

inline constexpr std::int64_t kTinyMin = -(std::int64_t{1} << 62);
inline constexpr std::int64_t kTinyMax = (std::int64_t{1} << 62) - 1;
inline constexpr std::size_t kMaxLargeLimbs = 16384;
inline constexpr unsigned kMaxCapLog2 = 14;

inline constexpr std::uint64_t kTagBit = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kHugeTag = std::uint64_t{0x1F} << 59;
inline constexpr unsigned kCapShift = 59;
inline constexpr std::uint64_t kCapMask = 0xF;
inline constexpr unsigned kSizeShift = 45;
inline constexpr std::uint64_t kSizeMask = 0x3FFF;

struct ZWord {
  std::uint64_t w = 0;
  friend constexpr bool operator==(ZWord, ZWord) = default;
};

constexpr Format classify(ZWord z) noexcept {
  if ((z.w & kTagBit) == 0) return Format::Tiny;
  if ((z.w & kHugeTag) == kHugeTag) return Format::Huge;
  return Format::Large;
}

constexpr bool fits_tiny(std::int64_t v) noexcept { return v >= kTinyMin && v <= kTinyMax; }

// Sign-extends bit 62. Throws FatalError when z is not Tiny.
std::int64_t decode_tiny(ZWord z);

// Unchecked Tiny constructor; v must satisfy fits_tiny.
constexpr ZWord make_tiny(std::int64_t v) noexcept {
  return ZWord{static_cast<std::uint64_t>(v) & ~kTagBit};
}

// The field breakdown of a Large word.
struct LargeFields {
  unsigned cap_log2 = 0;
  std::size_t size = 1;  // actual size, 1..16384
  Packed45 buffer;

  std::size_t capacity() const noexcept { return std::size_t{1} << cap_log2; }
};

// Packs the fields with no allocation; throws RangeError when a field does
// not fit or size > capacity.
ZWord pack_large(const LargeFields& f);
LargeFields unpack_large(ZWord z);

struct HugeHeader {
  std::uint64_t capacity;
  std::uint64_t size;
  std::uint64_t storage;  // Address48 of the limb buffer
};

inline constexpr ZWord make_huge_word(Address48 header) noexcept {
  return ZWord{kHugeTag | header.value()};
}

// Decoded view of a word: the buffer, size and capacity of the limbs.
class LimbView {
 public:
  Format format() const noexcept { return format_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  // Zero for Tiny, which has no out-of-line buffer.
  std::uint64_t buffer_address() const noexcept {
    return format_ == Format::Tiny ? 0 : reinterpret_cast<std::uintptr_t>(buffer_);
  }
  // Only valid for Huge.
  std::uint64_t header_address() const noexcept { return header_; }

  std::span<const std::uint64_t> limbs() const noexcept {
    return format_ == Format::Tiny ? std::span<const std::uint64_t>(&inline_limb_, 1)
                                   : std::span<const std::uint64_t>(buffer_, size_);
  }
  bool negative() const noexcept { return static_cast<std::int64_t>(limbs().back()) < 0; }

 private:
  friend LimbView decode(ZWord z);
  Format format_ = Format::Tiny;
  const std::uint64_t* buffer_ = nullptr;
  std::size_t size_ = 1;
  std::size_t capacity_ = 1;
  std::uint64_t header_ = 0;
  std::uint64_t inline_limb_ = 0;
};

// Reads any of the three formats. Large buffers are not dereferenced;
// a Huge header is. Throws IntegrityError on a corrupted word.
LimbView decode(ZWord z);

ZWord encode_i64(Arena& arena, std::int64_t v);

// Canonicalizing constructor: trims redundant sign limbs, then picks the
// unique format. An empty span means zero.
ZWord from_limbs(Arena& arena, std::span<const std::uint64_t> limbs);

// Minimal two's complement width of a limb sequence, at least 1.
std::size_t minimal_size(std::span<const std::uint64_t> limbs) noexcept;

ZWord clone(Arena& arena, ZWord a);
void free_z(Arena& arena, ZWord a);

ZWord add(Arena& arena, ZWord a, ZWord b);
ZWord sub(Arena& arena, ZWord a, ZWord b);
ZWord neg(Arena& arena, ZWord a);
ZWord mul(Arena& arena, ZWord a, ZWord b);
std::strong_ordering cmp(ZWord a, ZWord b);

// Two words encode the same value with the same format, size, capacity
// and limbs. Buffer addresses are ignored.
bool same_encoding(ZWord a, ZWord b);

// An arena-owned limb buffer under construction.
struct LimbBuffer {
  Address48 addr;
  std::size_t size = 0;
  std::size_t capacity = 0;

  std::uint64_t* data() const noexcept { return addr.as<std::uint64_t>(); }
  // The format a value of this capacity lives in.
  Format format() const noexcept {
    return capacity > kMaxLargeLimbs ? Format::Huge : Format::Large;
  }
};

LimbBuffer alloc_limbs(Arena& arena, std::size_t capacity);
void free_limbs(Arena& arena, const LimbBuffer& buf);

// Reallocates to max(2 * capacity, bit_ceil(needed)) limbs, copies the used
// limbs and frees the old buffer. Requires needed > capacity.
LimbBuffer grow(Arena& arena, LimbBuffer buf, std::size_t needed);

std::string to_decimal(ZWord a);
// Accepts an optional leading '-' or U+2212, then one or more digits.
ZWord from_decimal(Arena& arena, std::string_view s);

// One-line debug rendering, e.g. "TINY w=0x0000000000000005 value=5".
std::string inspect(ZWord a);

// Owning value wrapper over the thread arena.
class Integer {
 public:
  Integer() = default;
  Integer(std::int64_t v);  // NOLINT(google-explicit-constructor)
  static Integer adopt(ZWord w) { return Integer(w, Adopt{}); }
  static Integer parse(std::string_view decimal);

  Integer(const Integer& o);
  Integer(Integer&& o) noexcept : w_(o.w_) { o.w_ = ZWord{}; }
  Integer& operator=(const Integer& o);
  Integer& operator=(Integer&& o) noexcept;
  ~Integer();

  ZWord word() const noexcept { return w_; }
  Format format() const noexcept { return classify(w_); }
  std::string to_string() const { return to_decimal(w_); }

  friend Integer operator+(const Integer& a, const Integer& b);
  friend Integer operator-(const Integer& a, const Integer& b);
  friend Integer operator*(const Integer& a, const Integer& b);
  Integer operator-() const;
  friend std::strong_ordering operator<=>(const Integer& a, const Integer& b) {
    return cmp(a.w_, b.w_);
  }
  friend bool operator==(const Integer& a, const Integer& b) {
    return cmp(a.w_, b.w_) == std::strong_ordering::equal;
  }

 private:
  struct Adopt {};
  Integer(ZWord w, Adopt) : w_(w) {}
  ZWord w_{};
};

}  // namespace vbits::zint
