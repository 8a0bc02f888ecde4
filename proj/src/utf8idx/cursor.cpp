#include <string>

#include "vbits/utf8idx.hpp"

namespace vbits::utf8 {

namespace detail {

void throw_out_of_bounds(const char* op, std::uint64_t offset, std::uint32_t size) {
  throw OutOfBounds(std::string(op) + ": byte offset " + std::to_string(offset) +
                    " outside buffer of " + std::to_string(size) + " bytes");
}

void throw_invalid(const char* what, std::uint64_t offset) {
  throw InvalidSequence(std::string(what) + " at byte " + std::to_string(offset),
                        static_cast<std::size_t>(offset));
}

}  // namespace detail

namespace {

enum class Status { Ok, Invalid, Truncated };

constexpr bool is_cont(std::uint8_t b) noexcept { return (b & 0xC0) == 0x80; }

// The four structural branches. `len` receives the sequence width.
Status try_decode(const Utf8Buffer& s, std::uint32_t phys, CodePoint& out, unsigned& len) {
  const std::uint32_t avail = s.size() - phys;
  const std::uint8_t* p = s.data() + phys;
  const std::uint8_t b0 = p[0];
  if (b0 < 0x80) {
    out = b0;
    len = 1;
    return Status::Ok;
  }
  if ((b0 & 0xE0) == 0xC0) {
    if (avail < 2) return Status::Truncated;
    if (!is_cont(p[1])) return Status::Invalid;
    out = (CodePoint{b0 & 0x1Fu} << 6) | (p[1] & 0x3Fu);
    len = 2;
    return Status::Ok;
  }
  if ((b0 & 0xF0) == 0xE0) {
    if (avail < 3) return Status::Truncated;
    if (!is_cont(p[1]) || !is_cont(p[2])) return Status::Invalid;
    out = (CodePoint{b0 & 0x0Fu} << 12) | (CodePoint{p[1] & 0x3Fu} << 6) | (p[2] & 0x3Fu);
    len = 3;
    return Status::Ok;
  }
  if ((b0 & 0xF8) == 0xF0) {
    if (avail < 4) return Status::Truncated;
    if (!is_cont(p[1]) || !is_cont(p[2]) || !is_cont(p[3])) return Status::Invalid;
    out = (CodePoint{b0 & 0x07u} << 18) | (CodePoint{p[1] & 0x3Fu} << 12) |
          (CodePoint{p[2] & 0x3Fu} << 6) | (p[3] & 0x3Fu);
    len = 4;
    return Status::Ok;
  }
  return Status::Invalid;
}

bool strictly_valid(CodePoint cp, unsigned len) noexcept {
  static constexpr CodePoint kMinForLength[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMinForLength[len]) return false;  // overlong
  if (cp >= 0xD800 && cp <= 0xDFFF) return false;
  return cp <= 0x10FFFF;
}

}  // namespace

Utf8Buffer::Utf8Buffer(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  if (bytes.size() > kMaxBytes) {
    throw RangeError("UTF-8 buffer of " + std::to_string(bytes.size()) +
                     " bytes exceeds the 32-bit physical index");
  }
}

CodePoint decode_at(const Utf8Buffer& s, std::uint32_t phys) {
  if (phys >= s.size()) detail::throw_out_of_bounds("decode_at", phys, s.size());
  CodePoint cp = 0;
  unsigned len = 0;
  switch (try_decode(s, phys, cp, len)) {
    case Status::Ok:
      return cp;
    case Status::Truncated:
      detail::throw_out_of_bounds("decode_at: truncated sequence", phys, s.size());
    case Status::Invalid:
      break;
  }
  detail::throw_invalid("Invalid UTF-8 sequence", phys);
}

StrIdx advance_by(const Utf8Buffer& s, StrIdx idx, std::int64_t n, const simd::Utf8Kernels& kernels) {
  if (n < 0) {
    for (std::int64_t i = 0; i < -n; ++i) idx = prev(s, idx);
    return idx;
  }
  auto remaining = static_cast<std::uint64_t>(n);
  while (remaining > 0) {
    const std::uint32_t phys = idx.physical();
    if (phys >= s.size()) detail::throw_out_of_bounds("advance_by", phys, s.size());
    if (s[phys] < 0x80) {
      std::uint64_t run = kernels.ascii_prefix(s.data() + phys, s.size() - phys);
      if (run > remaining) run = remaining;
      idx = StrIdx(idx.word() + run * StrIdx::kStep);
      remaining -= run;
    } else {
      idx = next(s, idx);
      --remaining;
    }
  }
  return idx;
}

Validation validate(const Utf8Buffer& s, bool strict, const simd::Utf8Kernels& kernels) {
  Validation v;
  std::uint32_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] < 0x80) {
      const std::size_t run = kernels.ascii_prefix(s.data() + pos, s.size() - pos);
      pos += static_cast<std::uint32_t>(run);
      v.char_count += run;
      continue;
    }
    CodePoint cp = 0;
    unsigned len = 0;
    if (try_decode(s, pos, cp, len) != Status::Ok || (strict && !strictly_valid(cp, len))) {
      v.valid = false;
      v.error_offset = pos;
      return v;
    }
    pos += len;
    ++v.char_count;
  }
  return v;
}

std::size_t char_count(const Utf8Buffer& s, const simd::Utf8Kernels& kernels) {
  return kernels.count_lead_bytes(s.data(), s.size());
}

StrIdx end_index(const Utf8Buffer& s, const simd::Utf8Kernels& kernels) {
  return StrIdx::make(static_cast<std::uint32_t>(char_count(s, kernels)), s.size());
}

}  // namespace vbits::utf8
