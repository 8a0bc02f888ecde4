#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <vector>

#include "vbits/zint.hpp"

namespace vbits::zint {

namespace {

constexpr std::uint64_t kChunkBase = 10000000000000000000ull;  // 10^19
constexpr std::size_t kChunkDigits = 19;

constexpr std::uint64_t pow10(std::size_t k) {
  std::uint64_t p = 1;
  while (k--) p *= 10;
  return p;
}

std::string hex16(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
  return buf;
}

std::string hex_addr(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%" PRIx64, v);
  return buf;
}

std::string limb_list(std::span<const std::uint64_t> limbs) {
  std::string out = "[";
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    if (i) out += ", ";
    out += hex16(limbs[i]);
  }
  out += ']';
  return out;
}

}  // namespace

std::string to_decimal(ZWord a) {
  if (classify(a) == Format::Tiny) return std::to_string(decode_tiny(a));

  const LimbView v = decode(a);
  const bool negative = v.negative();
  std::vector<std::uint64_t> mag(v.limbs().begin(), v.limbs().end());
  if (negative) {
    std::uint64_t carry = 1;
    for (auto& limb : mag) {
      limb = ~limb + carry;
      carry = (carry && limb == 0) ? 1 : 0;
    }
  }

  std::vector<std::uint64_t> chunks;  // base 10^19, least significant first
  std::size_t top = mag.size();
  while (top > 0 && mag[top - 1] == 0) --top;
  while (top > 0) {
    unsigned __int128 rem = 0;
    for (std::size_t i = top; i-- > 0;) {
      const unsigned __int128 cur = (rem << 64) | mag[i];
      mag[i] = static_cast<std::uint64_t>(cur / kChunkBase);
      rem = cur % kChunkBase;
    }
    chunks.push_back(static_cast<std::uint64_t>(rem));
    while (top > 0 && mag[top - 1] == 0) --top;
  }

  std::string out;
  if (negative) out += '-';
  out += std::to_string(chunks.back());
  char buf[32];
  for (std::size_t i = chunks.size() - 1; i-- > 0;) {
    std::snprintf(buf, sizeof buf, "%019" PRIu64, chunks[i]);
    out += buf;
  }
  return out;
}

ZWord from_decimal(Arena& arena, std::string_view s) {
  const std::string_view original = s;
  bool negative = false;
  if (s.starts_with('-')) {
    negative = true;
    s.remove_prefix(1);
  } else if (s.starts_with("\xE2\x88\x92")) {  // U+2212 MINUS SIGN
    negative = true;
    s.remove_prefix(3);
  }
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("not a decimal integer: '" + std::string(original) + "'");
  }

  if (s.size() <= 18) {
    std::int64_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return encode_i64(arena, negative ? -v : v);
  }

  LimbBuffer buf = alloc_limbs(arena, 1);
  buf.size = 1;
  buf.data()[0] = 0;
  auto ensure = [&](std::size_t needed) {
    if (needed > buf.capacity) buf = grow(arena, buf, needed);
  };

  try {
    std::size_t pos = 0;
    std::size_t first = s.size() % kChunkDigits;
    if (first == 0) first = kChunkDigits;
    while (pos < s.size()) {
      const std::size_t len = pos == 0 ? first : kChunkDigits;
      std::uint64_t chunk = 0;
      std::from_chars(s.data() + pos, s.data() + pos + len, chunk);
      pos += len;

      const std::uint64_t scale = pow10(len);
      std::uint64_t carry = chunk;
      std::uint64_t* d = buf.data();
      for (std::size_t i = 0; i < buf.size; ++i) {
        const unsigned __int128 t = static_cast<unsigned __int128>(d[i]) * scale + carry;
        d[i] = static_cast<std::uint64_t>(t);
        carry = static_cast<std::uint64_t>(t >> 64);
      }
      if (carry != 0) {
        ensure(buf.size + 1);
        buf.data()[buf.size++] = carry;
      }
    }
    // Room for a clear sign bit above the magnitude.
    if (static_cast<std::int64_t>(buf.data()[buf.size - 1]) < 0) {
      ensure(buf.size + 1);
      buf.data()[buf.size++] = 0;
    }
    if (negative) {
      std::uint64_t carry = 1;
      std::uint64_t* d = buf.data();
      for (std::size_t i = 0; i < buf.size; ++i) {
        d[i] = ~d[i] + carry;
        carry = (carry && d[i] == 0) ? 1 : 0;
      }
    }
    const ZWord out = from_limbs(arena, std::span<const std::uint64_t>(buf.data(), buf.size));
    free_limbs(arena, buf);
    return out;
  } catch (...) {
    free_limbs(arena, buf);
    throw;
  }
}

std::string inspect(ZWord a) {
  std::string out;
  switch (classify(a)) {
    case Format::Tiny:
      out = "TINY w=" + hex16(a.w) + " value=" + std::to_string(decode_tiny(a));
      break;
    case Format::Large: {
      const LargeFields f = unpack_large(a);
      const LimbView v = decode(a);
      out = "LARGE w=" + hex16(a.w) + " cap=2^" + std::to_string(f.cap_log2) +
            " size=" + std::to_string(f.size) + " addr=" + hex_addr(v.buffer_address()) +
            " limbs=" + limb_list(v.limbs());
      break;
    }
    case Format::Huge: {
      const LimbView v = decode(a);
      out = "HUGE w=" + hex16(a.w) + " header=" + hex_addr(v.header_address()) +
            " cap=" + std::to_string(v.capacity()) + " size=" + std::to_string(v.size()) +
            " storage=" + hex_addr(v.buffer_address()) + " limbs=" + limb_list(v.limbs());
      break;
    }
  }
  return out;
}

}  // namespace vbits::zint
