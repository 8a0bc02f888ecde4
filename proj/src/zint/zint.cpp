#include <algorithm>
#include <bit>
#include <cstring>

#include "vbits/zint.hpp"

namespace vbits::zint {

std::string_view format_name(Format f) noexcept {
  switch (f) {
    case Format::Tiny:
      return "TINY";
    case Format::Large:
      return "LARGE";
    case Format::Huge:
      return "HUGE";
  }
  return "?";
}

std::int64_t decode_tiny(ZWord z) {
  if (classify(z) != Format::Tiny) {
    throw FatalError("decode_tiny on a non-Tiny word");
  }
  return static_cast<std::int64_t>(z.w << 1) >> 1;
}

ZWord pack_large(const LargeFields& f) {
  if (f.cap_log2 > kMaxCapLog2) {
    throw RangeError("Large capacity exponent " + std::to_string(f.cap_log2) + " exceeds 14");
  }
  if (f.size < 1 || f.size > kMaxLargeLimbs) {
    throw RangeError("Large size " + std::to_string(f.size) + " outside 1..16384");
  }
  if (f.size > f.capacity()) {
    throw RangeError("Large size exceeds capacity");
  }
  return ZWord{kTagBit | (std::uint64_t{f.cap_log2} << kCapShift) |
               (std::uint64_t{f.size - 1} << kSizeShift) | f.buffer.value()};
}

LargeFields unpack_large(ZWord z) {
  LargeFields f;
  f.cap_log2 = static_cast<unsigned>((z.w >> kCapShift) & kCapMask);
  f.size = static_cast<std::size_t>((z.w >> kSizeShift) & kSizeMask) + 1;
  f.buffer = Packed45::from_raw(z.w & tagcore::kPackedMask);
  return f;
}

LimbView decode(ZWord z) {
  LimbView v;
  switch (classify(z)) {
    case Format::Tiny:
      v.format_ = Format::Tiny;
      v.inline_limb_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(z.w << 1) >> 1);
      return v;
    case Format::Large: {
      const LargeFields f = unpack_large(z);
      if (f.size > f.capacity()) {
        throw IntegrityError("corrupted Large word: size " + std::to_string(f.size) +
                             " > capacity " + std::to_string(f.capacity()));
      }
      v.format_ = Format::Large;
      v.buffer_ = tagcore::unpack(f.buffer).as<const std::uint64_t>();
      v.size_ = f.size;
      v.capacity_ = f.capacity();
      return v;
    }
    case Format::Huge: {
      const std::uint64_t a = z.w & tagcore::kAddressMask;
      if (a == 0 || (a & 7) != 0) {
        throw IntegrityError("corrupted Huge word: bad header address");
      }
      HugeHeader h;
      std::memcpy(&h, reinterpret_cast<const void*>(static_cast<std::uintptr_t>(a)), sizeof h);
      if (h.size <= kMaxLargeLimbs || h.size > h.capacity) {
        throw IntegrityError("corrupted Huge header: size " + std::to_string(h.size) +
                             ", capacity " + std::to_string(h.capacity));
      }
      v.format_ = Format::Huge;
      v.header_ = a;
      v.buffer_ = reinterpret_cast<const std::uint64_t*>(static_cast<std::uintptr_t>(h.storage));
      v.size_ = static_cast<std::size_t>(h.size);
      v.capacity_ = static_cast<std::size_t>(h.capacity);
      return v;
    }
  }
  return v;
}

std::size_t minimal_size(std::span<const std::uint64_t> limbs) noexcept {
  std::size_t n = limbs.size();
  while (n > 1) {
    const std::uint64_t top = limbs[n - 1];
    const bool next_negative = static_cast<std::int64_t>(limbs[n - 2]) < 0;
    if ((top == 0 && !next_negative) || (top == ~std::uint64_t{0} && next_negative)) {
      --n;
    } else {
      break;
    }
  }
  return n == 0 ? 1 : n;
}

LimbBuffer alloc_limbs(Arena& arena, std::size_t capacity) {
  LimbBuffer b;
  b.addr = arena.alloc(capacity * sizeof(std::uint64_t));
  b.capacity = capacity;
  return b;
}

void free_limbs(Arena& arena, const LimbBuffer& buf) { arena.free(buf.addr); }

LimbBuffer grow(Arena& arena, LimbBuffer buf, std::size_t needed) {
  if (needed <= buf.capacity) {
    throw RangeError("grow: needed " + std::to_string(needed) + " fits current capacity " +
                     std::to_string(buf.capacity));
  }
  const std::size_t cap = std::max(buf.capacity * 2, std::bit_ceil(needed));
  LimbBuffer next = alloc_limbs(arena, cap);
  next.size = buf.size;
  if (buf.size != 0) {
    std::memcpy(next.data(), buf.data(), buf.size * sizeof(std::uint64_t));
  }
  free_limbs(arena, buf);
  return next;
}

ZWord encode_i64(Arena& arena, std::int64_t v) {
  if (fits_tiny(v)) return make_tiny(v);
  const std::uint64_t limb = static_cast<std::uint64_t>(v);
  return from_limbs(arena, std::span<const std::uint64_t>(&limb, 1));
}

ZWord from_limbs(Arena& arena, std::span<const std::uint64_t> limbs) {
  if (limbs.empty()) return make_tiny(0);
  const std::size_t n = minimal_size(limbs);
  if (n == 1) {
    const auto v = static_cast<std::int64_t>(limbs[0]);
    if (fits_tiny(v)) return make_tiny(v);
  }
  const std::size_t cap = std::bit_ceil(n);
  LimbBuffer buf = alloc_limbs(arena, cap);
  std::memcpy(buf.data(), limbs.data(), n * sizeof(std::uint64_t));
  if (n <= kMaxLargeLimbs) {
    LargeFields f;
    f.cap_log2 = static_cast<unsigned>(std::countr_zero(cap));
    f.size = n;
    f.buffer = tagcore::pack(buf.addr);
    return pack_large(f);
  }
  Address48 header;
  try {
    header = arena.alloc(sizeof(HugeHeader));
  } catch (...) {
    free_limbs(arena, buf);
    throw;
  }
  const HugeHeader h{cap, n, buf.addr.value()};
  std::memcpy(header.as(), &h, sizeof h);
  return make_huge_word(header);
}

ZWord clone(Arena& arena, ZWord a) {
  if (classify(a) == Format::Tiny) return a;
  return from_limbs(arena, decode(a).limbs());
}

void free_z(Arena& arena, ZWord a) {
  switch (classify(a)) {
    case Format::Tiny:
      return;
    case Format::Large:
      arena.free(tagcore::unpack(unpack_large(a).buffer));
      return;
    case Format::Huge: {
      const LimbView v = decode(a);
      arena.free(Address48::from_raw(v.buffer_address()));
      arena.free(Address48::from_raw(v.header_address()));
      return;
    }
  }
}

bool same_encoding(ZWord a, ZWord b) {
  const Format fa = classify(a);
  if (fa != classify(b)) return false;
  if (fa == Format::Tiny) return a == b;
  const LimbView va = decode(a);
  const LimbView vb = decode(b);
  if (va.size() != vb.size() || va.capacity() != vb.capacity()) return false;
  const auto la = va.limbs();
  const auto lb = vb.limbs();
  return std::equal(la.begin(), la.end(), lb.begin());
}

}  // namespace vbits::zint
