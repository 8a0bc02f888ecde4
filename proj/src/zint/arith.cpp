#include <algorithm>
#include <vector>

#include "vbits/zint.hpp"

namespace vbits::zint {

namespace {

using Limbs = std::span<const std::uint64_t>;
using u128 = unsigned __int128;

inline std::uint64_t sign_fill(Limbs x) noexcept {
  return static_cast<std::int64_t>(x.back()) < 0 ? ~std::uint64_t{0} : 0;
}

inline std::uint64_t limb_at(Limbs x, std::size_t i, std::uint64_t fill) noexcept {
  return i < x.size() ? x[i] : fill;
}

// r = a + (b ^ flip) + carry_in, over n limbs with sign extension.
std::vector<std::uint64_t> add_limbs(Limbs a, Limbs b, bool subtract) {
  const std::size_t n = std::max(a.size(), b.size()) + 1;
  const std::uint64_t fa = sign_fill(a);
  const std::uint64_t fb = sign_fill(b);
  const std::uint64_t flip = subtract ? ~std::uint64_t{0} : 0;
  std::vector<std::uint64_t> r(n);
  std::uint64_t carry = subtract ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = limb_at(a, i, fa);
    const std::uint64_t y = limb_at(b, i, fb) ^ flip;
    const std::uint64_t s = x + y;
    const std::uint64_t c1 = s < x;
    r[i] = s + carry;
    carry = c1 | (r[i] < s);
  }
  return r;
}

// Unsigned magnitude of a two's complement limb sequence.
std::vector<std::uint64_t> magnitude(Limbs x, bool negative) {
  std::vector<std::uint64_t> m(x.begin(), x.end());
  if (negative) {
    std::uint64_t carry = 1;
    for (auto& limb : m) {
      limb = ~limb + carry;
      carry = (carry && limb == 0) ? 1 : 0;
    }
  }
  return m;
}

void negate_in_place(std::vector<std::uint64_t>& r) {
  std::uint64_t carry = 1;
  for (auto& limb : r) {
    limb = ~limb + carry;
    carry = (carry && limb == 0) ? 1 : 0;
  }
}

std::strong_ordering cmp_limbs(Limbs a, Limbs b) {
  a = a.first(minimal_size(a));
  b = b.first(minimal_size(b));
  const bool na = static_cast<std::int64_t>(a.back()) < 0;
  const bool nb = static_cast<std::int64_t>(b.back()) < 0;
  if (na != nb) return na ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.size() != b.size()) {
    const bool a_longer = a.size() > b.size();
    // A longer minimal encoding has larger magnitude.
    return (a_longer != na) ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  const std::size_t n = a.size();
  const auto ta = static_cast<std::int64_t>(a[n - 1]);
  const auto tb = static_cast<std::int64_t>(b[n - 1]);
  if (ta != tb) return ta <=> tb;
  for (std::size_t i = n - 1; i-- > 0;) {
    if (a[i] != b[i]) return a[i] <=> b[i];
  }
  return std::strong_ordering::equal;
}

}  // namespace

ZWord add(Arena& arena, ZWord a, ZWord b) {
  if (classify(a) == Format::Tiny && classify(b) == Format::Tiny) {
    // Both operands are within +-2^62, so the sum cannot overflow int64.
    return encode_i64(arena, decode_tiny(a) + decode_tiny(b));
  }
  const LimbView va = decode(a);
  const LimbView vb = decode(b);
  return from_limbs(arena, add_limbs(va.limbs(), vb.limbs(), false));
}

ZWord sub(Arena& arena, ZWord a, ZWord b) {
  if (classify(a) == Format::Tiny && classify(b) == Format::Tiny) {
    return encode_i64(arena, decode_tiny(a) - decode_tiny(b));
  }
  const LimbView va = decode(a);
  const LimbView vb = decode(b);
  return from_limbs(arena, add_limbs(va.limbs(), vb.limbs(), true));
}

ZWord neg(Arena& arena, ZWord a) {
  if (classify(a) == Format::Tiny) return encode_i64(arena, -decode_tiny(a));
  const std::uint64_t zero = 0;
  return from_limbs(arena, add_limbs(Limbs(&zero, 1), decode(a).limbs(), true));
}

ZWord mul(Arena& arena, ZWord a, ZWord b) {
  if (classify(a) == Format::Tiny && classify(b) == Format::Tiny) {
    const __int128 p = static_cast<__int128>(decode_tiny(a)) * decode_tiny(b);
    if (p >= kTinyMin && p <= kTinyMax) return make_tiny(static_cast<std::int64_t>(p));
    const std::uint64_t limbs[2] = {static_cast<std::uint64_t>(p),
                                    static_cast<std::uint64_t>(p >> 64)};
    return from_limbs(arena, limbs);
  }
  const LimbView va = decode(a);
  const LimbView vb = decode(b);
  const bool na = va.negative();
  const bool nb = vb.negative();
  const auto ma = magnitude(va.limbs(), na);
  const auto mb = magnitude(vb.limbs(), nb);

  // An n-limb by m-limb product needs n + m limbs, plus one for the sign.
  std::vector<std::uint64_t> r(ma.size() + mb.size() + 1, 0);
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ma[i] == 0) continue;
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      const u128 t = static_cast<u128>(ma[i]) * mb[j] + r[i + j] + carry;
      r[i + j] = static_cast<std::uint64_t>(t);
      carry = static_cast<std::uint64_t>(t >> 64);
    }
    r[i + mb.size()] = carry;
  }
  if (na != nb) negate_in_place(r);
  return from_limbs(arena, r);
}

std::strong_ordering cmp(ZWord a, ZWord b) {
  if (classify(a) == Format::Tiny && classify(b) == Format::Tiny) {
    // Shifting out the format bit leaves the value times two.
    return static_cast<std::int64_t>(a.w << 1) <=> static_cast<std::int64_t>(b.w << 1);
  }
  return cmp_limbs(decode(a).limbs(), decode(b).limbs());
}

}  // namespace vbits::zint
