#include "vbits/zint.hpp"

namespace vbits::zint {

using tagcore::thread_arena;

Integer::Integer(std::int64_t v) : w_(encode_i64(thread_arena(), v)) {}

Integer Integer::parse(std::string_view decimal) {
  return adopt(from_decimal(thread_arena(), decimal));
}

Integer::Integer(const Integer& o) : w_(clone(thread_arena(), o.w_)) {}

Integer& Integer::operator=(const Integer& o) {
  if (this != &o) {
    const ZWord copy = clone(thread_arena(), o.w_);
    free_z(thread_arena(), w_);
    w_ = copy;
  }
  return *this;
}

Integer& Integer::operator=(Integer&& o) noexcept {
  if (this != &o) {
    free_z(thread_arena(), w_);
    w_ = o.w_;
    o.w_ = ZWord{};
  }
  return *this;
}

Integer::~Integer() { free_z(thread_arena(), w_); }

Integer operator+(const Integer& a, const Integer& b) {
  return Integer::adopt(add(thread_arena(), a.w_, b.w_));
}

Integer operator-(const Integer& a, const Integer& b) {
  return Integer::adopt(sub(thread_arena(), a.w_, b.w_));
}

Integer operator*(const Integer& a, const Integer& b) {
  return Integer::adopt(mul(thread_arena(), a.w_, b.w_));
}

Integer Integer::operator-() const { return adopt(neg(thread_arena(), w_)); }

}  // namespace vbits::zint
