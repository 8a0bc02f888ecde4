#include <cctype>
#include <cstdio>
#include <ostream>

#include "vbits/cli/commands.hpp"

namespace vbits::cli {

namespace {

using zint::Integer;

// expr   := term (('+' | '-') term)*
// term   := unary ('*' unary)*
// unary  := '-' unary | '(' expr ')' | number
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Integer parse() {
    Integer v = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  // Also accepts U+2212 as minus.
  bool eat_minus() {
    skip_ws();
    if (src_.substr(pos_).starts_with('-')) {
      pos_ += 1;
      return true;
    }
    if (src_.substr(pos_).starts_with("\xE2\x88\x92")) {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("expression: " + why + " at offset " + std::to_string(pos_));
  }

  Integer expr() {
    Integer v = term();
    for (;;) {
      if (eat('+')) {
        v = v + term();
      } else if (eat_minus()) {
        v = v - term();
      } else {
        return v;
      }
    }
  }

  Integer term() {
    Integer v = unary();
    while (eat('*')) v = v * unary();
    return v;
  }

  Integer unary() {
    if (eat_minus()) return -unary();
    if (eat('(')) {
      Integer v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail(pos_ < src_.size() ? "expected a number" : "unexpected end of input");
    return Integer::parse(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

zint::Integer evaluate(std::string_view expr) { return Parser(expr).parse(); }

std::string zint_eval(std::string_view expr) {
  const Integer v = evaluate(expr);
  return v.to_string() + " [" + std::string(zint::format_name(v.format())) + "]";
}

std::string zint_inspect(std::string_view decimal) {
  const Integer v = Integer::parse(decimal);
  return zint::inspect(v.word());
}

std::string code_point_label(utf8::CodePoint cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

void utf8_walk(const utf8::Utf8Buffer& text, std::ostream& out) {
  utf8::StrIdx idx;
  while (idx.physical() < text.size()) {
    // Validates before stepping so a bad byte is reported, not skipped.
    utf8::decode_at(text, idx.physical());
    const auto [cp, next] = utf8::decode_and_next(text, idx);
    const std::string_view glyph(reinterpret_cast<const char*>(text.data()) + idx.physical(),
                                 next.physical() - idx.physical());
    out << idx.logical() << '\t' << idx.physical() << '\t' << code_point_label(cp) << '\t';
    if (cp < 0x20 || cp == 0x7F) {
      out << '.';  // keep one record per line
    } else {
      out << glyph;
    }
    out << '\n';
    idx = next;
  }
}

}  // namespace vbits::cli
