#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vbits/gcheap.hpp"
#include "vbits/utf8idx.hpp"
#include "vbits/zint.hpp"

namespace vbits::cli {

// Evaluates + - * and parentheses over decimal literals (unary minus
// allowed). Throws ParseError on malformed input.
zint::Integer evaluate(std::string_view expr);

// "<decimal> [FORMAT]"
std::string zint_eval(std::string_view expr);
std::string zint_inspect(std::string_view decimal);

// One line per character: logical<TAB>physical<TAB>U+XXXX<TAB>char
void utf8_walk(const utf8::Utf8Buffer& text, std::ostream& out);
std::string code_point_label(utf8::CodePoint cp);

// Scripted heap scenario. Lines:
//   type NAME refs=N [scalars=W,W,...] [strategy=refbit|idbit|padbyte]
//   new VAR TYPE
//   link VAR FIELD (VAR|null)     FIELD is the reference number, from 0
//   root VAR | unroot VAR
//   collect
// Blank lines and '#' comments are ignored. Throws ParseError with the
// line number on a bad script.
struct GcScriptOptions {
  gc::MarkStrategy::Kind strategy = gc::MarkStrategy::Kind::RefFieldHighBit;
  bool trace = false;
};
void run_gc_script(std::istream& script, const GcScriptOptions& options, std::ostream& out);

gc::MarkStrategy::Kind parse_strategy(std::string_view name);

struct BenchRecord {
  std::string name;
  std::uint64_t iterations = 0;
  double ns_per_op = 0;
  std::string label;
};

enum class BenchSuite { Zint, Utf8, Gc, All };
BenchSuite parse_suite(std::string_view name);

std::vector<BenchRecord> run_bench(BenchSuite suite, std::uint64_t seed);
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

}  // namespace vbits::cli
