#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "support/oracle.hpp"
#include "vbits/cli/commands.hpp"

namespace vbits::cli {
namespace {

TEST(ZintEval, Examples) {
  EXPECT_EQ(zint_eval("4611686018427387903 + 1"), "4611686018427387904 [LARGE]");
  EXPECT_EQ(zint_eval("0 * 123456789123456789123456789"), "0 [TINY]");
  EXPECT_EQ(zint_eval("5 - 5"), "0 [TINY]");
}

TEST(ZintEval, PrecedenceParenthesesAndMinus) {
  EXPECT_EQ(zint_eval("2 + 3 * 4"), "14 [TINY]");
  EXPECT_EQ(zint_eval("(2 + 3) * 4"), "20 [TINY]");
  EXPECT_EQ(zint_eval("-(4611686018427387904) + 0"), "-4611686018427387904 [TINY]");
  EXPECT_EQ(zint_eval("\xE2\x88\x92" "7 - -3"), "-4 [TINY]");
  EXPECT_EQ(zint_eval("1-1-1"), "-1 [TINY]");
}

TEST(ZintEval, RejectsMalformed) {
  for (const char* bad : {"", "1 +", "(1", "1 2", "2^10", "abc", "1 / 2"}) {
    EXPECT_THROW(zint_eval(bad), ParseError) << bad;
  }
}

// Random expression trees rendered as text and evaluated by GMP in parallel.
struct Expr {
  std::string text;
  mpz_class value;
};

Expr random_expr(std::mt19937_64& rng, int depth) {
  if (depth == 0 || rng() % 3 == 0) {
    mpz_class v = testing::boundary_biased(rng, false);
    if (v < 0) return {"(-" + mpz_class(-v).get_str() + ")", v};
    return {v.get_str(), v};
  }
  const Expr a = random_expr(rng, depth - 1);
  const Expr b = random_expr(rng, depth - 1);
  switch (rng() % 3) {
    case 0: return {"(" + a.text + " + " + b.text + ")", a.value + b.value};
    case 1: return {"(" + a.text + " - " + b.text + ")", a.value - b.value};
    default: return {a.text + " * " + b.text, a.value * b.value};
  }
}

TEST(ZintEval, AgreesWithReferenceOnCorpus) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_expr(rng, 3);
    const zint::Integer v = evaluate(e.text);
    ASSERT_EQ(v.to_string(), e.value.get_str()) << e.text;
    ASSERT_EQ(v.format(), testing::expected_format(e.value)) << e.text;
  }
}

TEST(ZintInspect, RendersLayout) {
  EXPECT_EQ(zint_inspect("5"), "TINY w=0x0000000000000005 value=5");
  const std::string large = zint_inspect("18446744073709551616");  // 2^64
  EXPECT_EQ(large.rfind("LARGE ", 0), 0u) << large;
  EXPECT_NE(large.find("cap=2^1 size=2"), std::string::npos) << large;
  EXPECT_NE(large.find("limbs=[0x0000000000000000, 0x0000000000000001]"), std::string::npos) << large;
}

TEST(Utf8Walk, PrintsIndexPairs) {
  std::ostringstream out;
  utf8_walk(utf8::Utf8Buffer(std::string_view("a\xC3\xA9\xE2\x82\xAC\n")), out);
  EXPECT_EQ(out.str(),
            "0\t0\tU+0061\ta\n"
            "1\t1\tU+00E9\t\xC3\xA9\n"
            "2\t3\tU+20AC\t\xE2\x82\xAC\n"
            "3\t6\tU+000A\t.\n");
}

TEST(Utf8Walk, ReportsBadByte) {
  std::ostringstream out;
  EXPECT_THROW(utf8_walk(utf8::Utf8Buffer(std::string_view("ab\x80")), out), InvalidSequence);
}

constexpr const char* kScript = R"(# two roots, a cycle, a dropped branch
type pair refs=2
type leaf refs=1 scalars=8
new a pair
new b pair
new l leaf
link a 0 b
link b 1 l
new x pair
new y pair
link x 0 y
link y 0 x   # unreachable cycle
root a
collect
link b 1 null
collect
unroot a
collect
)";

class GcScript : public ::testing::TestWithParam<const char*> {};

TEST_P(GcScript, StatsMatchReachability) {
  std::istringstream in(kScript);
  std::ostringstream out;
  GcScriptOptions opts;
  opts.strategy = parse_strategy(GetParam());
  run_gc_script(in, opts, out);
  const std::string s = GetParam();
  EXPECT_EQ(out.str(), "collect: live=3 freed=2 strategy=" + s + "\n" +
                           "collect: live=2 freed=1 strategy=" + s + "\n" +
                           "collect: live=0 freed=2 strategy=" + s + "\n");
}

TEST_P(GcScript, TraceNamesObjects) {
  std::istringstream in("type t refs=1\nnew p t\nnew q t\nroot p\ncollect\n");
  std::ostringstream out;
  GcScriptOptions opts;
  opts.strategy = parse_strategy(GetParam());
  opts.trace = true;
  run_gc_script(in, opts, out);
  const std::string s = out.str();
  EXPECT_NE(s.find("mark p (t)"), std::string::npos) << s;
  EXPECT_NE(s.find("sweep keep p (t)"), std::string::npos) << s;
  EXPECT_NE(s.find("sweep free q (t)"), std::string::npos) << s;
}

INSTANTIATE_TEST_SUITE_P(Strategies, GcScript, ::testing::Values("refbit", "idbit", "padbyte"));

TEST(GcScriptErrors, ReportLineNumbers) {
  const std::pair<const char*, const char*> cases[] = {
      {"type t refs=1\nbogus\n", "line 2"},
      {"new a nosuch\n", "line 1"},
      {"type t refs=1\nnew a t\nlink a 5 a\n", "line 3"},
      {"type t refs=0\n", "line 1"},  // refbit needs a reference slot
      {"type t refs=1\nnew a t\ncollect\nroot a\n", "line 4"},  // a was collected
  };
  for (const auto& [script, where] : cases) {
    std::istringstream in(script);
    std::ostringstream out;
    try {
      run_gc_script(in, {}, out);
      ADD_FAILURE() << "no error for: " << script;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(parse_strategy("mark"), ParseError);
}

TEST(Bench, CsvShape) {
  std::vector<BenchRecord> recs = {{"tiny_add", 1000, 1.5, "tiny"}, {"x", 2, 0.25, "LARGE"}};
  std::ostringstream out;
  write_csv(out, recs);
  EXPECT_EQ(out.str(), "name,iterations,ns_per_op,label\ntiny_add,1000,1.500,tiny\nx,2,0.250,LARGE\n");
  EXPECT_THROW(parse_suite("nope"), ParseError);
}

TEST(Bench, UtfSuiteRecordsArePositive) {
  const auto recs = run_bench(BenchSuite::Utf8, 7);
  ASSERT_FALSE(recs.empty());
  for (const auto& r : recs) {
    EXPECT_GT(r.iterations, 0u) << r.name;
    EXPECT_TRUE(std::isfinite(r.ns_per_op)) << r.name;
    EXPECT_EQ(r.name.find(','), std::string::npos);
  }
}

#ifdef VBITS_TOOL_PATH
int run_tool(const std::string& args, std::string& output) {
  const std::string cmd = std::string(VBITS_TOOL_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return -1;
  output.clear();
  char buf[256];
  while (std::fgets(buf, sizeof buf, p) != nullptr) output += buf;
  const int status = pclose(p);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Tool, ExitCodesAndOneLineDiagnostics) {
  std::string out;
  EXPECT_EQ(run_tool("zint eval '4611686018427387903 + 1'", out), 0);
  EXPECT_EQ(out, "4611686018427387904 [LARGE]\n");
  EXPECT_EQ(run_tool("zint eval '1 +'", out), 1);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 1) << out;
  EXPECT_EQ(run_tool("utf8 validate \"$(printf '\\303')\"", out), 1);
  EXPECT_EQ(run_tool("utf8 walk --file /nonexistent/file", out), 1);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 1) << out;
  EXPECT_EQ(run_tool("gc demo --strategy padbyte", out), 0);
  EXPECT_NE(out.find("collect: live=3 freed=2 strategy=padbyte"), std::string::npos) << out;
  EXPECT_NE(run_tool("gc demo --strategy nope", out), 0);
}

TEST(Tool, InputFileUnchanged) {
  const std::string path = ::testing::TempDir() + "walk_input.txt";
  const std::string text = "caf\xC3\xA9\n";
  std::ofstream(path, std::ios::binary) << text;
  std::string out;
  EXPECT_EQ(run_tool("utf8 walk --file " + path, out), 0);
  EXPECT_NE(out.find("3\t3\tU+00E9"), std::string::npos) << out;
  std::ifstream in(path, std::ios::binary);
  const std::string after{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  EXPECT_EQ(after, text);
}
#endif

}  // namespace
}  // namespace vbits::cli
