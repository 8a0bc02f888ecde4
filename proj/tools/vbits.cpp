#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "vbits/cli/commands.hpp"

namespace {

using namespace vbits;

// Built-in scenario for `gc demo` without a script: a rooted chain, an
// unrooted cycle and a node that becomes garbage after an unlink.
constexpr const char* kDemoScript = R"(type pair refs=2
new a pair
new b pair
new c pair
link a 0 b
link b 1 c
new x pair
new y pair
link x 0 y
link y 0 x
root a
collect
link b 1 null
collect
)";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Literal argument or --file contents; exactly one of them.
std::string text_input(const std::string& literal, const std::string& file) {
  if (!file.empty() && !literal.empty()) throw Error("give either TEXT or --file, not both");
  if (!file.empty()) return read_file(file);
  return literal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inspect and benchmark vacant-bit encodings"};
  app.require_subcommand(1);

  std::string expr, value, text, file, script, strategy = "refbit", suite = "all", out_path;
  bool strict = false;
  std::uint64_t seed = 1;

  auto* zint_cmd = app.add_subcommand("zint", "packed multi-precision integers");
  zint_cmd->require_subcommand(1);
  auto* eval = zint_cmd->add_subcommand("eval", "evaluate + - * ( ) over decimal literals");
  eval->add_option("expr", expr, "expression")->required();
  auto* inspect = zint_cmd->add_subcommand("inspect", "show the word layout of a value");
  inspect->add_option("value", value, "decimal value")->required();

  auto* utf8_cmd = app.add_subcommand("utf8", "UTF-8 cursor");
  utf8_cmd->require_subcommand(1);
  auto* walk = utf8_cmd->add_subcommand("walk", "print logical/physical index per character");
  walk->add_option("text", text, "literal text");
  walk->add_option("--file", file, "read the text from a file");
  auto* validate = utf8_cmd->add_subcommand("validate", "check that input is well formed");
  validate->add_option("text", text, "literal text");
  validate->add_option("--file", file, "read the text from a file");
  validate->add_flag("--strict", strict, "also reject overlong forms, surrogates, > U+10FFFF");

  auto* gc_cmd = app.add_subcommand("gc", "mark-and-sweep heap");
  gc_cmd->require_subcommand(1);
  auto* demo = gc_cmd->add_subcommand("demo", "run a heap script and print collection stats");
  auto* trace = gc_cmd->add_subcommand("trace", "like demo, also listing mark and sweep events");
  for (auto* sub : {demo, trace}) {
    sub->add_option("script", script, "script file (built-in demo when omitted)");
    sub->add_option("--strategy", strategy, "mark bit location")
        ->check(CLI::IsMember({"refbit", "idbit", "padbyte"}));
  }

  auto* bench = app.add_subcommand("bench", "micro-benchmarks, CSV output");
  bench->add_option("suite", suite, "zint, utf8, gc or all")
      ->check(CLI::IsMember({"zint", "utf8", "gc", "all"}));
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--out", out_path, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (eval->parsed()) {
      std::cout << cli::zint_eval(expr) << '\n';
    } else if (inspect->parsed()) {
      std::cout << cli::zint_inspect(value) << '\n';
    } else if (walk->parsed()) {
      const std::string input = text_input(text, file);
      cli::utf8_walk(utf8::Utf8Buffer(input), std::cout);
    } else if (validate->parsed()) {
      const std::string input = text_input(text, file);
      const utf8::Utf8Buffer buf(input);
      const auto v = utf8::validate(buf, strict);
      if (!v.valid) {
        std::cerr << "vbits: invalid UTF-8 at byte " << v.error_offset << " after " << v.char_count
                  << " characters\n";
        return 1;
      }
      std::cout << "valid: " << v.char_count << " characters, " << buf.size() << " bytes\n";
    } else if (demo->parsed() || trace->parsed()) {
      cli::GcScriptOptions opts;
      opts.strategy = cli::parse_strategy(strategy);
      opts.trace = trace->parsed();
      std::istringstream in(script.empty() ? std::string(kDemoScript) : read_file(script));
      cli::run_gc_script(in, opts, std::cout);
    } else if (bench->parsed()) {
      const auto records = cli::run_bench(cli::parse_suite(suite), seed);
      if (out_path.empty()) {
        cli::write_csv(std::cout, records);
      } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write '" + out_path + "'");
        cli::write_csv(out, records);
        if (!out.flush()) throw Error("write to '" + out_path + "' failed");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "vbits: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
