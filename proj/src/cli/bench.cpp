#include <chrono>
#include <cstdio>
#include <ostream>
#include <random>

#include "vbits/cli/commands.hpp"

namespace vbits::cli {

namespace {

using Clock = std::chrono::steady_clock;

template <typename T>
inline void keep_alive(const T& v) {
  asm volatile("" : : "g"(&v) : "memory");
}

// Runs fn `warmup` times untimed, then `iterations` times timed.
template <typename Fn>
BenchRecord measure(std::string name, std::string label, std::uint64_t iterations, Fn&& fn) {
  const std::uint64_t warmup = iterations / 10 + 1;
  for (std::uint64_t i = 0; i < warmup; ++i) fn(i);
  const auto t0 = Clock::now();
  for (std::uint64_t i = 0; i < iterations; ++i) fn(i);
  const auto t1 = Clock::now();
  const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
  return {std::move(name), iterations, ns / static_cast<double>(iterations), std::move(label)};
}

std::vector<std::uint64_t> random_limbs(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint64_t> v(n);
  for (auto& l : v) l = rng();
  v.back() = (v.back() >> 2) | (std::uint64_t{1} << 60);  // positive, full width
  return v;
}

void bench_zint(std::vector<BenchRecord>& out, std::mt19937_64& rng) {
  tagcore::Arena arena;
  constexpr std::size_t kOps = 1 << 10;
  std::vector<std::int64_t> xs(kOps), ys(kOps);
  for (std::size_t i = 0; i < kOps; ++i) {
    xs[i] = static_cast<std::int64_t>(rng() >> 4) - (std::int64_t{1} << 59);
    ys[i] = static_cast<std::int64_t>(rng() >> 4) - (std::int64_t{1} << 59);
  }

  out.push_back(measure("raw_i64_add", "baseline", 10'000'000, [&](std::uint64_t i) {
    std::int64_t r = xs[i % kOps] + ys[i % kOps];
    keep_alive(r);
  }));
  out.push_back(measure("tiny_add", "tiny", 10'000'000, [&](std::uint64_t i) {
    const zint::ZWord r =
        zint::add(arena, zint::make_tiny(xs[i % kOps]), zint::make_tiny(ys[i % kOps]));
    keep_alive(r);
  }));
  out.push_back(measure("tiny_mul", "tiny", 1'000'000, [&](std::uint64_t i) {
    const zint::ZWord r =
        zint::mul(arena, zint::make_tiny(xs[i % kOps] >> 32), zint::make_tiny(ys[i % kOps] >> 32));
    keep_alive(r);
  }));

  struct Case {
    std::size_t limbs;
    std::uint64_t add_iters;
    std::uint64_t mul_iters;
  };
  for (const Case c : {Case{2, 200'000, 200'000}, Case{16, 100'000, 20'000},
                       Case{1024, 5'000, 1'000}, Case{16384, 1'000, 3}, Case{20000, 1'000, 0}}) {
    const auto la = random_limbs(rng, c.limbs);
    const auto lb = random_limbs(rng, c.limbs);
    const zint::ZWord a = zint::from_limbs(arena, la);
    const zint::ZWord b = zint::from_limbs(arena, lb);
    const std::string label(zint::format_name(zint::classify(a)));
    const std::string suffix = "_" + std::to_string(c.limbs);
    out.push_back(measure("zint_add" + suffix, label, c.add_iters, [&](std::uint64_t) {
      const zint::ZWord r = zint::add(arena, a, b);
      keep_alive(r);
      zint::free_z(arena, r);
    }));
    if (c.mul_iters != 0) {
      out.push_back(measure("zint_mul" + suffix, label, c.mul_iters, [&](std::uint64_t) {
        const zint::ZWord r = zint::mul(arena, a, b);
        keep_alive(r);
        zint::free_z(arena, r);
      }));
    }
    zint::free_z(arena, a);
    zint::free_z(arena, b);
  }
}

std::string make_corpus(std::mt19937_64& rng, bool mixed, std::size_t chars) {
  static constexpr const char* kMixed[] = {"a", "\xC3\xA9", "\xE2\x82\xAC", "\xF0\x9F\x98\x80", "z", " "};
  std::string s;
  for (std::size_t i = 0; i < chars; ++i) {
    if (mixed) {
      s += kMixed[rng() % std::size(kMixed)];
    } else {
      s += static_cast<char>('a' + rng() % 26);
    }
  }
  return s;
}

void bench_utf8(std::vector<BenchRecord>& out, std::mt19937_64& rng) {
  constexpr std::size_t kChars = 1 << 16;
  for (const bool mixed : {false, true}) {
    const std::string text = make_corpus(rng, mixed, kChars);
    const utf8::Utf8Buffer s(text);
    const std::string corpus = mixed ? "mixed" : "ascii";
    auto per_char = [](BenchRecord& r) {
      r.ns_per_op /= kChars;
      r.iterations *= kChars;
    };

    // Per-character cost of a full walk.
    auto walk = [&](auto step) {
      return [&s, step](std::uint64_t) {
        utf8::StrIdx idx;
        while (idx.physical() < s.size()) idx = step(idx);
        keep_alive(idx);
      };
    };
    auto rec = measure("utf8_next_" + corpus, "scalar", 50,
                       walk([&s](utf8::StrIdx i) { return utf8::next(s, i); }));
    per_char(rec);
    out.push_back(rec);
    rec = measure("utf8_decode_and_next_" + corpus, "scalar", 50,
                  walk([&s](utf8::StrIdx i) { return utf8::decode_and_next(s, i).next; }));
    per_char(rec);
    out.push_back(rec);

    for (const simd::Utf8Kernels* k : simd::available_kernels()) {
      const std::string isa(simd::isa_name(k->isa));
      rec = measure("utf8_advance_by_" + corpus, isa, 200, [&](std::uint64_t) {
        const auto idx = utf8::advance_by(s, utf8::StrIdx(), kChars, *k);
        keep_alive(idx);
      });
      per_char(rec);
      out.push_back(rec);
      rec = measure("utf8_char_count_" + corpus, isa, 1000, [&](std::uint64_t) {
        const auto n = utf8::char_count(s, *k);
        keep_alive(n);
      });
      per_char(rec);
      out.push_back(rec);
    }
  }
}

void bench_gc(std::vector<BenchRecord>& out, std::mt19937_64& rng) {
  constexpr std::size_t kObjects = 100'000;
  constexpr std::uint64_t kRounds = 5;
  using gc::MarkStrategy;
  for (const auto kind : {MarkStrategy::Kind::RefFieldHighBit, MarkStrategy::Kind::TypeIdHighBit,
                          MarkStrategy::Kind::PaddingByte}) {
    tagcore::Arena arena;
    gc::Heap heap(arena);
    gc::TypeDescriptor d;
    d.type_id = 1;
    d.name = "node";
    d.fields.push_back(gc::FieldSpec::scalar(4));
    if (kind == MarkStrategy::Kind::PaddingByte) d.fields.push_back(gc::FieldSpec::flag());
    const std::size_t r0 = d.fields.size();
    d.fields.push_back(gc::FieldSpec::ref_to(1));
    d.fields.push_back(gc::FieldSpec::ref_to(1));
    d.strategy = kind == MarkStrategy::Kind::RefFieldHighBit ? MarkStrategy::ref_field(r0)
                 : kind == MarkStrategy::Kind::TypeIdHighBit ? MarkStrategy::type_id()
                                                              : MarkStrategy::padding_byte();
    heap.register_type(std::move(d));

    // Each round: a fresh population with a rooted chain over the even nodes
    // and one random cross link per node.
    double total_ns = 0;
    for (std::uint64_t round = 0; round < kRounds; ++round) {
      std::vector<gc::ObjRef> objs;
      objs.reserve(kObjects);
      for (std::size_t i = 0; i < kObjects; ++i) objs.push_back(heap.alloc(1));
      for (std::size_t i = 1; i < kObjects; ++i) {
        heap.set_ref(objs[i], r0 + 1, objs[rng() % kObjects]);
        if (i % 2 == 0) heap.set_ref(objs[i - 2], r0, objs[i]);
      }
      heap.add_root(objs[0]);
      const auto t0 = Clock::now();
      const auto stats = heap.collect();
      const auto t1 = Clock::now();
      keep_alive(stats);
      total_ns += std::chrono::duration<double, std::nano>(t1 - t0).count();
      heap.remove_root(objs[0]);
      heap.collect();
    }
    out.push_back({"gc_collect_100k", kRounds * kObjects, total_ns / (kRounds * kObjects),
                   std::string(gc::strategy_label(kind))});
  }
}

}  // namespace

BenchSuite parse_suite(std::string_view name) {
  if (name == "zint") return BenchSuite::Zint;
  if (name == "utf8") return BenchSuite::Utf8;
  if (name == "gc") return BenchSuite::Gc;
  if (name == "all") return BenchSuite::All;
  throw ParseError("unknown bench suite '" + std::string(name) + "' (expected zint, utf8, gc or all)");
}

std::vector<BenchRecord> run_bench(BenchSuite suite, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BenchRecord> out;
  if (suite == BenchSuite::Zint || suite == BenchSuite::All) bench_zint(out, rng);
  if (suite == BenchSuite::Utf8 || suite == BenchSuite::All) bench_utf8(out, rng);
  if (suite == BenchSuite::Gc || suite == BenchSuite::All) bench_gc(out, rng);
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "name,iterations,ns_per_op,label\n";
  for (const auto& r : records) {
    char ns[64];
    std::snprintf(ns, sizeof ns, "%.3f", r.ns_per_op);
    out << r.name << ',' << r.iterations << ',' << ns << ',' << r.label << '\n';
  }
}

}  // namespace vbits::cli
