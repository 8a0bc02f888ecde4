// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "support/oracle.hpp"
#include "vbits/gcheap.hpp"
#include "vbits/utf8idx.hpp"
#include "vbits/zint.hpp"

namespace {

using namespace vbits;
using testing::pow2;
using testing::to_mpz;
using zint::Format;
using zint::ZWord;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failure only.
  bool check(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
    return ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome tiny_boundaries() {
  Outcome o;
  tagcore::Arena arena;
  for (std::int64_t v : {zint::kTinyMin, std::int64_t{-1}, std::int64_t{0}, std::int64_t{1}, zint::kTinyMax}) {
    const ZWord w = zint::encode_i64(arena, v);
    o.check(zint::classify(w) == Format::Tiny, std::to_string(v) + " not Tiny");
    o.check(zint::decode_tiny(w) == v, std::to_string(v) + " did not round-trip");
  }
  for (const mpz_class& v : std::initializer_list<mpz_class>{mpz_class(zint::kTinyMax) + 1, mpz_class(zint::kTinyMin) - 1}) {
    const ZWord w = testing::from_mpz(arena, v);
    o.check(zint::classify(w) == Format::Large, v.get_str() + " not Large");
    o.check(to_mpz(w) == v, v.get_str() + " did not round-trip");
    zint::free_z(arena, w);
  }
  // The same boundaries reached by arithmetic.
  const ZWord up = zint::add(arena, zint::make_tiny(zint::kTinyMax), zint::make_tiny(1));
  const ZWord down = zint::sub(arena, zint::make_tiny(zint::kTinyMin), zint::make_tiny(1));
  o.check(zint::classify(up) == Format::Large && to_mpz(up) == pow2(62), "2^62 - 1 + 1");
  o.check(zint::classify(down) == Format::Large && to_mpz(down) == -pow2(62) - 1, "-2^62 - 1");
  zint::free_z(arena, up);
  zint::free_z(arena, down);
  o.check(arena.live_count() == 0, "leaked allocations");
  if (o.pass) o.detail = "5 Tiny round-trips, 2 Large promotions";
  return o;
}

Outcome format_frontier() {
  Outcome o;
  tagcore::Arena arena;
  const mpz_class top = pow2(64 * zint::kMaxLargeLimbs - 1);  // needs 16385 limbs
  const mpz_class below = top - 1;                             // fits in 16384
  const ZWord large = testing::from_mpz(arena, below);
  const ZWord one = zint::make_tiny(1);
  const ZWord huge = zint::add(arena, large, one);
  const ZWord back = zint::sub(arena, huge, one);

  const auto dl = zint::decode(large);
  o.check(dl.format() == Format::Large && dl.size() == zint::kMaxLargeLimbs, "16384 limbs not Large");
  const auto dh = zint::decode(huge);
  o.check(dh.format() == Format::Huge && dh.size() == zint::kMaxLargeLimbs + 1, "16385 limbs not Huge");
  o.check(to_mpz(huge) == top, "frontier sum wrong");
  o.check(zint::classify(back) == Format::Large && zint::same_encoding(back, large),
          "subtracting back did not demote to the canonical Large word");
  // Negative side: -2^(64*16384-1) fits 16384 limbs, one less does not.
  const ZWord neg_large = testing::from_mpz(arena, -top);
  const ZWord neg_huge = zint::sub(arena, neg_large, one);
  o.check(zint::classify(neg_large) == Format::Large, "-2^1048575 not Large");
  o.check(zint::classify(neg_huge) == Format::Huge && to_mpz(neg_huge) == -top - 1, "negative frontier");
  for (ZWord w : {large, huge, back, neg_large, neg_huge}) zint::free_z(arena, w);
  o.check(arena.live_count() == 0, "leaked allocations");
  if (o.pass) o.detail = "Large at 16384 limbs, Huge at 16385, demotion on the way back";
  return o;
}

Outcome differential() {
  Outcome o;
  const auto t0 = Clock::now();
  tagcore::Arena arena;
  std::mt19937_64 rng(20240601);
  constexpr int kCases = 100'000;
  int counts[4] = {};
  for (int i = 0; i < kCases && o.pass; ++i) {
    const mpz_class a = testing::boundary_biased(rng);
    const mpz_class b = testing::boundary_biased(rng);
    const ZWord wa = testing::from_mpz(arena, a);
    const ZWord wb = testing::from_mpz(arena, b);
    const bool both_frontier = zint::classify(wa) != Format::Tiny &&
                               zint::decode(wa).size() > 4096 && zint::decode(wb).size() > 4096;
    int op = static_cast<int>(rng() % 4);
    if (op == 2 && both_frontier) op = 0;  // quadratic mul on two 2^20-bit operands is out of budget
    ++counts[op];
    const std::string where = "case " + std::to_string(i);
    if (op == 3) {
      const auto c = zint::cmp(wa, wb);
      const int ref = cmp(a, b);
      const bool ok = (ref < 0 && c < 0) || (ref == 0 && c == 0) || (ref > 0 && c > 0);
      o.check(ok, where + ": cmp mismatch");
    } else {
      const ZWord r = op == 0 ? zint::add(arena, wa, wb) : op == 1 ? zint::sub(arena, wa, wb) : zint::mul(arena, wa, wb);
      const mpz_class ref = op == 0 ? mpz_class(a + b) : op == 1 ? mpz_class(a - b) : mpz_class(a * b);
      o.check(to_mpz(r) == ref, where + ": value mismatch");
      o.check(zint::decode(r).limbs().size() == testing::mpz_to_limbs(ref).size(), where + ": width not minimal");
      o.check(zint::classify(r) == testing::expected_format(ref), where + ": wrong format");
      zint::free_z(arena, r);
    }
    zint::free_z(arena, wa);
    zint::free_z(arena, wb);
  }
  const double secs = seconds_since(t0);
  o.check(arena.live_count() == 0, "leaked allocations");
  o.check(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d cases (add %d, sub %d, mul %d, cmp %d) in %.1f s", kCases, counts[0],
                  counts[1], counts[2], counts[3], secs);
    o.detail = buf;
  }
  return o;
}

Outcome canonicality() {
  Outcome o;
  tagcore::Arena arena;
  std::mt19937_64 rng(77);
  constexpr int kValues = 10'000;
  for (int i = 0; i < kValues && o.pass; ++i) {
    const mpz_class v = testing::boundary_biased(rng, /*allow_frontier=*/i % 500 == 0);
    const mpz_class r = testing::boundary_biased(rng, false);
    // Path 1: (v + r) - r through the arithmetic.
    const ZWord wv = testing::from_mpz(arena, v);
    const ZWord wr = testing::from_mpz(arena, r);
    const ZWord sum = zint::add(arena, wv, wr);
    const ZWord p1 = zint::sub(arena, sum, wr);
    // Path 2: decimal text, then negate twice.
    const ZWord parsed = zint::from_decimal(arena, v.get_str());
    const ZWord n1 = zint::neg(arena, parsed);
    const ZWord p2 = zint::neg(arena, n1);

    const auto d1 = zint::decode(p1);
    const auto d2 = zint::decode(p2);
    const std::string where = "value " + std::to_string(i);
    o.check(d1.format() == d2.format(), where + ": classification differs");
    o.check(d1.size() == d2.size() && d1.capacity() == d2.capacity(), where + ": size/capacity differ");
    o.check(std::equal(d1.limbs().begin(), d1.limbs().end(), d2.limbs().begin(), d2.limbs().end()),
            where + ": limbs differ");
    o.check(to_mpz(p1) == v, where + ": wrong value");
    for (ZWord w : {wv, wr, sum, p1, parsed, n1, p2}) zint::free_z(arena, w);
  }
  o.check(arena.live_count() == 0, "leaked allocations");
  if (o.pass) o.detail = std::to_string(kValues) + " values, (v + r) - r vs -(-parse(str(v)))";
  return o;
}

Outcome hand_packed_decode() {
  Outcome o;
  std::mt19937_64 rng(4242);
  int large = 0, huge = 0;
  std::vector<std::vector<std::uint64_t>> storage;
  std::vector<zint::HugeHeader> headers;
  headers.reserve(100);
  for (int i = 0; i < 100; ++i) {
    const std::string where = "word " + std::to_string(i);
    if (i % 5 != 4) {
      // Large: bit 63, cap in 59-62, size-1 in 45-58, address >> 3 in 0-44.
      const unsigned cap_log2 = static_cast<unsigned>(rng() % 15);
      const std::uint64_t cap = std::uint64_t{1} << cap_log2;
      const std::uint64_t size = 1 + rng() % cap;
      const std::uint64_t addr = (rng() & ((std::uint64_t{1} << 48) - 1)) & ~std::uint64_t{7};
      const std::uint64_t w = (std::uint64_t{1} << 63) | (std::uint64_t{cap_log2} << 59) |
                              ((size - 1) << 45) | (addr >> 3);
      const auto d = zint::decode(ZWord{w});
      o.check(d.format() == Format::Large, where + ": not Large");
      o.check(d.buffer_address() == addr, where + ": buffer address");
      o.check(d.size() == size, where + ": size");
      o.check(d.capacity() == cap, where + ": capacity");
      ++large;
    } else {
      // Huge: bits 59-63 set, header address in 0-47.
      const std::uint64_t size = zint::kMaxLargeLimbs + 1 + rng() % 4000;
      const std::uint64_t cap = size + rng() % 100;
      storage.emplace_back(cap, 0);
      headers.push_back({cap, size, reinterpret_cast<std::uintptr_t>(storage.back().data())});
      const auto header = reinterpret_cast<std::uintptr_t>(&headers.back());
      const std::uint64_t w = (std::uint64_t{0x1F} << 59) | header;
      const auto d = zint::decode(ZWord{w});
      o.check(d.format() == Format::Huge, where + ": not Huge");
      o.check(d.header_address() == header, where + ": header address");
      o.check(d.buffer_address() == headers.back().storage, where + ": storage address");
      o.check(d.size() == size && d.capacity() == cap, where + ": size/capacity");
      ++huge;
    }
  }
  if (o.pass) o.detail = std::to_string(large) + " Large and " + std::to_string(huge) + " Huge words";
  return o;
}

Outcome utf8_laws() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(8);
  constexpr int kStrings = 10'000;
  std::size_t width_seen[5] = {};
  std::size_t chars = 0;
  for (int i = 0; i < kStrings && o.pass; ++i) {
    const auto sample = testing::random_utf8(rng, 64, /*ascii_heavy=*/i % 4 == 0);
    const utf8::Utf8Buffer s(sample.bytes);
    const std::string where = "string " + std::to_string(i);
    const auto ref = testing::reference_decode(sample.bytes);
    if (!o.check(ref.has_value() && *ref == sample.code_points, where + ": reference decoder disagrees")) break;

    utf8::StrIdx idx;
    std::vector<char32_t> walked;
    while (idx.physical() < s.size()) {
      const utf8::StrIdx n = utf8::next(s, idx);
      const auto fused = utf8::decode_and_next(s, idx);
      const char32_t cp = utf8::decode_at(s, idx.physical());
      o.check(fused.next == n && fused.code == cp, where + ": decode_and_next != (decode_at, next)");
      o.check(utf8::prev(s, n) == idx, where + ": prev(next(i)) != i");
      ++width_seen[n.physical() - idx.physical()];
      walked.push_back(cp);
      idx = n;
    }
    o.check(idx == utf8::StrIdx::make(static_cast<std::uint32_t>(sample.code_points.size()), s.size()),
            where + ": walk did not end at (char_count, byte_length)");
    o.check(walked == sample.code_points, where + ": code points differ from reference");
    o.check(utf8::advance_by(s, utf8::StrIdx(), static_cast<std::int64_t>(walked.size())) == idx,
            where + ": advance_by disagrees with the walk");
    chars += walked.size();
  }
  for (int w = 1; w <= 4; ++w) o.check(width_seen[w] > 0, "no " + std::to_string(w) + "-byte sequences");
  const double secs = seconds_since(t0);
  o.check(secs < 30.0, "took " + std::to_string(secs) + " s");
  if (o.pass) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d strings, %zu chars (widths 1-4: %zu/%zu/%zu/%zu) in %.1f s", kStrings,
                  chars, width_seen[1], width_seen[2], width_seen[3], width_seen[4], secs);
    o.detail = buf;
  }
  return o;
}

Outcome fixed_examples() {
  Outcome o;
  const utf8::Utf8Buffer e(std::string_view("\xC3\xA9"));
  const auto de = utf8::decode_and_next(e, utf8::StrIdx());
  o.check(de.code == 0xE9 && de.next == utf8::StrIdx::make(1, 2), "e-acute");
  const utf8::Utf8Buffer euro(std::string_view("\xE2\x82\xAC"));
  const auto du = utf8::decode_and_next(euro, utf8::StrIdx());
  o.check(du.code == 0x20AC && du.next == utf8::StrIdx::make(1, 3), "euro sign");
  const utf8::StrIdx fig(0x0000'0004'0000'0005ull);
  o.check(fig.logical() == 4 && fig.physical() == 5, "0x0000000400000005 split");
  if (o.pass) o.detail = "U+00E9 +2 bytes, U+20AC +3 bytes, (4, 5)";
  return o;
}

gc::TypeDescriptor node_type(gc::MarkStrategy::Kind kind, std::vector<std::size_t>& refs) {
  using gc::FieldSpec;
  using gc::MarkStrategy;
  gc::TypeDescriptor d;
  d.type_id = 1;
  d.name = "node";
  switch (kind) {
    case MarkStrategy::Kind::RefFieldHighBit:
      d.fields = {FieldSpec::ref_to(1), FieldSpec::ref_to(1), FieldSpec::scalar(8)};
      d.strategy = MarkStrategy::ref_field(0);
      refs = {0, 1};
      break;
    case MarkStrategy::Kind::TypeIdHighBit:
      d.fields = {FieldSpec::ref_to(1), FieldSpec::ref_to(1), FieldSpec::scalar(8)};
      d.strategy = MarkStrategy::type_id();
      refs = {0, 1};
      break;
    case MarkStrategy::Kind::PaddingByte:
      d.fields = {FieldSpec::scalar(4), FieldSpec::flag(), FieldSpec::ref_to(1), FieldSpec::ref_to(1)};
      d.strategy = MarkStrategy::padding_byte();
      refs = {2, 3};
      break;
  }
  return d;
}

Outcome gc_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  constexpr int kGraphs = 10'000;
  std::mt19937_64 rng(1234);
  int cyclic = 0;
  for (const auto kind : {gc::MarkStrategy::Kind::RefFieldHighBit, gc::MarkStrategy::Kind::TypeIdHighBit,
                          gc::MarkStrategy::Kind::PaddingByte}) {
    const std::string label(gc::strategy_label(kind));
    tagcore::Arena arena;
    for (int g = 0; g < kGraphs && o.pass; ++g) {
      const std::string where = label + " graph " + std::to_string(g);
      gc::Heap heap(arena);
      std::vector<std::size_t> refs;
      heap.register_type(node_type(kind, refs));
      const int n = 1 + static_cast<int>(rng() % 40);
      testing::GraphModel model;
      model.edges.assign(n, std::vector<int>(refs.size(), -1));
      std::vector<gc::ObjRef> objs;
      for (int i = 0; i < n; ++i) objs.push_back(heap.alloc(1));
      for (int i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < refs.size(); ++k) {
          if (rng() % 4 == 0) continue;
          const int t = static_cast<int>(rng() % n);
          model.edges[i][k] = t;
          heap.set_ref(objs[i], refs[k], objs[t]);
        }
      }
      for (int i = 0; i < n; ++i) {
        if (rng() % 6 == 0) {
          model.roots.insert(i);
          heap.add_root(objs[i]);
        }
      }
      bool has_cycle = false;
      for (int i = 0; i < n && !has_cycle; ++i) {
        for (int t : model.edges[i]) has_cycle |= t >= 0 && t <= i;
      }
      cyclic += has_cycle;

      // Two rounds: collect, drop a root, collect again.
      for (int round = 0; round < 2 && o.pass; ++round) {
        if (round == 1 && !model.roots.empty()) {
          const int drop = *model.roots.begin();
          model.roots.erase(drop);
          heap.remove_root(objs[drop]);
        }
        const auto live = model.reachable();
        const auto stats = heap.collect();
        o.check(stats.live == live.size(), where + ": live count differs from oracle");
        std::vector<gc::ObjRef> expected;
        for (int i : live) expected.push_back(objs[i]);
        std::sort(expected.begin(), expected.end());
        std::vector<gc::ObjRef> actual = heap.objects();
        std::sort(actual.begin(), actual.end());
        o.check(actual == expected, where + ": live set differs from oracle");
        for (int i : live) {
          o.check(!heap.is_marked(objs[i]), where + ": mark left set after sweep");
          for (std::size_t k = 0; k < refs.size(); ++k) {
            const int t = model.edges[i][k];
            const gc::ObjRef want = t < 0 ? gc::kNull : objs[t];
            o.check(heap.get_ref(objs[i], refs[k]) == want, where + ": reference lost");
            o.check((heap.raw_slot(objs[i], refs[k]) & tagcore::kAddressMask) == want.value(),
                    where + ": slot does not mask back to its address");
          }
        }
      }
    }
    o.check(arena.live_count() == 0, label + ": leaked allocations");
  }
  const double secs = seconds_since(t0);
  o.check(secs < 120.0, "took " + std::to_string(secs) + " s");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d graphs per strategy x 3, %d with cycles, in %.1f s", kGraphs, cyclic, secs);
    o.detail = buf;
  }
  return o;
}

struct obj_A {
  int att0;
  long att1;
};
struct obj_B {
  int att0;
  char flag;
  long att1;
};

Outcome padding_neutrality() {
  Outcome o;
  using gc::FieldSpec;
  const FieldSpec a[] = {FieldSpec::scalar(4), FieldSpec::scalar(8)};
  const FieldSpec b[] = {FieldSpec::scalar(4), FieldSpec::flag(), FieldSpec::scalar(8)};
  const auto la = gc::compute_layout(a, false);
  const auto lb = gc::compute_layout(b, false);
  o.check(sizeof(obj_A) == 16 && sizeof(obj_B) == 16, "C reference layouts are not 16 bytes");
  o.check(la.size_bytes == 16, "obj_A-shaped layout is " + std::to_string(la.size_bytes) + " bytes");
  o.check(lb.size_bytes == 16, "obj_B-shaped layout is " + std::to_string(lb.size_bytes) + " bytes");
  o.check(lb.offsets[1] == offsetof(obj_B, flag) && lb.offsets[2] == offsetof(obj_B, att1),
          "flag layout differs from the C struct");
  if (o.pass) o.detail = "both 16 bytes, flag at offset " + std::to_string(lb.offsets[1]);
  return o;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Outcome bench_sanity() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::string csv = VBITS_BENCH_CSV;
  std::remove(csv.c_str());
  const std::string cmd = std::string(VBITS_TOOL_PATH) + " bench all --seed 1 --out " + csv;
  const int rc = std::system(cmd.c_str());
  if (!o.check(rc == 0, "bench exited with status " + std::to_string(rc))) return o;
  std::ifstream in(csv);
  std::string line;
  o.check(std::getline(in, line) && line == "name,iterations,ns_per_op,label", "bad CSV header");
  int rows = 0;
  double tiny = NAN, raw = NAN;
  while (o.pass && std::getline(in, line)) {
    ++rows;
    const auto f = split_csv(line);
    if (!o.check(f.size() == 4, "row " + std::to_string(rows) + " has " + std::to_string(f.size()) + " fields")) break;
    char* end = nullptr;
    const unsigned long long iters = std::strtoull(f[1].c_str(), &end, 10);
    o.check(*end == '\0' && iters > 0, "row " + std::to_string(rows) + ": bad iterations");
    const double ns = std::strtod(f[2].c_str(), &end);
    o.check(*end == '\0' && std::isfinite(ns) && ns >= 0, "row " + std::to_string(rows) + ": bad ns_per_op");
    o.check(!f[0].empty() && !f[3].empty(), "row " + std::to_string(rows) + ": empty name or label");
    if (f[0] == "tiny_add") tiny = ns;
    if (f[0] == "raw_i64_add") raw = ns;
  }
  o.check(std::isfinite(tiny), "no finite tiny_add row");
  o.check(std::isfinite(raw), "no raw_i64_add row");
  if (o.pass) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d rows; tiny_add %.2f ns/op vs raw add %.2f ns/op (reported, not asserted); %.1f s",
                  rows, tiny, raw, seconds_since(t0));
    o.detail = buf;
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"tiny range boundaries", tiny_boundaries},
      {"format frontier at 16384 limbs", format_frontier},
      {"differential arithmetic vs GMP", differential},
      {"canonical encodings", canonicality},
      {"decode of hand-packed words", hand_packed_decode},
      {"UTF-8 cursor laws", utf8_laws},
      {"fixed UTF-8 and index examples", fixed_examples},
      {"GC live set vs reachability oracle", gc_oracle},
      {"padding byte size neutrality", padding_neutrality},
      {"bench harness sanity", bench_sanity},
  };
  int failed = 0;
  int n = 0;
  for (const auto& c : criteria) {
    ++n;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
