#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "vbits/cli/commands.hpp"

namespace vbits::cli {

namespace {

using gc::FieldSpec;
using gc::MarkStrategy;
using gc::ObjRef;
using gc::TypeId;

struct ScriptType {
  TypeId id;
  std::vector<std::size_t> ref_fields;  // reference number -> field index
};

class ScriptRunner {
 public:
  ScriptRunner(const GcScriptOptions& options, std::ostream& out)
      : options_(options), out_(out), heap_(arena_) {
    if (options_.trace) {
      heap_.set_tracer([this](const gc::GcEvent& e) { trace(e); });
    }
  }

  void run(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream words(line);
      std::vector<std::string> tok;
      for (std::string w; words >> w;) tok.push_back(w);
      if (tok.empty()) continue;
      const std::string& cmd = tok[0];
      if (cmd == "type") {
        define_type(tok);
      } else if (cmd == "new") {
        expect_args(tok, 3);
        new_object(tok[1], tok[2]);
      } else if (cmd == "link") {
        expect_args(tok, 4);
        link(tok[1], tok[2], tok[3]);
      } else if (cmd == "root") {
        expect_args(tok, 2);
        heap_.add_root(lookup(tok[1]));
      } else if (cmd == "unroot") {
        expect_args(tok, 2);
        heap_.remove_root(lookup(tok[1]));
      } else if (cmd == "collect") {
        expect_args(tok, 1);
        collect();
      } else {
        fail("unknown command '" + cmd + "'");
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("line " + std::to_string(line_no_) + ": " + why);
  }

  void expect_args(const std::vector<std::string>& tok, std::size_t n) const {
    if (tok.size() != n) {
      fail("'" + tok[0] + "' takes " + std::to_string(n - 1) + " argument(s)");
    }
  }

  static std::size_t to_count(std::string_view s, bool& ok) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    ok = ec == std::errc() && p == s.data() + s.size();
    return v;
  }

  void define_type(const std::vector<std::string>& tok) {
    if (tok.size() < 2) fail("'type' needs a name");
    const std::string& name = tok[1];
    if (types_.contains(name)) fail("type '" + name + "' already defined");
    if (next_type_id_ > 255) fail("too many types");

    std::size_t refs = 0;
    std::vector<unsigned> scalars;
    MarkStrategy::Kind kind = options_.strategy;
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const auto eq = tok[i].find('=');
      if (eq == std::string::npos) fail("expected key=value, got '" + tok[i] + "'");
      const std::string key = tok[i].substr(0, eq);
      const std::string value = tok[i].substr(eq + 1);
      bool ok = false;
      if (key == "refs") {
        refs = to_count(value, ok);
        if (!ok) fail("bad refs count '" + value + "'");
      } else if (key == "scalars") {
        std::istringstream list(value);
        for (std::string w; std::getline(list, w, ',');) {
          const std::size_t width = to_count(w, ok);
          if (!ok) fail("bad scalar width '" + w + "'");
          scalars.push_back(static_cast<unsigned>(width));
        }
      } else if (key == "strategy") {
        try {
          kind = parse_strategy(value);
        } catch (const Error& e) {
          fail(e.what());
        }
      } else {
        fail("unknown type attribute '" + key + "'");
      }
    }

    // Layout: a 4-byte hash, the flag byte in its padding when needed,
    // the references, then any extra scalars. Every script type carries a
    // dispatch header so references can point at any type.
    gc::TypeDescriptor d;
    d.type_id = static_cast<TypeId>(next_type_id_);
    d.name = name;
    d.dispatch_header = true;
    d.fields.push_back(FieldSpec::scalar(4));
    if (kind == MarkStrategy::Kind::PaddingByte) d.fields.push_back(FieldSpec::flag());
    ScriptType st{d.type_id, {}};
    for (std::size_t r = 0; r < refs; ++r) {
      st.ref_fields.push_back(d.fields.size());
      d.fields.push_back(FieldSpec::ref());
    }
    for (unsigned w : scalars) d.fields.push_back(FieldSpec::scalar(w));
    switch (kind) {
      case MarkStrategy::Kind::RefFieldHighBit:
        if (refs == 0) fail("type '" + name + "': refbit strategy needs refs >= 1");
        d.strategy = MarkStrategy::ref_field(st.ref_fields[0]);
        break;
      case MarkStrategy::Kind::TypeIdHighBit:
        d.strategy = MarkStrategy::type_id();
        break;
      case MarkStrategy::Kind::PaddingByte:
        d.strategy = MarkStrategy::padding_byte();
        break;
    }
    try {
      heap_.register_type(std::move(d));
    } catch (const Error& e) {
      fail(e.what());
    }
    ++next_type_id_;
    types_.emplace(name, std::move(st));
  }

  void new_object(const std::string& var, const std::string& type) {
    auto it = types_.find(type);
    if (it == types_.end()) fail("unknown type '" + type + "'");
    const ObjRef obj = heap_.alloc(it->second.id);
    vars_[var] = obj;
    names_[obj.value()] = var;
  }

  ObjRef lookup(const std::string& var) const {
    auto it = vars_.find(var);
    if (it == vars_.end()) fail("unknown object '" + var + "'");
    if (it->second.is_null()) fail("object '" + var + "' was collected");
    return it->second;
  }

  void link(const std::string& from, const std::string& field, const std::string& to) {
    const ObjRef src = lookup(from);
    const ScriptType& st = type_of(src);
    bool ok = false;
    const std::size_t k = to_count(field, ok);
    if (!ok || k >= st.ref_fields.size()) fail("bad reference number '" + field + "'");
    const ObjRef dst = to == "null" ? gc::kNull : lookup(to);
    heap_.set_ref(src, st.ref_fields[k], dst);
  }

  const ScriptType& type_of(ObjRef obj) const {
    const TypeId t = heap_.type_of(obj);
    for (const auto& [name, st] : types_) {
      if (st.id == t) return st;
    }
    fail("internal: unknown type id");
  }

  std::string name_of(ObjRef obj) const {
    auto it = names_.find(obj.value());
    if (it != names_.end()) return it->second;
    std::ostringstream os;
    os << "0x" << std::hex << obj.value();
    return os.str();
  }

  void trace(const gc::GcEvent& e) {
    const char* what = e.kind == gc::GcEvent::Kind::Mark ? "mark"
                       : e.kind == gc::GcEvent::Kind::Keep ? "sweep keep"
                                                            : "sweep free";
    out_ << "  " << what << ' ' << name_of(e.obj) << " (" << heap_.type_info(e.type).descriptor.name
         << ")\n";
  }

  void collect() {
    const gc::CollectStats s = heap_.collect();
    out_ << "collect: live=" << s.live << " freed=" << s.freed
         << " strategy=" << gc::strategy_label(options_.strategy) << '\n';
    std::unordered_set<std::uint64_t> alive;
    for (ObjRef o : heap_.objects()) alive.insert(o.value());
    for (auto& [var, obj] : vars_) {
      if (!obj.is_null() && !alive.contains(obj.value())) {
        names_.erase(obj.value());
        obj = gc::kNull;
      }
    }
  }

  GcScriptOptions options_;
  std::ostream& out_;
  tagcore::Arena arena_;
  gc::Heap heap_;
  std::map<std::string, ScriptType> types_;
  std::unordered_map<std::string, ObjRef> vars_;
  std::unordered_map<std::uint64_t, std::string> names_;
  unsigned next_type_id_ = 1;
  std::size_t line_no_ = 0;
};

}  // namespace

gc::MarkStrategy::Kind parse_strategy(std::string_view name) {
  if (name == "refbit") return MarkStrategy::Kind::RefFieldHighBit;
  if (name == "idbit") return MarkStrategy::Kind::TypeIdHighBit;
  if (name == "padbyte") return MarkStrategy::Kind::PaddingByte;
  throw ParseError("unknown strategy '" + std::string(name) + "' (expected refbit, idbit or padbyte)");
}

void run_gc_script(std::istream& script, const GcScriptOptions& options, std::ostream& out) {
  ScriptRunner(options, out).run(script);
}

}  // namespace vbits::cli
