#include <algorithm>
#include <cstring>

#include "vbits/gcheap.hpp"

namespace vbits::gc {

namespace {

constexpr std::size_t kPrefixBytes = 8;
constexpr unsigned kPrefixTypeShift = 48;

constexpr std::size_t round_up(std::size_t v, std::size_t a) { return (v + a - 1) / a * a; }

std::string type_label(const TypeDescriptor& d) {
  return d.name.empty() ? "type " + std::to_string(d.type_id) : "type '" + d.name + "'";
}

}  // namespace

std::string_view strategy_label(MarkStrategy::Kind k) noexcept {
  switch (k) {
    case MarkStrategy::Kind::RefFieldHighBit:
      return "refbit";
    case MarkStrategy::Kind::TypeIdHighBit:
      return "idbit";
    case MarkStrategy::Kind::PaddingByte:
      return "padbyte";
  }
  return "?";
}

Layout compute_layout(std::span<const FieldSpec> fields, bool dispatch_header) {
  Layout l;
  l.header_bytes = dispatch_header ? 8 : 0;
  std::size_t offset = l.header_bytes;
  for (const auto& f : fields) {
    offset = round_up(offset, f.width);
    l.offsets.push_back(offset);
    offset += f.width;
  }
  l.size_bytes = std::max<std::size_t>(8, round_up(offset, 8));
  return l;
}

Heap::Heap(tagcore::Arena& arena) : arena_(arena), types_(256) {}

Heap::~Heap() {
  std::uint64_t cur = head_;
  while (cur != 0) {
    const ObjRef obj{Address48::from_raw(cur)};
    const std::uint64_t next = prefix(obj) & kAddressMask;
    arena_.free(Address48::from_raw(cur - kPrefixBytes));
    cur = next;
  }
}

TypeId Heap::register_type(TypeDescriptor d) {
  if (types_[d.type_id]) {
    throw HeapError("duplicate type id " + std::to_string(d.type_id));
  }
  std::optional<std::size_t> flag_index;
  for (std::size_t i = 0; i < d.fields.size(); ++i) {
    const FieldSpec& f = d.fields[i];
    switch (f.kind) {
      case FieldSpec::Kind::Reference:
        if (f.width != 8) throw HeapError(type_label(d) + ": reference fields are 8 bytes");
        break;
      case FieldSpec::Kind::Scalar:
        if (f.width != 1 && f.width != 2 && f.width != 4 && f.width != 8) {
          throw HeapError(type_label(d) + ": scalar width must be 1, 2, 4 or 8 bytes");
        }
        break;
      case FieldSpec::Kind::Flag:
        if (f.width != 1) throw HeapError(type_label(d) + ": flag field must be 1 byte");
        if (flag_index) throw HeapError(type_label(d) + ": more than one flag field");
        flag_index = i;
        break;
    }
  }

  TypeInfo info;
  switch (d.strategy.kind) {
    case MarkStrategy::Kind::RefFieldHighBit:
      if (d.strategy.field_index >= d.fields.size() ||
          d.fields[d.strategy.field_index].kind != FieldSpec::Kind::Reference) {
        throw HeapError(type_label(d) + ": refbit strategy needs a reference field, field " +
                        std::to_string(d.strategy.field_index) + " is not one");
      }
      break;
    case MarkStrategy::Kind::TypeIdHighBit:
      d.dispatch_header = true;
      break;
    case MarkStrategy::Kind::PaddingByte:
      if (!flag_index) throw HeapError(type_label(d) + ": padbyte strategy needs a flag field");
      break;
  }
  if (flag_index && d.strategy.kind != MarkStrategy::Kind::PaddingByte) {
    throw HeapError(type_label(d) + ": flag field is only meaningful with the padbyte strategy");
  }

  info.layout = compute_layout(d.fields, d.dispatch_header);

  if (flag_index) {
    // The flag must sit in bytes that are padding without it: same size,
    // and no other field moves.
    std::vector<FieldSpec> without = d.fields;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(*flag_index));
    const Layout base = compute_layout(without, d.dispatch_header);
    bool neutral = base.size_bytes == info.layout.size_bytes;
    for (std::size_t i = 0, j = 0; neutral && i < d.fields.size(); ++i) {
      if (i == *flag_index) continue;
      neutral = base.offsets[j++] == info.layout.offsets[i];
    }
    if (!neutral) {
      throw HeapError(type_label(d) + ": flag byte at offset " +
                      std::to_string(info.layout.offsets[*flag_index]) +
                      " is not alignment padding (object would grow or shift)");
    }
    d.strategy.byte_offset = info.layout.offsets[*flag_index];
  }

  for (std::size_t i = 0; i < d.fields.size(); ++i) {
    if (d.fields[i].kind == FieldSpec::Kind::Reference) info.ref_fields.push_back(i);
  }
  switch (d.strategy.kind) {
    case MarkStrategy::Kind::RefFieldHighBit:
      info.mark_offset = info.layout.offsets[d.strategy.field_index];
      break;
    case MarkStrategy::Kind::TypeIdHighBit:
      info.mark_offset = 0;
      break;
    case MarkStrategy::Kind::PaddingByte:
      info.mark_offset = d.strategy.byte_offset;
      break;
  }
  const TypeId id = d.type_id;
  info.descriptor = std::move(d);
  types_[id] = std::move(info);
  return id;
}

const TypeInfo& Heap::type_info(TypeId t) const {
  if (!types_[t]) throw HeapError("unknown type id " + std::to_string(t));
  return *types_[t];
}

ObjRef Heap::alloc(TypeId t) {
  const TypeInfo& info = type_info(t);
  const Address48 base = arena_.alloc(kPrefixBytes + info.layout.size_bytes);
  std::memset(base.as(), 0, kPrefixBytes + info.layout.size_bytes);
  const ObjRef obj{Address48::from_raw(base.value() + kPrefixBytes)};
  prefix(obj) = std::uint64_t{t} << kPrefixTypeShift;
  if (info.descriptor.dispatch_header) {
    *reinterpret_cast<std::uint64_t*>(bytes(obj)) = t;
  }
  if (tail_ == 0) {
    head_ = obj.value();
  } else {
    std::uint64_t& tp = prefix(ObjRef{Address48::from_raw(tail_)});
    tp = (tp & ~kAddressMask) | obj.value();
  }
  tail_ = obj.value();
  ++count_;
  return obj;
}

void Heap::check_object(ObjRef obj, const char* op) const {
  if (obj.is_null()) throw HeapError(std::string(op) + ": null object");
  if (!arena_.owns(Address48::from_raw(obj.value() - kPrefixBytes))) {
    throw HeapError(std::string(op) + ": not a live heap object");
  }
}

TypeId Heap::type_of(ObjRef obj) const {
  return static_cast<TypeId>(prefix(obj) >> kPrefixTypeShift);
}

std::size_t Heap::check_field(const TypeInfo& info, std::size_t field, FieldSpec::Kind kind) const {
  const auto& fields = info.descriptor.fields;
  if (field >= fields.size() || fields[field].kind != kind) {
    throw HeapError(type_label(info.descriptor) + ": field " + std::to_string(field) +
                    (kind == FieldSpec::Kind::Reference ? " is not a reference" : " is not a scalar"));
  }
  return info.layout.offsets[field];
}

std::uint64_t& Heap::slot(ObjRef obj, const TypeInfo& info, std::size_t field) const {
  return *reinterpret_cast<std::uint64_t*>(bytes(obj) + info.layout.offsets[field]);
}

void Heap::set_ref(ObjRef obj, std::size_t field, ObjRef target) {
  check_object(obj, "set_ref");
  const TypeInfo& info = info_of(obj);
  check_field(info, field, FieldSpec::Kind::Reference);
  if (!target.is_null()) {
    check_object(target, "set_ref target");
    const FieldSpec& f = info.descriptor.fields[field];
    const TypeId tt = type_of(target);
    if (f.target && *f.target != tt) {
      throw HeapError(type_label(info.descriptor) + ": field " + std::to_string(field) +
                      " expects type " + std::to_string(*f.target) + ", got " + std::to_string(tt));
    }
    if (!f.target && !types_[tt]->descriptor.dispatch_header) {
      throw HeapError("polymorphic field needs a target with a dispatch header");
    }
  }
  std::uint64_t& s = slot(obj, info, field);
  s = (s & ~kAddressMask) | target.value();
}

ObjRef Heap::get_ref(ObjRef obj, std::size_t field) const {
  check_object(obj, "get_ref");
  const TypeInfo& info = info_of(obj);
  check_field(info, field, FieldSpec::Kind::Reference);
  const std::uint64_t a = slot(obj, info, field) & kAddressMask;
  return ObjRef{Address48::from_raw(a)};
}

void Heap::set_scalar(ObjRef obj, std::size_t field, std::uint64_t value) {
  check_object(obj, "set_scalar");
  const TypeInfo& info = info_of(obj);
  const std::size_t off = check_field(info, field, FieldSpec::Kind::Scalar);
  std::memcpy(bytes(obj) + off, &value, info.descriptor.fields[field].width);
}

std::uint64_t Heap::get_scalar(ObjRef obj, std::size_t field) const {
  check_object(obj, "get_scalar");
  const TypeInfo& info = info_of(obj);
  const std::size_t off = check_field(info, field, FieldSpec::Kind::Scalar);
  std::uint64_t v = 0;
  std::memcpy(&v, bytes(obj) + off, info.descriptor.fields[field].width);
  return v;
}

std::uint64_t Heap::raw_slot(ObjRef obj, std::size_t field) const {
  check_object(obj, "raw_slot");
  const TypeInfo& info = info_of(obj);
  check_field(info, field, FieldSpec::Kind::Reference);
  return slot(obj, info, field);
}

std::uint64_t Heap::header_word(ObjRef obj) const {
  check_object(obj, "header_word");
  if (!info_of(obj).descriptor.dispatch_header) {
    throw HeapError("header_word: type has no dispatch header");
  }
  return *reinterpret_cast<const std::uint64_t*>(bytes(obj));
}

void Heap::add_root(ObjRef obj) {
  check_object(obj, "add_root");
  roots_.insert(obj);
}

void Heap::remove_root(ObjRef obj) { roots_.erase(obj); }

bool Heap::mark_set(ObjRef obj, const TypeInfo& info) const {
  const unsigned char* at = bytes(obj) + info.mark_offset;
  if (info.descriptor.strategy.kind == MarkStrategy::Kind::PaddingByte) return *at != 0;
  return (*reinterpret_cast<const std::uint64_t*>(at) & kMarkBit) != 0;
}

bool Heap::test_and_set_mark(ObjRef obj, const TypeInfo& info) {
  unsigned char* at = bytes(obj) + info.mark_offset;
  if (info.descriptor.strategy.kind == MarkStrategy::Kind::PaddingByte) {
    if (*at != 0) return false;
    *at = 1;
    return true;
  }
  // Reference slot or dispatch header: both keep the mark in bit 63.
  auto& word = *reinterpret_cast<std::uint64_t*>(at);
  if (word & kMarkBit) return false;
  word |= kMarkBit;
  return true;
}

void Heap::clear_mark(ObjRef obj, const TypeInfo& info) {
  unsigned char* at = bytes(obj) + info.mark_offset;
  if (info.descriptor.strategy.kind == MarkStrategy::Kind::PaddingByte) {
    *at = 0;
  } else {
    *reinterpret_cast<std::uint64_t*>(at) &= ~kMarkBit;
  }
}

TypeId Heap::target_type(ObjRef child, const FieldSpec& f) const {
  if (f.target) return *f.target;
  // Dispatch on the header id; the mark bit may already be set there.
  return static_cast<TypeId>(*reinterpret_cast<const std::uint64_t*>(bytes(child)) & 0xFF);
}

bool Heap::is_marked(ObjRef obj) const {
  check_object(obj, "is_marked");
  return mark_set(obj, info_of(obj));
}

void Heap::mark_object(ObjRef obj) {
  check_object(obj, "mark_object");
  worklist_.clear();
  worklist_.emplace_back(obj, type_of(obj));
  while (!worklist_.empty()) {
    const auto [cur, t] = worklist_.back();
    worklist_.pop_back();
    const TypeInfo& info = *types_[t];
    if (!test_and_set_mark(cur, info)) continue;
    if (tracer_) tracer_({GcEvent::Kind::Mark, cur, t});
    for (std::size_t field : info.ref_fields) {
      const std::uint64_t a = slot(cur, info, field) & kAddressMask;
      if (a == 0) continue;
      const ObjRef child{Address48::from_raw(a)};
      worklist_.emplace_back(child, target_type(child, info.descriptor.fields[field]));
    }
  }
}

CollectStats Heap::collect() {
  for (ObjRef r : roots_) mark_object(r);

  CollectStats stats;
  std::uint64_t prev = 0;
  std::uint64_t cur = head_;
  while (cur != 0) {
    const ObjRef obj{Address48::from_raw(cur)};
    const std::uint64_t pre = prefix(obj);
    const std::uint64_t next = pre & kAddressMask;
    const auto t = static_cast<TypeId>(pre >> kPrefixTypeShift);
    const TypeInfo& info = *types_[t];
    if (mark_set(obj, info)) {
      clear_mark(obj, info);
      if (tracer_) tracer_({GcEvent::Kind::Keep, obj, t});
      ++stats.live;
      prev = cur;
    } else {
      if (tracer_) tracer_({GcEvent::Kind::Free, obj, t});
      if (prev == 0) {
        head_ = next;
      } else {
        std::uint64_t& pp = prefix(ObjRef{Address48::from_raw(prev)});
        pp = (pp & ~kAddressMask) | next;
      }
      if (tail_ == cur) tail_ = prev;
      arena_.free(Address48::from_raw(cur - kPrefixBytes));
      --count_;
      ++stats.freed;
    }
    cur = next;
  }
  return stats;
}

std::vector<ObjRef> Heap::reachable_oracle() const {
  std::unordered_set<std::uint64_t> seen;
  std::vector<ObjRef> stack(roots_.begin(), roots_.end());
  std::vector<ObjRef> out;
  while (!stack.empty()) {
    const ObjRef obj = stack.back();
    stack.pop_back();
    if (!seen.insert(obj.value()).second) continue;
    out.push_back(obj);
    const TypeInfo& info = info_of(obj);
    for (std::size_t field : info.ref_fields) {
      const ObjRef child = get_ref(obj, field);
      if (!child.is_null()) stack.push_back(child);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ObjRef> Heap::objects() const {
  std::vector<ObjRef> out;
  out.reserve(count_);
  for (std::uint64_t cur = head_; cur != 0;) {
    const ObjRef obj{Address48::from_raw(cur)};
    out.push_back(obj);
    cur = prefix(obj) & kAddressMask;
  }
  return out;
}

}  // namespace vbits::gc
