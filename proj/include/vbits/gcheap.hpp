#pragma once

// Mark-and-sweep heap where each type chooses where its mark bit lives:
//
//   RefFieldHighBit  bit 63 of one of the object's own reference fields
//   TypeIdHighBit    bit 63 of the dispatch header word (type id in bits 0-7)
//   PaddingByte      a one-byte flag placed in alignment padding
//
// Reference slots hold the target address in bits 0-47; bits 48-63 are tag
// space and every read masks them off.
//
// Every allocation carries a hidden 8-byte prefix in front of the object:
// the next object in allocation order (bits 0-47) and the type id (bits
// 48-55). That list is the sweep list; the object layout itself is exactly
// what the descriptor declares.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "vbits/tagcore.hpp"

namespace vbits::gc {

using tagcore::Address48;
using TypeId = std::uint8_t;

inline constexpr std::uint64_t kMarkBit = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kAddressMask = tagcore::kAddressMask;

class HeapError : public Error {
 public:
  using Error::Error;
};

struct ObjRef {
  Address48 addr;

  constexpr bool is_null() const noexcept { return addr.is_null(); }
  constexpr std::uint64_t value() const noexcept { return addr.value(); }
  friend constexpr bool operator==(ObjRef, ObjRef) = default;
  friend constexpr auto operator<=>(ObjRef, ObjRef) = default;
};

inline constexpr ObjRef kNull{};

struct FieldSpec {
  enum class Kind { Reference, Scalar, Flag };
  Kind kind = Kind::Scalar;
  unsigned width = 8;             // bytes; 8 for references, 1 for the flag
  std::optional<TypeId> target;   // fixed target type of a monomorphic reference

  static FieldSpec ref() { return {Kind::Reference, 8, std::nullopt}; }
  static FieldSpec ref_to(TypeId t) { return {Kind::Reference, 8, t}; }
  static FieldSpec scalar(unsigned bytes) { return {Kind::Scalar, bytes, std::nullopt}; }
  static FieldSpec flag() { return {Kind::Flag, 1, std::nullopt}; }
};

struct MarkStrategy {
  enum class Kind { RefFieldHighBit, TypeIdHighBit, PaddingByte };
  Kind kind = Kind::TypeIdHighBit;
  std::size_t field_index = 0;  // RefFieldHighBit: index into the field list
  std::size_t byte_offset = 0;  // PaddingByte: resolved from the Flag field

  static MarkStrategy ref_field(std::size_t field) { return {Kind::RefFieldHighBit, field, 0}; }
  static MarkStrategy type_id() { return {Kind::TypeIdHighBit, 0, 0}; }
  static MarkStrategy padding_byte() { return {Kind::PaddingByte, 0, 0}; }
};

std::string_view strategy_label(MarkStrategy::Kind k) noexcept;

struct TypeDescriptor {
  TypeId type_id = 0;
  std::string name;
  std::vector<FieldSpec> fields;
  MarkStrategy strategy;
  // Adds the 8-byte dispatch header at offset 0. Forced on for
  // TypeIdHighBit; required on any type stored in a polymorphic reference.
  bool dispatch_header = false;
};

struct Layout {
  std::size_t header_bytes = 0;
  std::vector<std::size_t> offsets;  // one per field
  std::size_t size_bytes = 0;        // multiple of 8
};

// Natural alignment for each field, size rounded up to 8 bytes.
Layout compute_layout(std::span<const FieldSpec> fields, bool dispatch_header);

struct TypeInfo {
  TypeDescriptor descriptor;
  Layout layout;
  std::vector<std::size_t> ref_fields;  // indices of Reference fields
  std::size_t mark_offset = 0;          // byte offset of the mark location
};

struct CollectStats {
  std::size_t freed = 0;
  std::size_t live = 0;
};

struct GcEvent {
  enum class Kind { Mark, Keep, Free };
  Kind kind;
  ObjRef obj;
  TypeId type;
};

// Stop-the-world heap. Confined to one thread.
class Heap {
 public:
  explicit Heap(tagcore::Arena& arena);
  ~Heap();
  Heap(const Heap&) = delete;
  Heap& operator=(const Heap&) = delete;

  // Throws HeapError for a duplicate id or an invalid field/strategy mix.
  TypeId register_type(TypeDescriptor d);
  const TypeInfo& type_info(TypeId t) const;
  bool has_type(TypeId t) const noexcept { return types_[t].has_value(); }

  // Zero-initialized instance appended to the sweep list.
  ObjRef alloc(TypeId t);

  void set_ref(ObjRef obj, std::size_t field, ObjRef target);
  ObjRef get_ref(ObjRef obj, std::size_t field) const;
  void set_scalar(ObjRef obj, std::size_t field, std::uint64_t value);
  std::uint64_t get_scalar(ObjRef obj, std::size_t field) const;

  // Unmasked slot contents, tag bits included.
  std::uint64_t raw_slot(ObjRef obj, std::size_t field) const;
  // Dispatch header word; HeapError for headerless types.
  std::uint64_t header_word(ObjRef obj) const;

  void add_root(ObjRef obj);
  void remove_root(ObjRef obj);
  std::vector<ObjRef> roots() const { return {roots_.begin(), roots_.end()}; }

  // Marks obj and everything reachable from it.
  void mark_object(ObjRef obj);
  bool is_marked(ObjRef obj) const;

  // Marks from the roots, then frees unmarked objects and clears the marks
  // of survivors in one pass over the sweep list.
  CollectStats collect();

  // Root-reachable set computed with an external visited set; never reads
  // or writes mark locations.
  std::vector<ObjRef> reachable_oracle() const;

  TypeId type_of(ObjRef obj) const;
  std::size_t object_count() const noexcept { return count_; }
  std::vector<ObjRef> objects() const;  // allocation order

  void set_tracer(std::function<void(const GcEvent&)> tracer) { tracer_ = std::move(tracer); }

 private:
  struct RootHash {
    std::size_t operator()(ObjRef r) const noexcept { return std::hash<std::uint64_t>{}(r.value()); }
  };

  unsigned char* bytes(ObjRef obj) const noexcept { return obj.addr.as<unsigned char>(); }
  std::uint64_t& prefix(ObjRef obj) const noexcept {
    return *reinterpret_cast<std::uint64_t*>(bytes(obj) - 8);
  }
  void check_object(ObjRef obj, const char* op) const;
  const TypeInfo& info_of(ObjRef obj) const { return *types_[type_of(obj)]; }
  std::uint64_t& slot(ObjRef obj, const TypeInfo& info, std::size_t field) const;
  std::size_t check_field(const TypeInfo& info, std::size_t field, FieldSpec::Kind kind) const;

  bool test_and_set_mark(ObjRef obj, const TypeInfo& info);
  bool mark_set(ObjRef obj, const TypeInfo& info) const;
  void clear_mark(ObjRef obj, const TypeInfo& info);
  TypeId target_type(ObjRef child, const FieldSpec& f) const;

  tagcore::Arena& arena_;
  std::vector<std::optional<TypeInfo>> types_;
  std::uint64_t head_ = 0;  // first object in allocation order
  std::uint64_t tail_ = 0;
  std::size_t count_ = 0;
  std::unordered_set<ObjRef, RootHash> roots_;
  std::vector<std::pair<ObjRef, TypeId>> worklist_;
  std::function<void(const GcEvent&)> tracer_;
};

}  // namespace vbits::gc
