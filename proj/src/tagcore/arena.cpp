#include <bit>
#include <cstdlib>
#include <cstring>
#include <ostream>
#include <sstream>

#include "vbits/tagcore.hpp"

namespace vbits::tagcore {

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

Address48 Address48::from_raw(std::uint64_t raw) {
  if (raw > kAddressMask) {
    throw RangeError("address " + hex(raw) + " does not fit in 48 bits");
  }
  if (raw & ((1u << kAlignBits) - 1)) {
    throw AlignmentError("address " + hex(raw) + " is not 8-byte aligned");
  }
  return Address48(raw);
}

Packed45 Packed45::from_raw(std::uint64_t raw) {
  if (raw > kPackedMask) {
    throw RangeError("packed address " + hex(raw) + " does not fit in 45 bits");
  }
  return Packed45(raw);
}

std::uint64_t pack_raw(std::uint64_t addr) { return pack(Address48::from_raw(addr)).value(); }

std::uint64_t unpack_raw(std::uint64_t packed) { return unpack(Packed45::from_raw(packed)).value(); }

Arena::Arena(ArenaOptions options) : options_(options) {
  if (options_.chunk_bytes < kMaxClassBytes) options_.chunk_bytes = kMaxClassBytes;
  // Reserve the first chunk eagerly so an unusable address space is
  // reported at construction rather than on first use.
  bump_ = reserve_block(options_.chunk_bytes, 4096);
  bump_end_ = bump_ + options_.chunk_bytes;
  chunks_.push_back({bump_, options_.chunk_bytes});
}

Arena::~Arena() {
  for (const auto& [addr, bytes] : oversize_bytes_) {
    std::free(reinterpret_cast<void*>(static_cast<std::uintptr_t>(addr)));
  }
  for (const auto& c : chunks_) std::free(c.base);
}

unsigned char* Arena::reserve_block(std::size_t bytes, std::size_t align) {
  const std::size_t rounded = (bytes + align - 1) / align * align;
  void* p = std::aligned_alloc(align, rounded);
  if (p == nullptr) {
    throw AllocationError("arena: out of memory requesting " + std::to_string(bytes) + " bytes");
  }
  const auto lo = reinterpret_cast<std::uintptr_t>(p);
  const std::uint64_t hi = static_cast<std::uint64_t>(lo) + rounded;
  if (hi > (kAddressMask + 1)) {
    std::free(p);
    throw RangeError("arena: platform returned block at " + hex(lo) +
                     " which is not representable in 48 bits");
  }
  return static_cast<unsigned char*>(p);
}

unsigned char* Arena::carve(std::size_t bytes) {
  if (static_cast<std::size_t>(bump_end_ - bump_) < bytes) {
    bump_ = reserve_block(options_.chunk_bytes, 4096);
    bump_end_ = bump_ + options_.chunk_bytes;
    chunks_.push_back({bump_, options_.chunk_bytes});
  }
  unsigned char* p = bump_;
  bump_ += bytes;
  return p;
}

std::size_t Arena::class_index(std::size_t bytes) noexcept {
  if (bytes <= kMinClassBytes) return 0;
  return static_cast<std::size_t>(std::bit_width(bytes - 1)) - 3;
}

Address48 Arena::alloc(std::size_t bytes) {
  if (bytes == 0) bytes = 1;
  unsigned char* p = nullptr;
  std::uint32_t tag = kOversize;
  if (bytes <= kMaxClassBytes) {
    const std::size_t ci = class_index(bytes);
    tag = static_cast<std::uint32_t>(ci);
    if (void* head = free_lists_[ci]) {
      void* next;
      std::memcpy(&next, head, sizeof next);
      free_lists_[ci] = next;
      --free_counts_[ci];
      p = static_cast<unsigned char*>(head);
    } else {
      p = carve(class_bytes(ci));
    }
  } else {
    p = reserve_block(bytes, 64);
    oversize_bytes_.emplace(reinterpret_cast<std::uintptr_t>(p), (bytes + 63) / 64 * 64);
  }
  const Address48 addr = Address48::from_pointer(p);
  const bool fresh = outstanding_.emplace(addr.value(), tag).second;
  if (!fresh) {
    throw FatalError("arena: address " + hex(addr.value()) + " handed out twice");
  }
  ++total_allocs_;
  return addr;
}

void Arena::free(Address48 addr) {
  auto it = outstanding_.find(addr.value());
  if (it == outstanding_.end()) {
    throw FatalError("arena: free of unknown or already freed address " + hex(addr.value()));
  }
  const std::uint32_t tag = it->second;
  outstanding_.erase(it);
  ++total_frees_;
  auto* p = addr.as<unsigned char>();
  if (tag == kOversize) {
    auto os = oversize_bytes_.find(addr.value());
    if (options_.poison_freed) std::memset(p, kPoisonByte, os->second);
    oversize_bytes_.erase(os);
    std::free(p);
    return;
  }
  if (options_.poison_freed) std::memset(p, kPoisonByte, class_bytes(tag));
  void* head = free_lists_[tag];
  std::memcpy(p, &head, sizeof head);
  free_lists_[tag] = p;
  ++free_counts_[tag];
}

std::size_t Arena::usable_size(Address48 addr) const {
  auto it = outstanding_.find(addr.value());
  if (it == outstanding_.end()) {
    throw FatalError("arena: size query for unknown address " + hex(addr.value()));
  }
  if (it->second == kOversize) return oversize_bytes_.at(addr.value());
  return class_bytes(it->second);
}

Arena::Stats Arena::stats() const {
  Stats s;
  s.live_count = outstanding_.size();
  s.chunks = chunks_.size();
  for (const auto& c : chunks_) s.reserved_bytes += c.bytes;
  for (const auto& [a, b] : oversize_bytes_) s.reserved_bytes += b;
  s.oversize_live = oversize_bytes_.size();
  s.total_allocs = total_allocs_;
  s.total_frees = total_frees_;
  for (const auto& [a, tag] : outstanding_) {
    if (tag != kOversize) ++s.class_live[tag];
  }
  s.class_free = free_counts_;
  return s;
}

void Arena::dump(std::ostream& os) const {
  const Stats s = stats();
  os << "arena: live=" << s.live_count << " chunks=" << s.chunks
     << " reserved_bytes=" << s.reserved_bytes << " allocs=" << s.total_allocs
     << " frees=" << s.total_frees << " oversize_live=" << s.oversize_live << '\n';
  for (std::size_t i = 0; i < kClassCount; ++i) {
    if (s.class_live[i] == 0 && s.class_free[i] == 0) continue;
    os << "  class " << class_bytes(i) << "B: live=" << s.class_live[i]
       << " free=" << s.class_free[i] << '\n';
  }
}

Arena& thread_arena() {
  thread_local Arena arena;
  return arena;
}

}  // namespace vbits::tagcore
