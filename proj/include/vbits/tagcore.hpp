#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "vbits/errors.hpp"

namespace vbits::tagcore {

inline constexpr std::uint64_t kAddressBits = 48;
inline constexpr std::uint64_t kAddressMask = (std::uint64_t{1} << kAddressBits) - 1;  // FFFF FFFF FFFFh
inline constexpr std::uint64_t kAlignBits = 3;
inline constexpr std::uint64_t kPackedBits = kAddressBits - kAlignBits;  // 45
inline constexpr std::uint64_t kPackedMask = (std::uint64_t{1} << kPackedBits) - 1;  // 1FFF FFFF FFFFh

class Packed45;

// Address of an 8-byte aligned allocation that fits in 48 bits.
class Address48 {
 public:
  constexpr Address48() = default;

  // Throws AlignmentError / RangeError when the invariants do not hold.
  static Address48 from_raw(std::uint64_t raw);
  static Address48 from_pointer(const void* p) {
    return from_raw(reinterpret_cast<std::uintptr_t>(p));
  }

  constexpr std::uint64_t value() const noexcept { return value_; }
  constexpr bool is_null() const noexcept { return value_ == 0; }

  template <typename T = void>
  T* as() const noexcept {
    return reinterpret_cast<T*>(static_cast<std::uintptr_t>(value_));
  }

  friend constexpr bool operator==(Address48, Address48) = default;
  friend constexpr auto operator<=>(Address48, Address48) = default;

 private:
  constexpr explicit Address48(std::uint64_t v) : value_(v) {}
  friend Address48 unpack(Packed45) noexcept;
  std::uint64_t value_ = 0;
};

// An Address48 with its three always-zero alignment bits dropped.
class Packed45 {
 public:
  constexpr Packed45() = default;

  static Packed45 from_raw(std::uint64_t raw);

  constexpr std::uint64_t value() const noexcept { return value_; }

  friend constexpr bool operator==(Packed45, Packed45) = default;

 private:
  constexpr explicit Packed45(std::uint64_t v) : value_(v) {}
  friend Packed45 pack(Address48) noexcept;
  friend Address48 unpack(Packed45) noexcept;
  std::uint64_t value_ = 0;
};

inline Packed45 pack(Address48 addr) noexcept { return Packed45(addr.value() >> kAlignBits); }
inline Address48 unpack(Packed45 p) noexcept { return Address48(p.value() << kAlignBits); }

// Checked variants over raw words.
std::uint64_t pack_raw(std::uint64_t addr);
std::uint64_t unpack_raw(std::uint64_t packed);

struct ArenaOptions {
  std::size_t chunk_bytes = std::size_t{1} << 20;
#ifdef NDEBUG
  bool poison_freed = false;
#else
  bool poison_freed = true;
#endif
};

inline constexpr unsigned char kPoisonByte = 0xDD;

// Size-class allocator whose addresses are verified to be 8-byte aligned
// and below 2^48. Requests up to 128 KiB are rounded to a power-of-two class
// and recycled through per-class free lists; larger ones get their own block.
//
// Not thread-safe: one arena per thread.
class Arena {
 public:
  static constexpr std::size_t kMinClassBytes = 8;
  static constexpr std::size_t kMaxClassBytes = std::size_t{128} << 10;
  static constexpr std::size_t kClassCount = 15;  // 2^3 .. 2^17

  explicit Arena(ArenaOptions options = {});
  ~Arena();
  Arena(const Arena&) = delete;
  Arena& operator=(const Arena&) = delete;

  // Throws AllocationError on exhaustion, RangeError if the platform
  // returns memory at or above 2^48.
  Address48 alloc(std::size_t bytes);

  // Throws FatalError for an address that is not currently outstanding.
  void free(Address48 addr);

  // Usable size of an outstanding allocation; FatalError if unknown.
  std::size_t usable_size(Address48 addr) const;
  bool owns(Address48 addr) const { return outstanding_.contains(addr.value()); }

  std::size_t live_count() const noexcept { return outstanding_.size(); }

  struct Stats {
    std::size_t live_count = 0;
    std::size_t chunks = 0;
    std::size_t reserved_bytes = 0;
    std::size_t oversize_live = 0;
    std::size_t total_allocs = 0;
    std::size_t total_frees = 0;
    std::array<std::size_t, kClassCount> class_live{};
    std::array<std::size_t, kClassCount> class_free{};
  };
  Stats stats() const;
  void dump(std::ostream& os) const;

  static std::size_t class_index(std::size_t bytes) noexcept;
  static std::size_t class_bytes(std::size_t index) noexcept { return kMinClassBytes << index; }

 private:
  static constexpr std::uint32_t kOversize = 0xFFFFFFFFu;

  struct Chunk {
    unsigned char* base = nullptr;
    std::size_t bytes = 0;
  };

  unsigned char* reserve_block(std::size_t bytes, std::size_t align);
  unsigned char* carve(std::size_t bytes);

  ArenaOptions options_;
  std::vector<Chunk> chunks_;
  unsigned char* bump_ = nullptr;
  unsigned char* bump_end_ = nullptr;
  std::array<void*, kClassCount> free_lists_{};
  std::array<std::size_t, kClassCount> free_counts_{};
  // address -> size class, or kOversize for individually served blocks
  std::unordered_map<std::uint64_t, std::uint32_t> outstanding_;
  std::unordered_map<std::uint64_t, std::size_t> oversize_bytes_;
  std::size_t total_allocs_ = 0;
  std::size_t total_frees_ = 0;
};

// Arena used by default for the calling thread.
Arena& thread_arena();

}  // namespace vbits::tagcore
