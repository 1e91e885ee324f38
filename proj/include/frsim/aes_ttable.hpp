#pragma once

#include <array>
#include <cstdint>
#include <functional>

namespace frsim {

struct AesKey {
  std::array<std::uint8_t, 16> bytes{};
  bool operator==(const AesKey&) const = default;
};

// 16-byte state block. Byte 4*j + i is row i of column j (column-major),
// so the block maps onto four big-endian 32-bit column words.
struct Block {
  std::array<std::uint8_t, 16> bytes{};
  bool operator==(const Block&) const = default;
};

// Expanded AES-128 schedule: rounds[0] is the master key, rounds[10] the
// last round key. Each entry is serialized in the same column-major byte
// order as Block, so round keys XOR onto the state bytewise.
struct RoundKeys {
  std::array<std::array<std::uint8_t, 16>, 11> rounds{};
};

// The four encryption lookup tables. tables[0][x] packs the MixColumns
// column {2*S[x], S[x], S[x], 3*S[x]} MSB-first; tables[i] is tables[0]
// rotated right by 8*i bits. The whole region is 4 KiB = 64 cache lines
// of 16 entries each.
struct TTables {
  std::array<std::array<std::uint32_t, 256>, 4> tables{};

  static constexpr int kEntryBytes = 4;
  static constexpr int kEntriesPerLine = 16;  // 64-byte line / 4-byte entry
  static constexpr int kLinesPerTable = 16;
  static constexpr int kRegionBytes = 4 * 256 * kEntryBytes;
};

// One table lookup as seen by the memory system. byte_offset is relative
// to the base of the contiguous 4 KiB table region:
//   byte_offset = table * 1024 + entry * 4
// so byte_offset / 64 is the region-wide line index and
// (byte_offset / 64) % 16 the line index within the table.
struct AccessEvent {
  int table;
  int entry;
  int byte_offset;
};

using AccessSink = std::function<void(const AccessEvent&)>;

// Byte lane i (0 = most significant) of a table word.
constexpr std::uint8_t word_lane(std::uint32_t w, int i) {
  return static_cast<std::uint8_t>(w >> (24 - 8 * i));
}

TTables derive_ttables();

RoundKeys key_expand(const AesKey& key);

// Walks the schedule backwards from round 10; total for AES-128.
AesKey invert_key_schedule(const std::array<std::uint8_t, 16>& last_round_key);

// T-table encryption. Emits one AccessEvent per lookup, in execution
// order: 16 per round for rounds 1..9 with row i reading table i, then a
// final 16 where row i reads table (i+2) % 4. 160 events total. The sink
// may be empty.
Block encrypt_block(const Block& pt, const RoundKeys& rk, const AccessSink& sink);

// Plain SubBytes/ShiftRows/MixColumns/AddRoundKey implementation with no
// table lookups and no trace. Kept as the in-tree cross-check for
// encrypt_block.
Block reference_encrypt(const Block& pt, const RoundKeys& rk);

}  // namespace frsim
