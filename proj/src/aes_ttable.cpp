#include "frsim/aes_ttable.hpp"

#include <bit>

namespace frsim {
namespace {

std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x >> 7) * 0x1b));
}

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return r;
}

// S-box built from first principles: multiplicative inverse in GF(2^8)
// followed by the affine transform.
std::array<std::uint8_t, 256> make_sbox() {
  std::array<std::uint8_t, 256> box{};
  for (int x = 0; x < 256; ++x) {
    std::uint8_t inv = 0;
    if (x != 0) {
      for (int y = 1; y < 256; ++y) {
        if (gf_mul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
          inv = static_cast<std::uint8_t>(y);
          break;
        }
      }
    }
    std::uint8_t s = inv;
    s = static_cast<std::uint8_t>(inv ^ std::rotl(inv, 1) ^ std::rotl(inv, 2) ^
                                  std::rotl(inv, 3) ^ std::rotl(inv, 4) ^ 0x63);
    box[x] = s;
  }
  return box;
}

const std::array<std::uint8_t, 256>& sbox() {
  static const std::array<std::uint8_t, 256> box = make_sbox();
  return box;
}

const TTables& shared_ttables() {
  static const TTables tt = derive_ttables();
  return tt;
}

std::uint32_t load_be(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

void store_be(std::uint8_t* p, std::uint32_t w) {
  p[0] = static_cast<std::uint8_t>(w >> 24);
  p[1] = static_cast<std::uint8_t>(w >> 16);
  p[2] = static_cast<std::uint8_t>(w >> 8);
  p[3] = static_cast<std::uint8_t>(w);
}

constexpr std::array<std::uint8_t, 11> kRcon = {0x00, 0x01, 0x02, 0x04, 0x08, 0x10,
                                                0x20, 0x40, 0x80, 0x1b, 0x36};

std::uint32_t sub_word(std::uint32_t w) {
  const auto& box = sbox();
  return (std::uint32_t{box[(w >> 24) & 0xff]} << 24) |
         (std::uint32_t{box[(w >> 16) & 0xff]} << 16) |
         (std::uint32_t{box[(w >> 8) & 0xff]} << 8) | std::uint32_t{box[w & 0xff]};
}

std::uint32_t schedule_core(std::uint32_t prev, int round) {
  return sub_word(std::rotl(prev, 8)) ^ (std::uint32_t{kRcon[round]} << 24);
}

}  // namespace

TTables derive_ttables() {
  TTables tt;
  const auto& box = sbox();
  for (int x = 0; x < 256; ++x) {
    const std::uint8_t s = box[x];
    const std::uint8_t s2 = xtime(s);
    const std::uint8_t s3 = static_cast<std::uint8_t>(s2 ^ s);
    const std::uint32_t t0 = (std::uint32_t{s2} << 24) | (std::uint32_t{s} << 16) |
                             (std::uint32_t{s} << 8) | std::uint32_t{s3};
    for (int i = 0; i < 4; ++i) tt.tables[i][x] = std::rotr(t0, 8 * i);
  }
  return tt;
}

RoundKeys key_expand(const AesKey& key) {
  std::array<std::uint32_t, 44> w;
  for (int j = 0; j < 4; ++j) w[j] = load_be(key.bytes.data() + 4 * j);
  for (int i = 4; i < 44; ++i) {
    std::uint32_t t = w[i - 1];
    if (i % 4 == 0) t = schedule_core(t, i / 4);
    w[i] = w[i - 4] ^ t;
  }
  RoundKeys rk;
  for (int k = 0; k < 11; ++k)
    for (int j = 0; j < 4; ++j) store_be(rk.rounds[k].data() + 4 * j, w[4 * k + j]);
  return rk;
}

AesKey invert_key_schedule(const std::array<std::uint8_t, 16>& last_round_key) {
  std::array<std::uint32_t, 44> w;
  for (int j = 0; j < 4; ++j) w[40 + j] = load_be(last_round_key.data() + 4 * j);
  for (int i = 43; i >= 4; --i) {
    std::uint32_t t = w[i - 1];
    if (i % 4 == 0) t = schedule_core(t, i / 4);
    w[i - 4] = w[i] ^ t;
  }
  AesKey key;
  for (int j = 0; j < 4; ++j) store_be(key.bytes.data() + 4 * j, w[j]);
  return key;
}

Block encrypt_block(const Block& pt, const RoundKeys& rk, const AccessSink& sink) {
  const TTables& tt = shared_ttables();

  const auto round_word = [&rk](int round, int j) {
    return load_be(rk.rounds[round].data() + 4 * j);
  };
  const auto emit = [&sink](int table, int entry) {
    if (sink) sink(AccessEvent{table, entry, table * 1024 + entry * TTables::kEntryBytes});
  };

  std::array<std::uint32_t, 4> s;
  for (int j = 0; j < 4; ++j) s[j] = load_be(pt.bytes.data() + 4 * j) ^ round_word(0, j);

  // Rounds 1..9: output column j combines row i of column (j+i) % 4
  // through table i.
  for (int round = 1; round <= 9; ++round) {
    std::array<std::uint32_t, 4> next;
    for (int j = 0; j < 4; ++j) {
      std::uint32_t acc = round_word(round, j);
      for (int i = 0; i < 4; ++i) {
        const std::uint8_t entry = word_lane(s[(j + i) & 3], i);
        emit(i, entry);
        acc ^= tt.tables[i][entry];
      }
      next[j] = acc;
    }
    s = next;
  }

  // Final round: no column mix, so lane i is pulled from table (i+2) % 4,
  // whose coefficient in that lane is 1.
  Block out;
  for (int j = 0; j < 4; ++j) {
    std::uint32_t acc = round_word(10, j);
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t entry = word_lane(s[(j + i) & 3], i);
      const int table = (i + 2) & 3;
      emit(table, entry);
      const std::uint32_t mask = std::uint32_t{0xff} << (24 - 8 * i);
      acc ^= tt.tables[table][entry] & mask;
    }
    store_be(out.bytes.data() + 4 * j, acc);
  }
  return out;
}

Block reference_encrypt(const Block& pt, const RoundKeys& rk) {
  const auto& box = sbox();
  std::array<std::uint8_t, 16> st = pt.bytes;

  const auto add_round_key = [&](int round) {
    for (int b = 0; b < 16; ++b) st[b] ^= rk.rounds[round][b];
  };
  const auto sub_bytes = [&] {
    for (auto& b : st) b = box[b];
  };
  const auto shift_rows = [&] {
    std::array<std::uint8_t, 16> next;
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) next[4 * j + i] = st[4 * ((j + i) & 3) + i];
    st = next;
  };
  const auto mix_columns = [&] {
    for (int j = 0; j < 4; ++j) {
      std::uint8_t* c = st.data() + 4 * j;
      const std::uint8_t a0 = c[0], a1 = c[1], a2 = c[2], a3 = c[3];
      c[0] = static_cast<std::uint8_t>(gf_mul(a0, 2) ^ gf_mul(a1, 3) ^ a2 ^ a3);
      c[1] = static_cast<std::uint8_t>(a0 ^ gf_mul(a1, 2) ^ gf_mul(a2, 3) ^ a3);
      c[2] = static_cast<std::uint8_t>(a0 ^ a1 ^ gf_mul(a2, 2) ^ gf_mul(a3, 3));
      c[3] = static_cast<std::uint8_t>(gf_mul(a0, 3) ^ a1 ^ a2 ^ gf_mul(a3, 2));
    }
  };

  add_round_key(0);
  for (int round = 1; round <= 9; ++round) {
    sub_bytes();
    shift_rows();
    mix_columns();
    add_round_key(round);
  }
  sub_bytes();
  shift_rows();
  add_round_key(10);

  Block out;
  out.bytes = st;
  return out;
}

}  // namespace frsim
