#include "mimitag/qr.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <random>

namespace mimitag::qr {

namespace {

// ---------------------------------------------------------------- GF(256)

constexpr int kGfPoly = 0x11D;

struct GfTables {
  std::array<std::uint8_t, 256> log{};
  std::array<std::uint8_t, 510> exp{};

  GfTables() {
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = static_cast<std::uint8_t>(i);
      x <<= 1;
      if (x & 0x100) {
        x ^= kGfPoly;
      }
    }
    for (int i = 255; i < 510; ++i) {
      exp[i] = exp[i - 255];
    }
  }
};

const GfTables& gf() {
  static const GfTables tables;
  return tables;
}

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) {
    return 0;
  }
  return gf().exp[gf().log[a] + gf().log[b]];
}

// Generator polynomial with roots alpha^0 .. alpha^(ec-1); coefficients
// returned without the leading 1, highest power first.
std::vector<std::uint8_t> rs_generator(int ec_len) {
  std::vector<std::uint8_t> g{1};
  for (int i = 0; i < ec_len; ++i) {
    std::vector<std::uint8_t> next(g.size() + 1, 0);
    const std::uint8_t root = gf().exp[i];
    for (std::size_t j = 0; j < g.size(); ++j) {
      next[j] ^= gf_mul(g[j], 1);
      next[j + 1] ^= gf_mul(g[j], root);
    }
    g = std::move(next);
  }
  return {g.begin() + 1, g.end()};
}

std::vector<std::uint8_t> rs_ec_bytes(std::span<const std::uint8_t> data,
                                      int ec_len) {
  const std::vector<std::uint8_t> gen = rs_generator(ec_len);
  std::vector<std::uint8_t> rem(static_cast<std::size_t>(ec_len), 0);
  for (std::uint8_t d : data) {
    const std::uint8_t factor = d ^ rem.front();
    rem.erase(rem.begin());
    rem.push_back(0);
    for (int j = 0; j < ec_len; ++j) {
      rem[j] ^= gf_mul(gen[j], factor);
    }
  }
  return rem;
}

bool rs_syndromes_zero(std::span<const std::uint8_t> codeword, int ec_len) {
  for (int i = 0; i < ec_len; ++i) {
    const std::uint8_t root = gf().exp[i];
    std::uint8_t s = 0;
    for (std::uint8_t b : codeword) {
      s = static_cast<std::uint8_t>(gf_mul(s, root) ^ b);
    }
    if (s != 0) {
      return false;
    }
  }
  return true;
}

// ------------------------------------------------------------ symbol tables

struct VersionInfo {
  BlockLayout layout[4];  // indexed by EcLevel
};

// Versions 1-4 only; every version/level uses equal-sized blocks.
constexpr VersionInfo kVersions[4] = {
    {{{1, 19, 7}, {1, 16, 10}, {1, 13, 13}, {1, 9, 17}}},
    {{{1, 34, 10}, {1, 28, 16}, {1, 22, 22}, {1, 16, 28}}},
    {{{1, 55, 15}, {1, 44, 26}, {2, 17, 18}, {2, 13, 22}}},
    {{{1, 80, 20}, {2, 32, 18}, {2, 24, 26}, {4, 9, 16}}},
};

constexpr int kRemainderBits[4] = {0, 7, 7, 7};

// Format info data bits: ec(2) | mask(3). L=01 M=00 Q=11 H=10.
constexpr int kEcFormatBits[4] = {1, 0, 3, 2};

int format_bits(EcLevel ec, int mask) {
  const int data = (kEcFormatBits[static_cast<int>(ec)] << 3) | mask;
  int rem = data << 10;
  for (int bit = 14; bit >= 10; --bit) {
    if (rem & (1 << bit)) {
      rem ^= 0x537 << (bit - 10);
    }
  }
  return ((data << 10) | rem) ^ 0x5412;
}

// BCH(15,5) check after unmasking; -1 when invalid.
int format_decode(int masked) {
  int f = masked ^ 0x5412;
  int rem = f;
  for (int bit = 14; bit >= 10; --bit) {
    if (rem & (1 << bit)) {
      rem ^= 0x537 << (bit - 10);
    }
  }
  if ((rem & 0x3FF) != 0) {
    return -1;
  }
  return f >> 10;
}

bool mask_bit(int mask, int r, int c) {
  switch (mask) {
    case 0: return (r + c) % 2 == 0;
    case 1: return r % 2 == 0;
    case 2: return c % 3 == 0;
    case 3: return (r + c) % 3 == 0;
    case 4: return (r / 2 + c / 3) % 2 == 0;
    case 5: return (r * c) % 2 + (r * c) % 3 == 0;
    case 6: return ((r * c) % 2 + (r * c) % 3) % 2 == 0;
    default: return ((r + c) % 2 + (r * c) % 3) % 2 == 0;
  }
}

// ------------------------------------------------------- matrix skeleton

struct Skeleton {
  BitMatrix modules;
  std::vector<std::uint8_t> reserved;  // function + format modules

  explicit Skeleton(int side)
      : modules(side), reserved(static_cast<std::size_t>(side) * side, 0) {}

  bool is_reserved(int r, int c) const {
    return reserved[r * modules.side() + c] != 0;
  }
  void put(int r, int c, bool dark) {
    modules.set(r, c, dark);
    reserved[r * modules.side() + c] = 1;
  }
};

void draw_finder(Skeleton& s, int top, int left) {
  for (int r = -1; r <= 7; ++r) {
    for (int c = -1; c <= 7; ++c) {
      const int rr = top + r;
      const int cc = left + c;
      if (rr < 0 || cc < 0 || rr >= s.modules.side() || cc >= s.modules.side()) {
        continue;  // separator off the edge
      }
      const bool ring = r == -1 || r == 7 || c == -1 || c == 7;
      const bool border = r == 0 || r == 6 || c == 0 || c == 6;
      const bool core = r >= 2 && r <= 4 && c >= 2 && c <= 4;
      s.put(rr, cc, !ring && (border || core));
    }
  }
}

void draw_alignment(Skeleton& s, int center) {
  for (int r = -2; r <= 2; ++r) {
    for (int c = -2; c <= 2; ++c) {
      const bool dark =
          std::abs(r) == 2 || std::abs(c) == 2 || (r == 0 && c == 0);
      s.put(center + r, center + c, dark);
    }
  }
}

Skeleton build_skeleton(int version) {
  const int side = 17 + 4 * version;
  Skeleton s(side);
  draw_finder(s, 0, 0);
  draw_finder(s, 0, side - 7);
  draw_finder(s, side - 7, 0);
  for (int k = 8; k < side - 8; ++k) {
    if (!s.is_reserved(6, k)) {
      s.put(6, k, k % 2 == 0);
    }
    if (!s.is_reserved(k, 6)) {
      s.put(k, 6, k % 2 == 0);
    }
  }
  if (version >= 2) {
    draw_alignment(s, 4 * version + 10);
  }
  s.put(4 * version + 9, 8, true);  // fixed dark module
  // Reserve format areas; actual bits are written per mask.
  for (int c = 0; c <= 8; ++c) {
    if (c != 6 && !s.is_reserved(8, c)) {
      s.put(8, c, false);
    }
  }
  for (int r = 0; r <= 8; ++r) {
    if (r != 6 && !s.is_reserved(r, 8)) {
      s.put(r, 8, false);
    }
  }
  for (int c = side - 8; c < side; ++c) {
    if (!s.is_reserved(8, c)) {
      s.put(8, c, false);
    }
  }
  for (int r = side - 7; r < side; ++r) {
    if (!s.is_reserved(r, 8)) {
      s.put(r, 8, false);
    }
  }
  return s;
}

// Format info placement, MSB (bit 14) first.
struct FormatPos {
  int r, c;
};
constexpr FormatPos kFormatCopyA[15] = {
    {8, 0}, {8, 1}, {8, 2}, {8, 3}, {8, 4}, {8, 5}, {8, 7}, {8, 8},
    {7, 8}, {5, 8}, {4, 8}, {3, 8}, {2, 8}, {1, 8}, {0, 8},
};

void draw_format(BitMatrix& m, EcLevel ec, int mask) {
  const int f = format_bits(ec, mask);
  const int side = m.side();
  for (int i = 0; i < 15; ++i) {
    const bool bit = (f >> (14 - i)) & 1;
    m.set(kFormatCopyA[i].r, kFormatCopyA[i].c, bit);
    if (i < 7) {
      m.set(side - 1 - i, 8, bit);
    } else {
      m.set(8, side - 8 + (i - 7), bit);
    }
  }
}

int read_format(const BitMatrix& m) {
  int a = 0;
  for (int i = 0; i < 15; ++i) {
    a = (a << 1) | (m.get(kFormatCopyA[i].r, kFormatCopyA[i].c) ? 1 : 0);
  }
  if (const int f = format_decode(a); f >= 0) {
    return f;
  }
  const int side = m.side();
  int b = 0;
  for (int i = 0; i < 15; ++i) {
    const bool bit = i < 7 ? m.get(side - 1 - i, 8)
                           : m.get(8, side - 8 + (i - 7));
    b = (b << 1) | (bit ? 1 : 0);
  }
  return format_decode(b);
}

// Data-region traversal in placement order: column pairs right to left,
// skipping the timing column, zigzagging up and down.
template <typename Fn>
void for_each_data_module(const Skeleton& skeleton, Fn&& fn) {
  const int side = skeleton.modules.side();
  bool upward = true;
  for (int col = side - 1; col > 0; col -= 2) {
    if (col == 6) {
      --col;
    }
    for (int k = 0; k < side; ++k) {
      const int row = upward ? side - 1 - k : k;
      for (int dc = 0; dc < 2; ++dc) {
        const int c = col - dc;
        if (!skeleton.is_reserved(row, c)) {
          fn(row, c);
        }
      }
    }
    upward = !upward;
  }
}

// ------------------------------------------------------------ bit building

std::vector<std::uint8_t> build_data_codewords(
    std::span<const std::uint8_t> payload, int version, EcLevel ec) {
  const BlockLayout layout = block_layout(version, ec);
  const int data_len = layout.block_count * layout.data_per_block;

  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(data_len) * 8);
  auto push_bits = [&bits](unsigned value, int count) {
    for (int i = count - 1; i >= 0; --i) {
      bits.push_back((value >> i) & 1);
    }
  };
  push_bits(0b0100, 4);  // byte mode
  push_bits(static_cast<unsigned>(payload.size()), 8);
  for (std::uint8_t b : payload) {
    push_bits(b, 8);
  }
  const std::size_t cap_bits = static_cast<std::size_t>(data_len) * 8;
  const std::size_t terminator = std::min<std::size_t>(4, cap_bits - bits.size());
  for (std::size_t i = 0; i < terminator; ++i) {
    bits.push_back(0);
  }
  while (bits.size() % 8 != 0) {
    bits.push_back(0);
  }

  std::vector<std::uint8_t> codewords;
  codewords.reserve(data_len);
  for (std::size_t i = 0; i < bits.size(); i += 8) {
    std::uint8_t b = 0;
    for (int j = 0; j < 8; ++j) {
      b = static_cast<std::uint8_t>((b << 1) | bits[i + j]);
    }
    codewords.push_back(b);
  }
  const std::uint8_t pads[2] = {0xEC, 0x11};
  for (int i = 0; codewords.size() < static_cast<std::size_t>(data_len); ++i) {
    codewords.push_back(pads[i % 2]);
  }
  return codewords;
}

std::vector<std::uint8_t> interleave(std::span<const std::uint8_t> data,
                                     int version, EcLevel ec) {
  const BlockLayout layout = block_layout(version, ec);
  const int nb = layout.block_count;
  std::vector<std::vector<std::uint8_t>> blocks(nb);
  std::vector<std::vector<std::uint8_t>> ecs(nb);
  for (int b = 0; b < nb; ++b) {
    auto first = data.begin() + static_cast<std::ptrdiff_t>(b) * layout.data_per_block;
    blocks[b].assign(first, first + layout.data_per_block);
    ecs[b] = rs_ec_bytes(blocks[b], layout.ec_per_block);
  }
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(nb) *
              (layout.data_per_block + layout.ec_per_block));
  for (int i = 0; i < layout.data_per_block; ++i) {
    for (int b = 0; b < nb; ++b) {
      out.push_back(blocks[b][i]);
    }
  }
  for (int i = 0; i < layout.ec_per_block; ++i) {
    for (int b = 0; b < nb; ++b) {
      out.push_back(ecs[b][i]);
    }
  }
  return out;
}

BitMatrix assemble(const Skeleton& skeleton,
                   std::span<const std::uint8_t> interleaved, EcLevel ec,
                   int mask) {
  BitMatrix m = skeleton.modules;
  std::size_t bit_index = 0;
  const std::size_t total_bits = interleaved.size() * 8;
  for_each_data_module(skeleton, [&](int r, int c) {
    bool bit = false;  // remainder bits stay 0
    if (bit_index < total_bits) {
      bit = (interleaved[bit_index / 8] >> (7 - bit_index % 8)) & 1;
    }
    ++bit_index;
    m.set(r, c, bit != mask_bit(mask, r, c));
  });
  draw_format(m, ec, mask);
  return m;
}

}  // namespace

BlockLayout block_layout(int version, EcLevel ec) {
  if (version < 1 || version > 4) {
    throw ValidationError("QR version must be 1..4");
  }
  return kVersions[version - 1].layout[static_cast<int>(ec)];
}

int byte_capacity(int version, EcLevel ec) {
  const BlockLayout layout = block_layout(version, ec);
  return layout.block_count * layout.data_per_block - 2;
}

Symbol encode(std::span<const std::uint8_t> payload, EcLevel ec, int mask) {
  if (mask != kAutoMask && (mask < 0 || mask > 7)) {
    throw ValidationError("mask must be 0..7 or auto");
  }
  int version = 0;
  for (int v = 1; v <= 4; ++v) {
    if (static_cast<int>(payload.size()) <= byte_capacity(v, ec)) {
      version = v;
      break;
    }
  }
  if (version == 0) {
    throw PayloadTooLarge("payload of " + std::to_string(payload.size()) +
                          " bytes exceeds version 4 capacity");
  }

  const Skeleton skeleton = build_skeleton(version);
  const std::vector<std::uint8_t> data =
      build_data_codewords(payload, version, ec);
  const std::vector<std::uint8_t> interleaved = interleave(data, version, ec);

  Symbol symbol;
  symbol.version = version;
  symbol.ec = ec;
  symbol.payload.assign(payload.begin(), payload.end());
  if (mask != kAutoMask) {
    symbol.mask = mask;
    symbol.modules = assemble(skeleton, interleaved, ec, mask);
    return symbol;
  }
  long best_penalty = 0;
  for (int m = 0; m < 8; ++m) {
    BitMatrix candidate = assemble(skeleton, interleaved, ec, m);
    const long p = penalty_score(candidate);
    if (m == 0 || p < best_penalty) {
      best_penalty = p;
      symbol.mask = m;
      symbol.modules = std::move(candidate);
    }
  }
  return symbol;
}

long penalty_score(const BitMatrix& grid) {
  const int side = grid.side();
  long score = 0;

  // Rule 1: runs of 5+ same-colored modules in rows and columns.
  for (int axis = 0; axis < 2; ++axis) {
    for (int i = 0; i < side; ++i) {
      int run = 1;
      for (int j = 1; j <= side; ++j) {
        const bool same =
            j < side && (axis == 0 ? grid.get(i, j) == grid.get(i, j - 1)
                                   : grid.get(j, i) == grid.get(j - 1, i));
        if (same) {
          ++run;
        } else {
          if (run >= 5) {
            score += 3 + (run - 5);
          }
          run = 1;
        }
      }
    }
  }

  // Rule 2: 2x2 blocks of one color.
  for (int r = 0; r + 1 < side; ++r) {
    for (int c = 0; c + 1 < side; ++c) {
      const bool v = grid.get(r, c);
      if (grid.get(r, c + 1) == v && grid.get(r + 1, c) == v &&
          grid.get(r + 1, c + 1) == v) {
        score += 3;
      }
    }
  }

  // Rule 3: finder-like 1011101 with 0000 on either side, rows and columns.
  constexpr int kPattern[2][11] = {
      {1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0},
      {0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1},
  };
  for (int axis = 0; axis < 2; ++axis) {
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j + 11 <= side; ++j) {
        for (const auto& pat : kPattern) {
          bool match = true;
          for (int k = 0; k < 11; ++k) {
            const bool v =
                axis == 0 ? grid.get(i, j + k) : grid.get(j + k, i);
            if (v != (pat[k] == 1)) {
              match = false;
              break;
            }
          }
          if (match) {
            score += 40;
          }
        }
      }
    }
  }

  // Rule 4: dark-module proportion, 10 per 5% step away from 50%.
  long dark = 0;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      dark += grid.get(r, c) ? 1 : 0;
    }
  }
  const long total = static_cast<long>(side) * side;
  const long percent = dark * 100 / total;
  const long k = std::max(std::labs(percent - 50) / 5,
                          std::labs(percent + 5 - 50) / 5 - 1);
  score += 10 * k;
  return score;
}

bool finder_patterns_present(const BitMatrix& grid) {
  const int side = grid.side();
  if (side < 21) {
    return false;
  }
  const auto check = [&](int top, int left) {
    for (int r = -1; r <= 7; ++r) {
      for (int c = -1; c <= 7; ++c) {
        const int rr = top + r;
        const int cc = left + c;
        if (rr < 0 || cc < 0 || rr >= side || cc >= side) {
          continue;
        }
        const bool ring = r == -1 || r == 7 || c == -1 || c == 7;
        const bool border = r == 0 || r == 6 || c == 0 || c == 6;
        const bool core = r >= 2 && r <= 4 && c >= 2 && c <= 4;
        const bool expect = !ring && (border || core);
        if (grid.get(rr, cc) != expect) {
          return false;
        }
      }
    }
    return true;
  };
  return check(0, 0) && check(0, side - 7) && check(side - 7, 0);
}

std::optional<std::vector<std::vector<std::uint8_t>>> read_blocks(
    const BitMatrix& grid) {
  const int side = grid.side();
  if (side < 21 || side > 33 || (side - 17) % 4 != 0) {
    return std::nullopt;
  }
  const int version = (side - 17) / 4;
  const int format = read_format(grid);
  if (format < 0) {
    return std::nullopt;
  }
  const int mask = format & 7;
  const int ec_bits = format >> 3;
  EcLevel ec = EcLevel::M;
  for (int e = 0; e < 4; ++e) {
    if (kEcFormatBits[e] == ec_bits) {
      ec = static_cast<EcLevel>(e);
    }
  }

  const Skeleton skeleton = build_skeleton(version);
  const BlockLayout layout = block_layout(version, ec);
  const int total = layout.block_count * (layout.data_per_block + layout.ec_per_block);

  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(total) * 8 + kRemainderBits[version - 1]);
  for_each_data_module(skeleton, [&](int r, int c) {
    const bool raw = grid.get(r, c) != mask_bit(mask, r, c);
    bits.push_back(raw ? 1 : 0);
  });
  if (bits.size() < static_cast<std::size_t>(total) * 8) {
    return std::nullopt;
  }
  std::vector<std::uint8_t> interleaved(total, 0);
  for (int i = 0; i < total; ++i) {
    std::uint8_t b = 0;
    for (int j = 0; j < 8; ++j) {
      b = static_cast<std::uint8_t>((b << 1) | bits[i * 8 + j]);
    }
    interleaved[i] = b;
  }

  const int nb = layout.block_count;
  std::vector<std::vector<std::uint8_t>> blocks(
      nb, std::vector<std::uint8_t>());
  for (int i = 0; i < layout.data_per_block; ++i) {
    for (int b = 0; b < nb; ++b) {
      blocks[b].push_back(interleaved[i * nb + b]);
    }
  }
  const int ec_base = layout.data_per_block * nb;
  for (int i = 0; i < layout.ec_per_block; ++i) {
    for (int b = 0; b < nb; ++b) {
      blocks[b].push_back(interleaved[ec_base + i * nb + b]);
    }
  }
  return blocks;
}

std::optional<Decoded> decode(const BitMatrix& grid) {
  if (!finder_patterns_present(grid)) {
    return std::nullopt;
  }
  const int side = grid.side();
  if ((side - 17) % 4 != 0) {
    return std::nullopt;
  }
  const int version = (side - 17) / 4;
  const int format = read_format(grid);
  if (format < 0) {
    return std::nullopt;
  }
  const auto blocks = read_blocks(grid);
  if (!blocks) {
    return std::nullopt;
  }
  const int ec_bits = format >> 3;
  EcLevel ec = EcLevel::M;
  for (int e = 0; e < 4; ++e) {
    if (kEcFormatBits[e] == ec_bits) {
      ec = static_cast<EcLevel>(e);
    }
  }
  const BlockLayout layout = block_layout(version, ec);

  std::vector<std::uint8_t> data;
  for (const auto& block : *blocks) {
    if (!rs_syndromes_zero(block, layout.ec_per_block)) {
      return std::nullopt;
    }
    data.insert(data.end(), block.begin(),
                block.begin() + layout.data_per_block);
  }

  // Byte-mode parse: 0100 nibble, 8-bit count, payload.
  if (data.size() < 2 || (data[0] >> 4) != 0b0100) {
    return std::nullopt;
  }
  const int count = ((data[0] & 0x0F) << 4) | (data[1] >> 4);
  const std::size_t need = 2 + static_cast<std::size_t>(count);
  if (count > byte_capacity(version, ec) ||
      data.size() < need) {
    return std::nullopt;
  }
  Decoded out;
  out.version = version;
  out.ec = ec;
  out.mask = format & 7;
  out.payload.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.payload.push_back(static_cast<std::uint8_t>(
        ((data[1 + i] & 0x0F) << 4) | (data[2 + i] >> 4)));
  }
  return out;
}

std::vector<std::uint8_t> random_payload(std::uint64_t seed,
                                         std::size_t length) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const std::uint64_t r = rng() >> 11;
    out.push_back(static_cast<std::uint8_t>(
        kAlphabet[r % (sizeof(kAlphabet) - 1)]));
  }
  return out;
}

}  // namespace mimitag::qr
