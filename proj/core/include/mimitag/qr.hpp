#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimitag/errors.hpp"

namespace mimitag::qr {

enum class EcLevel { L, M, Q, H };

class BitMatrix {
 public:
  explicit BitMatrix(int side)
      : side_(side), bits_(static_cast<std::size_t>(side) * side, 0) {}

  int side() const { return side_; }
  bool get(int row, int col) const { return bits_[row * side_ + col] != 0; }
  void set(int row, int col, bool dark) {
    bits_[row * side_ + col] = dark ? 1 : 0;
  }
  bool operator==(const BitMatrix&) const = default;

 private:
  int side_;
  std::vector<std::uint8_t> bits_;
};

// Byte-mode symbol, versions 1-4, Reed-Solomon EC over GF(256) (polynomial
// 0x11D, generator roots alpha^0 .. alpha^(ec-1)), format info BCH(15,5)
// masked with 0x5412, data masking chosen by the standard four penalty rules.
struct Symbol {
  int version = 1;  // side = 17 + 4 * version
  EcLevel ec = EcLevel::M;
  int mask = 0;  // 0..7
  BitMatrix modules{21};
  std::vector<std::uint8_t> payload;

  int side() const { return modules.side(); }
};

inline constexpr int kAutoMask = -1;

// Smallest version 1-4 that fits; throws PayloadTooLarge otherwise.
// mask = kAutoMask picks the minimum-penalty mask (lowest index on ties).
Symbol encode(std::span<const std::uint8_t> payload, EcLevel ec,
              int mask = kAutoMask);

// Maximum payload bytes for a version / EC level.
int byte_capacity(int version, EcLevel ec);

struct BlockLayout {
  int block_count;
  int data_per_block;
  int ec_per_block;
};
BlockLayout block_layout(int version, EcLevel ec);

// Standard four-rule mask penalty of a finished symbol grid.
long penalty_score(const BitMatrix& grid);

// Finder patterns plus separators at the three corners, exact match.
bool finder_patterns_present(const BitMatrix& grid);

// Codeword blocks (data then EC bytes per block) read back off a symbol grid
// via format info and de-interleaving; nullopt when the grid has no readable
// format info or impossible geometry.
std::optional<std::vector<std::vector<std::uint8_t>>> read_blocks(
    const BitMatrix& grid);

struct Decoded {
  int version;
  EcLevel ec;
  int mask;
  std::vector<std::uint8_t> payload;
};

// Full closed-loop decode: format info -> unmask -> de-interleave -> RS
// syndrome check -> byte-mode parse. nullopt on any failure.
std::optional<Decoded> decode(const BitMatrix& grid);

// Deterministic printable payload (alphanumerics), for "randomly generated"
// tag codes.
std::vector<std::uint8_t> random_payload(std::uint64_t seed,
                                         std::size_t length);

}  // namespace mimitag::qr
