#include <doctest.h>

#include <random>
#include <string>

#include "mimitag/qr.hpp"
#include "oracles.hpp"

using namespace mimitag;
using namespace mimitag::qr;

namespace {

std::vector<std::uint8_t> bytes(const std::string& s) {
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("byte-mode capacities") {
  CHECK(byte_capacity(1, EcLevel::L) == 17);
  CHECK(byte_capacity(1, EcLevel::M) == 14);
  CHECK(byte_capacity(1, EcLevel::Q) == 11);
  CHECK(byte_capacity(1, EcLevel::H) == 7);
  CHECK(byte_capacity(2, EcLevel::L) == 32);
  CHECK(byte_capacity(3, EcLevel::Q) == 32);
  CHECK(byte_capacity(4, EcLevel::L) == 78);
  CHECK(byte_capacity(4, EcLevel::H) == 34);
}

TEST_CASE("smallest fitting version is chosen") {
  CHECK(encode(bytes("seven b"), EcLevel::L).version == 1);  // 7 <= 17
  CHECK(encode(std::vector<std::uint8_t>(17, 'x'), EcLevel::L).version == 1);
  CHECK(encode(std::vector<std::uint8_t>(18, 'x'), EcLevel::L).version == 2);
  CHECK(encode(std::vector<std::uint8_t>(33, 'x'), EcLevel::L).version == 3);
  CHECK(encode(std::vector<std::uint8_t>(78, 'x'), EcLevel::L).version == 4);
  CHECK_THROWS_AS(encode(std::vector<std::uint8_t>(79, 'x'), EcLevel::L),
                  PayloadTooLarge);
  CHECK_THROWS_AS(encode(std::vector<std::uint8_t>(35, 'x'), EcLevel::H),
                  PayloadTooLarge);
}

TEST_CASE("symbol geometry: side, finders, timing, dark module") {
  for (int target_version = 1; target_version <= 4; ++target_version) {
    const int payload_len = byte_capacity(target_version, EcLevel::M);
    const Symbol s =
        encode(qr::random_payload(target_version, payload_len), EcLevel::M);
    REQUIRE(s.version == target_version);
    const int side = 17 + 4 * s.version;
    CHECK(s.side() == side);
    CHECK(finder_patterns_present(s.modules));
    // timing row and column alternate, dark at even indices
    for (int k = 8; k < side - 8; ++k) {
      CHECK(s.modules.get(6, k) == (k % 2 == 0));
      CHECK(s.modules.get(k, 6) == (k % 2 == 0));
    }
    CHECK(s.modules.get(4 * s.version + 9, 8));  // fixed dark module
  }
}

TEST_CASE("alignment pattern present for versions 2-4") {
  for (int v = 2; v <= 4; ++v) {
    const Symbol s =
        encode(qr::random_payload(v, byte_capacity(v, EcLevel::L)), EcLevel::L);
    REQUIRE(s.version == v);
    const int c = 4 * v + 10;
    CHECK(s.modules.get(c, c));          // dark center
    CHECK(!s.modules.get(c - 1, c));     // light ring
    CHECK(s.modules.get(c - 2, c - 2));  // dark border
  }
}

TEST_CASE("every Reed-Solomon block has zero syndromes (independent oracle)") {
  for (int version = 1; version <= 4; ++version) {
    for (EcLevel ec : {EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H}) {
      const int cap = byte_capacity(version, ec);
      // smallest and largest payloads that land in this exact version
      const int floor_len =
          version == 1 ? 1 : byte_capacity(version - 1, ec) + 1;
      for (int len : {floor_len, (floor_len + cap) / 2, cap}) {
        const Symbol s = encode(
            qr::random_payload(version * 100 + len, static_cast<std::size_t>(len)),
            ec);
        REQUIRE(s.version == version);
        const auto blocks = read_blocks(s.modules);
        REQUIRE(blocks.has_value());
        const BlockLayout layout = block_layout(version, ec);
        REQUIRE(blocks->size() == static_cast<std::size_t>(layout.block_count));
        for (const auto& block : *blocks) {
          REQUIRE(block.size() == static_cast<std::size_t>(
                                      layout.data_per_block + layout.ec_per_block));
          CHECK(oracle::syndromes_zero(block, layout.ec_per_block));
        }
      }
    }
  }
}

TEST_CASE("decode round-trips every version, level and mask") {
  std::mt19937_64 rng(99);
  for (int version = 1; version <= 4; ++version) {
    for (EcLevel ec : {EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H}) {
      const int cap = byte_capacity(version, ec);
      const int floor_len =
          version == 1 ? 1 : byte_capacity(version - 1, ec) + 1;
      const std::size_t len =
          floor_len + rng() % static_cast<std::size_t>(cap - floor_len + 1);
      const std::vector<std::uint8_t> payload = qr::random_payload(rng(), len);
      for (int mask = kAutoMask; mask <= 7; ++mask) {
        const Symbol s = encode(payload, ec, mask);
        if (mask != kAutoMask) {
          CHECK(s.mask == mask);
        }
        const std::optional<Decoded> d = decode(s.modules);
        REQUIRE(d.has_value());
        CHECK(d->payload == payload);
        CHECK(d->version == version);
        CHECK(d->ec == ec);
        CHECK(d->mask == s.mask);
      }
    }
  }
}

TEST_CASE("auto mask selects the minimum penalty, lowest index on ties") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const std::vector<std::uint8_t> payload = qr::random_payload(seed, 12);
    const Symbol chosen = encode(payload, EcLevel::M, kAutoMask);
    long best = 0;
    int best_mask = -1;
    for (int m = 0; m < 8; ++m) {
      const long p = penalty_score(encode(payload, EcLevel::M, m).modules);
      if (best_mask < 0 || p < best) {
        best = p;
        best_mask = m;
      }
    }
    CHECK(penalty_score(chosen.modules) == best);
    CHECK(chosen.mask == best_mask);
  }
}

TEST_CASE("decode falls back to the second format-info copy") {
  const Symbol s = encode(bytes("format copy b"), EcLevel::Q, 2);
  BitMatrix grid = s.modules;
  // wreck copy A around the top-left finder
  const int a_positions[15][2] = {{8, 0}, {8, 1}, {8, 2}, {8, 3}, {8, 4},
                                  {8, 5}, {8, 7}, {8, 8}, {7, 8}, {5, 8},
                                  {4, 8}, {3, 8}, {2, 8}, {1, 8}, {0, 8}};
  for (const auto& pos : a_positions) {
    grid.set(pos[0], pos[1], true);
  }
  const std::optional<Decoded> d = decode(grid);
  REQUIRE(d.has_value());
  CHECK(d->payload == bytes("format copy b"));
  CHECK(d->mask == 2);
}

TEST_CASE("a flipped data module breaks the syndrome check") {
  const Symbol s = encode(bytes("tamper me"), EcLevel::M);
  BitMatrix grid = s.modules;
  const int corner = s.side() - 1;  // always a data module
  grid.set(corner, corner, !grid.get(corner, corner));
  CHECK(!decode(grid).has_value());
}

TEST_CASE("an empty payload round-trips") {
  const Symbol s = encode({}, EcLevel::H);
  const std::optional<Decoded> d = decode(s.modules);
  REQUIRE(d.has_value());
  CHECK(d->payload.empty());
}

TEST_CASE("encode rejects bad mask indices") {
  CHECK_THROWS_AS(encode(bytes("x"), EcLevel::L, 8), ValidationError);
  CHECK_THROWS_AS(encode(bytes("x"), EcLevel::L, -2), ValidationError);
}

TEST_CASE("random_payload is deterministic and printable") {
  const auto a = qr::random_payload(42, 16);
  const auto b = qr::random_payload(42, 16);
  const auto c = qr::random_payload(43, 16);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 16);
  for (std::uint8_t byte : a) {
    CHECK(std::isalnum(static_cast<int>(byte)));
  }
}
