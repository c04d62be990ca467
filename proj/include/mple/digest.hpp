#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace mple {

/// 128-bit content digest.
struct Digest {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend auto operator<=>(const Digest&, const Digest&) = default;

  std::string hex() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 0; i < 16; ++i) {
      out[15 - i] = kHex[(hi >> (4 * i)) & 0xF];
      out[31 - i] = kHex[(lo >> (4 * i)) & 0xF];
    }
    return out;
  }
};

/// FNV-1a over 128 bits. Every variable-length field is length-prefixed so
/// that concatenation boundaries cannot collide.
class DigestBuilder {
 public:
  DigestBuilder() = default;

  DigestBuilder& byte(std::uint8_t b) {
    state_ ^= b;
    state_ *= kPrime;
    return *this;
  }

  DigestBuilder& u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
  }

  DigestBuilder& text(std::string_view s) {
    u64(s.size());
    for (char c : s) byte(static_cast<std::uint8_t>(c));
    return *this;
  }

  DigestBuilder& digest(const Digest& d) {
    u64(d.hi);
    return u64(d.lo);
  }

  Digest finish() const {
    return Digest{static_cast<std::uint64_t>(state_ >> 64),
                  static_cast<std::uint64_t>(state_)};
  }

 private:
  __extension__ using u128 = unsigned __int128;
  static constexpr u128 kOffset =
      (static_cast<u128>(0x6C62272E07BB0142ULL) << 64) | 0x62B821756295C58DULL;
  static constexpr u128 kPrime = (static_cast<u128>(1) << 88) | 0x13BULL;

  u128 state_ = kOffset;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    return static_cast<std::size_t>(d.lo ^ (d.hi * 0x9E3779B97F4A7C15ULL));
  }
};

}  // namespace mple
