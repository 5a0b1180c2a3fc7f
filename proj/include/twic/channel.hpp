#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "twic/rational.hpp"

namespace twic {

/// An ADT deterministic-model signal: a fixed-length vector of GF(2) bit
/// levels, index 0 being the top (most significant) level. Top levels travel
/// furthest; a down-shift models attenuation.
class LevelVector {
  public:
    LevelVector() = default;
    explicit LevelVector(int length) : len_(length), bits_(0) {}
    LevelVector(std::initializer_list<int> bits);

    static LevelVector from_mask(std::uint32_t mask, int length) {
        LevelVector v(length);
        v.bits_ = mask & v.full_mask();
        return v;
    }

    int length() const { return len_; }
    bool bit(int level) const { return (bits_ >> level) & 1u; }
    void set_bit(int level, bool value) {
        bits_ = (bits_ & ~(std::uint32_t{1} << level)) | (std::uint32_t{value} << level);
    }
    std::uint32_t mask() const { return bits_; }
    bool is_zero() const { return bits_ == 0; }

    LevelVector operator^(const LevelVector& other) const;
    std::string to_string() const;  // top-to-bottom, e.g. "101"

    friend bool operator==(const LevelVector& a, const LevelVector& b) {
        return a.len_ == b.len_ && a.bits_ == b.bits_;
    }

  private:
    std::uint32_t full_mask() const {
        return len_ >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << len_) - 1;
    }
    int len_ = 0;
    std::uint32_t bits_ = 0;  // bit i = level i (level 0 = top)
};

/// Symmetric two-way channel parameters: (n, m) forward direct/cross levels,
/// (nb, mb) backward, and the exact fraction lambda of time the backward
/// channel spends on feedback.
struct ChannelConfig {
    int n = 0;
    int m = 0;
    int nb = 0;
    int mb = 0;
    Rational lambda = Rational(0);

    int q() const { return n > m ? n : m; }    // forward signal length
    int qb() const { return nb > mb ? nb : mb; }  // backward signal length

    void validate() const;
    std::string to_string() const;
};

/// Down-shift by s levels: the top (len - s) levels reappear starting at
/// index s, the top s levels of the result are zero. Over-shift annihilates.
LevelVector shift_down(const LevelVector& v, int s);

/// Top m levels of x, in order.
LevelVector visible_part(const LevelVector& x, int m);

/// One forward channel use: y_k = shift(x_k, q-n) xor shift(x_j, q-m).
/// Inputs must have length q = max(n, m).
std::pair<LevelVector, LevelVector> transmit_forward(const LevelVector& x1, const LevelVector& x2,
                                                     const ChannelConfig& cfg);

/// One backward channel use with the tilde parameters; yb_k (received at
/// user k) gets direct from user k~ and cross from user j~.
std::pair<LevelVector, LevelVector> transmit_backward(const LevelVector& xb1,
                                                      const LevelVector& xb2,
                                                      const ChannelConfig& cfg);

// Mask-level kernels used by the simulator hot path; lengths implicit.
inline std::uint32_t shift_down_mask(std::uint32_t x, int s, int len) {
    if (s >= len) return 0;
    const std::uint32_t full = len >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << len) - 1;
    return (x << s) & full;
}
inline std::uint32_t forward_rx_mask(std::uint32_t x_direct, std::uint32_t x_cross, int n, int m) {
    const int q = n > m ? n : m;
    return shift_down_mask(x_direct, q - n, q) ^ shift_down_mask(x_cross, q - m, q);
}

}  // namespace twic
