#include "twic/channel.hpp"

#include <stdexcept>

namespace twic {

LevelVector::LevelVector(std::initializer_list<int> bits) : len_(static_cast<int>(bits.size())) {
    int i = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("level vector bits must be 0 or 1");
        bits_ |= std::uint32_t{static_cast<unsigned>(b)} << i;
        ++i;
    }
}

LevelVector LevelVector::operator^(const LevelVector& other) const {
    if (len_ != other.len_) throw std::invalid_argument("level vector length mismatch");
    return from_mask(bits_ ^ other.bits_, len_);
}

std::string LevelVector::to_string() const {
    std::string s(static_cast<size_t>(len_), '0');
    for (int i = 0; i < len_; ++i)
        if (bit(i)) s[static_cast<size_t>(i)] = '1';
    return s;
}

void ChannelConfig::validate() const {
    if (n < 0 || m < 0 || nb < 0 || mb < 0)
        throw std::invalid_argument("level counts must be nonnegative");
    if (q() > 30 || qb() > 30) throw std::invalid_argument("level counts too large");
    if (lambda < Rational(0) || lambda > Rational(1))
        throw std::invalid_argument("lambda must lie in [0, 1]");
}

std::string ChannelConfig::to_string() const {
    return "(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ",nb=" + std::to_string(nb) +
           ",mb=" + std::to_string(mb) + ",lambda=" + lambda.to_string() + ")";
}

LevelVector shift_down(const LevelVector& v, int s) {
    if (s < 0) throw std::invalid_argument("shift must be nonnegative");
    return LevelVector::from_mask(shift_down_mask(v.mask(), s, v.length()), v.length());
}

LevelVector visible_part(const LevelVector& x, int m) {
    if (m < 0 || m > x.length()) throw std::invalid_argument("visible part exceeds vector length");
    const std::uint32_t keep = m >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << m) - 1;
    return LevelVector::from_mask(x.mask() & keep, m);
}

std::pair<LevelVector, LevelVector> transmit_forward(const LevelVector& x1, const LevelVector& x2,
                                                     const ChannelConfig& cfg) {
    const int q = cfg.q();
    if (x1.length() != q || x2.length() != q)
        throw std::invalid_argument("forward inputs must have length max(n, m)");
    auto y1 = LevelVector::from_mask(forward_rx_mask(x1.mask(), x2.mask(), cfg.n, cfg.m), q);
    auto y2 = LevelVector::from_mask(forward_rx_mask(x2.mask(), x1.mask(), cfg.n, cfg.m), q);
    return {y1, y2};
}

std::pair<LevelVector, LevelVector> transmit_backward(const LevelVector& xb1,
                                                      const LevelVector& xb2,
                                                      const ChannelConfig& cfg) {
    const int qb = cfg.qb();
    if (xb1.length() != qb || xb2.length() != qb)
        throw std::invalid_argument("backward inputs must have length max(nb, mb)");
    auto yb1 = LevelVector::from_mask(forward_rx_mask(xb1.mask(), xb2.mask(), cfg.nb, cfg.mb), qb);
    auto yb2 = LevelVector::from_mask(forward_rx_mask(xb2.mask(), xb1.mask(), cfg.nb, cfg.mb), qb);
    return {yb1, yb2};
}

}  // namespace twic
