#include "doctest.h"
#include "twic/channel.hpp"

using namespace twic;

namespace {
ChannelConfig fwd_cfg(int n, int m) { return {n, m, 0, 0, Rational(0)}; }
}  // namespace

TEST_CASE("shift_down") {
    CHECK(shift_down(LevelVector{1, 0, 1}, 0) == LevelVector{1, 0, 1});
    CHECK(shift_down(LevelVector{1, 0, 1}, 1) == LevelVector{0, 1, 0});
    CHECK(shift_down(LevelVector{1, 1}, 5) == LevelVector{0, 0});
    CHECK_THROWS(shift_down(LevelVector{1}, -1));
}

TEST_CASE("shift composition") {
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        const auto v = LevelVector::from_mask(bits, 4);
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; b <= 4; ++b)
                CHECK(shift_down(shift_down(v, a), b) == shift_down(v, a + b));
    }
}

TEST_CASE("visible part") {
    CHECK(visible_part(LevelVector{1, 0, 1}, 1) == LevelVector{1});
    CHECK(visible_part(LevelVector{1, 0, 1}, 3) == LevelVector{1, 0, 1});
    CHECK(visible_part(LevelVector{1, 0}, 0) == LevelVector(0));
    CHECK_THROWS(visible_part(LevelVector{1, 0, 1}, 4));
}

TEST_CASE("forward law on the (2,1) channel") {
    const auto cfg = fwd_cfg(2, 1);
    auto [y1, y2] = transmit_forward(LevelVector{1, 0}, LevelVector{0, 1}, cfg);
    CHECK(y1 == LevelVector{1, 0});  // x2's top bit is 0, its bottom bit dies in the cross link
    CHECK(y2 == LevelVector{0, 0});  // x1's top bit crosses onto x2's private bit
}

TEST_CASE("forward law reproduces the strong-interference reception") {
    // (n,m) = (1,3): the cross signal dominates, the direct bit lands at the
    // bottom.
    const auto cfg = fwd_cfg(1, 3);
    for (std::uint32_t a = 0; a < 4; ++a)
        for (std::uint32_t b = 0; b < 4; ++b) {
            const auto x1 = LevelVector::from_mask(a, 3);  // levels 0,1 used
            const auto x2 = LevelVector::from_mask(b, 3);
            auto [y1, y2] = transmit_forward(x1, x2, cfg);
            CHECK(y1.bit(0) == x2.bit(0));
            CHECK(y1.bit(1) == x2.bit(1));
            CHECK(y1.bit(2) == (x1.bit(0) ^ x2.bit(2)));
        }
}

TEST_CASE("zero in, zero out") {
    const auto cfg = fwd_cfg(3, 2);
    auto [y1, y2] = transmit_forward(LevelVector(3), LevelVector(3), cfg);
    CHECK(y1.is_zero());
    CHECK(y2.is_zero());
}

TEST_CASE("forward law is linear, exhaustively for q <= 4") {
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= 4; ++m) {
            const auto cfg = fwd_cfg(n, m);
            const int q = cfg.q();
            if (q == 0 || q > 4) continue;
            const std::uint32_t space = std::uint32_t{1} << q;
            for (std::uint32_t a = 0; a < space; ++a)
                for (std::uint32_t b = 0; b < space; ++b)
                    for (std::uint32_t c = 0; c < space; ++c)
                        for (std::uint32_t d = 0; d < space; ++d) {
                            auto [y1, y2] = transmit_forward(LevelVector::from_mask(a, q),
                                                             LevelVector::from_mask(b, q), cfg);
                            auto [z1, z2] = transmit_forward(LevelVector::from_mask(c, q),
                                                             LevelVector::from_mask(d, q), cfg);
                            auto [s1, s2] = transmit_forward(LevelVector::from_mask(a ^ c, q),
                                                             LevelVector::from_mask(b ^ d, q), cfg);
                            REQUIRE(s1 == (y1 ^ z1));
                            REQUIRE(s2 == (y2 ^ z2));
                        }
        }
}

TEST_CASE("no cross leakage when m = 0 and user swap symmetry") {
    const auto cfg = fwd_cfg(3, 0);
    for (std::uint32_t a = 0; a < 8; ++a) {
        auto [y1, y2] = transmit_forward(LevelVector::from_mask(a, 3), LevelVector(3), cfg);
        CHECK(y1 == LevelVector::from_mask(a, 3));
        CHECK(y2.is_zero());
    }
    const auto sym = fwd_cfg(2, 2);
    for (std::uint32_t a = 0; a < 4; ++a)
        for (std::uint32_t b = 0; b < 4; ++b) {
            auto [y1, y2] = transmit_forward(LevelVector::from_mask(a, 2),
                                             LevelVector::from_mask(b, 2), sym);
            auto [z1, z2] = transmit_forward(LevelVector::from_mask(b, 2),
                                             LevelVector::from_mask(a, 2), sym);
            CHECK(y1 == z2);
            CHECK(y2 == z1);
        }
}

TEST_CASE("backward law") {
    ChannelConfig cfg{0, 0, 1, 1, Rational(0)};
    auto [yb1, yb2] = transmit_backward(LevelVector{1}, LevelVector{1}, cfg);
    CHECK(yb1 == LevelVector{0});  // both users receive the same XOR
    CHECK(yb2 == LevelVector{0});
    auto [w1, w2] = transmit_backward(LevelVector{1}, LevelVector{0}, cfg);
    CHECK(w1 == LevelVector{1});
    CHECK(w2 == LevelVector{1});

    // Private bottom level is invisible across.
    ChannelConfig cfg21{0, 0, 2, 1, Rational(0)};
    auto [p1, p2] = transmit_backward(LevelVector{0, 1}, LevelVector{0, 0}, cfg21);
    CHECK(p1 == LevelVector{0, 1});
    CHECK(p2 == LevelVector{0, 0});
}
