#include <random>

#include "doctest.h"
#include "twic/gf2.hpp"

using namespace twic;

TEST_CASE("span membership and rank") {
    Gf2Span span(8);
    Gf2Vec a(8), b(8), c(8);
    a.set(0);
    a.set(3);
    b.set(3);
    b.set(5);
    c.set(0);
    c.set(5);
    CHECK(span.insert(a));
    CHECK(span.insert(b));
    CHECK(!span.insert(c));  // c = a ^ b
    CHECK(span.rank() == 2);
    CHECK(span.contains(c));
    Gf2Vec d(8);
    d.set(7);
    CHECK(!span.contains(d));
}

TEST_CASE("matrix rank against a random-consistency property") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 6, cols = 10;
        Gf2Mat m(0, cols);
        std::vector<Gf2Vec> base;
        for (int r = 0; r < rows; ++r) {
            Gf2Vec v(cols);
            for (int ccol = 0; ccol < cols; ++ccol)
                if (rng() & 1) v.set(ccol);
            base.push_back(v);
            m.add_row(v);
        }
        // Appending a combination of existing rows never raises the rank.
        Gf2Mat extended = m;
        Gf2Vec combo(cols);
        for (const auto& v : base)
            if (rng() & 1) combo.xor_with(v);
        extended.add_row(combo);
        CHECK(extended.rank() == m.rank());
    }
}

TEST_CASE("dot product is a parity") {
    Gf2Vec a(70), b(70);
    a.set(0);
    a.set(64);
    b.set(0);
    b.set(64);
    CHECK(!a.dot(b));  // two overlaps -> even
    b.flip(64);
    CHECK(a.dot(b));
}
