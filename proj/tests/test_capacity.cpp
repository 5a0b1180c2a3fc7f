#include <algorithm>

#include "doctest.h"
#include "twic/capacity.hpp"

using namespace twic;

namespace {
ChannelConfig cfg(int n, int m, int nb, int mb, Rational lambda) {
    return {n, m, nb, mb, lambda};
}
}  // namespace

TEST_CASE("nonfeedback sum capacity") {
    CHECK(c_no(2, 1) == Rational(2));
    CHECK(c_no(1, 3) == Rational(2));
    for (int n = 1; n <= 6; ++n) CHECK(c_no(n, 0) == Rational(2 * n));
    CHECK(c_no(0, 3) == Rational(0));
    CHECK(c_no(0, 0) == Rational(0));
    CHECK(c_no(3, 2) == Rational(4));  // alpha = 2/3 sits in the moderate branch
    CHECK(c_no(2, 4) == Rational(4));  // alpha = 2 sits in the very-strong branch
}

TEST_CASE("perfect-feedback sum capacity") {
    CHECK(c_pf(2, 1) == Rational(3));
    CHECK(c_pf(1, 3) == Rational(3));
    for (int n = 0; n <= 6; ++n) CHECK(c_pf(n, n) == Rational(n));
}

TEST_CASE("inner bound") {
    CHECK(inner_sum(cfg(1, 3, 1, 1, Rational(1, 2))) == Rational(3));
    CHECK(inner_sum(cfg(2, 1, 1, 1, Rational(1, 2))) == Rational(3));
    for (int n = 0; n <= 4; ++n)
        for (int m = 0; m <= 4; ++m)
            CHECK(inner_sum(cfg(n, m, 2, 1, Rational(0))) == c_no(n, m));
}

TEST_CASE("outer bound") {
    CHECK(outer_sum(cfg(2, 1, 1, 1, Rational(1))) == Rational(3));
    CHECK(outer_sum(cfg(1, 3, 1, 1, Rational(1, 2))) == Rational(3));
    CHECK(outer_sum(cfg(3, 2, 1, 1, Rational(1))) == Rational(4));
}

TEST_CASE("raw outer bound termwise examples") {
    // (1,3,1,1,1/2): terms {2+1, 0+3, 6+1} -> 3
    CHECK(outer_raw(cfg(1, 3, 1, 1, Rational(1, 2))) == Rational(3));
    // (2,1,1,1,1/2): terms {4+1, 1+2, 2+1} -> 3
    CHECK(outer_raw(cfg(2, 1, 1, 1, Rational(1, 2))) == Rational(3));
    // lambda = 0 collapses to C_no
    CHECK(outer_raw(cfg(2, 1, 1, 1, Rational(0))) == Rational(2));
}

TEST_CASE("matching") {
    for (int num = 0; num <= 4; ++num)
        CHECK(is_matched(cfg(2, 1, 1, 1, Rational(num, 4))));
    // Genuinely open point: bounds differ strictly below the C_pf cap.
    CHECK(!is_matched(cfg(3, 1, 2, 1, Rational(1, 4))));
    CHECK(inner_sum(cfg(3, 1, 2, 1, Rational(1, 4))) == Rational(9, 2));
    CHECK(outer_sum(cfg(3, 1, 2, 1, Rational(1, 4))) == Rational(5));
    // At lambda = 1/2 both sides hit the C_pf cap and coincide, so the config
    // reports matched even though it lies in the open regime.
    CHECK(is_matched(cfg(3, 1, 2, 1, Rational(1, 2))));
    for (int n = 0; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m) CHECK(is_matched(cfg(n, m, 2, 1, Rational(0))));
}

TEST_CASE("regime labels") {
    auto r = classify_regime(cfg(1, 3, 1, 1, Rational(0)));
    CHECK(r.forward == ForwardRegime::VeryStrong);
    CHECK(r.netgain == NetGainClass::Gain);

    r = classify_regime(cfg(3, 2, 1, 1, Rational(0)));
    CHECK(r.forward == ForwardRegime::Moderate);
    CHECK(r.netgain == NetGainClass::NoGain);

    r = classify_regime(cfg(3, 1, 3, 1, Rational(0)));
    CHECK(r.forward == ForwardRegime::Weak);
    CHECK(r.backward == BackwardRegime::PrivateHeavy);
    CHECK(r.netgain == NetGainClass::Open);

    // Boundaries: alpha = 2 is very strong, alpha = 2/3 moderate.
    CHECK(classify_regime(cfg(2, 4, 1, 1, Rational(0))).forward == ForwardRegime::VeryStrong);
    CHECK(classify_regime(cfg(3, 2, 1, 1, Rational(0))).forward == ForwardRegime::Moderate);
    CHECK(classify_regime(cfg(0, 3, 1, 1, Rational(0))).forward == ForwardRegime::VeryStrong);
}

TEST_CASE("net gain curves on the running example") {
    std::vector<Rational> grid;
    for (int i = 0; i <= 4; ++i) grid.push_back(Rational(i, 4));
    const auto curve = net_gain(cfg(2, 1, 1, 1, Rational(0)), grid);
    REQUIRE(curve.lambda.size() == 5);
    CHECK(curve.fb_gain[0] == Rational(0));
    CHECK(curve.indep_gain[0] == Rational(0));
    CHECK(curve.fb_gain[2] == Rational(1));       // lambda = 1/2
    CHECK(curve.indep_gain[2] == Rational(1, 2));
    CHECK(curve.fb_gain[4] == Rational(1));       // min{2 lambda, 1} at lambda = 1
    CHECK(curve.indep_gain[4] == Rational(1));
    CHECK(curve.witnessed);
    CHECK(curve.classification == NetGainClass::Gain);

    // Curves are nondecreasing in lambda.
    for (size_t i = 1; i < curve.lambda.size(); ++i) {
        CHECK(curve.fb_gain[i] >= curve.fb_gain[i - 1]);
        CHECK(curve.indep_gain[i] >= curve.indep_gain[i - 1]);
    }
}

TEST_CASE("net gain classification closed form on a grid") {
    std::vector<Rational> grid;
    for (int i = 0; i <= 8; ++i) grid.push_back(Rational(i, 8));
    for (int n = 0; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m)
            for (int nb = 0; nb <= 5; ++nb)
                for (int mb = 0; mb <= 5; ++mb) {
                    const auto c = cfg(n, m, nb, mb, Rational(0));
                    const auto label = classify_regime(c);
                    const bool closed_gain =
                        (cmp_alpha(n, m, 2, 1) > 0 && cmp_alpha(nb, mb, 2, 1) < 0 && mb > 0) ||
                        (cmp_alpha(n, m, 2, 3) < 0 && cmp_alpha(nb, mb, 2, 3) > 0 && m > 0);
                    CHECK((label.netgain == NetGainClass::Gain) == closed_gain);
                    // A grid witness implies the closed form.
                    const auto curve = net_gain(c, grid);
                    if (curve.witnessed) CHECK(closed_gain);
                }
}

TEST_CASE("the weak-regime squeeze cap equals c_pf - c_no") {
    for (int n = 1; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m) {
            if (cmp_alpha(n, m, 2, 3) >= 0) continue;
            CHECK(Rational(std::min(m, 2 * n - 3 * m)) == c_pf(n, m) - c_no(n, m));
        }
}

TEST_CASE("weak interaction bounds") {
    // The running instance: lambda = 0, lambda_t = 1/4 gives (1.5, 1).
    auto b = weak_interaction_bound(2, 1, 1, 1, Rational(0), Rational(1, 4));
    CHECK(b.r_sum_bound == Rational(3, 2));
    CHECK(b.rt_sum_bound == Rational(1));

    b = weak_interaction_bound(2, 1, 1, 1, Rational(0), Rational(0));
    CHECK(b.r_sum_bound == Rational(2));
    CHECK(b.rt_sum_bound == Rational(0));

    b = weak_interaction_bound(2, 1, 1, 1, Rational(1, 2), Rational(1));
    CHECK(b.r_sum_bound == Rational(0));
}
