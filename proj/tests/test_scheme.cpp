
#include "doctest.h"
#include "json.hpp"
#include "twic/capacity.hpp"
#include "twic/sim.hpp"

using namespace twic;

namespace {

MessageSet msgs_from_bits(const SchemeSpec& spec, std::initializer_list<int> bits) {
    MessageSet m(spec.total_bits());
    int i = 0;
    for (int b : bits) {
        if (b) m.set(i);
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("type1 compile matches the strong-interference construction") {
    ChannelConfig cfg{1, 3, 1, 1, Rational(1, 2)};
    const auto spec = compile(SchemeKind::TypeI, cfg);
    validate_scheme(spec);
    CHECK(spec.M == 1);
    CHECK(spec.extra_bits_per_user == 1);
    CHECK(spec.fwd_bits[0] == 3);
    CHECK(scheme_rate(spec).forward_sum == Rational(3));

    // Bit names follow the figures: a1 fresh, a2 the squeezed-in extra, a3 the
    // second-stage fresh bit.
    CHECK(spec.bit_name(0) == "a1");
    CHECK(spec.bit_name(1) == "a2");
    CHECK(spec.bit_name(2) == "a3");
    CHECK(spec.bit_name(3) == "b1");

    // Message-space plan as JSON: stage 2 of user 1 carries (a3, b2, -).
    const auto j = nlohmann::json::parse(scheme_to_json(spec));
    const auto& slot2_u1 = j["level_plan"][1]["user1"];
    CHECK(slot2_u1[0] == nlohmann::json::array({"a3"}));
    CHECK(slot2_u1[1] == nlohmann::json::array({"b2"}));
    CHECK(slot2_u1[2] == nlohmann::json::array());
    // The single feedback round sends b2 from user 1~ and a2 from user 2~.
    CHECK(j["feedback_plan"][0]["user1"][0] == nlohmann::json::array({"b2"}));
    CHECK(j["feedback_plan"][0]["user2"][0] == nlohmann::json::array({"a2"}));
    CHECK(j["feedback_plan"][1]["user1"].is_null());

    // Operational encoding: with (a1,a2,a3) = (1,0,1) and (b1,b2,b3) = (0,1,1)
    // user 1's stage-2 word is [a3, b2, 0] = [1,1,0], b2 recovered from the
    // backward reception XOR a2.
    const auto msgs = msgs_from_bits(spec, {1, 0, 1, 0, 1, 1});
    const std::vector<std::optional<LevelVector>> fb = {LevelVector{1}};  // yb1 = b2 ^ a2 = 1
    CHECK(encode_forward(spec, 0, 2, msgs, fb) == LevelVector{1, 1, 0});
}

TEST_CASE("type2 compile matches the weak-interference construction") {
    ChannelConfig cfg{2, 1, 1, 1, Rational(1, 2)};
    const auto spec = compile(SchemeKind::TypeII, cfg);
    validate_scheme(spec);
    CHECK(spec.M == 1);
    CHECK(spec.extra_bits_per_user == 1);
    CHECK(scheme_rate(spec).forward_sum == Rational(3));

    const auto j = nlohmann::json::parse(scheme_to_json(spec));
    // Stage 1: each user sends the extra on the common level, a private fresh
    // bit below.
    CHECK(j["level_plan"][0]["user1"][0] == nlohmann::json::array({"a1"}));
    CHECK(j["level_plan"][0]["user1"][1] == nlohmann::json::array({"a2"}));
    // Feedback: user 1~ passes a1 across, user 2~ passes b1.
    CHECK(j["feedback_plan"][0]["user1"][0] == nlohmann::json::array({"a1"}));
    CHECK(j["feedback_plan"][0]["user2"][0] == nlohmann::json::array({"b1"}));
    // Stage 2: the other user's common bit rides the vacant common level.
    CHECK(j["level_plan"][1]["user1"][0] == nlohmann::json::array({"b1"}));
    CHECK(j["level_plan"][1]["user1"][1] == nlohmann::json::array({"a3"}));
}

TEST_CASE("type3 feeds XOR-combined corrupted privates on private levels") {
    // (3,1) forward, (3,1) backward: user 1~ forwards (a-private ^ b-extra)
    // raw on a backward private level; the relayer cancels its own private.
    ChannelConfig cfg{3, 1, 3, 1, Rational(1, 2)};
    const auto spec = compile(SchemeKind::TypeIII, cfg);
    validate_scheme(spec);
    const auto j = nlohmann::json::parse(scheme_to_json(spec));
    bool saw_xor_pair = false;
    for (const auto& slot : j["feedback_plan"]) {
        const auto& u1 = slot["user1"];
        if (u1.is_null()) continue;
        for (size_t lev = 0; lev < u1.size(); ++lev) {
            if (u1[lev].size() == 2) saw_xor_pair = true;
            if (!u1[lev].empty()) CHECK(lev >= static_cast<size_t>(cfg.mb));  // private levels only
        }
    }
    CHECK(saw_xor_pair);
    CHECK(scheme_rate(spec).forward_sum == inner_sum(cfg));
}

TEST_CASE("nonfeedback compile") {
    for (int n = 1; n <= 5; ++n) {
        ChannelConfig cfg{n, 0, 1, 1, Rational(0)};
        const auto spec = compile(SchemeKind::NonFeedback, cfg);
        validate_scheme(spec);
        CHECK(scheme_rate(spec).forward_sum == Rational(2 * n));
    }
    // Moderate channels hit the possibly odd C_no via role-swapped slots.
    for (int n = 1; n <= 6; ++n)
        for (int m = 1; m <= 6; ++m) {
            if (cmp_alpha(n, m, 2, 3) < 0 || cmp_alpha(n, m, 2, 1) >= 0) continue;
            ChannelConfig cfg{n, m, 1, 1, Rational(0)};
            const auto spec = compile(SchemeKind::NonFeedback, cfg);
            validate_scheme(spec);
            CHECK(scheme_rate(spec).forward_sum == c_no(n, m));
        }
}

TEST_CASE("block length selection") {
    // lambda = 1/4 needs two slots per stage for an integral backward budget.
    ChannelConfig cfg{1, 3, 1, 1, Rational(1, 4)};
    const auto spec = compile(SchemeKind::TypeI, cfg);
    CHECK(spec.M == 2);
    CHECK(spec.extra_bits_per_user == 1);  // B = M * min(2*lambda*nb, gap) = 2 * 1/2
    CHECK(scheme_rate(spec).forward_sum == inner_sum(cfg));

    ChannelConfig cfg34{1, 3, 1, 1, Rational(3, 4)};
    const auto spec34 = compile(SchemeKind::TypeI, cfg34);
    CHECK(spec34.M == 2);
    CHECK(scheme_rate(spec34).forward_sum == inner_sum(cfg34));
}

TEST_CASE("B follows the budget expression") {
    for (int nb = 1; nb <= 4; ++nb)
        for (int mb = 1; mb <= 4; ++mb)
            for (int den = 1; den <= 4; ++den) {
                ChannelConfig cfg{1, 5, nb, mb, Rational(1, den)};
                if (cfg.lambda == Rational(1) && 2 * nb <= cfg.m - 2 * cfg.n) continue;
                const auto spec = compile(SchemeKind::TypeI, cfg);
                const Rational expect =
                    Rational(spec.M) *
                    rat_min(Rational(2) * cfg.lambda * Rational(nb), Rational(cfg.m - 2 * cfg.n));
                CHECK(Rational(spec.extra_bits_per_user) == expect);
            }
}

TEST_CASE("regime guards") {
    CHECK_THROWS_AS((void)compile(SchemeKind::TypeI, ChannelConfig{2, 1, 1, 1, Rational(1, 2)}),
                    SchemeError);
    CHECK_THROWS_AS((void)compile(SchemeKind::TypeII, ChannelConfig{1, 3, 1, 1, Rational(1, 2)}),
                    SchemeError);
    CHECK_THROWS_AS((void)compile(SchemeKind::TypeIII, ChannelConfig{3, 1, 1, 2, Rational(1, 2)}),
                    SchemeError);
}

TEST_CASE("the lambda = 1 feedback boundary is rejected, not fudged") {
    // 2*eff <= gap at lambda = 1: the last backward round cannot be relayed,
    // so the target rate is unreachable at any finite block length.
    ChannelConfig cfg{1, 4, 1, 1, Rational(1)};
    try {
        (void)compile(SchemeKind::TypeI, cfg);
        FAIL("expected rejection");
    } catch (const SchemeError& e) {
        CHECK(e.code == SchemeError::Code::UnsupportedLambda);
    }
    // With a wider pipe the same channel compiles and meets the bound.
    ChannelConfig ok{1, 4, 3, 1, Rational(1)};
    const auto spec = compile(SchemeKind::TypeI, ok);
    CHECK(scheme_rate(spec).forward_sum == inner_sum(ok));
}

TEST_CASE("four-message scheme") {
    ChannelConfig cfg{2, 1, 0, 1, Rational(1)};
    const auto spec = compile_four_message(cfg);
    validate_scheme(spec);
    const auto rate = scheme_rate(spec);
    CHECK(rate.forward_sum == Rational(2));
    CHECK(rate.backward_sum == Rational(1));
    CHECK(spec.bit_name(4) == "a~");
    CHECK(spec.bit_name(5) == "b~");

    CHECK_THROWS_AS((void)compile_four_message(ChannelConfig{2, 1, 1, 1, Rational(1)}),
                    SchemeError);
    CHECK_THROWS_AS((void)compile_four_message(ChannelConfig{3, 1, 0, 1, Rational(1)}),
                    SchemeError);
}

TEST_CASE("type II vs III selection covers the combined feedback term") {
    const Rational lams[] = {Rational(1, 4), Rational(1, 2), Rational(3, 4)};
    for (int n = 2; n <= 6; ++n)
        for (int m = 1; m <= 6; ++m) {
            if (cmp_alpha(n, m, 2, 3) >= 0) continue;
            for (int nb = 1; nb <= 4; ++nb)
                for (int mb = 1; mb <= 4; ++mb)
                    for (const auto& lam : lams) {
                        ChannelConfig cfg{n, m, nb, mb, lam};
                        Rational best = scheme_rate(compile(SchemeKind::TypeII, cfg)).forward_sum;
                        if (mb <= nb) {
                            const Rational r3 =
                                scheme_rate(compile(SchemeKind::TypeIII, cfg)).forward_sum;
                            best = rat_max(best, r3);
                        }
                        CHECK(best == inner_sum(cfg));
                    }
        }
}

TEST_CASE("causality is machine-checked") {
    // Corrupting a relay to read a future feedback round must be caught.
    ChannelConfig cfg{1, 3, 1, 1, Rational(1, 2)};
    auto spec = compile(SchemeKind::TypeI, cfg);
    for (auto& entry : spec.fwd_plan[1][0])
        for (auto& term : entry)
            if (term.kind == Term::Kind::RxBwd) term.slot = 2;
    CHECK_THROWS_AS(validate_scheme(spec), SchemeError);
}

TEST_CASE("every message bit appears and decodes in compiled plans") {
    // validate_scheme enforces it; spot-check that tampering trips it.
    ChannelConfig cfg{2, 1, 1, 1, Rational(1, 2)};
    auto spec = compile(SchemeKind::TypeII, cfg);
    spec.fwd_decode[0].pop_back();
    CHECK_THROWS_AS(validate_scheme(spec), SchemeError);
}

TEST_CASE("scheduler handles awkward lambda denominators") {
    const Rational lams[] = {Rational(1, 3), Rational(2, 3), Rational(1, 5), Rational(3, 8),
                             Rational(5, 8), Rational(7, 8), Rational(5, 6)};
    const ChannelConfig bases[] = {
        {1, 4, 2, 1, Rational(0)},  // very strong, gap 2
        {1, 6, 3, 2, Rational(0)},  // very strong, gap 4
        {4, 2, 2, 2, Rational(0)},  // weak, cross-heavy
        {5, 3, 1, 3, Rational(0)},  // weak, heavy cross backward
        {6, 3, 5, 2, Rational(0)},  // weak, private-heavy backward
    };
    for (const auto& base : bases)
        for (const auto& lam : lams) {
            ChannelConfig cfg = base;
            cfg.lambda = lam;
            SchemeKind kind = cmp_alpha(cfg.n, cfg.m, 2, 1) >= 0 ? SchemeKind::TypeI
                              : cmp_alpha(cfg.nb, cfg.mb, 1, 2) >= 0 ? SchemeKind::TypeII
                                                                     : SchemeKind::TypeIII;
            const auto spec = compile(kind, cfg);
            validate_scheme(spec);
            REQUIRE(scheme_rate(spec).forward_sum == inner_sum(cfg));
            // 2*lambda*M must be integral for exact budget accounting.
            REQUIRE((Rational(2 * spec.M) * lam).is_integer());
            const auto rep = verify_exhaustive(spec, 1 << 12);
            REQUIRE(rep.failures == 0);
            REQUIRE(rep.budget.ok);
        }
}

TEST_CASE("degenerate link counts") {
    // No direct links at all: the relay path still delivers the extras.
    ChannelConfig no_direct{0, 3, 2, 1, Rational(1, 2)};
    const auto spec = compile(SchemeKind::TypeI, no_direct);
    validate_scheme(spec);
    CHECK(scheme_rate(spec).forward_sum == inner_sum(no_direct));
    CHECK(verify_exhaustive(spec, 1 << 20).pass());

    // Cross-only backward channel still supports the cross-exchange scheme.
    ChannelConfig cross_only{4, 1, 0, 2, Rational(1, 2)};
    const auto spec2 = compile(SchemeKind::TypeII, cross_only);
    validate_scheme(spec2);
    CHECK(scheme_rate(spec2).forward_sum == inner_sum(cross_only));
    CHECK(verify_exhaustive(spec2, 1 << 20).pass());

    // Dead backward channel degrades every type to the nonfeedback rate.
    ChannelConfig dead{1, 4, 0, 0, Rational(1, 2)};
    CHECK(scheme_rate(compile(SchemeKind::TypeI, dead)).forward_sum == c_no(1, 4));
}

TEST_CASE("moderate layouts exist across the full formula grid") {
    for (int n = 1; n <= 8; ++n)
        for (int m = 1; m <= 8; ++m) {
            if (cmp_alpha(n, m, 2, 3) < 0 || cmp_alpha(n, m, 2, 1) >= 0) continue;
            ChannelConfig cfg{n, m, 1, 1, Rational(0)};
            const auto spec = compile(SchemeKind::NonFeedback, cfg);
            validate_scheme(spec);
            CHECK(scheme_rate(spec).forward_sum == c_no(n, m));
        }
}
