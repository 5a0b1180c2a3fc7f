#include "twic/sim.hpp"

#include <bit>
#include <random>
#include <sstream>

#include "json.hpp"

namespace twic {

namespace {

/// Flattened plans for the verification hot loop: every level as term lists
/// against raw reception masks, no allocation per run.
struct FastPlan {
    struct Src {
        std::uint8_t kind;  // 0 own bit (global), 1 fwd rx, 2 bwd rx
        std::uint8_t user;
        std::uint16_t slot;
        std::uint16_t level;
        std::uint32_t global;
    };
    struct Level {
        std::uint32_t first = 0, count = 0;
    };
    int block, q, qb;
    std::vector<Src> srcs;
    // [slot][user] -> level table offsets; bwd has an active flag.
    std::vector<std::array<std::vector<Level>, 2>> fwd, bwd;
    std::vector<std::array<bool, 2>> bwd_active;

    explicit FastPlan(const SchemeSpec& spec) {
        block = spec.block_length();
        q = spec.cfg.q();
        qb = spec.cfg.qb();
        fwd.resize(static_cast<size_t>(block));
        bwd.resize(static_cast<size_t>(block));
        bwd_active.resize(static_cast<size_t>(block));
        for (int s = 0; s < block; ++s) {
            for (int u = 0; u < 2; ++u) {
                auto& lv = fwd[static_cast<size_t>(s)][static_cast<size_t>(u)];
                lv.resize(static_cast<size_t>(q));
                for (int lev = 0; lev < q; ++lev) {
                    const auto& entry = spec.fwd_plan[static_cast<size_t>(s)][static_cast<size_t>(u)]
                                                     [static_cast<size_t>(lev)];
                    lv[static_cast<size_t>(lev)].first = static_cast<std::uint32_t>(srcs.size());
                    lv[static_cast<size_t>(lev)].count = static_cast<std::uint32_t>(entry.size());
                    for (const Term& t : entry) {
                        Src src{};
                        if (t.kind == Term::Kind::OwnFwd) {
                            src.kind = 0;
                            src.global = static_cast<std::uint32_t>(spec.fwd_bit_global(u, t.index));
                        } else {  // RxBwd
                            src.kind = 2;
                            src.slot = static_cast<std::uint16_t>(t.slot);
                            src.level = static_cast<std::uint16_t>(t.level);
                        }
                        srcs.push_back(src);
                    }
                }
                const auto& bentry = spec.bwd_plan[static_cast<size_t>(s)][static_cast<size_t>(u)];
                bwd_active[static_cast<size_t>(s)][static_cast<size_t>(u)] = bentry.has_value();
                auto& blv = bwd[static_cast<size_t>(s)][static_cast<size_t>(u)];
                if (!bentry.has_value()) continue;
                blv.resize(static_cast<size_t>(qb));
                for (int lev = 0; lev < qb; ++lev) {
                    const auto& entry = (*bentry)[static_cast<size_t>(lev)];
                    blv[static_cast<size_t>(lev)].first = static_cast<std::uint32_t>(srcs.size());
                    blv[static_cast<size_t>(lev)].count = static_cast<std::uint32_t>(entry.size());
                    for (const Term& t : entry) {
                        Src src{};
                        if (t.kind == Term::Kind::OwnBwd) {
                            src.kind = 0;
                            src.global = static_cast<std::uint32_t>(spec.bwd_bit_global(u, t.index));
                        } else {  // RxFwd
                            src.kind = 1;
                            src.slot = static_cast<std::uint16_t>(t.slot);
                            src.level = static_cast<std::uint16_t>(t.level);
                        }
                        srcs.push_back(src);
                    }
                }
            }
        }
    }
};

struct FastRun {
    // reception masks indexed [slot]; y[user], yb[user]
    std::vector<std::array<std::uint32_t, 2>> y, yb, x, xb;
};

void fast_run(const SchemeSpec& spec, const FastPlan& plan, const MessageSet& msgs, FastRun& run) {
    const int n = spec.cfg.n, m = spec.cfg.m, nb = spec.cfg.nb, mb = spec.cfg.mb;
    run.y.assign(static_cast<size_t>(plan.block), {0, 0});
    run.yb.assign(static_cast<size_t>(plan.block), {0, 0});
    run.x.assign(static_cast<size_t>(plan.block), {0, 0});
    run.xb.assign(static_cast<size_t>(plan.block), {0, 0});
    for (int s = 0; s < plan.block; ++s) {
        for (int u = 0; u < 2; ++u) {
            std::uint32_t xm = 0;
            const auto& lv = plan.fwd[static_cast<size_t>(s)][static_cast<size_t>(u)];
            for (int lev = 0; lev < plan.q; ++lev) {
                std::uint32_t v = 0;
                const auto& L = lv[static_cast<size_t>(lev)];
                for (std::uint32_t i = L.first; i < L.first + L.count; ++i) {
                    const auto& src = plan.srcs[i];
                    if (src.kind == 0)
                        v ^= msgs.test(static_cast<int>(src.global)) ? 1u : 0u;
                    else
                        v ^= run.yb[static_cast<size_t>(src.slot - 1)][static_cast<size_t>(u)] >>
                                 src.level & 1u;
                }
                xm |= v << lev;
            }
            run.x[static_cast<size_t>(s)][static_cast<size_t>(u)] = xm;
        }
        run.y[static_cast<size_t>(s)][0] =
            forward_rx_mask(run.x[static_cast<size_t>(s)][0], run.x[static_cast<size_t>(s)][1], n, m);
        run.y[static_cast<size_t>(s)][1] =
            forward_rx_mask(run.x[static_cast<size_t>(s)][1], run.x[static_cast<size_t>(s)][0], n, m);

        for (int u = 0; u < 2; ++u) {
            if (!plan.bwd_active[static_cast<size_t>(s)][static_cast<size_t>(u)]) continue;
            std::uint32_t xm = 0;
            const auto& lv = plan.bwd[static_cast<size_t>(s)][static_cast<size_t>(u)];
            for (int lev = 0; lev < plan.qb; ++lev) {
                std::uint32_t v = 0;
                const auto& L = lv[static_cast<size_t>(lev)];
                for (std::uint32_t i = L.first; i < L.first + L.count; ++i) {
                    const auto& src = plan.srcs[i];
                    if (src.kind == 0)
                        v ^= msgs.test(static_cast<int>(src.global)) ? 1u : 0u;
                    else
                        v ^= run.y[static_cast<size_t>(src.slot - 1)][static_cast<size_t>(u)] >>
                                 src.level & 1u;
                }
                xm |= v << lev;
            }
            run.xb[static_cast<size_t>(s)][static_cast<size_t>(u)] = xm;
        }
        if (plan.bwd_active[static_cast<size_t>(s)][0] || plan.bwd_active[static_cast<size_t>(s)][1]) {
            run.yb[static_cast<size_t>(s)][0] = forward_rx_mask(
                run.xb[static_cast<size_t>(s)][0], run.xb[static_cast<size_t>(s)][1], nb, mb);
            run.yb[static_cast<size_t>(s)][1] = forward_rx_mask(
                run.xb[static_cast<size_t>(s)][1], run.xb[static_cast<size_t>(s)][0], nb, mb);
        }
    }
}

/// Decode directly from a fast run; mirrors decode_forward/decode_backward.
bool fast_decode_matches(const SchemeSpec& spec, const FastRun& run, const MessageSet& msgs) {
    auto read = [&](const DecodeSrc& s) -> std::uint32_t {
        const size_t idx = static_cast<size_t>(s.slot - 1);
        switch (s.stream) {
            case Stream::Y1: return run.y[idx][0] >> s.level & 1u;
            case Stream::Y2: return run.y[idx][1] >> s.level & 1u;
            case Stream::X1: return run.x[idx][0] >> s.level & 1u;
            case Stream::X2: return run.x[idx][1] >> s.level & 1u;
            case Stream::Yb1: return run.yb[idx][0] >> s.level & 1u;
            case Stream::Yb2: return run.yb[idx][1] >> s.level & 1u;
            case Stream::Xb1: return run.xb[idx][0] >> s.level & 1u;
            case Stream::Xb2: return run.xb[idx][1] >> s.level & 1u;
        }
        return 0;
    };
    for (int u = 0; u < 2; ++u) {
        for (const auto& step : spec.fwd_decode[static_cast<size_t>(u)]) {
            std::uint32_t v = 0;
            for (const auto& s : step.sources) v ^= read(s);
            if (v != (msgs.test(step.target_global_bit) ? 1u : 0u)) return false;
        }
        for (const auto& step : spec.bwd_decode[static_cast<size_t>(u)]) {
            std::uint32_t v = 0;
            for (const auto& s : step.sources) v ^= read(s);
            if (v != (msgs.test(step.target_global_bit) ? 1u : 0u)) return false;
        }
    }
    return true;
}

std::uint32_t plan_active_mask(const SchemeSpec& spec, int slot, int user) {
    const auto& bp = spec.bwd_plan[static_cast<size_t>(slot - 1)][static_cast<size_t>(user)];
    if (!bp.has_value()) return 0;
    std::uint32_t mask = 0;
    for (int lev = 0; lev < spec.cfg.qb(); ++lev)
        if (!(*bp)[static_cast<size_t>(lev)].empty()) mask |= std::uint32_t{1} << lev;
    return mask;
}

}  // namespace

std::pair<Transcript, MessageSet> run_block(const SchemeSpec& spec, const MessageSet& msgs) {
    const int block = spec.block_length();
    Transcript t;
    t.cfg = spec.cfg;
    t.slots.resize(static_cast<size_t>(block));

    std::vector<std::optional<LevelVector>> fb1, fb2;
    std::vector<LevelVector> rx1, rx2;
    for (int s = 1; s <= block; ++s) {
        SlotRecord& rec = t.slots[static_cast<size_t>(s - 1)];
        rec.x1 = encode_forward(spec, 0, s, msgs, fb1);
        rec.x2 = encode_forward(spec, 1, s, msgs, fb2);
        auto [y1, y2] = transmit_forward(rec.x1, rec.x2, spec.cfg);
        rec.y1 = y1;
        rec.y2 = y2;
        rx1.push_back(y1);
        rx2.push_back(y2);

        rec.xb1 = encode_backward(spec, 0, s, rx1, msgs);
        rec.xb2 = encode_backward(spec, 1, s, rx2, msgs);
        rec.bwd_active_mask = {plan_active_mask(spec, s, 0), plan_active_mask(spec, s, 1)};
        if (rec.xb1.has_value() || rec.xb2.has_value()) {
            const LevelVector zero(spec.cfg.qb());
            auto [yb1, yb2] = transmit_backward(rec.xb1.value_or(zero), rec.xb2.value_or(zero),
                                                spec.cfg);
            rec.yb1 = yb1;
            rec.yb2 = yb2;
        }
        fb1.push_back(rec.yb1);
        fb2.push_back(rec.yb2);
    }

    MessageSet decoded(spec.total_bits());
    for (int u = 0; u < 2; ++u) {
        const auto fwd = decode_forward(spec, u, t);
        for (size_t i = 0; i < fwd.size(); ++i)
            if (fwd[i]) decoded.set(spec.fwd_bit_global(u, static_cast<int>(i)));
        const auto bwd = decode_backward(spec, u, t);
        for (size_t i = 0; i < bwd.size(); ++i)
            if (bwd[i]) decoded.set(spec.bwd_bit_global(u, static_cast<int>(i)));
    }
    return {std::move(t), std::move(decoded)};
}

bool transcript_consistent(const Transcript& t) {
    for (const auto& rec : t.slots) {
        const auto [y1, y2] = transmit_forward(rec.x1, rec.x2, t.cfg);
        if (rec.y1 != y1 || rec.y2 != y2) return false;
        if (!rec.xb1.has_value() && !rec.xb2.has_value()) {
            if (rec.yb1.has_value() || rec.yb2.has_value()) return false;
            continue;
        }
        if (!rec.yb1.has_value() || !rec.yb2.has_value()) return false;
        const LevelVector zero(t.cfg.qb());
        const auto [yb1, yb2] =
            transmit_backward(rec.xb1.value_or(zero), rec.xb2.value_or(zero), t.cfg);
        if (*rec.yb1 != yb1 || *rec.yb2 != yb2) return false;
    }
    return true;
}

BudgetCheck budget_check(const Transcript& t, const ChannelConfig& cfg) {
    BudgetCheck b;
    for (const auto& rec : t.slots) {
        b.used[0] += std::popcount(rec.bwd_active_mask[0]);
        b.used[1] += std::popcount(rec.bwd_active_mask[1]);
    }
    b.allowed = Rational(t.block_length()) * cfg.lambda * Rational(cfg.qb());
    b.ok = Rational(b.used[0]) <= b.allowed && Rational(b.used[1]) <= b.allowed;
    return b;
}

VerificationReport verify_exhaustive(const SchemeSpec& spec, long long limit,
                                     std::uint64_t seed) {
    if (limit < 1) throw std::invalid_argument("verification limit must be positive");
    VerificationReport report;
    report.scheme_id = spec.label + spec.cfg.to_string() + ",M=" + std::to_string(spec.M);
    report.rate = scheme_rate(spec);

    const int bits = spec.total_bits();
    const bool exhaustive = bits < 63 && (1LL << bits) <= limit;
    report.exhaustive = exhaustive;
    const long long runs = exhaustive ? (1LL << bits) : kVerifySamples;

    const FastPlan plan(spec);
    FastRun run;
    std::mt19937_64 rng(seed);
    MessageSet msgs(bits);
    for (long long it = 0; it < runs; ++it) {
        if (exhaustive) {
            for (int b = 0; b < bits; ++b)
                if (((it >> b) & 1) != (msgs.test(b) ? 1 : 0)) msgs.flip(b);
        } else {
            for (int b = 0; b < bits; ++b)
                if ((rng() & 1) != (msgs.test(b) ? 1u : 0u)) msgs.flip(b);
        }
        fast_run(spec, plan, msgs, run);
        if (!fast_decode_matches(spec, run, msgs)) {
            if (report.failures == 0) {
                report.first_counterexample = msgs;
                report.first_counterexample_dump = transcript_to_jsonl(run_block(spec, msgs).first);
            }
            ++report.failures;
        }
        ++report.messages_tested;
    }

    // Budget from one representative transcript (plan-active levels do not
    // depend on message values).
    MessageSet zero(bits);
    report.budget = budget_check(run_block(spec, zero).first, spec.cfg);
    return report;
}

std::string transcript_to_jsonl(const Transcript& t) {
    std::ostringstream out;
    for (int s = 1; s <= t.block_length(); ++s) {
        const SlotRecord& rec = t.slots[static_cast<size_t>(s - 1)];
        nlohmann::json j;
        j["slot"] = s;
        j["x1"] = rec.x1.to_string();
        j["x2"] = rec.x2.to_string();
        j["y1"] = rec.y1.to_string();
        j["y2"] = rec.y2.to_string();
        auto opt = [](const std::optional<LevelVector>& v) {
            return v.has_value() ? nlohmann::json(v->to_string()) : nlohmann::json(nullptr);
        };
        j["xb1"] = opt(rec.xb1);
        j["xb2"] = opt(rec.xb2);
        j["yb1"] = opt(rec.yb1);
        j["yb2"] = opt(rec.yb2);
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace twic
