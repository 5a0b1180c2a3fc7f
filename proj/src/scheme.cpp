#include "twic/scheme.hpp"

#include "json.hpp"

namespace twic {

const char* to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::NonFeedback: return "nofb";
        case SchemeKind::TypeI: return "type1";
        case SchemeKind::TypeII: return "type2";
        case SchemeKind::TypeIII: return "type3";
        case SchemeKind::FourMessage: return "fourmsg";
        case SchemeKind::Witness: return "witness";
    }
    return "?";
}

std::string SchemeSpec::bit_name(int g) const {
    if (g < fwd_bits[0]) return "a" + std::to_string(g + 1);
    g -= fwd_bits[0];
    if (g < fwd_bits[1]) return "b" + std::to_string(g + 1);
    g -= fwd_bits[1];
    if (g < bwd_bits[0]) return bwd_bits[0] == 1 ? "a~" : "a~" + std::to_string(g + 1);
    g -= bwd_bits[0];
    return bwd_bits[1] == 1 ? "b~" : "b~" + std::to_string(g + 1);
}

namespace {

bool eval_entry(const SchemeSpec& spec, int user, const PlanEntry& entry, const MessageSet& msgs,
                std::span<const std::optional<LevelVector>> fb_history,
                std::span<const LevelVector> rx_history, int slot, bool backward_side) {
    bool v = false;
    for (const Term& t : entry) {
        switch (t.kind) {
            case Term::Kind::OwnFwd:
                if (backward_side)
                    throw SchemeError(SchemeError::Code::PlanError,
                                      "backward encoder referencing forward message bits");
                v ^= msgs.test(spec.fwd_bit_global(user, t.index));
                break;
            case Term::Kind::OwnBwd:
                if (!backward_side)
                    throw SchemeError(SchemeError::Code::PlanError,
                                      "forward encoder referencing backward message bits");
                v ^= msgs.test(spec.bwd_bit_global(user, t.index));
                break;
            case Term::Kind::RxBwd: {
                if (backward_side || t.slot >= slot)
                    throw SchemeError(SchemeError::Code::PlanError, "acausal feedback reference");
                const auto& rx = fb_history[static_cast<size_t>(t.slot - 1)];
                if (!rx.has_value())
                    throw SchemeError(SchemeError::Code::PlanError,
                                      "unresolved relay bit: silent feedback round referenced");
                v ^= rx->bit(t.level);
                break;
            }
            case Term::Kind::RxFwd: {
                if (!backward_side || t.slot > slot)
                    throw SchemeError(SchemeError::Code::PlanError, "acausal reception reference");
                v ^= rx_history[static_cast<size_t>(t.slot - 1)].bit(t.level);
                break;
            }
        }
    }
    return v;
}

}  // namespace

LevelVector encode_forward(const SchemeSpec& spec, int user, int slot, const MessageSet& msgs,
                           std::span<const std::optional<LevelVector>> fb_history) {
    const auto& entries = spec.fwd_plan[static_cast<size_t>(slot - 1)][static_cast<size_t>(user)];
    LevelVector x(spec.cfg.q());
    for (int lev = 0; lev < spec.cfg.q(); ++lev)
        x.set_bit(lev, eval_entry(spec, user, entries[static_cast<size_t>(lev)], msgs, fb_history,
                                  {}, slot, false));
    return x;
}

std::optional<LevelVector> encode_backward(const SchemeSpec& spec, int user, int slot,
                                           std::span<const LevelVector> rx_history,
                                           const MessageSet& msgs) {
    const auto& maybe = spec.bwd_plan[static_cast<size_t>(slot - 1)][static_cast<size_t>(user)];
    if (!maybe.has_value()) return std::nullopt;
    LevelVector x(spec.cfg.qb());
    for (int lev = 0; lev < spec.cfg.qb(); ++lev)
        x.set_bit(lev, eval_entry(spec, user, (*maybe)[static_cast<size_t>(lev)], msgs, {},
                                  rx_history, slot, true));
    return x;
}

namespace {

bool read_src(const DecodeSrc& s, const Transcript& t) {
    const SlotRecord& rec = t.slots[static_cast<size_t>(s.slot - 1)];
    const std::optional<LevelVector>* opt = nullptr;
    switch (s.stream) {
        case Stream::Y1: return rec.y1.bit(s.level);
        case Stream::Y2: return rec.y2.bit(s.level);
        case Stream::X1: return rec.x1.bit(s.level);
        case Stream::X2: return rec.x2.bit(s.level);
        case Stream::Yb1: opt = &rec.yb1; break;
        case Stream::Yb2: opt = &rec.yb2; break;
        case Stream::Xb1: opt = &rec.xb1; break;
        case Stream::Xb2: opt = &rec.xb2; break;
    }
    if (!opt->has_value())
        throw SchemeError(SchemeError::Code::PlanError,
                          "decoder references a silent backward round");
    return (*opt)->bit(s.level);
}

std::vector<int> run_decode(const std::vector<DecodeStep>& steps, int first_global, int count,
                            const Transcript& t) {
    std::vector<int> out(static_cast<size_t>(count), 0);
    for (const DecodeStep& step : steps) {
        bool v = false;
        for (const DecodeSrc& s : step.sources) v ^= read_src(s, t);
        const int local = step.target_global_bit - first_global;
        if (local >= 0 && local < count) out[static_cast<size_t>(local)] = v ? 1 : 0;
    }
    return out;
}

}  // namespace

std::vector<int> decode_forward(const SchemeSpec& spec, int user, const Transcript& t) {
    return run_decode(spec.fwd_decode[static_cast<size_t>(user)], spec.fwd_bit_global(user, 0),
                      spec.fwd_bits[static_cast<size_t>(user)], t);
}

std::vector<int> decode_backward(const SchemeSpec& spec, int user, const Transcript& t) {
    return run_decode(spec.bwd_decode[static_cast<size_t>(user)], spec.bwd_bit_global(user, 0),
                      spec.bwd_bits[static_cast<size_t>(user)], t);
}

RatePoint scheme_rate(const SchemeSpec& spec) {
    RatePoint r;
    const Rational block(spec.block_length());
    r.forward_user[0] = Rational(spec.fwd_bits[0]) / block;
    r.forward_user[1] = Rational(spec.fwd_bits[1]) / block;
    r.backward_user[0] = Rational(spec.bwd_bits[0]) / block;
    r.backward_user[1] = Rational(spec.bwd_bits[1]) / block;
    r.forward_sum = r.forward_user[0] + r.forward_user[1];
    r.backward_sum = r.backward_user[0] + r.backward_user[1];
    return r;
}

void validate_scheme(const SchemeSpec& spec) {
    const auto fail = [](const std::string& msg) {
        throw SchemeError(SchemeError::Code::PlanError, msg);
    };
    const int block = spec.block_length();
    if (static_cast<int>(spec.fwd_plan.size()) != block ||
        static_cast<int>(spec.bwd_plan.size()) != block)
        fail("plan length differs from block length");

    std::array<std::vector<char>, 2> fwd_seen{
        std::vector<char>(static_cast<size_t>(spec.fwd_bits[0]), 0),
        std::vector<char>(static_cast<size_t>(spec.fwd_bits[1]), 0)};
    std::array<std::vector<char>, 2> bwd_seen{
        std::vector<char>(static_cast<size_t>(spec.bwd_bits[0]), 0),
        std::vector<char>(static_cast<size_t>(spec.bwd_bits[1]), 0)};

    for (int s = 1; s <= block; ++s) {
        for (int u = 0; u < 2; ++u) {
            const auto& fp = spec.fwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)];
            if (static_cast<int>(fp.size()) != spec.cfg.q()) fail("forward plan level count");
            for (const auto& entry : fp) {
                for (const Term& t : entry) {
                    if (t.kind == Term::Kind::OwnFwd) {
                        if (t.index < 0 || t.index >= spec.fwd_bits[static_cast<size_t>(u)])
                            fail("forward bit index out of range");
                        fwd_seen[static_cast<size_t>(u)][static_cast<size_t>(t.index)] = 1;
                    } else if (t.kind == Term::Kind::RxBwd) {
                        if (t.slot < 1 || t.slot >= s) fail("forward encoder breaks causality");
                        if (t.level < 0 || t.level >= spec.cfg.qb()) fail("feedback level range");
                    } else {
                        fail("forward encoder may use only own bits and feedback");
                    }
                }
            }
            const auto& bp = spec.bwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)];
            if (!bp.has_value()) continue;
            if (static_cast<int>(bp->size()) != spec.cfg.qb()) fail("backward plan level count");
            for (const auto& entry : *bp) {
                for (const Term& t : entry) {
                    if (t.kind == Term::Kind::OwnBwd) {
                        if (t.index < 0 || t.index >= spec.bwd_bits[static_cast<size_t>(u)])
                            fail("backward bit index out of range");
                        bwd_seen[static_cast<size_t>(u)][static_cast<size_t>(t.index)] = 1;
                    } else if (t.kind == Term::Kind::RxFwd) {
                        if (t.slot < 1 || t.slot > s) fail("backward encoder breaks causality");
                        if (t.level < 0 || t.level >= spec.cfg.q()) fail("reception level range");
                    } else {
                        fail("backward encoder may use only own bits and forward receptions");
                    }
                }
            }
        }
    }

    // Feedback budget: active levels per user within 2M * lambda * max(nb, mb),
    // active rounds within 2M * lambda.
    for (int u = 0; u < 2; ++u) {
        long long active_levels = 0, active_rounds = 0;
        for (int s = 1; s <= block; ++s) {
            const auto& bp = spec.bwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)];
            if (!bp.has_value()) continue;
            int lv = 0;
            for (const auto& entry : *bp)
                if (!entry.empty()) ++lv;
            if (lv > 0) ++active_rounds;
            active_levels += lv;
        }
        const Rational budget = Rational(block) * spec.cfg.lambda;
        if (Rational(active_rounds) > budget) fail("more backward-active rounds than the budget");
        if (Rational(active_levels) > budget * Rational(spec.cfg.qb() == 0 ? 0 : spec.cfg.qb()))
            fail("feedback entropy budget exceeded");
    }

    for (int u = 0; u < 2; ++u) {
        for (char seen : fwd_seen[static_cast<size_t>(u)])
            if (!seen) fail("forward message bit never transmitted");
        for (char seen : bwd_seen[static_cast<size_t>(u)])
            if (!seen) fail("backward message bit never transmitted");
    }

    // Decode completeness.
    for (int u = 0; u < 2; ++u) {
        std::vector<char> have(static_cast<size_t>(spec.fwd_bits[static_cast<size_t>(u)]), 0);
        for (const auto& step : spec.fwd_decode[static_cast<size_t>(u)]) {
            const int local = step.target_global_bit - spec.fwd_bit_global(u, 0);
            if (local >= 0 && local < spec.fwd_bits[static_cast<size_t>(u)])
                have[static_cast<size_t>(local)] = 1;
        }
        for (char h : have)
            if (!h) fail("forward message bit never decoded");
        std::vector<char> haveb(static_cast<size_t>(spec.bwd_bits[static_cast<size_t>(u)]), 0);
        for (const auto& step : spec.bwd_decode[static_cast<size_t>(u)]) {
            const int local = step.target_global_bit - spec.bwd_bit_global(u, 0);
            if (local >= 0 && local < spec.bwd_bits[static_cast<size_t>(u)])
                haveb[static_cast<size_t>(local)] = 1;
        }
        for (char h : haveb)
            if (!h) fail("backward message bit never decoded");
    }
}

// --- JSON serialization ---------------------------------------------------

namespace {

/// Symbolic forward pass: every transmitted level and every reception as a
/// GF(2) combination of the global message bits.
struct SymbolicBlock {
    // [slot][user][level]
    std::vector<std::array<std::vector<Gf2Vec>, 2>> x, y;
    std::vector<std::array<std::optional<std::vector<Gf2Vec>>, 2>> xb, yb;
};

SymbolicBlock symbolic_block(const SchemeSpec& spec) {
    const int block = spec.block_length();
    const int q = spec.cfg.q(), qb = spec.cfg.qb();
    const int total = spec.total_bits();
    SymbolicBlock sym;
    sym.x.resize(static_cast<size_t>(block));
    sym.y.resize(static_cast<size_t>(block));
    sym.xb.resize(static_cast<size_t>(block));
    sym.yb.resize(static_cast<size_t>(block));

    auto combine = [&](const std::vector<Gf2Vec>& direct, const std::vector<Gf2Vec>& cross,
                       int sd, int sc, int len) {
        std::vector<Gf2Vec> out(static_cast<size_t>(len), Gf2Vec(total));
        for (int v = 0; v < len; ++v) {
            if (v - sd >= 0) out[static_cast<size_t>(v)].xor_with(direct[static_cast<size_t>(v - sd)]);
            if (v - sc >= 0) out[static_cast<size_t>(v)].xor_with(cross[static_cast<size_t>(v - sc)]);
        }
        return out;
    };

    for (int s = 1; s <= block; ++s) {
        for (int u = 0; u < 2; ++u) {
            std::vector<Gf2Vec> levels(static_cast<size_t>(q), Gf2Vec(total));
            const auto& fp = spec.fwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)];
            for (int lev = 0; lev < q; ++lev) {
                for (const Term& t : fp[static_cast<size_t>(lev)]) {
                    if (t.kind == Term::Kind::OwnFwd) {
                        levels[static_cast<size_t>(lev)].flip(spec.fwd_bit_global(u, t.index));
                    } else {  // RxBwd
                        const auto& hist = sym.yb[static_cast<size_t>(t.slot - 1)][static_cast<size_t>(u)];
                        levels[static_cast<size_t>(lev)].xor_with((*hist)[static_cast<size_t>(t.level)]);
                    }
                }
            }
            sym.x[static_cast<size_t>(s - 1)][static_cast<size_t>(u)] = std::move(levels);
        }
        const auto& x1 = sym.x[static_cast<size_t>(s - 1)][0];
        const auto& x2 = sym.x[static_cast<size_t>(s - 1)][1];
        sym.y[static_cast<size_t>(s - 1)][0] = combine(x1, x2, q - spec.cfg.n, q - spec.cfg.m, q);
        sym.y[static_cast<size_t>(s - 1)][1] = combine(x2, x1, q - spec.cfg.n, q - spec.cfg.m, q);

        bool any_active = false;
        for (int u = 0; u < 2; ++u) {
            const auto& bp = spec.bwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)];
            if (!bp.has_value()) continue;
            any_active = true;
            std::vector<Gf2Vec> levels(static_cast<size_t>(qb), Gf2Vec(total));
            for (int lev = 0; lev < qb; ++lev) {
                for (const Term& t : (*bp)[static_cast<size_t>(lev)]) {
                    if (t.kind == Term::Kind::OwnBwd) {
                        levels[static_cast<size_t>(lev)].flip(spec.bwd_bit_global(u, t.index));
                    } else {  // RxFwd
                        levels[static_cast<size_t>(lev)].xor_with(
                            sym.y[static_cast<size_t>(t.slot - 1)][static_cast<size_t>(u)]
                                 [static_cast<size_t>(t.level)]);
                    }
                }
            }
            sym.xb[static_cast<size_t>(s - 1)][static_cast<size_t>(u)] = std::move(levels);
        }
        if (any_active) {
            const std::vector<Gf2Vec> zero(static_cast<size_t>(qb), Gf2Vec(total));
            const auto& b1 = sym.xb[static_cast<size_t>(s - 1)][0];
            const auto& b2 = sym.xb[static_cast<size_t>(s - 1)][1];
            sym.yb[static_cast<size_t>(s - 1)][0] =
                combine(b1 ? *b1 : zero, b2 ? *b2 : zero, qb - spec.cfg.nb, qb - spec.cfg.mb, qb);
            sym.yb[static_cast<size_t>(s - 1)][1] =
                combine(b2 ? *b2 : zero, b1 ? *b1 : zero, qb - spec.cfg.nb, qb - spec.cfg.mb, qb);
        }
    }
    return sym;
}

nlohmann::json combo_names(const SchemeSpec& spec, const Gf2Vec& combo) {
    auto arr = nlohmann::json::array();
    for (int g = 0; g < combo.size(); ++g)
        if (combo.test(g)) arr.push_back(spec.bit_name(g));
    return arr;
}

}  // namespace

std::string scheme_to_json(const SchemeSpec& spec, bool pretty) {
    const SymbolicBlock sym = symbolic_block(spec);
    nlohmann::json j;
    j["kind"] = spec.label;
    j["config"] = {{"n", spec.cfg.n},
                   {"m", spec.cfg.m},
                   {"nb", spec.cfg.nb},
                   {"mb", spec.cfg.mb},
                   {"lambda", spec.cfg.lambda.to_string()}};
    j["M"] = spec.M;
    j["block_length"] = spec.block_length();
    j["bits"] = {{"forward", {spec.fwd_bits[0], spec.fwd_bits[1]}},
                 {"backward", {spec.bwd_bits[0], spec.bwd_bits[1]}}};
    j["extra_bits_per_user"] = spec.extra_bits_per_user;
    const RatePoint rate = scheme_rate(spec);
    j["rate"] = {{"forward_sum", rate.forward_sum.to_string()},
                 {"backward_sum", rate.backward_sum.to_string()}};

    auto level_plan = nlohmann::json::array();
    auto feedback_plan = nlohmann::json::array();
    for (int s = 1; s <= spec.block_length(); ++s) {
        nlohmann::json slot_fwd, slot_bwd;
        for (int u = 0; u < 2; ++u) {
            auto levels = nlohmann::json::array();
            for (const auto& combo : sym.x[static_cast<size_t>(s - 1)][static_cast<size_t>(u)])
                levels.push_back(combo_names(spec, combo));
            slot_fwd[u == 0 ? "user1" : "user2"] = levels;

            const auto& xb = sym.xb[static_cast<size_t>(s - 1)][static_cast<size_t>(u)];
            if (!xb.has_value()) {
                slot_bwd[u == 0 ? "user1" : "user2"] = nullptr;
            } else {
                auto blevels = nlohmann::json::array();
                for (const auto& combo : *xb) blevels.push_back(combo_names(spec, combo));
                slot_bwd[u == 0 ? "user1" : "user2"] = blevels;
            }
        }
        level_plan.push_back(slot_fwd);
        feedback_plan.push_back(slot_bwd);
    }
    j["level_plan"] = level_plan;
    j["feedback_plan"] = feedback_plan;
    return pretty ? j.dump(2) : j.dump();
}

}  // namespace twic
