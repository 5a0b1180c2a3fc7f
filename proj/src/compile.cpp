#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <mutex>

#include "twic/capacity.hpp"
#include "twic/scheme.hpp"

namespace twic {

namespace {

constexpr int kBlockCap = 10000;  // largest M the compiler will try

// ---------------------------------------------------------------------------
// Feedback scheduling for the two-stage schemes.
//
// B extra bits per user travel: forward exchange level (send) -> backward
// round (feed, capacity eff per round) -> forward exchange level (relay).
// Extras fill the earliest slots, relays the latest, and feeds are placed as
// late as deadlines allow, batched to stay within the 2*lambda*M active-round
// budget.
// ---------------------------------------------------------------------------

struct Schedule {
    int M = 1;
    int B = 0;
    std::vector<int> extras;  // per round, extras sent
    std::vector<int> relays;  // per round, extras relayed
    std::vector<int> feeds;   // per round, bits fed back
};

bool build_feed_schedule(Schedule& sch, int eff, long long active_round_budget) {
    const int block = 2 * sch.M;
    if (sch.B == 0) {
        sch.feeds.assign(static_cast<size_t>(block) + 1, 0);
        return true;
    }
    std::vector<long long> cum_extras(static_cast<size_t>(block) + 1, 0);
    std::vector<long long> cum_relays(static_cast<size_t>(block) + 1, 0);
    for (int s = 1; s <= block; ++s) {
        cum_extras[static_cast<size_t>(s)] = cum_extras[static_cast<size_t>(s - 1)] + sch.extras[static_cast<size_t>(s)];
        cum_relays[static_cast<size_t>(s)] = cum_relays[static_cast<size_t>(s - 1)] + sch.relays[static_cast<size_t>(s)];
    }
    // Deadline: everything relayed through round f+1 must be fed by round f.
    // lstar[f] = sharpest cumulative-feed requirement at f given the per-round
    // feed cap.
    std::vector<long long> lstar(static_cast<size_t>(block), 0);
    if (block >= 2) {
        lstar[static_cast<size_t>(block - 1)] = cum_relays[static_cast<size_t>(block)];
        for (int f = block - 2; f >= 1; --f)
            lstar[static_cast<size_t>(f)] =
                std::max(cum_relays[static_cast<size_t>(f + 1)], lstar[static_cast<size_t>(f + 1)] - eff);
    }
    sch.feeds.assign(static_cast<size_t>(block) + 1, 0);
    long long fed = 0;
    for (int f = 1; f <= block - 1; ++f) {
        long long want = std::max(fed, lstar[static_cast<size_t>(f)]);
        if (want > cum_extras[static_cast<size_t>(f)]) return false;  // not yet received
        sch.feeds[static_cast<size_t>(f)] = static_cast<int>(want - fed);
        fed = want;
    }
    if (fed != sch.B) return false;

    // Compact partial feeds into earlier active rounds to respect the
    // active-round budget.
    auto active_count = [&] {
        long long c = 0;
        for (int f = 1; f <= block; ++f)
            if (sch.feeds[static_cast<size_t>(f)] > 0) ++c;
        return c;
    };
    bool moved = true;
    while (active_count() > active_round_budget && moved) {
        moved = false;
        for (int f = block - 1; f >= 2 && !moved; --f) {
            if (sch.feeds[static_cast<size_t>(f)] == 0) continue;
            for (int f2 = 1; f2 < f && !moved; ++f2) {
                if (sch.feeds[static_cast<size_t>(f2)] == 0 ||
                    sch.feeds[static_cast<size_t>(f2)] >= eff)
                    continue;
                // Room limited by the feed cap at f2 and availability between.
                long long room = eff - sch.feeds[static_cast<size_t>(f2)];
                long long cum = 0;
                for (int r = 1; r < f2; ++r) cum += sch.feeds[static_cast<size_t>(r)];
                long long slack = cum_extras[static_cast<size_t>(f2)];
                long long running = cum;
                for (int r = f2; r < f; ++r) {
                    running += sch.feeds[static_cast<size_t>(r)];
                    slack = std::min(slack, cum_extras[static_cast<size_t>(r)] - running);
                }
                const long long delta =
                    std::min({room, slack, static_cast<long long>(sch.feeds[static_cast<size_t>(f)])});
                if (delta <= 0) continue;
                sch.feeds[static_cast<size_t>(f2)] += static_cast<int>(delta);
                sch.feeds[static_cast<size_t>(f)] -= static_cast<int>(delta);
                moved = true;
            }
        }
    }
    if (active_count() > active_round_budget) return false;

    // Final audit of every constraint the construction relies on.
    long long cf = 0;
    for (int f = 1; f <= block; ++f) {
        if (sch.feeds[static_cast<size_t>(f)] < 0 || sch.feeds[static_cast<size_t>(f)] > eff) return false;
        if (f == block && sch.feeds[static_cast<size_t>(f)] > 0) return false;
        cf += sch.feeds[static_cast<size_t>(f)];
        if (cf > cum_extras[static_cast<size_t>(f)]) return false;
        if (f + 1 <= block && cum_relays[static_cast<size_t>(f + 1)] > cf) return false;
    }
    return cf == sch.B;
}

/// Chooses the block size and the extras/feed/relay schedules for a scheme
/// with per-slot exchange capacity `gap` and per-round feedback capacity
/// `eff`.
Schedule make_schedule(const ChannelConfig& cfg, int gap, int eff) {
    const Rational per_slot = rat_min(Rational(2) * cfg.lambda * Rational(eff), Rational(gap));

    if (cfg.lambda == Rational(1) && eff >= 1 && 2 * eff <= gap) {
        // Hard boundary: with the backward channel busy every round, the last
        // round's feedback can never be relayed, so eff*(2M-1) < 2M*eff = B
        // for every M. The target rate is approachable but not exact at any
        // finite block length.
        throw SchemeError(SchemeError::Code::UnsupportedLambda,
                          "lambda = 1 with 2*eff <= gap: the required " + per_slot.to_string() +
                              " extra bits per slot exceed what any finite block can feed back");
    }

    int m0 = 0;
    for (int M = 1; M <= kBlockCap; ++M) {
        if ((Rational(2 * M) * cfg.lambda).is_integer() && (Rational(M) * per_slot).is_integer()) {
            m0 = M;
            break;
        }
    }
    if (m0 == 0)
        throw SchemeError(SchemeError::Code::UnsupportedLambda,
                          "no block length up to the cap makes the schedule integral");

    for (int M = m0; M <= kBlockCap; M += m0) {
        Schedule sch;
        sch.M = M;
        const Rational b_rat = Rational(M) * per_slot;
        sch.B = static_cast<int>(b_rat.num);
        const int block = 2 * M;
        sch.extras.assign(static_cast<size_t>(block) + 1, 0);
        sch.relays.assign(static_cast<size_t>(block) + 1, 0);
        int left = sch.B;
        for (int s = 1; s <= block - 1 && left > 0; ++s) {
            sch.extras[static_cast<size_t>(s)] = std::min(gap, left);
            left -= sch.extras[static_cast<size_t>(s)];
        }
        if (left > 0) continue;
        left = sch.B;
        for (int t = block; t >= 2 && left > 0; --t) {
            sch.relays[static_cast<size_t>(t)] = std::min(gap, left);
            left -= sch.relays[static_cast<size_t>(t)];
        }
        if (left > 0) continue;
        const Rational budget = Rational(block) * cfg.lambda;
        if (build_feed_schedule(sch, eff, budget.num / budget.den)) return sch;
    }
    throw SchemeError(SchemeError::Code::UnsupportedLambda,
                      "no feasible feedback schedule up to the block-size cap");
}

// ---------------------------------------------------------------------------
// Two-stage scheme construction (nonfeedback baselines and Types I-III).
// ---------------------------------------------------------------------------

struct Token {
    int send_slot = 0, send_level = 0;
    int feed_round = 0, feed_level = 0;
    int relay_slot = 0, relay_level = 0;
};

struct TwoStageLayout {
    std::vector<int> fresh_levels;  // per slot, both users
    int pool_lo = 0, pool_hi = -1;  // exchange levels [pool_lo, pool_hi]
    int gap = 0;
    int eff = 0;
    int feed_base = 0;   // lowest backward level used for feedback
    bool very_strong = false;  // TypeI geometry (relay data read via cross)
    SchemeKind kind;
};

TwoStageLayout strong_layout(const ChannelConfig& cfg, SchemeKind kind) {
    TwoStageLayout lay;
    lay.kind = kind;
    lay.very_strong = true;
    for (int lev = 0; lev < cfg.n; ++lev) lay.fresh_levels.push_back(lev);
    lay.gap = cfg.m - 2 * cfg.n;
    lay.pool_lo = cfg.n;
    lay.pool_hi = cfg.n + lay.gap - 1;
    lay.eff = kind == SchemeKind::TypeI ? cfg.nb : 0;
    lay.feed_base = 0;
    return lay;
}

TwoStageLayout weak_layout(const ChannelConfig& cfg, SchemeKind kind) {
    TwoStageLayout lay;
    lay.kind = kind;
    const int commons = std::max(2 * cfg.m - cfg.n, 0);
    for (int lev = 0; lev < commons; ++lev) lay.fresh_levels.push_back(lev);
    for (int lev = cfg.m; lev < cfg.n; ++lev) lay.fresh_levels.push_back(lev);
    lay.gap = std::min(cfg.m, 2 * cfg.n - 3 * cfg.m);
    lay.pool_lo = commons;
    lay.pool_hi = commons + lay.gap - 1;
    if (kind == SchemeKind::TypeII) {
        lay.eff = cfg.mb;
        lay.feed_base = 0;
    } else if (kind == SchemeKind::TypeIII) {
        lay.eff = cfg.nb - cfg.mb;
        lay.feed_base = cfg.mb;
    } else {
        lay.eff = 0;
        lay.feed_base = 0;
    }
    return lay;
}

SchemeSpec build_two_stage(const ChannelConfig& cfg, const TwoStageLayout& lay, SchemeKind kind) {
    SchemeSpec spec;
    spec.kind = kind;
    spec.label = to_string(kind);
    spec.cfg = cfg;

    Schedule sch = lay.eff > 0 && lay.gap > 0
                       ? make_schedule(cfg, lay.gap, lay.eff)
                       : [&] {
                             Schedule s;
                             s.M = 1;
                             // Block size still has to satisfy the lambda
                             // integrality so budget accounting stays exact.
                             for (int M = 1; M <= kBlockCap; ++M)
                                 if ((Rational(2 * M) * cfg.lambda).is_integer()) {
                                     s.M = M;
                                     break;
                                 }
                             s.extras.assign(static_cast<size_t>(2 * s.M) + 1, 0);
                             s.relays.assign(static_cast<size_t>(2 * s.M) + 1, 0);
                             s.feeds.assign(static_cast<size_t>(2 * s.M) + 1, 0);
                             return s;
                         }();
    spec.M = sch.M;
    spec.extra_bits_per_user = sch.B;
    const int block = 2 * sch.M;
    const int q = cfg.q();
    const int qb = cfg.qb();

    // Place tokens (identical schedule for both users by symmetry).
    std::vector<Token> tokens(static_cast<size_t>(sch.B));
    {
        size_t i = 0;
        for (int s = 1; s <= block; ++s)
            for (int j = 0; j < sch.extras[static_cast<size_t>(s)]; ++j, ++i) {
                tokens[i].send_slot = s;
                tokens[i].send_level = lay.pool_hi - j;
            }
        i = 0;
        for (int f = 1; f <= block; ++f)
            for (int j = 0; j < sch.feeds[static_cast<size_t>(f)]; ++j, ++i) {
                tokens[i].feed_round = f;
                tokens[i].feed_level = lay.feed_base + j;
            }
        i = 0;
        for (int t = 1; t <= block; ++t)
            for (int j = 0; j < sch.relays[static_cast<size_t>(t)]; ++j, ++i) {
                tokens[i].relay_slot = t;
                tokens[i].relay_level = lay.pool_lo + j;
            }
        for (const Token& tk : tokens)
            if (tk.feed_round < tk.send_slot || tk.relay_slot <= tk.feed_round)
                throw SchemeError(SchemeError::Code::PlanError, "token schedule is acausal");
    }

    // Local bit numbering: new bits of a slot ordered by level.
    std::vector<std::vector<int>> bit_at(static_cast<size_t>(block) + 1,
                                         std::vector<int>(static_cast<size_t>(q), -1));
    int next_bit = 0;
    for (int s = 1; s <= block; ++s) {
        std::vector<int> levels = lay.fresh_levels;
        for (const Token& tk : tokens)
            if (tk.send_slot == s) levels.push_back(tk.send_level);
        std::sort(levels.begin(), levels.end());
        for (int lev : levels) bit_at[static_cast<size_t>(s)][static_cast<size_t>(lev)] = next_bit++;
    }
    spec.fwd_bits = {next_bit, next_bit};

    // Token fed at (round, absolute backward level) -> token index, for the
    // side-information cancellation at the relaying user.
    std::map<std::pair<int, int>, int> fed_at;
    for (size_t i = 0; i < tokens.size(); ++i)
        fed_at[{tokens[i].feed_round, tokens[i].feed_level}] = static_cast<int>(i);

    spec.fwd_plan.assign(static_cast<size_t>(block), {});
    spec.bwd_plan.assign(static_cast<size_t>(block), {});
    for (int s = 1; s <= block; ++s)
        for (int u = 0; u < 2; ++u)
            spec.fwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)].assign(
                static_cast<size_t>(q), {});

    // Fresh and extra bits.
    for (int s = 1; s <= block; ++s)
        for (int u = 0; u < 2; ++u)
            for (int lev = 0; lev < q; ++lev) {
                const int b = bit_at[static_cast<size_t>(s)][static_cast<size_t>(lev)];
                if (b >= 0)
                    spec.fwd_plan[static_cast<size_t>(s - 1)][static_cast<size_t>(u)]
                                 [static_cast<size_t>(lev)]
                                     .push_back({Term::Kind::OwnFwd, b, 0, 0});
            }

    // Relays: user u re-sends the other user's tokens after resolving the
    // backward reception against its own side information.
    for (const Token& tk : tokens) {
        for (int u = 0; u < 2; ++u) {
            PlanEntry entry;
            int arrival;
            if (lay.kind == SchemeKind::TypeI) {
                arrival = qb - cfg.nb + (tk.feed_level - lay.feed_base);
            } else if (lay.kind == SchemeKind::TypeII) {
                arrival = qb - cfg.mb + (tk.feed_level - lay.feed_base);
            } else {  // TypeIII: private backward levels, no cross component
                arrival = tk.feed_level;
            }
            entry.push_back({Term::Kind::RxBwd, 0, tk.feed_round, arrival});
            if (lay.kind == SchemeKind::TypeIII) {
                // Fed value is (other receiver's private) ^ token; the private
                // belongs to this user.
                const int p = tk.send_level + (cfg.n - cfg.m);
                entry.push_back(
                    {Term::Kind::OwnFwd,
                     bit_at[static_cast<size_t>(tk.send_slot)][static_cast<size_t>(p)], 0, 0});
            } else {
                // The simultaneous feed of this user's own token lands on the
                // same backward level; cancel it.
                const int shift = lay.kind == SchemeKind::TypeI ? cfg.mb - cfg.nb : cfg.nb - cfg.mb;
                const int interferer = tk.feed_level + shift;
                const int visible_cap = lay.kind == SchemeKind::TypeI ? cfg.mb : cfg.nb;
                if (interferer >= 0 && interferer < visible_cap) {
                    auto it = fed_at.find({tk.feed_round, interferer});
                    if (it != fed_at.end()) {
                        const Token& own = tokens[static_cast<size_t>(it->second)];
                        entry.push_back(
                            {Term::Kind::OwnFwd,
                             bit_at[static_cast<size_t>(own.send_slot)][static_cast<size_t>(own.send_level)],
                             0, 0});
                    }
                }
            }
            spec.fwd_plan[static_cast<size_t>(tk.relay_slot - 1)][static_cast<size_t>(u)]
                         [static_cast<size_t>(tk.relay_level)] = entry;
        }
    }

    // Feedback plans. Terminal t~ feeds its own user's tokens under Type II
    // (clean direct pool read, cross backward link) and the other user's
    // tokens under Types I/III (cross read / corrupted private).
    for (int f = 1; f <= block; ++f) {
        if (sch.feeds[static_cast<size_t>(f)] == 0) continue;
        for (int t = 0; t < 2; ++t) {
            std::vector<PlanEntry> entries(static_cast<size_t>(qb));
            for (const Token& tk : tokens) {
                if (tk.feed_round != f) continue;
                int rx_level;
                if (lay.kind == SchemeKind::TypeIII)
                    rx_level = tk.send_level + (cfg.n - cfg.m);  // corrupted private
                else
                    rx_level = tk.send_level;  // clean read (cross for I, direct for II)
                entries[static_cast<size_t>(tk.feed_level)].push_back(
                    {Term::Kind::RxFwd, 0, tk.send_slot, rx_level});
            }
            spec.bwd_plan[static_cast<size_t>(f - 1)][static_cast<size_t>(t)] = std::move(entries);
        }
    }

    // Decoders.
    const int direct_shift = q - cfg.n;
    for (int u = 0; u < 2; ++u) {
        const Stream own_y = u == 0 ? Stream::Y1 : Stream::Y2;
        auto& steps = spec.fwd_decode[static_cast<size_t>(u)];
        // Which pool levels of the other user are occupied per slot, and by
        // what: a fresh token (index) or a relay of this user's token (index).
        std::map<std::pair<int, int>, int> extra_at, relay_at;
        for (size_t i = 0; i < tokens.size(); ++i) {
            extra_at[{tokens[i].send_slot, tokens[i].send_level}] = static_cast<int>(i);
            relay_at[{tokens[i].relay_slot, tokens[i].relay_level}] = static_cast<int>(i);
        }
        for (int s = 1; s <= block; ++s) {
            for (int lev : lay.fresh_levels) {
                const int g = spec.fwd_bit_global(
                    u, bit_at[static_cast<size_t>(s)][static_cast<size_t>(lev)]);
                if (lay.very_strong) {
                    steps.push_back({g, {{own_y, s, direct_shift + lev}}});
                } else {
                    DecodeStep step{g, {{own_y, s, lev}}};
                    // Private level corrupted by the other user's pool?
                    const int pool_lev = lev - (cfg.n - cfg.m);
                    if (pool_lev >= lay.pool_lo && pool_lev <= lay.pool_hi) {
                        if (auto it = extra_at.find({s, pool_lev}); it != extra_at.end()) {
                            const Token& tk = tokens[static_cast<size_t>(it->second)];
                            step.sources.push_back({own_y, tk.relay_slot, tk.relay_level});
                        } else if (auto it2 = relay_at.find({s, pool_lev}); it2 != relay_at.end()) {
                            const Token& tk = tokens[static_cast<size_t>(it2->second)];
                            step.sources.push_back({own_y, tk.send_slot, tk.send_level});
                        }
                    }
                    steps.push_back(std::move(step));
                }
            }
            for (const Token& tk : tokens) {
                if (tk.send_slot != s) continue;
                const int g = spec.fwd_bit_global(
                    u, bit_at[static_cast<size_t>(s)][static_cast<size_t>(tk.send_level)]);
                if (lay.very_strong) {
                    // Own extras arrive via the other user's relay (cross).
                    steps.push_back({g, {{own_y, tk.relay_slot, tk.relay_level}}});
                } else {
                    // Own extras arrive clean on the own pool at send time.
                    steps.push_back({g, {{own_y, s, tk.send_level}}});
                }
            }
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Moderate-regime one-shot linear code search (nonfeedback baseline for
// 2/3 <= alpha < 2, where the sum capacity max(2n-m, m) may be odd).
// ---------------------------------------------------------------------------

struct ModeratePlan {
    int k1 = 0, k2 = 0;
    std::vector<std::uint32_t> g1, g2;  // transmit columns per bit
};

// Rank of a set of GF(2) vectors packed in uint32 words. The basis is kept
// mutually reduced so one pass per insertion suffices.
int cols_rank(const std::vector<std::uint32_t>& cols) {
    std::vector<std::uint32_t> basis;
    for (std::uint32_t x : cols) {
        for (std::uint32_t b : basis)
            if (x & (b & -b)) x ^= b;
        if (!x) continue;
        for (auto& b : basis)
            if (b & (x & -x)) b ^= x;
        basis.push_back(x);
    }
    return static_cast<int>(basis.size());
}

bool decodable(const std::vector<std::uint32_t>& own_img, const std::vector<std::uint32_t>& other_img) {
    std::vector<std::uint32_t> all = other_img;
    all.insert(all.end(), own_img.begin(), own_img.end());
    return cols_rank(all) == cols_rank(other_img) + static_cast<int>(own_img.size());
}

bool search_moderate_split(int n, int m, int k1, int k2, int max_weight, ModeratePlan& out) {
    const int q = std::max(n, m);
    const int ds = q - n, cs = q - m;
    // Candidate transmit columns ordered sparse-first, so the search lands on
    // plain level assignments before coded ones.
    std::vector<std::uint32_t> candidates;
    for (int w = 1; w <= max_weight; ++w)
        for (std::uint32_t c = 0; c < (std::uint32_t{1} << q); ++c)
            if (std::popcount(c) == w) candidates.push_back(c);

    auto dshift = [&](std::uint32_t c) { return shift_down_mask(c, ds, q); };
    auto xshift = [&](std::uint32_t c) { return shift_down_mask(c, cs, q); };

    std::vector<int> pick1(static_cast<size_t>(k1)), pick2(static_cast<size_t>(k2));
    // DFS over G1 then G2 with rank pruning.
    std::vector<std::uint32_t> d1, x1;
    std::function<bool(int, int)> dfs1 = [&](int depth, int start) -> bool {
        if (depth == k1) {
            // G1 chosen; search G2 with the y2 condition enforced online.
            std::vector<std::uint32_t> d2, x2;
            std::function<bool(int, int)> dfs2 = [&](int depth2, int start2) -> bool {
                if (depth2 == k2) {
                    if (!decodable(d1, x2)) return false;  // y1 condition
                    out.k1 = k1;
                    out.k2 = k2;
                    out.g1.clear();
                    out.g2.clear();
                    for (int i = 0; i < k1; ++i) out.g1.push_back(candidates[static_cast<size_t>(pick1[static_cast<size_t>(i)])]);
                    for (int i = 0; i < k2; ++i) out.g2.push_back(candidates[static_cast<size_t>(pick2[static_cast<size_t>(i)])]);
                    return true;
                }
                for (int c = start2; c < static_cast<int>(candidates.size()); ++c) {
                    const std::uint32_t dimg = dshift(candidates[static_cast<size_t>(c)]);
                    // New b-column must stay independent modulo cross(G1) and
                    // earlier b-columns (the y2 condition built greedily).
                    std::vector<std::uint32_t> test = x1;
                    test.insert(test.end(), d2.begin(), d2.end());
                    const int before = cols_rank(test);
                    test.push_back(dimg);
                    if (cols_rank(test) != before + 1) continue;
                    d2.push_back(dimg);
                    x2.push_back(xshift(candidates[static_cast<size_t>(c)]));
                    pick2[static_cast<size_t>(depth2)] = c;
                    if (dfs2(depth2 + 1, c + 1)) return true;
                    d2.pop_back();
                    x2.pop_back();
                }
                return false;
            };
            return dfs2(0, 0);
        }
        for (int c = start; c < static_cast<int>(candidates.size()); ++c) {
            const std::uint32_t dimg = dshift(candidates[static_cast<size_t>(c)]);
            std::vector<std::uint32_t> test = d1;
            test.push_back(dimg);
            if (cols_rank(test) != static_cast<int>(test.size())) continue;  // direct part must stay full rank
            d1.push_back(dimg);
            x1.push_back(xshift(candidates[static_cast<size_t>(c)]));
            pick1[static_cast<size_t>(depth)] = c;
            if (dfs1(depth + 1, c + 1)) return true;
            d1.pop_back();
            x1.pop_back();
        }
        return false;
    };
    return dfs1(0, 0);
}

const ModeratePlan& moderate_plan(int n, int m) {
    static std::map<std::pair<int, int>, ModeratePlan> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, m});
    if (it != cache.end()) return it->second;

    const int total = std::max(2 * n - m, m);
    ModeratePlan plan;
    bool found = false;
    for (int weight = 2; weight <= 3 && !found; ++weight)
        for (int k1 = (total + 1) / 2; k1 <= total && !found; ++k1) {
            const int k2 = total - k1;
            if (k1 > std::max(n, m) || k2 > std::max(n, m)) continue;
            found = search_moderate_split(n, m, k1, k2, weight, plan);
        }
    if (!found)
        throw SchemeError(SchemeError::Code::SearchFailed,
                          "no one-shot linear layout found for the moderate channel");
    return cache.emplace(std::make_pair(n, m), plan).first->second;
}

/// Solves for decode combinations: which subset of the q observation levels
/// XORs to each of the first `targets` unknowns. rows[r] is the observation
/// row over all unknowns.
std::vector<std::uint32_t> solve_reads(const std::vector<std::uint32_t>& rows, int unknowns,
                                       int targets) {
    // Row-reduce with subset tracking: val[i] over the unknowns, sub[i] the
    // set of original observation rows XORed into it.
    std::vector<std::uint32_t> val = rows;
    std::vector<std::uint32_t> sub(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) sub[i] = std::uint32_t{1} << i;
    std::vector<int> pivot_row(static_cast<size_t>(unknowns), -1);
    for (size_t i = 0; i < val.size(); ++i) {
        for (int b = 0; b < unknowns; ++b) {
            if ((val[i] >> b & 1) && pivot_row[static_cast<size_t>(b)] >= 0) {
                val[i] ^= val[static_cast<size_t>(pivot_row[static_cast<size_t>(b)])];
                sub[i] ^= sub[static_cast<size_t>(pivot_row[static_cast<size_t>(b)])];
            }
        }
        if (val[i]) {
            const int lead = std::countr_zero(val[i]);
            pivot_row[static_cast<size_t>(lead)] = static_cast<int>(i);
        }
    }
    // Express each target unit vector; each elimination step clears the
    // current lowest set bit, so this terminates.
    std::vector<std::uint32_t> result(static_cast<size_t>(targets), 0);
    for (int t = 0; t < targets; ++t) {
        std::uint32_t want = std::uint32_t{1} << t;
        std::uint32_t picks = 0;
        while (want) {
            const int b = std::countr_zero(want);
            const int r = b < unknowns ? pivot_row[static_cast<size_t>(b)] : -1;
            if (r < 0)
                throw SchemeError(SchemeError::Code::SearchFailed, "undecodable target bit");
            want ^= val[static_cast<size_t>(r)];
            picks ^= sub[static_cast<size_t>(r)];
        }
        result[static_cast<size_t>(t)] = picks;
    }
    return result;
}

SchemeSpec build_moderate(const ChannelConfig& cfg) {
    const ModeratePlan& plan = moderate_plan(cfg.n, cfg.m);
    const int q = cfg.q();
    SchemeSpec spec;
    spec.kind = SchemeKind::NonFeedback;
    spec.label = to_string(spec.kind);
    spec.cfg = cfg;
    spec.M = 1;
    const int total = plan.k1 + plan.k2;
    spec.fwd_bits = {total, total};
    spec.fwd_plan.assign(2, {});
    spec.bwd_plan.assign(2, {});

    // Slot 1: user 1 carries k1 bits with columns g1, user 2 carries k2 with
    // g2; slot 2 swaps the roles with fresh bits.
    auto fill = [&](int slot, int user, const std::vector<std::uint32_t>& cols, int first_bit) {
        auto& levels = spec.fwd_plan[static_cast<size_t>(slot - 1)][static_cast<size_t>(user)];
        levels.assign(static_cast<size_t>(q), {});
        for (size_t b = 0; b < cols.size(); ++b)
            for (int lev = 0; lev < q; ++lev)
                if (cols[b] >> lev & 1)
                    levels[static_cast<size_t>(lev)].push_back(
                        {Term::Kind::OwnFwd, first_bit + static_cast<int>(b), 0, 0});
    };
    fill(1, 0, plan.g1, 0);
    fill(1, 1, plan.g2, 0);
    fill(2, 0, plan.g2, plan.k1);
    fill(2, 1, plan.g1, plan.k2);

    // Decode: per slot, express own bits as XORs of observation levels.
    const int ds = q - cfg.n, cs = q - cfg.m;
    auto decode_slot = [&](int slot, int user, const std::vector<std::uint32_t>& own_cols,
                           const std::vector<std::uint32_t>& other_cols, int first_local) {
        const int ka = static_cast<int>(own_cols.size());
        const int kb = static_cast<int>(other_cols.size());
        std::vector<std::uint32_t> rows(static_cast<size_t>(q), 0);
        for (int lev = 0; lev < q; ++lev) {
            std::uint32_t row = 0;
            for (int b = 0; b < ka; ++b)
                if (shift_down_mask(own_cols[static_cast<size_t>(b)], ds, q) >> lev & 1)
                    row |= std::uint32_t{1} << b;
            for (int b = 0; b < kb; ++b)
                if (shift_down_mask(other_cols[static_cast<size_t>(b)], cs, q) >> lev & 1)
                    row |= std::uint32_t{1} << (ka + b);
            rows[static_cast<size_t>(lev)] = row;
        }
        const auto reads = solve_reads(rows, ka + kb, ka);
        const Stream y = user == 0 ? Stream::Y1 : Stream::Y2;
        for (int b = 0; b < ka; ++b) {
            DecodeStep step{spec.fwd_bit_global(user, first_local + b), {}};
            for (int lev = 0; lev < q; ++lev)
                if (reads[static_cast<size_t>(b)] >> lev & 1) step.sources.push_back({y, slot, lev});
            spec.fwd_decode[static_cast<size_t>(user)].push_back(std::move(step));
        }
    };
    decode_slot(1, 0, plan.g1, plan.g2, 0);
    decode_slot(1, 1, plan.g2, plan.g1, 0);
    decode_slot(2, 0, plan.g2, plan.g1, plan.k1);
    decode_slot(2, 1, plan.g1, plan.g2, plan.k2);
    return spec;
}

}  // namespace

SchemeSpec compile_four_message(const ChannelConfig& cfg_in) {
    if (cfg_in.n != 2 || cfg_in.m != 1)
        throw SchemeError(SchemeError::Code::RegimeMismatch,
                          "four-message scheme is built for the (2,1) forward IC");
    if (cfg_in.nb != 0 || cfg_in.mb < 1)
        throw SchemeError(SchemeError::Code::UnsupportedWiring,
                          "four-message scheme needs pure cross-delivery wiring (nb, mb) = (0, 1)");
    ChannelConfig cfg = cfg_in;
    cfg.lambda = Rational(1);  // backward channel active every round
    cfg.validate();

    SchemeSpec spec;
    spec.kind = SchemeKind::FourMessage;
    spec.label = to_string(spec.kind);
    spec.cfg = cfg;
    spec.M = 1;
    spec.fwd_bits = {2, 2};
    spec.bwd_bits = {1, 1};
    const int qb = cfg.qb();

    spec.fwd_plan.assign(2, {});
    spec.bwd_plan.assign(2, {});
    for (int s = 0; s < 2; ++s)
        for (int u = 0; u < 2; ++u) spec.fwd_plan[static_cast<size_t>(s)][static_cast<size_t>(u)].assign(2, {});

    // Round 1: private fresh bit below; backward messages launched cross.
    for (int u = 0; u < 2; ++u) {
        spec.fwd_plan[0][static_cast<size_t>(u)][1] = {{Term::Kind::OwnFwd, 0, 0, 0}};
        std::vector<PlanEntry> bwd(static_cast<size_t>(qb));
        bwd[0] = {{Term::Kind::OwnBwd, 0, 0, 0}};
        spec.bwd_plan[0][static_cast<size_t>(u)] = std::move(bwd);
    }
    // Round 2: echo the unwanted backward bit on the top level (free: the
    // intended receiver knows it), fresh private bit below; terminals bounce
    // the echoed bit across to its destination.
    for (int u = 0; u < 2; ++u) {
        spec.fwd_plan[1][static_cast<size_t>(u)][0] = {{Term::Kind::RxBwd, 0, 1, 0}};
        spec.fwd_plan[1][static_cast<size_t>(u)][1] = {{Term::Kind::OwnFwd, 1, 0, 0}};
        std::vector<PlanEntry> bwd(static_cast<size_t>(qb));
        bwd[0] = {{Term::Kind::RxFwd, 0, 2, 0}};
        spec.bwd_plan[1][static_cast<size_t>(u)] = std::move(bwd);
    }

    for (int u = 0; u < 2; ++u) {
        const Stream own_y = u == 0 ? Stream::Y1 : Stream::Y2;
        const Stream own_xb = u == 0 ? Stream::Xb1 : Stream::Xb2;
        const Stream own_yb = u == 0 ? Stream::Yb1 : Stream::Yb2;
        spec.fwd_decode[static_cast<size_t>(u)] = {
            {spec.fwd_bit_global(u, 0), {{own_y, 1, 1}}},
            {spec.fwd_bit_global(u, 1), {{own_y, 2, 1}, {own_xb, 1, 0}}},
        };
        spec.bwd_decode[static_cast<size_t>(u)] = {
            {spec.bwd_bit_global(u, 0), {{own_yb, 2, 0}}},
        };
    }
    return spec;
}

SchemeSpec compile(SchemeKind kind, const ChannelConfig& cfg) {
    cfg.validate();
    switch (kind) {
        case SchemeKind::TypeI:
            if (cmp_alpha(cfg.n, cfg.m, 2, 1) < 0)
                throw SchemeError(SchemeError::Code::RegimeMismatch,
                                  "type I needs alpha >= 2 " + cfg.to_string());
            return build_two_stage(cfg, strong_layout(cfg, SchemeKind::TypeI), SchemeKind::TypeI);
        case SchemeKind::TypeII:
            if (cmp_alpha(cfg.n, cfg.m, 2, 3) >= 0)
                throw SchemeError(SchemeError::Code::RegimeMismatch,
                                  "type II needs alpha < 2/3 " + cfg.to_string());
            return build_two_stage(cfg, weak_layout(cfg, SchemeKind::TypeII), SchemeKind::TypeII);
        case SchemeKind::TypeIII:
            if (cmp_alpha(cfg.n, cfg.m, 2, 3) >= 0)
                throw SchemeError(SchemeError::Code::RegimeMismatch,
                                  "type III needs alpha < 2/3 " + cfg.to_string());
            if (cfg.mb > cfg.nb)
                throw SchemeError(SchemeError::Code::RegimeMismatch,
                                  "type III needs private backward levels (mb <= nb)");
            return build_two_stage(cfg, weak_layout(cfg, SchemeKind::TypeIII), SchemeKind::TypeIII);
        case SchemeKind::NonFeedback: {
            ChannelConfig nofb = cfg;
            if (cmp_alpha(cfg.n, cfg.m, 2, 1) >= 0)
                return build_two_stage(nofb, strong_layout(nofb, SchemeKind::NonFeedback),
                                       SchemeKind::NonFeedback);
            if (cmp_alpha(cfg.n, cfg.m, 2, 3) < 0)
                return build_two_stage(nofb, weak_layout(nofb, SchemeKind::NonFeedback),
                                       SchemeKind::NonFeedback);
            return build_moderate(nofb);
        }
        case SchemeKind::FourMessage:
            return compile_four_message(cfg);
        case SchemeKind::Witness:
            throw SchemeError(SchemeError::Code::PlanError,
                              "witness specs come from the linear search, not the compiler");
    }
    throw SchemeError(SchemeError::Code::PlanError, "unknown scheme kind");
}

}  // namespace twic
