#include "twic/capacity.hpp"

#include <algorithm>

namespace twic {

namespace {

int imax(int a, int b) { return a > b ? a : b; }

bool alpha_ge(int n, int m, int p, int q) { return cmp_alpha(n, m, p, q) >= 0; }
bool alpha_lt(int n, int m, int p, int q) { return cmp_alpha(n, m, p, q) < 0; }
bool alpha_gt(int n, int m, int p, int q) { return cmp_alpha(n, m, p, q) > 0; }

}  // namespace

int cmp_alpha(int n, int m, int p, int q) {
    long long lhs, rhs;
    if (n == 0 && m == 0) {
        lhs = q;  // alpha := 1
        rhs = p;
    } else if (n == 0) {
        return 1;  // +infinity is above every finite threshold
    } else {
        lhs = static_cast<long long>(m) * q;
        rhs = static_cast<long long>(p) * n;
    }
    return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

Rational c_no(int n, int m) {
    if (alpha_ge(n, m, 2, 1)) return Rational(2 * n);
    if (alpha_lt(n, m, 2, 3)) return Rational(2 * imax(n - m, m));
    return Rational(imax(2 * n - m, m));
}

Rational c_pf(int n, int m) { return Rational(imax(2 * n - m, m)); }

Rational inner_feedback_term(const ChannelConfig& cfg) {
    if (alpha_ge(cfg.n, cfg.m, 2, 1)) return Rational(cfg.nb);
    if (alpha_lt(cfg.n, cfg.m, 2, 3)) return Rational(imax(cfg.nb - cfg.mb, cfg.mb));
    return Rational(0);
}

Rational outer_feedback_term(const ChannelConfig& cfg) {
    if (alpha_ge(cfg.n, cfg.m, 2, 1)) return Rational(cfg.nb);
    if (alpha_lt(cfg.n, cfg.m, 2, 3)) return Rational(imax(cfg.nb, cfg.mb));
    return Rational(0);
}

namespace {

Rational bound_with_term(const ChannelConfig& cfg, const Rational& term) {
    const Rational base = c_no(cfg.n, cfg.m);
    if (cmp_alpha(cfg.n, cfg.m, 2, 3) >= 0 && cmp_alpha(cfg.n, cfg.m, 2, 1) < 0)
        return base;  // moderate: feedback provides nothing
    return rat_min(base + Rational(2) * cfg.lambda * term, c_pf(cfg.n, cfg.m));
}

}  // namespace

Rational inner_sum(const ChannelConfig& cfg) {
    cfg.validate();
    return bound_with_term(cfg, inner_feedback_term(cfg));
}

Rational outer_sum(const ChannelConfig& cfg) {
    cfg.validate();
    return bound_with_term(cfg, outer_feedback_term(cfg));
}

Rational outer_raw(const ChannelConfig& cfg) {
    cfg.validate();
    const Rational two_lambda = Rational(2) * cfg.lambda;
    const Rational cutset = Rational(2 * cfg.n) + two_lambda * Rational(cfg.nb);
    const Rational pf = Rational(imax(cfg.n - cfg.m, 0) + imax(cfg.n, cfg.m));
    const Rational cross =
        Rational(2 * imax(cfg.n - cfg.m, cfg.m)) + two_lambda * Rational(imax(cfg.nb, cfg.mb));
    return rat_min(cutset, rat_min(pf, cross));
}

bool is_matched(const ChannelConfig& cfg) {
    const bool gap_regime =
        alpha_lt(cfg.n, cfg.m, 2, 3) && cmp_alpha(cfg.nb, cfg.mb, 1, 1) < 0;
    if (!gap_regime) return true;
    return inner_sum(cfg) == outer_sum(cfg);
}

RegimeLabel classify_regime(const ChannelConfig& cfg) {
    RegimeLabel label{};
    if (alpha_ge(cfg.n, cfg.m, 2, 1))
        label.forward = ForwardRegime::VeryStrong;
    else if (alpha_lt(cfg.n, cfg.m, 2, 3))
        label.forward = ForwardRegime::Weak;
    else
        label.forward = ForwardRegime::Moderate;

    label.backward = cmp_alpha(cfg.nb, cfg.mb, 1, 2) >= 0 ? BackwardRegime::CrossHeavy
                                                          : BackwardRegime::PrivateHeavy;

    // Net gain, closed form. Gain needs a strictly better feedback slope than
    // the independent-message slope; both sides are exact, so the split below
    // is provable wherever the sum capacity is known, and the leftover
    // (alpha < 2/3 with alpha~ <= 2/3, both cross links present) stays open.
    const bool gain =
        (alpha_gt(cfg.n, cfg.m, 2, 1) && cmp_alpha(cfg.nb, cfg.mb, 2, 1) < 0 && cfg.mb > 0) ||
        (alpha_lt(cfg.n, cfg.m, 2, 3) && cmp_alpha(cfg.nb, cfg.mb, 2, 3) > 0 && cfg.m > 0);
    const bool no_gain =
        (alpha_ge(cfg.n, cfg.m, 2, 3) && cmp_alpha(cfg.n, cfg.m, 2, 1) <= 0) ||
        (alpha_ge(cfg.n, cfg.m, 2, 1) && cmp_alpha(cfg.nb, cfg.mb, 2, 1) >= 0) || cfg.m == 0 ||
        cfg.mb == 0;
    label.netgain = gain ? NetGainClass::Gain : no_gain ? NetGainClass::NoGain : NetGainClass::Open;
    return label;
}

CapacityReport capacity_report(const ChannelConfig& cfg) {
    CapacityReport r;
    r.c_no = c_no(cfg.n, cfg.m);
    r.c_pf = c_pf(cfg.n, cfg.m);
    r.inner = inner_sum(cfg);
    r.outer = outer_sum(cfg);
    r.outer_raw = outer_raw(cfg);
    r.matched = is_matched(cfg);
    r.regime = classify_regime(cfg);
    return r;
}

NetGainCurve net_gain(const ChannelConfig& cfg, const std::vector<Rational>& lambda_grid) {
    NetGainCurve curve;
    const Rational base = c_no(cfg.n, cfg.m);
    const Rational backward_cap = c_no(cfg.nb, cfg.mb);
    for (const auto& lam : lambda_grid) {
        ChannelConfig at = cfg;
        at.lambda = lam;
        const Rational fb = inner_sum(at) - base;
        const Rational indep = lam * backward_cap;
        curve.lambda.push_back(lam);
        curve.fb_gain.push_back(fb);
        curve.indep_gain.push_back(indep);
        if (fb > indep) curve.witnessed = true;
    }
    if (curve.witnessed) {
        curve.classification = NetGainClass::Gain;
    } else {
        RegimeLabel label = classify_regime(cfg);
        curve.classification =
            label.netgain == NetGainClass::NoGain ? NetGainClass::NoGain : NetGainClass::Open;
    }
    return curve;
}

WeakInteractionBound weak_interaction_bound(int n, int m, int nb, int mb, const Rational& lambda,
                                            const Rational& lambda_t) {
    ChannelConfig cfg{n, m, nb, mb, lambda};
    cfg.validate();
    if (lambda_t < Rational(0) || lambda_t > Rational(1))
        throw std::invalid_argument("lambda_t must lie in [0, 1]");
    const Rational fwd_share = Rational(1) - lambda_t;
    const Rational r_sum =
        rat_min(fwd_share * c_no(n, m) + Rational(2) * lambda * outer_feedback_term(cfg),
                fwd_share * c_pf(n, m));
    const Rational rt_sum =
        rat_min(Rational(2) * lambda_t * Rational(n), (Rational(1) - lambda) * c_no(nb, mb));
    return {r_sum, rt_sum};
}

const char* to_string(ForwardRegime r) {
    switch (r) {
        case ForwardRegime::VeryStrong: return "very_strong";
        case ForwardRegime::Moderate: return "moderate";
        case ForwardRegime::Weak: return "weak";
    }
    return "?";
}

const char* to_string(BackwardRegime r) {
    return r == BackwardRegime::CrossHeavy ? "cross_heavy" : "private_heavy";
}

const char* to_string(NetGainClass c) {
    switch (c) {
        case NetGainClass::Gain: return "gain";
        case NetGainClass::NoGain: return "nogain";
        case NetGainClass::Open: return "open";
    }
    return "?";
}

}  // namespace twic
