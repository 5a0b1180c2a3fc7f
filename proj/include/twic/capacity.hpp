#pragma once

#include <string>
#include <vector>

#include "twic/channel.hpp"
#include "twic/rational.hpp"

namespace twic {

// Interference-ratio regime thresholds. alpha = m/n with the conventions:
// n = 0, m > 0 reads as +infinity (very strong); n = m = 0 reads as 1
// (degenerate zero-capacity channel). Same for the backward ratio.
enum class ForwardRegime { VeryStrong, Moderate, Weak };   // alpha >= 2 / [2/3, 2) / < 2/3
enum class BackwardRegime { CrossHeavy, PrivateHeavy };    // alpha~ >= 1/2 / < 1/2
enum class NetGainClass { Gain, NoGain, Open };

struct RegimeLabel {
    ForwardRegime forward;
    BackwardRegime backward;
    NetGainClass netgain;
};

struct CapacityReport {
    Rational c_no;
    Rational c_pf;
    Rational inner;
    Rational outer;
    Rational outer_raw;
    bool matched;
    RegimeLabel regime;
};

/// Compares m/n against p/q under the ratio conventions above.
/// Returns -1, 0 or +1.
int cmp_alpha(int n, int m, int p, int q);

/// Nonfeedback sum capacity of a symmetric deterministic IC.
Rational c_no(int n, int m);

/// Perfect-feedback sum capacity: max(2n - m, m).
Rational c_pf(int n, int m);

/// Per-user feedback pipe capacity the achievable scheme gets out of one
/// backward use: nb (very strong), max(nb-mb, mb) (weak), 0 (moderate).
Rational inner_feedback_term(const ChannelConfig& cfg);

/// Same role in the converse: nb (very strong), max(nb, mb) (weak), 0 (moderate).
Rational outer_feedback_term(const ChannelConfig& cfg);

/// Achievable sum rate with feedback fraction lambda.
Rational inner_sum(const ChannelConfig& cfg);

/// Converse bound in the same regime split.
Rational outer_sum(const ChannelConfig& cfg);

/// Converse as the raw minimum of the three underlying bounds
/// (cutset, perfect-feedback, cross-observation). Equals outer_sum on every
/// valid config; the equality is a test target.
Rational outer_raw(const ChannelConfig& cfg);

/// True when the bounds are known to coincide: everywhere except the regime
/// (alpha < 2/3, alpha~ < 1), plus any config where they happen to be equal
/// numerically (e.g. lambda = 0).
bool is_matched(const ChannelConfig& cfg);

RegimeLabel classify_regime(const ChannelConfig& cfg);

CapacityReport capacity_report(const ChannelConfig& cfg);

struct NetGainCurve {
    std::vector<Rational> lambda;
    std::vector<Rational> fb_gain;     // inner_sum(lambda) - c_no, an achievable guarantee
    std::vector<Rational> indep_gain;  // lambda * c_no(nb, mb)
    bool witnessed = false;            // some grid point has fb_gain > indep_gain strictly
    NetGainClass classification = NetGainClass::Open;
};

/// Evaluates both uses of the backward channel on a lambda grid.
/// classification is Gain iff a grid point witnesses strict net gain; NoGain
/// when provably none exists at any lambda; Open otherwise (a coarse grid may
/// report Open for a channel classify_regime labels Gain).
NetGainCurve net_gain(const ChannelConfig& cfg, const std::vector<Rational>& lambda_grid);

struct WeakInteractionBound {
    Rational r_sum_bound;
    Rational rt_sum_bound;
};

/// Time-sharing converse for the no-mixing (weak interaction) protocol:
/// lambda_t is the fraction of the forward channel spent helping backward
/// messages, lambda the fraction of the backward channel spent on feedback.
WeakInteractionBound weak_interaction_bound(int n, int m, int nb, int mb, const Rational& lambda,
                                            const Rational& lambda_t);

const char* to_string(ForwardRegime r);
const char* to_string(BackwardRegime r);
const char* to_string(NetGainClass c);

}  // namespace twic
