#pragma once

#include <utility>
#include <vector>

#include "twic/capacity.hpp"

namespace twic {

struct SubchannelPair {
    int forward_index;
    int backward_index;
    Rational net_gain;  // max(0, fb_gain - indep_gain) at the chosen lambda
};

struct PairingResult {
    std::vector<SubchannelPair> pairs;  // one per forward subchannel, in forward order
    Rational total_net_gain;
};

/// Exact maximum-weight assignment on int64-scaled rational weights
/// (Hungarian algorithm). Among optimal assignments the lexicographically
/// smallest one (by forward index, then backward index) is returned; the
/// refinement re-solves reduced problems, so keep lists small (intended for
/// a handful of subchannels).
std::vector<int> max_weight_assignment(const std::vector<std::vector<Rational>>& weight);

/// Net interaction gain of pairing each forward IC with a backward IC at the
/// given feedback fraction, maximized over perfect matchings.
PairingResult pair_subchannels(const std::vector<std::pair<int, int>>& forwards,
                               const std::vector<std::pair<int, int>>& backwards,
                               const Rational& lambda);

}  // namespace twic
