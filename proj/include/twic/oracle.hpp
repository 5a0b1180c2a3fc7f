#pragma once

#include <optional>
#include <vector>

#include "twic/gf2.hpp"
#include "twic/scheme.hpp"

namespace twic {

/// The four terminals of the two-way channel. Rx1/Rx2 are the forward-message
/// receivers (observing Y_k), Tx1/Tx2 the forward transmitters (observing the
/// backward receptions).
enum class Terminal { Rx1, Rx2, Tx1, Tx2 };

/// End-to-end GF(2) transfer system of a compiled scheme: per terminal, the
/// matrix mapping the stacked global message vector to the stacked received
/// bits over the block (silent backward rounds contribute zero rows).
struct LinearSystem {
    int total_bits = 0;
    int block = 0;
    Gf2Mat observation[4];          // rows: slot-major, level-minor
    std::vector<int> side_info[4];  // message-bit columns the terminal knows a priori
};

/// Builds the transfer system by symbolic propagation through the plans and
/// the channel law (a code path independent of run_block).
LinearSystem transfer_matrices(const SchemeSpec& spec);

/// True iff every target bit is determined by the terminal's observations
/// together with its own message bits.
bool rank_decodable(const LinearSystem& sys, Terminal t, const std::vector<int>& target_bits);

/// Convenience: the decodability of all four message blocks at their intended
/// terminals.
bool system_decodable(const SchemeSpec& spec, const LinearSystem& sys);

struct SearchTarget {
    Rational forward_sum;
    Rational backward_sum = Rational(0);
};

/// Bounded exhaustive search over linear strategies (block <= 2, levels <= 3
/// per direction) for a causal, budget-respecting scheme that achieves the
/// target rates. Placement plans (one source per level) are scanned first, so
/// sparse witnesses surface quickly; the full linear space follows. Symmetric
/// strategies are scanned once for symmetric bit splits; asymmetric splits are
/// scanned in full, with mirrored splits covered by user-swap symmetry.
/// Returns a decodable witness spec, or nullopt after exhausting the space --
/// which is evidence of nothing beyond these bounds.
std::optional<SchemeSpec> search_linear(const ChannelConfig& cfg, const SearchTarget& target,
                                        int block_len);

}  // namespace twic
