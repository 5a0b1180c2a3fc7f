#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "twic/channel.hpp"

namespace twic {

/// One round of the block: a forward use followed by a backward opportunity.
/// The backward phase of round i may depend on forward receptions up to and
/// including round i; its reception is available to forward encoders from
/// round i+1 on. Absent backward transmissions are nullopt; if both users are
/// silent the receptions are nullopt too.
struct SlotRecord {
    LevelVector x1, x2, y1, y2;
    std::optional<LevelVector> xb1, xb2, yb1, yb2;
    std::array<std::uint32_t, 2> bwd_active_mask{0, 0};  // plan-active backward levels
};

struct Transcript {
    ChannelConfig cfg;
    std::vector<SlotRecord> slots;  // index 0 = round 1

    int block_length() const { return static_cast<int>(slots.size()); }
};

}  // namespace twic
