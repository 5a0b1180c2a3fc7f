#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "twic/rational.hpp"
#include "twic/scheme.hpp"
#include "twic/transcript.hpp"

namespace twic {

/// Seed for the sampled verification fallback; fixed so failures reproduce.
inline constexpr std::uint64_t kVerifySeed = 0x74776963u;  // "twic"
inline constexpr int kVerifySamples = 10000;

struct BudgetCheck {
    std::array<long long, 2> used{0, 0};  // plan-active backward levels per user
    Rational allowed;                     // block * lambda * max(nb, mb)
    bool ok = false;
};

struct VerificationReport {
    std::string scheme_id;
    long long messages_tested = 0;
    bool exhaustive = false;
    long long failures = 0;
    std::optional<MessageSet> first_counterexample;
    std::string first_counterexample_dump;  // transcript JSONL of the first failure
    RatePoint rate;
    BudgetCheck budget;

    bool pass() const { return failures == 0 && budget.ok; }
};

/// Runs one block: per round a forward use, then the backward phase (which
/// may depend on the same round's forward receptions). Returns the transcript
/// and the decoded forward/backward messages packed in global numbering.
std::pair<Transcript, MessageSet> run_block(const SchemeSpec& spec, const MessageSet& msgs);

/// Entropy accounting of the feedback budget from a transcript's plan-active
/// level markers: used_k = sum of active levels, allowed = N*lambda*max(nb,mb).
BudgetCheck budget_check(const Transcript& t, const ChannelConfig& cfg);

/// Re-derives every reception from the same-round transmissions and the
/// channel law; silent backward rounds must have silent receptions.
bool transcript_consistent(const Transcript& t);

/// Decode-equality check over all message tuples when 2^bits <= limit, else
/// kVerifySamples uniform draws from the given seed.
VerificationReport verify_exhaustive(const SchemeSpec& spec, long long limit,
                                     std::uint64_t seed = kVerifySeed);

/// One JSON object per round ("slot"), bit strings top-to-bottom, null for
/// silent backward entries.
std::string transcript_to_jsonl(const Transcript& t);

}  // namespace twic
