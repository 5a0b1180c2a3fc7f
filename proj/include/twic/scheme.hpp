#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twic/channel.hpp"
#include "twic/gf2.hpp"
#include "twic/rational.hpp"
#include "twic/transcript.hpp"

namespace twic {

enum class SchemeKind { NonFeedback, TypeI, TypeII, TypeIII, FourMessage, Witness };

struct SchemeError : std::runtime_error {
    enum class Code { RegimeMismatch, UnsupportedLambda, UnsupportedWiring, SearchFailed, PlanError };
    Code code;
    SchemeError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
};

/// One XOR source of a transmitted level. Forward encoders may reference own
/// forward message bits and backward receptions from strictly earlier rounds;
/// backward encoders may reference own backward message bits and forward
/// receptions up to and including the current round. Causality is therefore
/// syntactic.
struct Term {
    enum class Kind { OwnFwd, OwnBwd, RxFwd, RxBwd };
    Kind kind;
    int index = 0;  // OwnFwd/OwnBwd: user-local bit index
    int slot = 0;   // RxFwd/RxBwd: 1-based round of the referenced reception
    int level = 0;  // RxFwd/RxBwd: level within it
};
using PlanEntry = std::vector<Term>;  // XOR of terms; empty = level unused (zero)

/// Transcript streams a decoder may read: its received signals, or its own
/// transmitted signals (the operational form of own side information, e.g. a
/// backward message bit it sent itself).
enum class Stream { Y1, Y2, Yb1, Yb2, X1, X2, Xb1, Xb2 };

/// Decoding reads the transcript only; a step's target is the XOR of its
/// sources.
struct DecodeSrc {
    Stream stream = Stream::Y1;
    int slot = 0;  // 1-based
    int level = 0;
};
struct DecodeStep {
    int target_global_bit;
    std::vector<DecodeSrc> sources;
};

struct RatePoint {
    Rational forward_sum;
    Rational backward_sum;
    std::array<Rational, 2> forward_user;
    std::array<Rational, 2> backward_user;
};

/// A fully compiled transmission plan for one block of 2M rounds.
/// Message-bit numbering is global: user 1 forward bits first, then user 2
/// forward bits, then the two backward-message blocks (four-message scheme).
struct SchemeSpec {
    SchemeKind kind = SchemeKind::NonFeedback;
    std::string label;  // "nofb", "type1", ..., "witness"
    ChannelConfig cfg;
    int M = 1;  // slots per stage; block length = 2M
    std::array<int, 2> fwd_bits{0, 0};
    std::array<int, 2> bwd_bits{0, 0};
    int extra_bits_per_user = 0;  // B

    // fwd_plan[round][user]: q() entries. bwd_plan[round][user]: qb() entries
    // when the user transmits that round, nullopt otherwise.
    std::vector<std::array<std::vector<PlanEntry>, 2>> fwd_plan;
    std::vector<std::array<std::optional<std::vector<PlanEntry>>, 2>> bwd_plan;

    std::array<std::vector<DecodeStep>, 2> fwd_decode;  // W_k, decoded at user k~
    std::array<std::vector<DecodeStep>, 2> bwd_decode;  // W~_k, decoded at user k

    int block_length() const { return 2 * M; }
    int total_bits() const { return fwd_bits[0] + fwd_bits[1] + bwd_bits[0] + bwd_bits[1]; }
    int fwd_bit_global(int user, int local) const { return user == 0 ? local : fwd_bits[0] + local; }
    int bwd_bit_global(int user, int local) const {
        return fwd_bits[0] + fwd_bits[1] + (user == 0 ? local : bwd_bits[0] + local);
    }
    /// Conventional identifier: a1, b2, a~, b~2, ...
    std::string bit_name(int global_bit) const;
};

/// All message bits of a block, indexed by the global numbering.
using MessageSet = Gf2Vec;

/// Compiles the named strategy for the config. Throws SchemeError on a regime
/// mismatch, on the documented unsupported-lambda boundary (lambda = 1 with a
/// feedback pipe of at most half the squeezable extra bits cannot finish its
/// last feedback round inside any finite block), or if no block length up to
/// the cap works.
SchemeSpec compile(SchemeKind kind, const ChannelConfig& cfg);

/// Two-slot interactive scheme carrying two forward and two backward messages
/// over a (2,1) forward IC. The backward wiring (nb, mb) = (0, mb >= 1) is the
/// pure cross-delivery the construction needs; other wirings are rejected.
SchemeSpec compile_four_message(const ChannelConfig& cfg);

/// Per-round encoders; fb_history / rx_history are the receptions this
/// terminal has seen (index 0 = round 1). Forward encoders see backward
/// receptions from rounds < slot; backward encoders see forward receptions
/// from rounds <= slot and return nullopt on silent rounds.
LevelVector encode_forward(const SchemeSpec& spec, int user, int slot, const MessageSet& msgs,
                           std::span<const std::optional<LevelVector>> fb_history);
std::optional<LevelVector> encode_backward(const SchemeSpec& spec, int user, int slot,
                                           std::span<const LevelVector> rx_history,
                                           const MessageSet& msgs);

/// Back-substitution decoding from a complete transcript.
std::vector<int> decode_forward(const SchemeSpec& spec, int user, const Transcript& t);
std::vector<int> decode_backward(const SchemeSpec& spec, int user, const Transcript& t);

RatePoint scheme_rate(const SchemeSpec& spec);

/// Structural audit: plan shapes, syntactic causality, feedback budget,
/// every message bit transmitted and decoded. Throws SchemeError::PlanError.
void validate_scheme(const SchemeSpec& spec);

/// JSON serialization; level and feedback plans appear as XOR lists of
/// bit identifiers (receptions expanded to message space).
std::string scheme_to_json(const SchemeSpec& spec, bool pretty = false);

const char* to_string(SchemeKind k);

}  // namespace twic
