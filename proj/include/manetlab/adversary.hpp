#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manetlab/medium.hpp"
#include "manetlab/registry.hpp"

namespace manetlab {

enum class AttackKind { BlockIncoming, BlockOutgoing, BlockBoth, PeriodicLoss };

std::string_view to_string(AttackKind kind);
std::optional<AttackKind> parse_attack_kind(std::string_view text);

struct AttackSpec {
    std::string name;
    std::string target;
    ProtocolMatch protocol = ProtocolMatch::All;
    AttackKind kind = AttackKind::BlockBoth;
    // PeriodicLoss only: drop for loss_s, pass for normal_s, repeat `cycles` times.
    std::uint32_t loss_s = 5;
    std::uint32_t normal_s = 35;
    std::uint32_t cycles = 10;

    friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

struct InjectionSpec {
    std::string hex;      // raw frame bytes, even number of hex digits
    std::string as_node;  // wireless identity the frame is attributed to
};

inline constexpr std::size_t kMinFrameBytes = 14;

// Throws BadHex on odd length or a non-hex digit.
std::vector<std::uint8_t> decode_hex(std::string_view hex);

// Attack list line: "name target protocol kind [loss_s normal_s cycles]".
std::string format_attack(const AttackSpec& spec);
AttackSpec parse_attack(std::string_view line, std::size_t line_no = 1);

struct ActiveAttack {
    std::uint64_t id = 0;
    AttackSpec spec;
    VirtualTime launched_at = 0;
    std::optional<VirtualTime> expires_at;
};

// Launches attacks as overlays on the medium and keeps the saved attack list.
class Adversary {
public:
    Adversary(Medium& medium, const Registry& registry) : medium_(medium), registry_(registry) {}

    Adversary(const Adversary&) = delete;
    Adversary& operator=(const Adversary&) = delete;

    // Throws UnknownNode, DuplicateAttack (same name already active), InvalidSpec.
    std::uint64_t launch(const AttackSpec& spec);
    // Throws UnknownAttack.
    VirtualTime stop(std::uint64_t attack_id);
    // Decodes and transmits a raw frame; returns the nodes that received it.
    std::vector<std::string> inject(const InjectionSpec& spec);

    std::vector<ActiveAttack> active() const;
    bool is_active(std::uint64_t attack_id) const { return active_.contains(attack_id); }
    // Stops every attack aimed at `node`; returns how many were stopped.
    std::size_t stop_targeting(std::string_view node);

    // Throws DuplicateAttack when the name is already saved.
    void save_attack(const AttackSpec& spec);
    std::vector<std::string> list_attacks() const;
    const AttackSpec& saved(std::string_view name) const;
    std::uint64_t replay(std::string_view name);

    std::string save_attack_list() const;
    // Replaces the saved list. Throws ParseError / DuplicateAttack.
    void load_attack_list(std::string_view text);

private:
    void expire(std::uint64_t attack_id);

    Medium& medium_;
    const Registry& registry_;
    std::map<std::uint64_t, ActiveAttack> active_;
    std::map<std::uint64_t, EventQueue::EventId> expiry_events_;
    std::vector<AttackSpec> saved_;
    std::uint64_t next_id_ = 1;
};

}  // namespace manetlab
