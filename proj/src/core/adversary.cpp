#include "manetlab/adversary.hpp"

#include <algorithm>

#include "manetlab/error.hpp"
#include "text.hpp"

namespace manetlab {

std::string_view to_string(AttackKind kind) {
    switch (kind) {
    case AttackKind::BlockIncoming: return "block-incoming";
    case AttackKind::BlockOutgoing: return "block-outgoing";
    case AttackKind::BlockBoth: return "block-both";
    case AttackKind::PeriodicLoss: return "periodic-loss";
    }
    return "?";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) {
    for (auto k : {AttackKind::BlockIncoming, AttackKind::BlockOutgoing, AttackKind::BlockBoth,
                   AttackKind::PeriodicLoss}) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

std::vector<std::uint8_t> decode_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw Error(Errc::BadHex, "hex input has odd length " + std::to_string(hex.size()));
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> bytes;
    bytes.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw Error(Errc::BadHex, "non-hex digit near offset " + std::to_string(i));
        }
        bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return bytes;
}

std::string format_attack(const AttackSpec& spec) {
    std::string line = spec.name + ' ' + spec.target + ' ' + std::string(to_string(spec.protocol)) +
                       ' ' + std::string(to_string(spec.kind));
    if (spec.kind == AttackKind::PeriodicLoss) {
        line += ' ' + std::to_string(spec.loss_s) + ' ' + std::to_string(spec.normal_s) + ' ' +
                std::to_string(spec.cycles);
    }
    return line;
}

AttackSpec parse_attack(std::string_view line, std::size_t line_no) {
    auto tok = text::split_ws(line);
    if (tok.size() != 4 && tok.size() != 7) {
        throw ParseError(line_no, "expected 'name target protocol kind [loss_s normal_s cycles]'");
    }
    AttackSpec spec;
    spec.name = std::string(tok[0]);
    spec.target = std::string(tok[1]);
    if (!text::is_identifier(spec.name) || !text::is_identifier(spec.target)) {
        throw ParseError(line_no, "attack and target names must be identifiers");
    }
    auto proto = parse_protocol_match(tok[2]);
    if (!proto) throw ParseError(line_no, "unknown protocol '" + std::string(tok[2]) + "'");
    spec.protocol = *proto;
    auto kind = parse_attack_kind(tok[3]);
    if (!kind) throw ParseError(line_no, "unknown attack kind '" + std::string(tok[3]) + "'");
    spec.kind = *kind;
    if (tok.size() == 7) {
        if (spec.kind != AttackKind::PeriodicLoss) {
            throw ParseError(line_no, "timing fields only apply to periodic-loss");
        }
        auto loss = text::parse_uint<std::uint32_t>(tok[4]);
        auto normal = text::parse_uint<std::uint32_t>(tok[5]);
        auto cycles = text::parse_uint<std::uint32_t>(tok[6]);
        if (!loss || !normal || !cycles) throw ParseError(line_no, "bad timing field");
        spec.loss_s = *loss;
        spec.normal_s = *normal;
        spec.cycles = *cycles;
    }
    return spec;
}

std::uint64_t Adversary::launch(const AttackSpec& spec) {
    if (!text::is_identifier(spec.name)) {
        throw Error(Errc::InvalidSpec, "attack name '" + spec.name + "' must be an identifier");
    }
    registry_.get(spec.target);
    for (const auto& [id, a] : active_) {
        if (a.spec.name == spec.name) {
            throw Error(Errc::DuplicateAttack, "attack '" + spec.name + "' is already active");
        }
    }
    if (spec.kind == AttackKind::PeriodicLoss && (spec.loss_s < 1 || spec.cycles < 1)) {
        throw Error(Errc::InvalidSpec, "periodic loss needs loss_s >= 1 and cycles >= 1");
    }

    const std::uint64_t id = next_id_++;
    Overlay overlay;
    overlay.attack_id = id;
    overlay.protocol = spec.protocol;
    ActiveAttack attack{id, spec, medium_.now(), std::nullopt};
    switch (spec.kind) {
    case AttackKind::BlockIncoming: overlay.incoming = true; break;
    case AttackKind::BlockOutgoing: overlay.outgoing = true; break;
    case AttackKind::BlockBoth:
        overlay.incoming = true;
        overlay.outgoing = true;
        break;
    case AttackKind::PeriodicLoss: {
        overlay.incoming = true;
        overlay.outgoing = true;
        LossSchedule schedule;
        schedule.start = medium_.now();
        schedule.loss = static_cast<VirtualTime>(spec.loss_s) * kSecond;
        schedule.normal = static_cast<VirtualTime>(spec.normal_s) * kSecond;
        schedule.cycles = spec.cycles;
        overlay.schedule = schedule;
        attack.expires_at = schedule.end();
        break;
    }
    }
    medium_.add_overlay(spec.target, overlay);
    active_.emplace(id, attack);
    medium_.record("ATTACK_ON", {{"attack", std::to_string(id)},
                                 {"name", spec.name},
                                 {"target", spec.target},
                                 {"kind", std::string(to_string(spec.kind))},
                                 {"proto", std::string(to_string(spec.protocol))}});
    if (attack.expires_at) {
        expiry_events_[id] = medium_.schedule(*attack.expires_at, [this, id] { expire(id); });
    }
    return id;
}

void Adversary::expire(std::uint64_t attack_id) {
    expiry_events_.erase(attack_id);
    auto it = active_.find(attack_id);
    if (it == active_.end()) return;
    medium_.remove_overlays(attack_id);
    medium_.record("ATTACK_OFF", {{"attack", std::to_string(attack_id)},
                                  {"name", it->second.spec.name},
                                  {"reason", "expired"}});
    active_.erase(it);
}

VirtualTime Adversary::stop(std::uint64_t attack_id) {
    auto it = active_.find(attack_id);
    if (it == active_.end()) {
        throw Error(Errc::UnknownAttack, "no active attack with id " + std::to_string(attack_id));
    }
    if (auto ev = expiry_events_.find(attack_id); ev != expiry_events_.end()) {
        medium_.cancel(ev->second);
        expiry_events_.erase(ev);
    }
    medium_.remove_overlays(attack_id);
    medium_.record("ATTACK_OFF", {{"attack", std::to_string(attack_id)},
                                  {"name", it->second.spec.name},
                                  {"reason", "stopped"}});
    active_.erase(it);
    return medium_.now();
}

std::size_t Adversary::stop_targeting(std::string_view node) {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, a] : active_) {
        if (a.spec.target == node) ids.push_back(id);
    }
    for (auto id : ids) stop(id);
    return ids.size();
}

std::vector<std::string> Adversary::inject(const InjectionSpec& spec) {
    auto bytes = decode_hex(spec.hex);
    if (bytes.size() < kMinFrameBytes) {
        throw Error(Errc::FrameTooShort, "injected frame has " + std::to_string(bytes.size()) +
                                             " bytes, need at least " +
                                             std::to_string(kMinFrameBytes));
    }
    const auto& node = registry_.get(spec.as_node);
    Frame f;
    MacAddress::Bytes dst{};
    std::copy_n(bytes.begin(), dst.size(), dst.begin());
    f.dst_mac = MacAddress(dst);
    f.src_mac = node.wireless_mac;
    f.src_ip = node.wireless_ip;
    f.protocol = Protocol::RAW;
    f.payload = std::move(bytes);
    f.tag = "inject";
    return medium_.transmit(node.name, std::move(f));
}

std::vector<ActiveAttack> Adversary::active() const {
    std::vector<ActiveAttack> out;
    for (const auto& [id, a] : active_) out.push_back(a);
    return out;
}

void Adversary::save_attack(const AttackSpec& spec) {
    if (!text::is_identifier(spec.name) || !text::is_identifier(spec.target)) {
        throw Error(Errc::InvalidSpec, "attack and target names must be identifiers");
    }
    for (const auto& s : saved_) {
        if (s.name == spec.name) {
            throw Error(Errc::DuplicateAttack, "attack '" + spec.name + "' is already saved");
        }
    }
    saved_.push_back(spec);
}

std::vector<std::string> Adversary::list_attacks() const {
    std::vector<std::string> names;
    for (const auto& s : saved_) names.push_back(s.name);
    return names;
}

const AttackSpec& Adversary::saved(std::string_view name) const {
    for (const auto& s : saved_) {
        if (s.name == name) return s;
    }
    throw Error(Errc::UnknownAttack, "no saved attack named '" + std::string(name) + "'");
}

std::uint64_t Adversary::replay(std::string_view name) { return launch(saved(name)); }

std::string Adversary::save_attack_list() const {
    std::string out;
    for (const auto& s : saved_) out += format_attack(s) + "\n";
    return out;
}

void Adversary::load_attack_list(std::string_view content) {
    std::vector<AttackSpec> loaded;
    auto lines = text::split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = text::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        auto spec = parse_attack(line, i + 1);
        for (const auto& s : loaded) {
            if (s.name == spec.name) {
                throw Error(Errc::DuplicateAttack, "line " + std::to_string(i + 1) +
                                                       ": attack '" + spec.name + "' listed twice");
            }
        }
        loaded.push_back(std::move(spec));
    }
    saved_ = std::move(loaded);
}

}  // namespace manetlab
