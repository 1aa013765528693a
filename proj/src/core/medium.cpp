#include "manetlab/medium.hpp"

#include <cctype>
#include <stdexcept>

#include "manetlab/error.hpp"

namespace manetlab {

std::string_view to_string(Fate fate) {
    switch (fate) {
    case Fate::Received: return "RX";
    case Fate::Overheard: return "IGNORED";
    case Fate::DroppedFilter: return "DROP_FILTER";
    case Fate::DroppedAdversary: return "DROP_ADVERSARY";
    case Fate::BlockedAtSender: return "DROP_ADVERSARY";
    }
    return "?";
}

std::string_view to_string(ProtocolMatch match) {
    switch (match) {
    case ProtocolMatch::TCP: return "tcp";
    case ProtocolMatch::UDP: return "udp";
    case ProtocolMatch::ICMP: return "icmp";
    case ProtocolMatch::All: return "all";
    }
    return "?";
}

std::optional<ProtocolMatch> parse_protocol_match(std::string_view text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "tcp") return ProtocolMatch::TCP;
    if (lower == "udp") return ProtocolMatch::UDP;
    if (lower == "icmp") return ProtocolMatch::ICMP;
    if (lower == "all") return ProtocolMatch::All;
    return std::nullopt;
}

bool matches(ProtocolMatch match, Protocol protocol) {
    switch (match) {
    case ProtocolMatch::TCP: return protocol == Protocol::TCP;
    case ProtocolMatch::UDP: return protocol == Protocol::UDP;
    case ProtocolMatch::ICMP: return protocol == Protocol::ICMP;
    case ProtocolMatch::All: return true;
    }
    return false;
}

bool LossSchedule::dropping_at(VirtualTime t) const {
    if (t < start || t >= end()) return false;
    return (t - start) % period() < loss;
}

bool Overlay::drops(bool outgoing_direction, Protocol p, VirtualTime t) const {
    if (outgoing_direction ? !outgoing : !incoming) return false;
    if (!matches(protocol, p)) return false;
    return !schedule || schedule->dropping_at(t);
}

std::string TraceEvent::to_line() const {
    std::string line = std::to_string(time) + ' ' + kind;
    for (const auto& [k, v] : fields) {
        line += ' ';
        line += k;
        line += '=';
        line += v;
    }
    return line;
}

std::optional<std::string_view> TraceEvent::field(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) return std::string_view(v);
    }
    return std::nullopt;
}

TrafficCounters& TrafficCounters::operator+=(const TrafficCounters& o) {
    sent += o.sent;
    received += o.received;
    dropped_filter += o.dropped_filter;
    dropped_adversary += o.dropped_adversary;
    ignored += o.ignored;
    blocked_out += o.blocked_out;
    return *this;
}

TrafficCounters NodeCounters::total() const {
    TrafficCounters sum;
    for (const auto& c : by_protocol) sum += c;
    return sum;
}

std::optional<VirtualTime> EventQueue::next_time() const {
    if (events_.empty()) return std::nullopt;
    return events_.begin()->first.first;
}

EventQueue::EventId EventQueue::schedule(VirtualTime at, std::function<void()> action) {
    if (at < now_) {
        throw std::logic_error("event scheduled at " + std::to_string(at) + " before now " +
                               std::to_string(now_));
    }
    EventId id = next_id_++;
    events_.emplace(std::make_pair(at, id), std::move(action));
    index_.emplace(id, at);
    return id;
}

bool EventQueue::cancel(EventId id) {
    auto it = index_.find(id);
    if (it == index_.end()) return false;
    events_.erase({it->second, id});
    index_.erase(it);
    return true;
}

std::size_t EventQueue::advance(VirtualTime until) {
    if (processing_) throw std::logic_error("EventQueue::advance called from inside an event");
    if (until < now_) {
        throw Error(Errc::OutOfRange, "cannot advance to " + std::to_string(until) +
                                          " us, clock is already at " + std::to_string(now_));
    }
    std::size_t processed = 0;
    processing_ = true;
    try {
        while (!events_.empty() && events_.begin()->first.first <= until) {
            auto node = events_.extract(events_.begin());
            index_.erase(node.key().second);
            now_ = node.key().first;
            node.mapped()();
            ++processed;
        }
    } catch (...) {
        processing_ = false;
        throw;
    }
    processing_ = false;
    now_ = until;
    return processed;
}

Medium::Medium(const Registry& registry, VirtualTime link_latency)
    : registry_(registry), link_latency_(link_latency) {
    if (link_latency_ < 0) throw std::invalid_argument("link latency must be non-negative");
}

std::size_t Medium::advance(VirtualTime until) { return queue_.advance(until); }

Medium::NodeState& Medium::state(std::string_view node) {
    auto it = nodes_.find(node);
    if (it == nodes_.end()) it = nodes_.emplace(std::string(node), NodeState{}).first;
    return it->second;
}

const Medium::NodeState* Medium::find_state(std::string_view node) const {
    auto it = nodes_.find(node);
    return it == nodes_.end() ? nullptr : &it->second;
}

VirtualTime Medium::apply_rulesets(std::vector<Ruleset> rulesets,
                                   std::vector<std::pair<std::string, std::string>> label) {
    if (rulesets.size() != registry_.size()) {
        throw Error(Errc::DimensionMismatch, "got " + std::to_string(rulesets.size()) +
                                                 " rulesets for " +
                                                 std::to_string(registry_.size()) + " nodes");
    }
    for (std::size_t i = 0; i < rulesets.size(); ++i) {
        if (rulesets[i].owner != registry_.at(i).name) {
            throw Error(Errc::DimensionMismatch, "ruleset " + std::to_string(i) + " belongs to '" +
                                                     rulesets[i].owner + "', expected '" +
                                                     registry_.at(i).name + "'");
        }
    }
    for (auto& rs : rulesets) {
        std::string owner = rs.owner;
        state(owner).ruleset = std::move(rs);
    }
    ++apply_count_;
    record("APPLY", std::move(label));
    return now();
}

const Ruleset* Medium::active_ruleset(std::string_view node) const {
    const auto* s = find_state(node);
    return s && s->ruleset ? &*s->ruleset : nullptr;
}

Frame Medium::make_frame(std::string_view src, std::string_view dst, Protocol protocol,
                         std::uint16_t port, std::vector<std::uint8_t> payload) const {
    const auto& from = registry_.get(src);
    Frame f;
    f.src_mac = from.wireless_mac;
    f.src_ip = from.wireless_ip;
    if (dst.empty()) {
        f.dst_mac = MacAddress::broadcast();
        f.dst_ip = Ipv4Address(0xffffffffu);
    } else {
        const auto& to = registry_.get(dst);
        f.dst_mac = to.wireless_mac;
        f.dst_ip = to.wireless_ip;
    }
    f.protocol = protocol;
    f.port = port;
    f.payload = std::move(payload);
    return f;
}

std::uint64_t Medium::send(std::string_view src, Frame frame, DeliveryObserver observer) {
    const auto& sender = registry_.get(src);
    if (frame.src_mac != sender.wireless_mac) {
        throw Error(Errc::MacSpoof, "frame source " + frame.src_mac.to_string() +
                                        " is not the wireless MAC of '" + sender.name + "'");
    }
    frame.frame_id = next_frame_id_++;
    frame.send_time = now();
    auto& sender_state = state(sender.name);
    auto& counters = sender_state.counters.of(frame.protocol);
    const auto id = std::to_string(frame.frame_id);

    for (const auto& overlay : sender_state.overlays) {
        if (overlay.drops(true, frame.protocol, now())) {
            ++counters.blocked_out;
            record("DROP_ADVERSARY", {{"frame", id}, {"node", sender.name}, {"from", sender.name},
                                      {"dir", "out"}, {"attack", std::to_string(overlay.attack_id)}});
            if (observer) observer(frame, {sender.name, Fate::BlockedAtSender, now()});
            return frame.frame_id;
        }
    }

    ++counters.sent;
    std::vector<std::pair<std::string, std::string>> fields{
        {"frame", id},
        {"src", sender.name},
        {"dst", frame.dst_mac.to_string()},
        {"proto", std::string(to_string(frame.protocol))},
        {"port", std::to_string(frame.port)},
        {"len", std::to_string(frame.payload.size())}};
    if (!frame.tag.empty()) fields.emplace_back("tag", frame.tag);
    record("TX", std::move(fields));

    auto shared = std::make_shared<const Frame>(std::move(frame));
    auto shared_observer =
        observer ? std::make_shared<DeliveryObserver>(std::move(observer)) : nullptr;
    const VirtualTime at = now() + link_latency_;
    for (const auto& hearer : registry_.nodes()) {
        if (hearer.name == sender.name) continue;
        queue_.schedule(at, [this, shared, sender_name = sender.name, hearer_name = hearer.name,
                             shared_observer] {
            arrive(shared, sender_name, hearer_name, shared_observer);
        });
    }
    return shared->frame_id;
}

void Medium::arrive(const std::shared_ptr<const Frame>& frame, const std::string& sender,
                    const std::string& hearer, const std::shared_ptr<DeliveryObserver>& observer) {
    auto index = registry_.index_of(hearer);
    if (!index) return;  // node left the registry while the frame was in flight
    const auto& record_of_hearer = registry_.at(*index);
    auto& s = state(hearer);
    auto& counters = s.counters.of(frame->protocol);

    Fate fate = Fate::Received;
    std::optional<std::uint64_t> attack;
    for (const auto& overlay : s.overlays) {
        if (overlay.drops(false, frame->protocol, now())) {
            fate = Fate::DroppedAdversary;
            attack = overlay.attack_id;
            break;
        }
    }
    if (fate == Fate::Received && s.ruleset && !s.ruleset->accepts(frame->src_mac)) {
        fate = Fate::DroppedFilter;
    }
    if (fate == Fate::Received && !frame->dst_mac.is_broadcast() &&
        frame->dst_mac != record_of_hearer.wireless_mac) {
        fate = Fate::Overheard;
    }

    switch (fate) {
    case Fate::Received: ++counters.received; break;
    case Fate::Overheard: ++counters.ignored; break;
    case Fate::DroppedFilter: ++counters.dropped_filter; break;
    case Fate::DroppedAdversary: ++counters.dropped_adversary; break;
    case Fate::BlockedAtSender: break;
    }
    std::vector<std::pair<std::string, std::string>> fields{
        {"frame", std::to_string(frame->frame_id)}, {"node", hearer}, {"from", sender}};
    if (attack) {
        fields.emplace_back("dir", "in");
        fields.emplace_back("attack", std::to_string(*attack));
    }
    record(std::string(to_string(fate)), std::move(fields));
    if (observer) (*observer)(*frame, {hearer, fate, now()});
}

std::vector<std::string> Medium::transmit(std::string_view src, Frame frame) {
    std::vector<std::string> received;
    send(src, std::move(frame), [&received](const Frame&, const Delivery& d) {
        if (d.fate == Fate::Received) received.push_back(d.node);
    });
    advance(now() + link_latency_);
    return received;
}

void Medium::add_overlay(std::string_view node, Overlay overlay) {
    state(registry_.get(node).name).overlays.push_back(overlay);
}

void Medium::remove_overlays(std::uint64_t attack_id) {
    for (auto& [name, s] : nodes_) {
        std::erase_if(s.overlays, [&](const Overlay& o) { return o.attack_id == attack_id; });
    }
}

std::vector<Overlay> Medium::overlays(std::string_view node) const {
    const auto* s = find_state(node);
    return s ? s->overlays : std::vector<Overlay>{};
}

NodeCounters Medium::counters(std::string_view node) const {
    const auto* s = find_state(node);
    return s ? s->counters : NodeCounters{};
}

void Medium::forget_node(std::string_view node) {
    auto it = nodes_.find(node);
    if (it != nodes_.end()) nodes_.erase(it);
}

void Medium::record(std::string kind, std::vector<std::pair<std::string, std::string>> fields) {
    trace_.push_back({now(), std::move(kind), std::move(fields)});
    for (const auto& listener : listeners_) listener(trace_.back());
}

std::string Medium::trace_text() const {
    std::string out;
    for (const auto& e : trace_) {
        out += e.to_line();
        out += '\n';
    }
    return out;
}

}  // namespace manetlab
