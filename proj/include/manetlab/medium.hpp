#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manetlab/net.hpp"
#include "manetlab/registry.hpp"
#include "manetlab/rules.hpp"

namespace manetlab {

// Virtual microseconds since the emulation started.
using VirtualTime = std::int64_t;

inline constexpr VirtualTime kMillisecond = 1000;
inline constexpr VirtualTime kSecond = 1000 * kMillisecond;
inline constexpr VirtualTime kDefaultLinkLatency = kMillisecond;

struct Frame {
    MacAddress src_mac;
    MacAddress dst_mac;
    Protocol protocol = Protocol::RAW;
    Ipv4Address src_ip;
    Ipv4Address dst_ip;
    std::uint16_t port = 0;
    std::vector<std::uint8_t> payload;
    VirtualTime send_time = 0;  // stamped by Medium::send
    std::uint64_t frame_id = 0;  // stamped by Medium::send
    std::string tag;             // free-form trace label, e.g. "flow=3"
};

// What happened to one frame at one hearer.
enum class Fate {
    Received,          // accepted and addressed to the hearer (or broadcast)
    Overheard,         // accepted but addressed elsewhere
    DroppedFilter,     // rejected by the hearer's ruleset
    DroppedAdversary,  // dropped by an attack overlay on the hearer
    BlockedAtSender,   // dropped by an attack overlay on the sender, never on air
};

std::string_view to_string(Fate fate);

struct Delivery {
    std::string node;  // hearer, or the sender for BlockedAtSender
    Fate fate;
    VirtualTime time;
};

using DeliveryObserver = std::function<void(const Frame&, const Delivery&)>;

enum class ProtocolMatch { TCP, UDP, ICMP, All };

std::string_view to_string(ProtocolMatch match);
std::optional<ProtocolMatch> parse_protocol_match(std::string_view text);
bool matches(ProtocolMatch match, Protocol protocol);

// Loss windows [start + k*(loss+normal), start + k*(loss+normal) + loss) for
// k in 0..cycles-1.
struct LossSchedule {
    VirtualTime start = 0;
    VirtualTime loss = 5 * kSecond;
    VirtualTime normal = 35 * kSecond;
    std::uint32_t cycles = 10;

    VirtualTime period() const { return loss + normal; }
    VirtualTime end() const { return start + period() * static_cast<VirtualTime>(cycles); }
    bool dropping_at(VirtualTime t) const;
};

// Adversarial effect layered on one node's frame handling.
struct Overlay {
    std::uint64_t attack_id = 0;
    bool incoming = false;
    bool outgoing = false;
    ProtocolMatch protocol = ProtocolMatch::All;
    std::optional<LossSchedule> schedule;  // unset: always active

    bool drops(bool outgoing_direction, Protocol p, VirtualTime t) const;
};

struct TraceEvent {
    VirtualTime time = 0;
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    // "<virtual_us> <KIND> key=value ..."
    std::string to_line() const;
    std::optional<std::string_view> field(std::string_view key) const;
};

struct TrafficCounters {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t dropped_filter = 0;
    std::uint64_t dropped_adversary = 0;
    std::uint64_t ignored = 0;
    std::uint64_t blocked_out = 0;

    TrafficCounters& operator+=(const TrafficCounters& o);
    friend bool operator==(const TrafficCounters&, const TrafficCounters&) = default;
};

struct NodeCounters {
    std::array<TrafficCounters, kProtocolCount> by_protocol{};

    const TrafficCounters& of(Protocol p) const { return by_protocol[static_cast<std::size_t>(p)]; }
    TrafficCounters& of(Protocol p) { return by_protocol[static_cast<std::size_t>(p)]; }
    TrafficCounters total() const;

    friend bool operator==(const NodeCounters&, const NodeCounters&) = default;
};

// Time-ordered callback queue. Ties are broken by scheduling order.
class EventQueue {
public:
    using EventId = std::uint64_t;

    VirtualTime now() const noexcept { return now_; }
    bool empty() const noexcept { return events_.empty(); }
    std::size_t pending() const noexcept { return events_.size(); }
    std::optional<VirtualTime> next_time() const;

    // `at` must not lie in the past.
    EventId schedule(VirtualTime at, std::function<void()> action);
    bool cancel(EventId id);
    // Runs every event with time <= until, then sets now to until.
    std::size_t advance(VirtualTime until);
    bool processing() const noexcept { return processing_; }

private:
    std::map<std::pair<VirtualTime, EventId>, std::function<void()>> events_;
    std::map<EventId, VirtualTime> index_;
    VirtualTime now_ = 0;
    EventId next_id_ = 1;
    bool processing_ = false;
};

// Shared wireless medium. Every transmitted frame reaches every other
// registered node after link_latency; each hearer then applies its attack
// overlays and its active ruleset. Nothing is forwarded beyond one hop.
class Medium {
public:
    using TraceListener = std::function<void(const TraceEvent&)>;

    explicit Medium(const Registry& registry, VirtualTime link_latency = kDefaultLinkLatency);

    Medium(const Medium&) = delete;
    Medium& operator=(const Medium&) = delete;

    VirtualTime now() const noexcept { return queue_.now(); }
    VirtualTime link_latency() const noexcept { return link_latency_; }
    const Registry& registry() const noexcept { return registry_; }

    EventQueue::EventId schedule(VirtualTime at, std::function<void()> action) {
        return queue_.schedule(at, std::move(action));
    }
    bool cancel(EventQueue::EventId id) { return queue_.cancel(id); }
    std::size_t advance(VirtualTime until);
    std::size_t pending_events() const noexcept { return queue_.pending(); }

    // Replaces every node's ruleset at the current instant. One ruleset per
    // registry node, in registry order. Extra fields go into the APPLY event.
    VirtualTime apply_rulesets(std::vector<Ruleset> rulesets,
                               std::vector<std::pair<std::string, std::string>> label = {});
    const Ruleset* active_ruleset(std::string_view node) const;
    std::uint64_t apply_count() const noexcept { return apply_count_; }

    // Unicast frame from src to dst (or broadcast when dst is empty), stamped
    // with both nodes' wireless addresses.
    Frame make_frame(std::string_view src, std::string_view dst, Protocol protocol,
                     std::uint16_t port, std::vector<std::uint8_t> payload = {}) const;

    // Puts a frame on the air at now(); returns its frame_id. The observer is
    // called once per hearer decision (or once with BlockedAtSender).
    // Throws UnknownNode, or MacSpoof when frame.src_mac is not src's wireless MAC.
    std::uint64_t send(std::string_view src, Frame frame, DeliveryObserver observer = {});
    // send() followed by advance(now + link_latency); returns the nodes that
    // received the frame. Must not be called from inside an event.
    std::vector<std::string> transmit(std::string_view src, Frame frame);

    void add_overlay(std::string_view node, Overlay overlay);
    // Removes every overlay of the given attack on any node.
    void remove_overlays(std::uint64_t attack_id);
    std::vector<Overlay> overlays(std::string_view node) const;

    NodeCounters counters(std::string_view node) const;
    // Drops per-node state of a node that left the registry.
    void forget_node(std::string_view node);

    void record(std::string kind, std::vector<std::pair<std::string, std::string>> fields = {});
    const std::vector<TraceEvent>& trace() const noexcept { return trace_; }
    std::string trace_text() const;
    void subscribe(TraceListener listener) { listeners_.push_back(std::move(listener)); }

private:
    struct NodeState {
        std::optional<Ruleset> ruleset;
        NodeCounters counters;
        std::vector<Overlay> overlays;
    };

    NodeState& state(std::string_view node);
    const NodeState* find_state(std::string_view node) const;
    void arrive(const std::shared_ptr<const Frame>& frame, const std::string& sender,
                const std::string& hearer, const std::shared_ptr<DeliveryObserver>& observer);

    const Registry& registry_;
    VirtualTime link_latency_;
    EventQueue queue_;
    std::map<std::string, NodeState, std::less<>> nodes_;
    std::vector<TraceEvent> trace_;
    std::vector<TraceListener> listeners_;
    std::uint64_t next_frame_id_ = 1;
    std::uint64_t apply_count_ = 0;
};

}  // namespace manetlab
