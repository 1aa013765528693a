#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manetlab/medium.hpp"
#include "manetlab/registry.hpp"

namespace manetlab {

struct FlowSpec {
    std::string src;
    std::string dst;
    Protocol protocol = Protocol::UDP;
    std::uint16_t port = 0;  // must be 0 for ICMP
    std::uint32_t delay_ms = 1000;
    std::uint32_t payload_len = 64;
    std::optional<std::uint64_t> count;  // unset: runs until stopped
};

struct FlowStats {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t dropped_filter = 0;
    std::uint64_t dropped_adversary = 0;
    std::optional<VirtualTime> first_send;
    std::optional<VirtualTime> last_send;

    std::uint64_t in_flight() const {
        return sent - received - dropped_filter - dropped_adversary;
    }
};

// Constant-rate unicast flows. A flow sends at t0, t0 + delay, t0 + 2*delay, ...
// where t0 is the virtual time start_flow() was called.
class TrafficGenerator {
public:
    TrafficGenerator(Medium& medium, const Registry& registry)
        : medium_(medium), registry_(registry) {}

    TrafficGenerator(const TrafficGenerator&) = delete;
    TrafficGenerator& operator=(const TrafficGenerator&) = delete;

    // Throws UnknownNode, InvalidSpec.
    std::uint64_t start_flow(const FlowSpec& spec);
    // Cancels remaining sends and forgets the flow. Throws UnknownFlow.
    FlowStats stop_flow(std::uint64_t flow_id);
    // Throws UnknownFlow.
    FlowStats stats(std::uint64_t flow_id) const;
    const FlowSpec& spec(std::uint64_t flow_id) const;
    std::vector<std::uint64_t> flows() const;
    bool finished(std::uint64_t flow_id) const;
    // Stops every flow touching `node`; returns how many were stopped.
    std::size_t stop_touching(const std::string& node);

private:
    struct Flow {
        FlowSpec spec;
        FlowStats stats;
        std::uint64_t next_seq = 0;
        std::optional<EventQueue::EventId> next_event;
    };

    void send_next(std::uint64_t flow_id);
    const Flow& find(std::uint64_t flow_id) const;

    Medium& medium_;
    const Registry& registry_;
    std::map<std::uint64_t, Flow> flows_;
    std::uint64_t next_id_ = 1;
};

}  // namespace manetlab
