#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manetlab/medium.hpp"
#include "manetlab/registry.hpp"

namespace manetlab {

inline constexpr VirtualTime kPingSpacing = kSecond;

struct ProbeOutcome {
    std::uint32_t icmp_seq = 0;  // 1-based, as printed by ping
    bool request_delivered = false;
    bool reply_received = false;
    std::optional<VirtualTime> rtt;
};

struct ProbeReport {
    std::string src;
    std::string dst;
    std::string dst_ip;
    std::uint32_t transmitted = 0;
    std::uint32_t received = 0;
    std::uint32_t loss_pct = 0;  // 100 * (transmitted - received) / transmitted, truncated
    std::vector<ProbeOutcome> outcomes;

    // "<transmitted> packets transmitted, <received> received, <loss>% packet loss"
    std::string summary_line() const;
    // ping-style transcript; the last line is summary_line().
    std::string to_text() const;
};

// ICMP echo over the medium. An echo counts as received only when the reply
// gets back to src within the timeout, so one-way blocking reads as loss.
class Prober {
public:
    Prober(Medium& medium, const Registry& registry) : medium_(medium), registry_(registry) {}

    // Sends `count` requests kPingSpacing apart starting now, then advances the
    // virtual clock past the last timeout. Throws UnknownNode, InvalidSpec.
    ProbeReport ping(const std::string& src, const std::string& dst, std::uint32_t count = 3,
                     std::uint32_t timeout_ms = 1000);

private:
    Medium& medium_;
    const Registry& registry_;
};

}  // namespace manetlab
