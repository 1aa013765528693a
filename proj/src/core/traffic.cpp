#include "manetlab/traffic.hpp"

#include "manetlab/error.hpp"

namespace manetlab {

std::uint64_t TrafficGenerator::start_flow(const FlowSpec& spec) {
    registry_.get(spec.src);
    registry_.get(spec.dst);
    if (spec.src == spec.dst) throw Error(Errc::InvalidSpec, "flow source and destination coincide");
    if (spec.protocol == Protocol::RAW) {
        throw Error(Errc::InvalidSpec, "flows carry TCP, UDP or ICMP");
    }
    if (spec.protocol == Protocol::ICMP && spec.port != 0) {
        throw Error(Errc::InvalidSpec, "ICMP flows have no port");
    }
    if (spec.delay_ms < 1) throw Error(Errc::InvalidSpec, "inter-packet delay must be >= 1 ms");
    if (spec.count && *spec.count == 0) throw Error(Errc::InvalidSpec, "count must be >= 1");

    const std::uint64_t id = next_id_++;
    Flow flow{spec, {}, 0, std::nullopt};
    flow.next_event = medium_.schedule(medium_.now(), [this, id] { send_next(id); });
    flows_.emplace(id, std::move(flow));
    return id;
}

void TrafficGenerator::send_next(std::uint64_t flow_id) {
    auto it = flows_.find(flow_id);
    if (it == flows_.end()) return;
    Flow& flow = it->second;
    flow.next_event.reset();
    const auto& spec = flow.spec;
    if (!registry_.index_of(spec.src) || !registry_.index_of(spec.dst)) return;

    std::vector<std::uint8_t> payload(spec.payload_len, 0);
    // First bytes carry the flow sequence number, big endian.
    for (std::size_t b = 0; b < 8 && b < payload.size(); ++b) {
        payload[b] = static_cast<std::uint8_t>(flow.next_seq >> (56 - 8 * b));
    }
    Frame frame = medium_.make_frame(spec.src, spec.dst, spec.protocol, spec.port,
                                     std::move(payload));
    frame.tag = "flow=" + std::to_string(flow_id);

    const VirtualTime now = medium_.now();
    ++flow.stats.sent;
    if (!flow.stats.first_send) flow.stats.first_send = now;
    flow.stats.last_send = now;
    ++flow.next_seq;

    const std::string dst = spec.dst;
    medium_.send(spec.src, std::move(frame), [this, flow_id, dst](const Frame&, const Delivery& d) {
        auto f = flows_.find(flow_id);
        if (f == flows_.end()) return;
        auto& stats = f->second.stats;
        if (d.fate == Fate::BlockedAtSender) {
            ++stats.dropped_adversary;
            return;
        }
        if (d.node != dst) return;
        switch (d.fate) {
        case Fate::Received: ++stats.received; break;
        case Fate::DroppedFilter: ++stats.dropped_filter; break;
        case Fate::DroppedAdversary: ++stats.dropped_adversary; break;
        default: break;
        }
    });

    if (!flow.spec.count || flow.next_seq < *flow.spec.count) {
        const VirtualTime at = now + static_cast<VirtualTime>(spec.delay_ms) * kMillisecond;
        flow.next_event = medium_.schedule(at, [this, flow_id] { send_next(flow_id); });
    }
}

const TrafficGenerator::Flow& TrafficGenerator::find(std::uint64_t flow_id) const {
    auto it = flows_.find(flow_id);
    if (it == flows_.end()) {
        throw Error(Errc::UnknownFlow, "no flow with id " + std::to_string(flow_id));
    }
    return it->second;
}

FlowStats TrafficGenerator::stop_flow(std::uint64_t flow_id) {
    const Flow& flow = find(flow_id);
    if (flow.next_event) medium_.cancel(*flow.next_event);
    FlowStats stats = flow.stats;
    flows_.erase(flow_id);
    return stats;
}

FlowStats TrafficGenerator::stats(std::uint64_t flow_id) const { return find(flow_id).stats; }

const FlowSpec& TrafficGenerator::spec(std::uint64_t flow_id) const { return find(flow_id).spec; }

std::vector<std::uint64_t> TrafficGenerator::flows() const {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, f] : flows_) ids.push_back(id);
    return ids;
}

bool TrafficGenerator::finished(std::uint64_t flow_id) const {
    const Flow& f = find(flow_id);
    return !f.next_event && f.stats.in_flight() == 0;
}

std::size_t TrafficGenerator::stop_touching(const std::string& node) {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, f] : flows_) {
        if (f.spec.src == node || f.spec.dst == node) ids.push_back(id);
    }
    for (auto id : ids) stop_flow(id);
    return ids.size();
}

}  // namespace manetlab
