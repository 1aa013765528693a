#include "manetlab/probe.hpp"

#include <cstdio>
#include <memory>

#include "manetlab/error.hpp"

namespace manetlab {

namespace {

constexpr std::uint8_t kEchoRequest = 8;
constexpr std::uint8_t kEchoReply = 0;
constexpr std::size_t kPingDataBytes = 56;

std::vector<std::uint8_t> echo_payload(std::uint8_t type, std::uint32_t seq) {
    std::vector<std::uint8_t> p(8 + kPingDataBytes, 0);
    p[0] = type;
    p[6] = static_cast<std::uint8_t>(seq >> 8);
    p[7] = static_cast<std::uint8_t>(seq);
    return p;
}

std::string millis(VirtualTime us) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(us) / kMillisecond);
    return buf;
}

}  // namespace

std::string ProbeReport::summary_line() const {
    return std::to_string(transmitted) + " packets transmitted, " + std::to_string(received) +
           " received, " + std::to_string(loss_pct) + "% packet loss";
}

std::string ProbeReport::to_text() const {
    std::string out = "PING " + dst + " (" + dst_ip + ") from " + src + ": " +
                      std::to_string(kPingDataBytes) + " data bytes\n";
    for (const auto& o : outcomes) {
        if (o.reply_received) {
            out += std::to_string(8 + kPingDataBytes) + " bytes from " + dst_ip +
                   ": icmp_seq=" + std::to_string(o.icmp_seq) + " time=" + millis(*o.rtt) +
                   " ms\n";
        } else {
            out += "Request timeout for icmp_seq " + std::to_string(o.icmp_seq) + "\n";
        }
    }
    out += "\n--- " + dst + " ping statistics ---\n";
    out += summary_line() + "\n";
    return out;
}

ProbeReport Prober::ping(const std::string& src, const std::string& dst, std::uint32_t count,
                         std::uint32_t timeout_ms) {
    const auto& from = registry_.get(src);
    const auto& to = registry_.get(dst);
    if (count < 1) throw Error(Errc::InvalidSpec, "ping count must be at least 1");
    if (from.name == to.name) throw Error(Errc::InvalidSpec, "cannot ping a node from itself");

    auto report = std::make_shared<ProbeReport>();
    report->src = from.name;
    report->dst = to.name;
    report->dst_ip = to.wireless_ip.to_string();
    report->transmitted = count;
    report->outcomes.resize(count);

    const VirtualTime t0 = medium_.now();
    const VirtualTime timeout = static_cast<VirtualTime>(timeout_ms) * kMillisecond;
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::uint32_t seq = k + 1;
        report->outcomes[k].icmp_seq = seq;
        medium_.schedule(t0 + static_cast<VirtualTime>(k) * kPingSpacing, [this, report, k, seq,
                                                                            src = from.name,
                                                                            dst = to.name,
                                                                            timeout] {
            if (!registry_.index_of(src) || !registry_.index_of(dst)) return;
            Frame request = medium_.make_frame(src, dst, Protocol::ICMP, 0,
                                               echo_payload(kEchoRequest, seq));
            request.tag = "ping=" + std::to_string(seq);
            medium_.send(src, std::move(request), [this, report, k, seq, src, dst, timeout](
                                                      const Frame& req, const Delivery& d) {
                if (d.node != dst || d.fate != Fate::Received) return;
                report->outcomes[k].request_delivered = true;
                const VirtualTime sent_at = req.send_time;
                Frame reply = medium_.make_frame(dst, src, Protocol::ICMP, 0,
                                                 echo_payload(kEchoReply, seq));
                reply.tag = "pong=" + std::to_string(seq);
                medium_.send(dst, std::move(reply), [report, k, src, sent_at, timeout](
                                                        const Frame&, const Delivery& r) {
                    if (r.node != src || r.fate != Fate::Received) return;
                    if (r.time - sent_at > timeout) return;
                    report->outcomes[k].reply_received = true;
                    report->outcomes[k].rtt = r.time - sent_at;
                });
            });
        });
    }
    medium_.advance(t0 + static_cast<VirtualTime>(count - 1) * kPingSpacing + timeout);

    for (const auto& o : report->outcomes) report->received += o.reply_received ? 1 : 0;
    report->loss_pct = 100 * (report->transmitted - report->received) / report->transmitted;
    return *report;
}

}  // namespace manetlab
