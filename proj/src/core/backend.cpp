#include "manetlab/backend.hpp"

#include <chrono>
#include <thread>

#include "text.hpp"

namespace manetlab {

std::string format_counters(const NodeCounters& counters) {
    std::string out;
    for (auto p : {Protocol::TCP, Protocol::UDP, Protocol::ICMP, Protocol::RAW}) {
        const auto& c = counters.of(p);
        out += std::string(to_string(p)) + " sent=" + std::to_string(c.sent) +
               " received=" + std::to_string(c.received) +
               " dropped_filter=" + std::to_string(c.dropped_filter) +
               " dropped_adversary=" + std::to_string(c.dropped_adversary) +
               " ignored=" + std::to_string(c.ignored) +
               " blocked_out=" + std::to_string(c.blocked_out) + "\n";
    }
    return out;
}

ExecResult SimulatedBackend::exec(const NodeRecord& node, std::string_view command,
                                  const Medium& medium) {
    auto trimmed = text::trim(command);
    auto words = text::split_ws(trimmed);
    if (words.empty()) return {127, "sh: empty command\n"};
    const auto verb = words[0];
    if (verb == "echo") {
        auto rest = text::trim(trimmed.substr(4));
        return {0, std::string(rest) + "\n"};
    }
    if (verb == "ruleset-dump" && words.size() == 1) {
        const Ruleset* rs = medium.active_ruleset(node.name);
        return {0, rs ? emit_script(*rs, wireless_ifname_) : std::string()};
    }
    if (verb == "counters-dump" && words.size() == 1) {
        return {0, format_counters(medium.counters(node.name))};
    }
    if (verb == "sleep" && words.size() == 2) {
        auto ms = text::parse_uint<std::uint32_t>(words[1]);
        if (!ms || *ms > 60000) return {2, "sleep: invalid time interval\n"};
        std::this_thread::sleep_for(std::chrono::milliseconds(*ms));
        return {0, {}};
    }
    if (verb == "true" && words.size() == 1) return {0, {}};
    if (verb == "false" && words.size() == 1) return {1, {}};
    return {127, "sh: " + std::string(verb) + ": command not found\n"};
}

}  // namespace manetlab
