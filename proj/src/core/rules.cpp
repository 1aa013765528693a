#include "manetlab/rules.hpp"

#include <algorithm>

#include "manetlab/error.hpp"
#include "text.hpp"

namespace manetlab {

bool Ruleset::accepts(const MacAddress& source) const {
    for (const auto& rule : rules) {
        if (rule.action == FilterRule::Action::DropAllWireless) return false;
        if (rule.mac == source) return true;
    }
    return true;
}

std::vector<Ruleset> compile(const Topology& t, const Registry& reg, bool force) {
    const auto& m = t.adjacency;
    if (m.size() != reg.size()) {
        throw Error(Errc::DimensionMismatch, "topology covers " + std::to_string(m.size()) +
                                                 " nodes but the registry holds " +
                                                 std::to_string(reg.size()));
    }
    validate_matrix(m);
    if (t.status != TopologyStatus::Accepted100 && !force) {
        throw Error(Errc::RejectedTopology,
                    "topology " + std::to_string(t.seq) + " is not accepted; force required");
    }
    std::vector<Ruleset> out;
    out.reserve(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        Ruleset rs{reg.at(i).name, {}, t.seq};
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (m.linked(i, j)) rs.rules.push_back(FilterRule::accept(reg.at(j).wireless_mac));
        }
        rs.rules.push_back(FilterRule::drop_all());
        out.push_back(std::move(rs));
    }
    return out;
}

std::string emit_script(const Ruleset& rs, std::string_view wireless_ifname) {
    const std::string ifname(wireless_ifname);
    std::string out = "iptables -F INPUT\n";
    out += "iptables -A INPUT -i " + std::string(kWiredInterface) + " -j ACCEPT\n";
    for (const auto& rule : rs.rules) {
        if (rule.action == FilterRule::Action::AcceptSourceMac) {
            out += "iptables -A INPUT -i " + ifname + " -m mac --mac-source " +
                   rule.mac->to_string() + " -j ACCEPT\n";
        } else {
            out += "iptables -A INPUT -i " + ifname + " -j DROP\n";
        }
    }
    return out;
}

ParsedScript parse_script(std::string_view script) {
    ParsedScript parsed;
    auto lines = text::split_lines(script);
    if (lines.size() < 2 || lines[0] != "iptables -F INPUT" ||
        lines[1] != "iptables -A INPUT -i " + std::string(kWiredInterface) + " -j ACCEPT") {
        throw ParseError(1, "script must start with the flush and wired accept lines");
    }
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        auto tok = text::split_ws(lines[i]);
        if (tok.size() < 6 || tok[0] != "iptables" || tok[1] != "-A" || tok[2] != "INPUT" ||
            tok[3] != "-i") {
            throw ParseError(line_no, "unrecognised rule");
        }
        if (parsed.wireless_ifname.empty()) {
            parsed.wireless_ifname = std::string(tok[4]);
        } else if (tok[4] != parsed.wireless_ifname) {
            throw ParseError(line_no, "mixed wireless interfaces");
        }
        if (tok.size() == 7 && tok[5] == "-j" && tok[6] == "DROP") {
            parsed.rules.push_back(FilterRule::drop_all());
        } else if (tok.size() == 11 && tok[5] == "-m" && tok[6] == "mac" &&
                   tok[7] == "--mac-source" && tok[9] == "-j" && tok[10] == "ACCEPT") {
            auto mac = MacAddress::parse(tok[8]);
            if (!mac) throw ParseError(line_no, "bad MAC '" + std::string(tok[8]) + "'");
            parsed.rules.push_back(FilterRule::accept(*mac));
        } else {
            throw ParseError(line_no, "unrecognised rule");
        }
    }
    return parsed;
}

std::vector<SymmetryViolation> symmetric_check(std::span<const Ruleset> rulesets,
                                               const Registry& reg) {
    std::vector<SymmetryViolation> out;
    const std::size_t n = std::min(rulesets.size(), reg.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            // Only explicit accept rules count; an unfiltered node proves nothing.
            auto lists = [](const Ruleset& rs, const MacAddress& mac) {
                for (const auto& r : rs.rules) {
                    if (r.action == FilterRule::Action::AcceptSourceMac && r.mac == mac) return true;
                }
                return false;
            };
            if (lists(rulesets[i], reg.at(j).wireless_mac) &&
                !lists(rulesets[j], reg.at(i).wireless_mac)) {
                out.push_back({rulesets[i].owner, rulesets[j].owner});
            }
        }
    }
    return out;
}

}  // namespace manetlab
