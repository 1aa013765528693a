#include "manetlab/registry.hpp"

#include <algorithm>

#include "manetlab/error.hpp"
#include "text.hpp"

namespace manetlab {

namespace {

template <typename T>
T parse_address(std::string_view text, std::string_view what) {
    auto parsed = T::parse(text);
    if (!parsed) {
        throw Error(Errc::InvalidFormat,
                    "malformed " + std::string(what) + " '" + std::string(text) + "'");
    }
    return *parsed;
}

}  // namespace

NodeRecord NodeRecord::from_strings(std::string name, std::string_view wired_ip,
                                    std::string_view wired_mac, std::string_view wireless_ip,
                                    std::string_view wireless_mac) {
    NodeRecord record;
    record.name = std::move(name);
    record.wired_ip = parse_address<Ipv4Address>(wired_ip, "wired IP");
    record.wired_mac = parse_address<MacAddress>(wired_mac, "wired MAC");
    record.wireless_ip = parse_address<Ipv4Address>(wireless_ip, "wireless IP");
    record.wireless_mac = parse_address<MacAddress>(wireless_mac, "wireless MAC");
    return record;
}

void Registry::validate(const NodeRecord& record) const {
    if (!text::is_identifier(record.name)) {
        throw Error(Errc::InvalidFormat, "node name '" + record.name +
                                             "' must match [A-Za-z0-9_-]{1,32}");
    }
    if (record.wired_mac == record.wireless_mac) {
        throw Error(Errc::DuplicateAddress,
                    "node '" + record.name + "' uses the same MAC on both interfaces");
    }
    if (record.wired_ip == record.wireless_ip) {
        throw Error(Errc::DuplicateAddress,
                    "node '" + record.name + "' uses the same IP on both interfaces");
    }
    for (const auto& other : nodes_) {
        if (other.name == record.name) {
            throw Error(Errc::DuplicateName, "node '" + record.name + "' already registered");
        }
        for (auto mac : {record.wired_mac, record.wireless_mac}) {
            if (mac == other.wired_mac || mac == other.wireless_mac) {
                throw Error(Errc::DuplicateAddress,
                            "MAC " + mac.to_string() + " already used by '" + other.name + "'");
            }
        }
        for (auto ip : {record.wired_ip, record.wireless_ip}) {
            if (ip == other.wired_ip || ip == other.wireless_ip) {
                throw Error(Errc::DuplicateAddress,
                            "IP " + ip.to_string() + " already used by '" + other.name + "'");
            }
        }
    }
}

std::size_t Registry::add_node(NodeRecord record) {
    validate(record);
    std::size_t index = nodes_.size();
    nodes_.push_back(std::move(record));
    ++revision_;
    publish({RegistryEvent::Kind::Added, nodes_.back().name, {}});
    if (nodes_.size() > kSoftLimit) {
        publish({RegistryEvent::Kind::SoftLimitExceeded, nodes_.back().name,
                 "soft limit " + std::to_string(kSoftLimit) + " exceeded"});
    }
    return index;
}

std::size_t Registry::remove_node(std::string_view name) {
    auto it = std::find_if(nodes_.begin(), nodes_.end(),
                           [&](const NodeRecord& n) { return n.name == name; });
    if (it == nodes_.end()) {
        throw Error(Errc::UnknownNode, "no node named '" + std::string(name) + "'");
    }
    if (in_use_.contains(name)) {
        throw Error(Errc::NodeInUse,
                    "node '" + std::string(name) + "' is part of the applied topology");
    }
    std::string removed = it->name;
    nodes_.erase(it);
    ++revision_;
    publish({RegistryEvent::Kind::Removed, removed, {}});
    return nodes_.size();
}

std::optional<std::size_t> Registry::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].name == name) return i;
    }
    return std::nullopt;
}

const NodeRecord& Registry::get(std::string_view name) const {
    auto index = index_of(name);
    if (!index) throw Error(Errc::UnknownNode, "no node named '" + std::string(name) + "'");
    return nodes_[*index];
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.name);
    return out;
}

void Registry::publish(const RegistryEvent& event) const {
    for (const auto& listener : listeners_) listener(event);
}

Registry Registry::load(std::string_view content) {
    Registry registry;
    auto lines = text::split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::size_t line_no = i + 1;
        auto line = text::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        auto fields = text::split_ws(line);
        if (fields.size() != 5) {
            throw ParseError(line_no, "expected 5 fields, found " + std::to_string(fields.size()));
        }
        try {
            registry.add_node(NodeRecord::from_strings(std::string(fields[0]), fields[1],
                                                       fields[2], fields[3], fields[4]));
        } catch (const Error& e) {
            throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return registry;
}

std::string Registry::save() const {
    std::string out;
    for (const auto& n : nodes_) {
        out += n.name;
        out += ' ';
        out += n.wired_ip.to_string();
        out += ' ';
        out += n.wired_mac.to_string();
        out += ' ';
        out += n.wireless_ip.to_string();
        out += ' ';
        out += n.wireless_mac.to_string();
        out += '\n';
    }
    return out;
}

}  // namespace manetlab
