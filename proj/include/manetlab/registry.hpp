#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "manetlab/net.hpp"

namespace manetlab {

// Identity of one testbed member. The wired side is the control plane, the
// wireless side is the emulated data plane.
struct NodeRecord {
    std::string name;
    Ipv4Address wired_ip;
    MacAddress wired_mac;
    Ipv4Address wireless_ip;
    MacAddress wireless_mac;

    // Parses the textual fields; throws Error(InvalidFormat) on a malformed address.
    static NodeRecord from_strings(std::string name, std::string_view wired_ip,
                                   std::string_view wired_mac, std::string_view wireless_ip,
                                   std::string_view wireless_mac);

    friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct RegistryEvent {
    enum class Kind { Added, Removed, SoftLimitExceeded };
    Kind kind;
    std::string node;
    std::string message;
};

// Ordered set of nodes. A node's position in the list is its row/column index
// in every adjacency matrix and ruleset list; indices shift down on removal.
class Registry {
public:
    static constexpr std::size_t kSoftLimit = 150;

    using Listener = std::function<void(const RegistryEvent&)>;

    Registry() = default;

    // Returns the new node's index. Exceeding kSoftLimit still succeeds but
    // publishes a SoftLimitExceeded event.
    std::size_t add_node(NodeRecord record);
    // Returns the remaining node count.
    std::size_t remove_node(std::string_view name);

    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }
    const std::vector<NodeRecord>& nodes() const noexcept { return nodes_; }
    const NodeRecord& at(std::size_t index) const { return nodes_.at(index); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    // Throws Error(UnknownNode).
    const NodeRecord& get(std::string_view name) const;
    std::vector<std::string> names() const;

    // Nodes named here cannot be removed (NodeInUse) until the set is replaced.
    void set_in_use(std::set<std::string, std::less<>> names) { in_use_ = std::move(names); }
    const std::set<std::string, std::less<>>& in_use() const noexcept { return in_use_; }

    // Incremented by every successful mutation.
    std::uint64_t revision() const noexcept { return revision_; }

    void subscribe(Listener listener) { listeners_.push_back(std::move(listener)); }

    static Registry load(std::string_view text);
    std::string save() const;

    friend bool operator==(const Registry& a, const Registry& b) { return a.nodes_ == b.nodes_; }

private:
    void validate(const NodeRecord& record) const;
    void publish(const RegistryEvent& event) const;

    std::vector<NodeRecord> nodes_;
    std::set<std::string, std::less<>> in_use_;
    std::vector<Listener> listeners_;
    std::uint64_t revision_ = 0;
};

}  // namespace manetlab
