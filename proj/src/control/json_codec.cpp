#include "manetlab/control/json_codec.hpp"

#include <algorithm>

namespace manetlab::control {

namespace {

[[noreturn]] void malformed(const std::string& message) {
    throw Error(Errc::MalformedRequest, message);
}

Json optional_time(const std::optional<VirtualTime>& t) { return t ? Json(*t) : Json(nullptr); }

}  // namespace

RequestBody::RequestBody(std::string_view text, std::span<const std::string_view> allowed) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        doc_ = nlohmann::json::object();
    } else {
        try {
            doc_ = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            malformed(std::string("body is not valid JSON: ") + e.what());
        }
    }
    if (!doc_.is_object()) malformed("body must be a JSON object");
    for (const auto& [key, value] : doc_.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            malformed("unknown field '" + key + "'");
        }
    }
}

bool RequestBody::has(std::string_view key) const {
    auto it = doc_.find(key);
    return it != doc_.end() && !it->is_null();
}

const nlohmann::json& RequestBody::at(std::string_view key) const {
    auto it = doc_.find(key);
    if (it == doc_.end() || it->is_null()) malformed("missing field '" + std::string(key) + "'");
    return *it;
}

std::string RequestBody::str(std::string_view key) const {
    const auto& v = at(key);
    if (!v.is_string()) malformed("field '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

std::optional<std::string> RequestBody::opt_str(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return str(key);
}

std::uint64_t RequestBody::uint(std::string_view key, std::uint64_t max) const {
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        malformed("field '" + std::string(key) + "' must be a non-negative integer");
    }
    auto value = v.get<std::uint64_t>();
    if (value > max) {
        malformed("field '" + std::string(key) + "' exceeds " + std::to_string(max));
    }
    return value;
}

std::optional<std::uint64_t> RequestBody::opt_uint(std::string_view key, std::uint64_t max) const {
    if (!has(key)) return std::nullopt;
    return uint(key, max);
}

bool RequestBody::flag(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) malformed("field '" + std::string(key) + "' must be true or false");
    return v.get<bool>();
}

Json to_json(const NodeRecord& n) {
    return Json{{"name", n.name},
                {"wired_ip", n.wired_ip.to_string()},
                {"wired_mac", n.wired_mac.to_string()},
                {"wireless_ip", n.wireless_ip.to_string()},
                {"wireless_mac", n.wireless_mac.to_string()}};
}

Json to_json(const Scenario& s) {
    Json status = Json::array();
    for (const auto& t : s.topologies) {
        status.push_back(static_cast<int>(t.status.value_or(TopologyStatus::Rejected99)));
    }
    return Json{{"name", s.name},
                {"nodes", s.params.n},
                {"topologies", s.size()},
                {"density", s.params.density_pct},
                {"maxdeg", s.params.max_degree},
                {"seed", s.params.seed},
                {"interval", s.interval_s},
                {"status", status},
                {"current", s.current ? Json(*s.current) : Json(nullptr)},
                {"stale", s.stale}};
}

Json to_json(const AttackSpec& spec) {
    Json j{{"name", spec.name},
           {"target", spec.target},
           {"protocol", std::string(to_string(spec.protocol))},
           {"kind", std::string(to_string(spec.kind))}};
    if (spec.kind == AttackKind::PeriodicLoss) {
        j["loss_s"] = spec.loss_s;
        j["normal_s"] = spec.normal_s;
        j["cycles"] = spec.cycles;
    }
    return j;
}

Json to_json(const ActiveAttack& a) {
    Json j{{"id", a.id}};
    const Json spec = to_json(a.spec);
    for (const auto& [k, v] : spec.items()) j[k] = v;
    j["launched_at_us"] = a.launched_at;
    j["expires_at_us"] = optional_time(a.expires_at);
    return j;
}

Json to_json(const FlowSpec& spec) {
    return Json{{"src", spec.src},
                {"dst", spec.dst},
                {"protocol", std::string(to_string(spec.protocol))},
                {"port", spec.port},
                {"delay_ms", spec.delay_ms},
                {"payload_len", spec.payload_len},
                {"count", spec.count ? Json(*spec.count) : Json(nullptr)}};
}

Json to_json(const FlowStats& stats) {
    return Json{{"sent", stats.sent},
                {"received", stats.received},
                {"dropped_filter", stats.dropped_filter},
                {"dropped_adversary", stats.dropped_adversary},
                {"in_flight", stats.in_flight()},
                {"first_send_us", optional_time(stats.first_send)},
                {"last_send_us", optional_time(stats.last_send)}};
}

Json to_json(const ProbeReport& report) {
    return Json{{"src", report.src},
                {"dst", report.dst},
                {"dst_ip", report.dst_ip},
                {"transmitted", report.transmitted},
                {"received", report.received},
                {"loss_pct", report.loss_pct},
                {"summary", report.summary_line()},
                {"text", report.to_text()}};
}

Json to_json(const ExecResult& result) {
    return Json{{"exit_code", result.exit_code}, {"output", result.output}};
}

Json event_json(std::size_t seq, const TraceEvent& e) {
    Json fields = Json::object();
    for (const auto& [k, v] : e.fields) fields[k] = v;
    return Json{{"seq", seq}, {"time_us", e.time}, {"kind", e.kind}, {"fields", fields}};
}

Json error_json(const Error& e) {
    Json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) j["line"] = pe->line();
    if (const auto* cf = dynamic_cast<const CommandFailed*>(&e)) {
        j["exit_code"] = cf->exit_code();
        j["output"] = cf->output();
    }
    return j;
}

NodeRecord node_from(const RequestBody& body) {
    return NodeRecord::from_strings(body.str("name"), body.str("wired_ip"), body.str("wired_mac"),
                                    body.str("wireless_ip"), body.str("wireless_mac"));
}

AttackSpec attack_from(const RequestBody& body) {
    AttackSpec spec;
    spec.name = body.str("name");
    spec.target = body.str("target");
    if (auto p = body.opt_str("protocol")) {
        auto match = parse_protocol_match(*p);
        if (!match) malformed("unknown protocol '" + *p + "'");
        spec.protocol = *match;
    }
    if (auto k = body.opt_str("kind")) {
        auto kind = parse_attack_kind(*k);
        if (!kind) malformed("unknown attack kind '" + *k + "'");
        spec.kind = *kind;
    }
    const bool timing = body.has("loss_s") || body.has("normal_s") || body.has("cycles");
    if (timing && spec.kind != AttackKind::PeriodicLoss) {
        malformed("loss_s, normal_s and cycles only apply to periodic-loss");
    }
    spec.loss_s = static_cast<std::uint32_t>(body.opt_uint("loss_s", UINT32_MAX).value_or(spec.loss_s));
    spec.normal_s =
        static_cast<std::uint32_t>(body.opt_uint("normal_s", UINT32_MAX).value_or(spec.normal_s));
    spec.cycles = static_cast<std::uint32_t>(body.opt_uint("cycles", UINT32_MAX).value_or(spec.cycles));
    return spec;
}

FlowSpec flow_from(const RequestBody& body) {
    FlowSpec spec;
    spec.src = body.str("src");
    spec.dst = body.str("dst");
    if (auto p = body.opt_str("protocol")) {
        auto proto = parse_protocol(*p);
        if (!proto) malformed("unknown protocol '" + *p + "'");
        spec.protocol = *proto;
    }
    spec.port = static_cast<std::uint16_t>(body.opt_uint("port", UINT16_MAX).value_or(0));
    spec.delay_ms =
        static_cast<std::uint32_t>(body.opt_uint("delay_ms", UINT32_MAX).value_or(spec.delay_ms));
    spec.payload_len = static_cast<std::uint32_t>(
        body.opt_uint("payload_len", 65535).value_or(spec.payload_len));
    spec.count = body.opt_uint("count");
    return spec;
}

std::string dump(const Json& j) { return j.dump() + "\n"; }

}  // namespace manetlab::control
