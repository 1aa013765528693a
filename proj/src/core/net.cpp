#include "manetlab/net.hpp"

#include <cctype>
#include <cstdio>

#include "text.hpp"

namespace manetlab {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    Bytes bytes{};
    for (std::size_t i = 0; i < 6; ++i) {
        std::size_t pos = i * 3;
        int hi = hex_value(text[pos]);
        int lo = hex_value(text[pos + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        if (i < 5 && text[pos + 2] != ':') return std::nullopt;
        bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return MacAddress(bytes);
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", bytes_[0], bytes_[1],
                  bytes_[2], bytes_[3], bytes_[4], bytes_[5]);
    return buf;
}

std::optional<Ipv4Address> Ipv4Address::parse(std::string_view text) {
    std::uint32_t value = 0;
    int octets = 0;
    std::size_t start = 0;
    while (octets < 4) {
        auto dot = text.find('.', start);
        auto part = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
        if (part.empty() || part.size() > 3) return std::nullopt;
        if (part.size() > 1 && part.front() == '0') return std::nullopt;
        auto octet = text::parse_uint<unsigned>(part);
        if (!octet || *octet > 255) return std::nullopt;
        value = (value << 8) | *octet;
        ++octets;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
        if (octets == 4) return std::nullopt;  // trailing dot or fifth octet
    }
    if (octets != 4) return std::nullopt;
    return Ipv4Address(value);
}

std::string Ipv4Address::to_string() const {
    return std::to_string((value_ >> 24) & 0xff) + '.' + std::to_string((value_ >> 16) & 0xff) +
           '.' + std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
}

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
    case Protocol::TCP: return "TCP";
    case Protocol::UDP: return "UDP";
    case Protocol::ICMP: return "ICMP";
    case Protocol::RAW: return "RAW";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
    std::string upper;
    for (char c : text) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (upper == "TCP") return Protocol::TCP;
    if (upper == "UDP") return Protocol::UDP;
    if (upper == "ICMP") return Protocol::ICMP;
    if (upper == "RAW") return Protocol::RAW;
    return std::nullopt;
}

}  // namespace manetlab
