#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace manetlab {

// 48-bit IEEE MAC address. Canonical text form is lower-case, colon separated.
class MacAddress {
public:
    using Bytes = std::array<std::uint8_t, 6>;

    constexpr MacAddress() = default;
    constexpr explicit MacAddress(const Bytes& bytes) : bytes_(bytes) {}

    // Accepts "aa:bb:cc:dd:ee:ff" in either case; nothing else.
    static std::optional<MacAddress> parse(std::string_view text);
    static constexpr MacAddress broadcast() {
        return MacAddress(Bytes{0xff, 0xff, 0xff, 0xff, 0xff, 0xff});
    }

    const Bytes& bytes() const noexcept { return bytes_; }
    bool is_broadcast() const noexcept { return *this == broadcast(); }
    std::string to_string() const;

    friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;

private:
    Bytes bytes_{};
};

// IPv4 address. Canonical text form is dotted quad without leading zeros.
class Ipv4Address {
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}

    // Strict dotted quad: four decimal octets 0-255, no leading zeros, no padding.
    static std::optional<Ipv4Address> parse(std::string_view text);

    std::uint32_t value() const noexcept { return value_; }
    std::string to_string() const;

    friend constexpr auto operator<=>(const Ipv4Address&, const Ipv4Address&) = default;

private:
    std::uint32_t value_ = 0;
};

enum class Protocol : std::uint8_t { TCP = 0, UDP = 1, ICMP = 2, RAW = 3 };

inline constexpr std::size_t kProtocolCount = 4;

std::string_view to_string(Protocol protocol);
// Case-insensitive.
std::optional<Protocol> parse_protocol(std::string_view text);

}  // namespace manetlab
