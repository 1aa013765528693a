#include <random>
#include <set>

#include "doctest.h"
#include "check.hpp"
#include "fixtures.hpp"
#include "manetlab/error.hpp"
#include "manetlab/net.hpp"
#include "manetlab/registry.hpp"

using namespace manetlab;
using manetlab::testing::code_of;
using manetlab::testing::node;

TEST_CASE("mac and ipv4 text forms") {
    auto mac = MacAddress::parse("AA:bb:0C:dd:EE:0f");
    REQUIRE(mac);
    CHECK(mac->to_string() == "aa:bb:0c:dd:ee:0f");
    CHECK_FALSE(MacAddress::parse("aa:bb:cc:dd:ee"));
    CHECK_FALSE(MacAddress::parse("aa-bb-cc-dd-ee-ff"));
    CHECK_FALSE(MacAddress::parse("aa:bb:cc:dd:ee:fg"));
    CHECK(MacAddress::broadcast().is_broadcast());

    auto ip = Ipv4Address::parse("192.168.1.10");
    REQUIRE(ip);
    CHECK(ip->to_string() == "192.168.1.10");
    CHECK(ip->value() == 0xC0A8010Au);
    for (const char* bad : {"192.168.1", "192.168.1.1.1", "256.0.0.1", "01.2.3.4", "1..2.3",
                            "1.2.3.4.", "a.b.c.d", ""}) {
        CHECK_MESSAGE(!Ipv4Address::parse(bad), bad);
    }
}

TEST_CASE("add_node assigns indices in insertion order") {
    Registry r;
    auto sai = NodeRecord::from_strings("sai", "10.0.0.1", "aa:00:00:00:00:01", "192.168.1.1",
                                        "bb:00:00:00:00:01");
    CHECK(r.add_node(sai) == 0);
    CHECK(r.add_node(node("pritu", 2)) == 1);
    CHECK(r.index_of("pritu") == 1);
    CHECK(r.get("sai") == sai);
    CHECK_FALSE(r.index_of("Sai"));  // names are case-sensitive
}

TEST_CASE("add_node rejects duplicates and malformed records") {
    Registry r = testing::three_nodes();

    auto clash = node("other", 9);
    clash.wireless_mac = r.get("pritu").wireless_mac;
    CHECK(code_of([&] { r.add_node(clash); }) == Errc::DuplicateAddress);

    auto cross = node("other", 9);
    cross.wired_mac = r.get("sai").wireless_mac;
    CHECK(code_of([&] { r.add_node(cross); }) == Errc::DuplicateAddress);

    auto same_ip = node("other", 9);
    same_ip.wired_ip = r.get("nitin").wireless_ip;
    CHECK(code_of([&] { r.add_node(same_ip); }) == Errc::DuplicateAddress);

    auto self = node("other", 9);
    self.wired_mac = self.wireless_mac;
    CHECK(code_of([&] { r.add_node(self); }) == Errc::DuplicateAddress);

    CHECK(code_of([&] { r.add_node(node("sai", 9)); }) == Errc::DuplicateName);
    CHECK(code_of([&] { r.add_node(node("bad name", 9)); }) == Errc::InvalidFormat);
    CHECK(code_of([&] { r.add_node(node(std::string(33, 'x'), 9)); }) == Errc::InvalidFormat);
    CHECK(code_of([] {
              NodeRecord::from_strings("x", "10.0.0.300", "aa:00:00:00:00:01", "1.1.1.1",
                                       "bb:00:00:00:00:01");
          }) == Errc::InvalidFormat);
    CHECK(r.size() == 3);
}

TEST_CASE("soft limit of 150 warns but does not fail") {
    Registry r;
    std::vector<RegistryEvent> events;
    r.subscribe([&](const RegistryEvent& e) {
        if (e.kind == RegistryEvent::Kind::SoftLimitExceeded) events.push_back(e);
    });
    for (int i = 0; i < 150; ++i) r.add_node(node("n" + std::to_string(i), i));
    CHECK(events.empty());
    CHECK(r.add_node(node("n150", 150)) == 150);
    REQUIRE(events.size() == 1);
    CHECK(events[0].message == "soft limit 150 exceeded");
    CHECK(r.size() == 151);
}

TEST_CASE("remove_node shifts later indices") {
    Registry r = testing::three_nodes();
    CHECK(r.remove_node("sai") == 2);
    CHECK(r.index_of("pritu") == 0);
    CHECK(r.index_of("nitin") == 1);
    CHECK(code_of([&] { r.remove_node("ghost"); }) == Errc::UnknownNode);

    r.set_in_use({"nitin"});
    CHECK(code_of([&] { r.remove_node("nitin"); }) == Errc::NodeInUse);
    CHECK(r.size() == 2);
}

TEST_CASE("registry file load/save") {
    SUBCASE("empty file") {
        CHECK(Registry::load("").empty());
        CHECK(Registry::load("# comment only\n\n").empty());
    }
    SUBCASE("three nodes in file order, canonical round trip") {
        const std::string canonical =
            "sai 10.0.0.1 aa:00:00:00:00:01 192.168.1.1 bb:00:00:00:00:01\n"
            "pritu 10.0.0.2 aa:00:00:00:00:02 192.168.1.2 bb:00:00:00:00:02\n"
            "nitin 10.0.0.3 aa:00:00:00:00:03 192.168.1.3 bb:00:00:00:00:03\n";
        auto r = Registry::load(canonical);
        CHECK(r.names() == std::vector<std::string>{"sai", "pritu", "nitin"});
        CHECK(r.save() == canonical);
        CHECK(Registry::load(r.save()) == r);
    }
    SUBCASE("non-canonical spacing and case normalise") {
        auto r = Registry::load("# lab\n  sai\t10.0.0.1  AA:00:00:00:00:01 192.168.1.1 BB:00:00:00:00:01  \n");
        CHECK(r.save() == "sai 10.0.0.1 aa:00:00:00:00:01 192.168.1.1 bb:00:00:00:00:01\n");
    }
    SUBCASE("four fields is a ParseError with the line number") {
        try {
            Registry::load("sai 10.0.0.1 aa:00:00:00:00:01 192.168.1.1 bb:00:00:00:00:01\n"
                           "pritu 10.0.0.2 aa:00:00:00:00:02 192.168.1.2\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("invariant violations surface as on add_node") {
        CHECK(code_of([] {
                  Registry::load("a 10.0.0.1 aa:00:00:00:00:01 192.168.1.1 bb:00:00:00:00:01\n"
                                 "a 10.0.0.2 aa:00:00:00:00:02 192.168.1.2 bb:00:00:00:00:02\n");
              }) == Errc::DuplicateName);
    }
}

TEST_CASE("uniqueness invariants survive random add/remove sequences") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 50; ++round) {
        Registry r;
        for (int step = 0; step < 200; ++step) {
            int pick = static_cast<int>(rng() % 40);
            if (rng() % 3 == 0 && !r.empty()) {
                try {
                    r.remove_node("n" + std::to_string(pick));
                } catch (const Error& e) {
                    CHECK(e.code() == Errc::UnknownNode);
                }
            } else {
                // Addresses derive from a second random pick so collisions happen.
                auto rec = node("n" + std::to_string(pick), static_cast<int>(rng() % 40));
                try {
                    r.add_node(rec);
                } catch (const Error& e) {
                    CHECK((e.code() == Errc::DuplicateName || e.code() == Errc::DuplicateAddress));
                }
            }
            std::set<std::string> names;
            std::set<MacAddress> macs;
            std::set<Ipv4Address> ips;
            for (const auto& n : r.nodes()) {
                names.insert(n.name);
                macs.insert(n.wired_mac);
                macs.insert(n.wireless_mac);
                ips.insert(n.wired_ip);
                ips.insert(n.wireless_ip);
            }
            REQUIRE(names.size() == r.size());
            REQUIRE(macs.size() == 2 * r.size());
            REQUIRE(ips.size() == 2 * r.size());
            for (std::size_t i = 0; i < r.size(); ++i) REQUIRE(r.index_of(r.at(i).name) == i);
        }
        CHECK(Registry::load(r.save()) == r);
    }
}
